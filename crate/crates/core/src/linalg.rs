//! Dense complex linear algebra on square matrices.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Tensor products follow the
//! convention `(A ⊗ B)[(i*db + k, j*db + l)] = A[(i, j)] * B[(k, l)]`, so the
//! first factor is the most significant index.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Relative tolerance on `||M - M†|| / ||M||` accepted by the eigensolver.
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_DIM: usize = 1 << 16;
/// Gram eigenvalues (relative) below this mark a basis element as dependent.
pub const DEPENDENCE_TOL: f64 = 1e-10;

/// Largest matrix dimension any operation will allocate.
pub fn max_dim() -> usize {
    std::env::var("PASSIVITY_MAX_DIM")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_DIM)
}

pub fn check_dim(dim: usize) -> Result<()> {
    let limit = max_dim();
    if dim > limit {
        return Err(Error::SizeLimit { dim, limit });
    }
    Ok(())
}

fn checked_pow(d: usize, n: usize) -> Result<usize> {
    let mut acc: usize = 1;
    for _ in 0..n {
        acc = acc.checked_mul(d).ok_or(Error::SizeLimit {
            dim: usize::MAX,
            limit: max_dim(),
        })?;
    }
    check_dim(acc)?;
    Ok(acc)
}

pub fn copies_dim(d: usize, n: usize) -> Result<usize> {
    checked_pow(d, n)
}

pub fn square_dim(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!("{}x{} is not square", m.nrows(), m.ncols())));
    }
    Ok(m.nrows())
}

pub fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain("matrix has non-finite entries".into()))
    }
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn diag(values: &[f64]) -> ComplexMatrix {
    let d = values.len();
    ComplexMatrix::from_fn(d, d, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
}

pub fn from_real(rows: &[&[f64]]) -> ComplexMatrix {
    let d = rows.len();
    ComplexMatrix::from_fn(d, d, |i, j| C64::new(rows[i][j], 0.0))
}

pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn hs_norm(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `tr(A B)` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    hs_norm(&(m - m.adjoint()))
}

pub fn is_hermitian(m: &ComplexMatrix, rel_tol: f64) -> bool {
    m.is_square() && hermiticity_defect(m) <= rel_tol * hs_norm(m).max(f64::MIN_POSITIVE)
}

/// Below this anti-Hermitian norm a matrix counts as Hermitian whatever its
/// size; numerically zero blocks otherwise fail the relative test on roundoff.
const HERMITICITY_FLOOR: f64 = 1e-14;

/// Returns `(M + M†)/2` if `M` is Hermitian within the relative tolerance.
pub fn symmetrized(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    square_dim(m)?;
    ensure_finite(m)?;
    let asym = hermiticity_defect(m);
    let scale = hs_norm(m);
    if asym > HERMITICITY_FLOOR && asym > HERMITICITY_TOL * scale {
        return Err(Error::NotHermitian {
            asym: asym / scale.max(f64::MIN_POSITIVE),
            tol: HERMITICITY_TOL,
        });
    }
    Ok((m + m.adjoint()).scale(0.5))
}

pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    hs_norm(&(u.adjoint() * u - identity(u.nrows())))
}

pub fn ensure_unitary(u: &ComplexMatrix, tol: f64) -> Result<()> {
    square_dim(u)?;
    let defect = unitarity_defect(u);
    if defect > tol {
        return Err(Error::NotUnitary(defect));
    }
    Ok(())
}

pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let da = square_dim(a)?;
    let db = square_dim(b)?;
    let dim = da.checked_mul(db).ok_or(Error::SizeLimit { dim: usize::MAX, limit: max_dim() })?;
    check_dim(dim)?;
    Ok(a.kronecker(b))
}

pub fn tensor_power(a: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    let d = square_dim(a)?;
    checked_pow(d, n)?;
    let mut out = identity(1);
    for _ in 0..n {
        out = out.kronecker(a);
    }
    Ok(out)
}

/// `Ω^(n) = Σ_k I ⊗ … ⊗ Ω ⊗ … ⊗ I` with `Ω` on copy `k`.
pub fn extensive_sum(omega: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    let d = square_dim(omega)?;
    let total = checked_pow(d, n)?;
    let mut out = ComplexMatrix::zeros(total, total);
    for k in 0..n {
        let left = d.pow(k as u32);
        let right = d.pow((n - k - 1) as u32);
        for l in 0..left {
            for r in 0..right {
                for i in 0..d {
                    for j in 0..d {
                        let w = omega[(i, j)];
                        if w != ZERO {
                            out[((l * d + i) * right + r, (l * d + j) * right + r)] += w;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Partial trace over every subsystem not listed in `keep`.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let n = square_dim(m)?;
    let total: usize = dims.iter().product();
    if total != n {
        return Err(Error::Shape(format!("subsystem dims multiply to {total}, matrix is {n}")));
    }
    if keep.iter().any(|&k| k >= dims.len()) || keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Shape("keep must be strictly increasing subsystem indices".into()));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let expand = |which: &[usize], mut idx: usize| -> usize {
        let mut flat = 0;
        for &k in which.iter().rev() {
            flat += (idx % dims[k]) * strides[k];
            idx /= dims[k];
        }
        flat
    };
    let kd: usize = keep.iter().map(|&k| dims[k]).product();
    let td: usize = traced.iter().map(|&k| dims[k]).product();
    let keep_off: Vec<usize> = (0..kd).map(|i| expand(keep, i)).collect();
    let trace_off: Vec<usize> = (0..td).map(|i| expand(&traced, i)).collect();
    Ok(ComplexMatrix::from_fn(kd, kd, |i, j| {
        trace_off.iter().map(|&t| m[(keep_off[i] + t, keep_off[j] + t)]).sum()
    }))
}

/// Traces out the first factor of `R ⊗ M` with `dim R = r`, `dim M = m`.
pub fn trace_first(x: &ComplexMatrix, r: usize, m: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(m, m, |b, c| (0..r).map(|a| x[(a * m + b, a * m + c)]).sum())
}

/// Index permutation of the swap `x ⊗ y ↦ y ⊗ x` on `C^d ⊗ C^d`.
pub fn swap_permutation(d: usize) -> Vec<usize> {
    (0..d * d).map(|idx| (idx % d) * d + idx / d).collect()
}

pub fn swap_operator(d: usize) -> Result<ComplexMatrix> {
    let dim = d.checked_mul(d).ok_or(Error::SizeLimit { dim: usize::MAX, limit: max_dim() })?;
    check_dim(dim)?;
    let perm = swap_permutation(d);
    let mut t = ComplexMatrix::zeros(dim, dim);
    for (col, &row) in perm.iter().enumerate() {
        t[(row, col)] = ONE;
    }
    Ok(t)
}

#[derive(Clone, Debug)]
pub struct Eigh {
    /// Ascending.
    pub values: Vec<f64>,
    /// Columns are orthonormal eigenvectors.
    pub vectors: ComplexMatrix,
}

impl Eigh {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> ComplexVector {
        self.vectors.column(k).into_owned()
    }

    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.dim();
        let mut scaled = self.vectors.clone();
        for k in 0..d {
            let w = f(self.values[k]);
            scaled.column_mut(k).scale_mut(w);
        }
        scaled * self.vectors.adjoint()
    }

    /// Groups of eigenvalue indices whose consecutive values differ by at most `tol`.
    pub fn clusters(&self, tol: f64) -> Vec<Vec<usize>> {
        cluster_sorted(&self.values, tol)
    }

    pub fn cluster_basis(&self, cluster: &[usize]) -> ComplexMatrix {
        let d = self.dim();
        ComplexMatrix::from_fn(d, cluster.len(), |i, c| self.vectors[(i, cluster[c])])
    }

    /// Spectral projectors `(mean eigenvalue, projector)` in ascending order.
    pub fn spectral_projectors(&self, tol: f64) -> Vec<(f64, ComplexMatrix)> {
        self.clusters(tol)
            .into_iter()
            .map(|c| {
                let mean = c.iter().map(|&k| self.values[k]).sum::<f64>() / c.len() as f64;
                let basis = self.cluster_basis(&c);
                let proj = &basis * basis.adjoint();
                (mean, proj)
            })
            .collect()
    }
}

pub fn cluster_sorted(values: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (k, &v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(c) if (v - values[*c.last().unwrap()]).abs() <= tol => c.push(k),
            _ => out.push(vec![k]),
        }
    }
    out
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending.
///
/// LAPACK `zheevd`/`dsyevd`: nalgebra's `SymmetricEigen` returns wrong
/// eigenvectors on strongly degenerate spectra, which the block decompositions
/// hit all the time.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Eigh> {
    let h = symmetrized(m)?;
    let d = h.nrows();
    if d == 0 {
        return Ok(Eigh { values: vec![], vectors: ComplexMatrix::zeros(0, 0) });
    }
    if h.iter().all(|z| z.im == 0.0) {
        let (values, vecs) = real_symmetric_eig(&h.map(|z| z.re));
        return Ok(Eigh { values, vectors: vecs.map(|x| C64::new(x, 0.0)) });
    }
    let mut a = h;
    let n = lapack_int(d);
    let mut w = vec![0.0; d];
    let mut info = 0;
    let (mut wq, mut rq, mut iq) = ([C64::new(0.0, 0.0)], [0.0], [0]);
    // SAFETY: column-major buffers of the sizes LAPACK asks for; Complex64 and
    // the binding's complex type are both `repr(C)` pairs of f64.
    unsafe {
        lapack_sys::zheevd_(
            c"V".as_ptr(), c"U".as_ptr(), &n, a.as_mut_ptr().cast(), &n, w.as_mut_ptr(),
            wq.as_mut_ptr().cast(), &-1, rq.as_mut_ptr(), &-1, iq.as_mut_ptr(), &-1, &mut info,
        );
    }
    let (lwork, lrwork, liwork) = (wq[0].re as i32, rq[0] as i32, iq[0]);
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    let mut rwork = vec![0.0; lrwork.max(1) as usize];
    let mut iwork = vec![0; liwork.max(1) as usize];
    unsafe {
        lapack_sys::zheevd_(
            c"V".as_ptr(), c"U".as_ptr(), &n, a.as_mut_ptr().cast(), &n, w.as_mut_ptr(),
            work.as_mut_ptr().cast(), &lwork, rwork.as_mut_ptr(), &lrwork, iwork.as_mut_ptr(), &liwork, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Domain(format!("zheevd failed with info {info}")));
    }
    Ok(Eigh { values: w, vectors: a })
}

fn lapack_int(d: usize) -> i32 {
    i32::try_from(d).expect("matrix dimension fits in a LAPACK integer")
}

/// Eigendecomposition of a real symmetric matrix with real orthonormal
/// eigenvectors; eigenvalues ascending.
pub fn real_symmetric_eig(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let d = m.nrows();
    if d == 0 {
        return (vec![], DMatrix::zeros(0, 0));
    }
    let mut a = (m + m.transpose()) * 0.5;
    let n = lapack_int(d);
    let mut w = vec![0.0; d];
    let mut info = 0;
    let (mut wq, mut iq) = ([0.0], [0]);
    // SAFETY: column-major buffers of the sizes LAPACK asks for.
    unsafe {
        lapack_sys::dsyevd_(c"V".as_ptr(), c"U".as_ptr(), &n, a.as_mut_ptr(), &n, w.as_mut_ptr(), wq.as_mut_ptr(), &-1, iq.as_mut_ptr(), &-1, &mut info);
    }
    let (lwork, liwork) = (wq[0] as i32, iq[0]);
    let mut work = vec![0.0; lwork.max(1) as usize];
    let mut iwork = vec![0; liwork.max(1) as usize];
    unsafe {
        lapack_sys::dsyevd_(c"V".as_ptr(), c"U".as_ptr(), &n, a.as_mut_ptr(), &n, w.as_mut_ptr(), work.as_mut_ptr(), &lwork, iwork.as_mut_ptr(), &liwork, &mut info);
    }
    // dsyevd only fails on non-finite input, which `symmetrized` callers already reject.
    assert_eq!(info, 0, "dsyevd failed");
    (w, a)
}

pub fn herm_exp(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(m)?.apply(f64::exp))
}

/// Matrix logarithm of a positive definite matrix.
pub fn herm_log(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    if let Some(&min) = eig.values.first() {
        if min <= 1e-12 {
            return Err(Error::Domain(format!("log needs a positive definite matrix (min eigenvalue {min:.3e})")));
        }
    }
    Ok(eig.apply(f64::ln))
}

/// Trace norm `Σ|λ|` of a Hermitian matrix.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eig(m)?.values.iter().map(|v| v.abs()).sum())
}

#[derive(Clone, Debug)]
pub struct SpanProjection {
    pub projection: ComplexMatrix,
    /// HS norm of `target - projection`.
    pub residual: f64,
    /// Coefficients in the given basis; dropped elements get zero.
    pub coefficients: Vec<C64>,
    pub kept: Vec<usize>,
}

/// Orthogonal HS projection of `target` onto the span of `basis`.
pub fn project_onto_span(target: &ComplexMatrix, basis: &[ComplexMatrix]) -> Result<SpanProjection> {
    let d = square_dim(target)?;
    for b in basis {
        if b.shape() != (d, d) {
            return Err(Error::Shape("basis element has the wrong dimension".into()));
        }
    }
    // Modified Gram-Schmidt only decides which elements are independent.
    let mut ortho: Vec<ComplexMatrix> = Vec::new();
    let mut kept = Vec::new();
    for (k, b) in basis.iter().enumerate() {
        let norm = hs_norm(b);
        if norm == 0.0 {
            continue;
        }
        let mut v = b.unscale(norm);
        for q in &ortho {
            let c = hs_inner(q, &v);
            v -= q * c;
        }
        let rest = hs_norm(&v);
        if rest * rest < DEPENDENCE_TOL {
            continue;
        }
        ortho.push(v.unscale(rest));
        kept.push(k);
    }
    let mut projection = ComplexMatrix::zeros(d, d);
    for q in &ortho {
        projection += q * hs_inner(q, target);
    }
    let residual = hs_norm(&(target - &projection));
    let mut coefficients = vec![ZERO; basis.len()];
    if !kept.is_empty() {
        let n = kept.len();
        let gram = DMatrix::from_fn(n, n, |i, j| hs_inner(&basis[kept[i]], &basis[kept[j]]));
        let rhs = DVector::from_fn(n, |i, _| hs_inner(&basis[kept[i]], target));
        let sol = gram
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Rank("Gram matrix of the kept basis is singular".into()))?;
        for (i, &k) in kept.iter().enumerate() {
            coefficients[k] = sol[i];
        }
    }
    Ok(SpanProjection { projection, residual, coefficients, kept })
}

pub fn outer(a: &ComplexVector, b: &ComplexVector) -> ComplexMatrix {
    a * b.adjoint()
}

pub fn kron_vec(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    let nb = b.len();
    ComplexVector::from_fn(a.len() * nb, |i, _| a[i / nb] * b[i % nb])
}

pub fn kron_vec_power(a: &ComplexVector, n: usize) -> Result<ComplexVector> {
    copies_dim(a.len(), n)?;
    let mut out = ComplexVector::from_element(1, ONE);
    for _ in 0..n {
        out = kron_vec(&out, a);
    }
    Ok(out)
}

/// Applies `op` to copy `copy` of an `n`-copy vector with local dimension `d`.
pub fn apply_on_copy(op: &ComplexMatrix, copy: usize, n: usize, v: &ComplexVector) -> ComplexVector {
    let d = op.nrows();
    let right = d.pow((n - copy - 1) as u32);
    let left = v.len() / (d * right);
    let mut out = ComplexVector::zeros(v.len());
    for l in 0..left {
        for r in 0..right {
            for i in 0..d {
                let mut acc = ZERO;
                for j in 0..d {
                    acc += op[(i, j)] * v[(l * d + j) * right + r];
                }
                out[(l * d + i) * right + r] = acc;
            }
        }
    }
    out
}

/// `ρ^{⊗n} v` without forming the tensor power.
pub fn apply_power(op: &ComplexMatrix, n: usize, v: &ComplexVector) -> ComplexVector {
    let mut out = v.clone();
    for k in 0..n {
        out = apply_on_copy(op, k, n, &out);
    }
    out
}

/// `Ω^(n) v` without forming the extensive sum.
pub fn apply_extensive(op: &ComplexMatrix, n: usize, v: &ComplexVector) -> ComplexVector {
    let mut out = ComplexVector::zeros(v.len());
    for k in 0..n {
        out += apply_on_copy(op, k, n, v);
    }
    out
}

pub fn vdot(a: &ComplexVector, b: &ComplexVector) -> C64 {
    a.dotc(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pauli_x() -> ComplexMatrix {
        from_real(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    #[test]
    fn kron_index_convention() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| C64::new((i * 2 + j) as f64, 0.0));
        let b = ComplexMatrix::from_fn(3, 3, |i, j| C64::new(1.0 + (i * 3 + j) as f64, 1.0));
        let k = tensor_product(&a, &b).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..3 {
                    for q in 0..3 {
                        assert_eq!(k[(i * 3 + p, j * 3 + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_product_respects_limit() {
        let big = identity(300);
        assert!(matches!(tensor_product(&big, &big), Err(Error::SizeLimit { dim: 90000, .. })));
        assert!(matches!(tensor_power(&identity(2), 17), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn sigma_x_eigensystem() {
        let e = hermitian_eig(&pauli_x()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let v = e.vector(1);
        assert!((v[0].norm() - 1.0 / 2f64.sqrt()).abs() < 1e-14);
        assert!((v[0] - v[1]).norm() < 1e-14);
    }

    #[test]
    fn degenerate_complex_spectrum_reconstructs() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let u = crate::sampling::haar_unitary(12, &mut rng);
        let m = &u * diag(&[1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, 2.0, 2.0, 0.5, 0.5, 0.5]) * u.adjoint();
        let e = hermitian_eig(&m).unwrap();
        assert!(hs_norm(&(e.apply(|x| x) - &m)) < 1e-12);
        assert!(unitarity_defect(&e.vectors) < 1e-12);
        assert!((e.values[0] + 1.0).abs() < 1e-12 && (e.values[11] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_real_spectrum_reconstructs() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let u = crate::sampling::haar_unitary(64, &mut rng);
        // Real orthogonal factor from the QR of the real part.
        let o = u.map(|z| z.re).qr().q();
        let spec: Vec<f64> = (0..64).map(|k| [1.0, -1.0, 0.5][k % 3]).collect();
        let m = &o * DMatrix::from_diagonal(&DVector::from_vec(spec)) * o.transpose();
        let (vals, vecs) = real_symmetric_eig(&m);
        let back = &vecs * DMatrix::from_diagonal(&DVector::from_vec(vals.clone())) * vecs.transpose();
        assert!((back - &m).norm() < 1e-10);
        assert!((vecs.transpose() * &vecs - DMatrix::identity(64, 64)).norm() < 1e-10);
        assert_eq!(vals.iter().filter(|&&v| (v + 1.0).abs() < 1e-10).count(), 21);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = from_real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [1, 2, 5, 16] {
            let h = sampling::random_hermitian(d, &mut rng);
            let e = hermitian_eig(&h).unwrap();
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            assert!(hs_norm(&(e.apply(|x| x) - &h)) < 1e-10 * hs_norm(&h).max(1.0));
            assert!(unitarity_defect(&e.vectors) < 1e-10);
        }
    }

    #[test]
    fn swap_trace_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = sampling::random_hermitian(3, &mut rng);
        let b = sampling::random_hermitian(3, &mut rng);
        let t = swap_operator(3).unwrap();
        let lhs = (&t * tensor_product(&a, &b).unwrap()).trace();
        assert!((lhs - (&a * &b).trace()).norm() < 1e-12);
    }

    #[test]
    fn log_of_exp_roundtrips() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = sampling::random_hermitian(4, &mut rng);
        let back = herm_log(&herm_exp(&h).unwrap()).unwrap();
        assert!(hs_norm(&(back - h)) < 1e-10);
    }

    #[test]
    fn log_rejects_singular() {
        assert!(matches!(herm_log(&diag(&[1.0, 0.0])), Err(Error::Domain(_))));
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = sampling::random_state(2, &mut rng);
        let b = sampling::random_state(3, &mut rng);
        let ab = tensor_product(&a, &b).unwrap();
        assert!(hs_norm(&(partial_trace(&ab, &[2, 3], &[0]).unwrap() - &a)) < 1e-12);
        assert!(hs_norm(&(partial_trace(&ab, &[2, 3], &[1]).unwrap() - &b)) < 1e-12);
        assert!(hs_norm(&(trace_first(&ab, 2, 3) - &b)) < 1e-12);
    }

    #[test]
    fn extensive_sum_matches_kron_terms() {
        let x = pauli_x();
        let e = extensive_sum(&x, 3).unwrap();
        let i2 = identity(2);
        let expect = x.kronecker(&i2).kronecker(&i2) + i2.kronecker(&x).kronecker(&i2) + i2.kronecker(&i2).kronecker(&x);
        assert!(hs_norm(&(e - expect)) < 1e-14);
    }

    #[test]
    fn copy_actions_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = sampling::random_state(3, &mut rng);
        let v = ComplexVector::from_fn(27, |i, _| C64::new(i as f64, -(i as f64) / 3.0));
        let dense = tensor_power(&rho, 3).unwrap() * &v;
        assert!((apply_power(&rho, 3, &v) - dense).norm() < 1e-12);
        let dense = extensive_sum(&rho, 3).unwrap() * &v;
        assert!((apply_extensive(&rho, 3, &v) - dense).norm() < 1e-12);
    }

    #[test]
    fn projection_drops_dependent_elements() {
        let x = pauli_x();
        let target = &x * C64::new(2.0, 0.0) + identity(2);
        let basis = vec![identity(2), x.clone(), &x * C64::new(3.0, 0.0)];
        let p = project_onto_span(&target, &basis).unwrap();
        assert_eq!(p.kept, vec![0, 1]);
        assert!(p.residual < 1e-12);
        assert!((p.coefficients[1] - C64::new(2.0, 0.0)).norm() < 1e-12);
        assert_eq!(p.coefficients[2], ZERO);
        let empty = project_onto_span(&target, &[]).unwrap();
        assert!((empty.residual - hs_norm(&target)).abs() < 1e-15);
    }
}
