//! Operator quartets `C_ij` and the unitary `O = I - Σ (-1)^{i-j} C_ij`.

use serde::Serialize;

use super::phi::{PhiState, ENERGY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector, C64};
use crate::symmetry::{SymmetryKind, SymmetryModel};

/// Largest N-copy dimension that is ever materialized.
pub const DENSE_LIMIT: usize = 4096;
pub const ALGEBRA_TOL: f64 = 1e-9;
/// Largest dimension at which quartet products are formed densely.
pub const ALGEBRA_DENSE_LIMIT: usize = 256;
const PROJECTOR_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Variant {
    A,
    B,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::A => "A",
            Variant::B => "B",
        })
    }
}

#[derive(Clone, Debug)]
pub struct QuartetSpec {
    pub variant: Variant,
    pub m: usize,
    /// B only.
    pub m_prime: usize,
    /// Copies `P` acts on (A only).
    pub big_m: usize,
    pub projector: Option<ComplexMatrix>,
    pub psi: [PhiState; 2],
    pub psi_prime: Option<[PhiState; 2]>,
}

fn sign(i: usize) -> f64 {
    if i % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `R_ij = ½ (I - (-1)^i T) [P ⊗ (I-P)] (I - (-1)^j T)` on two blocks of `P`'s space.
pub fn r_operator(p: &ComplexMatrix, i: usize, j: usize) -> Result<ComplexMatrix> {
    let n = p.nrows();
    let nn = linalg::copies_dim(n, 2)?;
    let q = linalg::identity(n) - p;
    let (si, sj) = (sign(i), sign(j));
    let x = |a: usize, b: usize| p[(a / n, b / n)] * q[(a % n, b % n)];
    let swap = |a: usize| (a % n) * n + a / n;
    Ok(ComplexMatrix::from_fn(nn, nn, |a, b| {
        (x(a, b) - x(a, swap(b)) * sj - x(swap(a), b) * si + x(swap(a), swap(b)) * (si * sj)) * 0.5
    }))
}

/// `tr(ρ^{⊗2M} R_ii)` for `i = 0, 1`, with `rho_m = ρ^{⊗M}`. The swap is
/// handled by index arithmetic, so nothing of size `d^{2M}` is built.
pub fn r_traces(rho_m: &ComplexMatrix, p: &ComplexMatrix) -> (f64, f64) {
    let n = p.nrows();
    let q = linalg::identity(n) - p;
    // tr((ρ⊗ρ)(P⊗Q)) and tr((ρ⊗ρ) T (P⊗Q)) = tr(PρQρ).
    let direct = linalg::trace_product(rho_m, p).re * linalg::trace_product(rho_m, &q).re;
    let mut exchange = C64::new(0.0, 0.0);
    let rp = rho_m * p;
    let rq = rho_m * &q;
    for a in 0..n {
        for b in 0..n {
            exchange += rp[(a, b)] * rq[(b, a)];
        }
    }
    (direct - exchange.re, direct + exchange.re)
}

/// `ln(t^m)` with `0^0 = 1`.
fn log_power(t: f64, m: usize) -> f64 {
    if m == 0 {
        0.0
    } else if t > 0.0 {
        m as f64 * t.ln()
    } else {
        f64::NEG_INFINITY
    }
}

fn ensure_pair(psi: &[PhiState; 2], strict: bool) -> Result<()> {
    if psi[0].copies != psi[1].copies || psi[0].d != psi[1].d {
        return Err(Error::Shape("Ψ₀ and Ψ₁ live on different copy numbers".into()));
    }
    let gap = psi[1].energy - psi[0].energy;
    if strict && gap <= ENERGY_TOL {
        return Err(Error::DegeneratePair(format!("need ℰ₀ < ℰ₁, got gap {gap}")));
    }
    if !strict && gap < -ENERGY_TOL {
        return Err(Error::DegeneratePair(format!("need ℰ′₀ ≤ ℰ′₁, got gap {gap}")));
    }
    Ok(())
}

impl QuartetSpec {
    pub fn variant_a(projector: ComplexMatrix, big_m: usize, m: usize, psi: [PhiState; 2], h: &ComplexMatrix) -> Result<Self> {
        ensure_pair(&psi, true)?;
        let dim = linalg::copies_dim(h.nrows(), big_m)?;
        if projector.shape() != (dim, dim) {
            return Err(Error::Shape(format!("projector must act on {big_m} copies ({dim} dims)")));
        }
        let idem = linalg::hs_norm(&(&projector * &projector - &projector));
        let herm = linalg::hermiticity_defect(&projector);
        if idem.max(herm) > PROJECTOR_TOL {
            return Err(Error::Algebra(format!("projector defect {:.3e}", idem.max(herm))));
        }
        let hm = linalg::extensive_sum(h, big_m)?;
        let comm = linalg::hs_norm(&linalg::commutator(&hm, &projector));
        if comm > PROJECTOR_TOL * linalg::hs_norm(&hm).max(1.0) {
            return Err(Error::Commutation(comm));
        }
        Ok(Self { variant: Variant::A, m, m_prime: 0, big_m, projector: Some(projector), psi, psi_prime: None })
    }

    pub fn variant_b(m: usize, m_prime: usize, psi: [PhiState; 2], psi_prime: [PhiState; 2]) -> Result<Self> {
        ensure_pair(&psi, true)?;
        ensure_pair(&psi_prime, false)?;
        if m + m_prime == 0 {
            return Err(Error::Domain("variant B needs m + m′ ≥ 1".into()));
        }
        Ok(Self { variant: Variant::B, m, m_prime, big_m: 0, projector: None, psi, psi_prime: Some(psi_prime) })
    }

    pub fn with_m(&self, m: usize) -> Self {
        Self { m, ..self.clone() }
    }

    pub fn d(&self) -> usize {
        self.psi[0].d
    }

    /// `N = 2mM + L` (A) or `mL + m′L′` (B).
    pub fn copies(&self) -> usize {
        match &self.psi_prime {
            None => 2 * self.m * self.big_m + self.psi[0].copies,
            Some(pp) => self.m * self.psi[0].copies + self.m_prime * pp[0].copies,
        }
    }

    /// `ε` in `[H^(N), C_ij] = ε (i - j) C_ij`.
    pub fn energy_gap(&self) -> f64 {
        let de = self.psi[1].energy - self.psi[0].energy;
        match &self.psi_prime {
            None => de,
            Some(pp) => self.m as f64 * de - self.m_prime as f64 * (pp[1].energy - pp[0].energy),
        }
    }

    /// Closed-form `ε (tr(ρ^{⊗N} C_11) - tr(ρ^{⊗N} C_00))` from factor traces.
    pub fn work_closed_form(&self, rho: &ComplexMatrix) -> Result<f64> {
        let lp0 = self.psi[0].log_weight(rho);
        let lp1 = self.psi[1].log_weight(rho);
        let (l0, l1) = match (&self.psi_prime, &self.projector) {
            (None, Some(_)) => {
                let (t00, t11) = if self.m == 0 { (1.0, 1.0) } else { self.r_traces(rho)? };
                (log_power(t00, self.m) + lp0, log_power(t11, self.m) + lp1)
            }
            (Some(pp), _) => {
                let (q0, q1) = (pp[0].log_weight(rho), pp[1].log_weight(rho));
                let (m, mp) = (self.m as f64, self.m_prime as f64);
                // 0 · (-∞) stays 0: an absent factor has weight 1.
                let mix = |a: f64, x: f64| if a == 0.0 { 0.0 } else { a * x };
                (mix(m, lp0) + mix(mp, q1), mix(m, lp1) + mix(mp, q0))
            }
            (None, None) => return Err(Error::Shape("variant A without a projector".into())),
        };
        Ok(self.energy_gap() * (l1.exp() - l0.exp()))
    }

    /// Variant A: `(t_00, t_11)` with `t_ii = tr(ρ^{⊗2M} R_ii)`.
    pub fn r_traces(&self, rho: &ComplexMatrix) -> Result<(f64, f64)> {
        let p = self.projector.as_ref().ok_or_else(|| Error::Shape("variant B has no projector".into()))?;
        Ok(r_traces(&linalg::tensor_power(rho, self.big_m)?, p))
    }

    /// Variant A: `W(m)` for `m = 0..=m_max`, sharing the trace computation.
    pub fn work_curve(&self, rho: &ComplexMatrix, m_max: usize) -> Result<Vec<f64>> {
        let (t00, t11) = self.r_traces(rho)?;
        let lp0 = self.psi[0].log_weight(rho);
        let lp1 = self.psi[1].log_weight(rho);
        let eps = self.energy_gap();
        Ok((0..=m_max)
            .map(|m| eps * ((log_power(t11, m) + lp1).exp() - (log_power(t00, m) + lp0).exp()))
            .collect())
    }

    fn dense_dim(&self) -> Result<usize> {
        let dim = linalg::copies_dim(self.d(), self.copies())?;
        if dim > DENSE_LIMIT {
            return Err(Error::SizeLimit { dim, limit: DENSE_LIMIT });
        }
        Ok(dim)
    }

    fn psi_vectors(&self) -> Result<[ComplexVector; 2]> {
        Ok([self.psi[0].to_vector()?, self.psi[1].to_vector()?])
    }

    /// Dense `C_ij`, built factor by factor from the definition.
    pub fn operator(&self, i: usize, j: usize) -> Result<ComplexMatrix> {
        self.dense_dim()?;
        let psi = self.psi_vectors()?;
        let mut out = linalg::identity(1);
        match &self.psi_prime {
            None => {
                let r = r_operator(self.projector.as_ref().expect("variant A projector"), i, j)?;
                for _ in 0..self.m {
                    out = out.kronecker(&r);
                }
                out = out.kronecker(&linalg::outer(&psi[i], &psi[j]));
            }
            Some(pp) => {
                let a = linalg::outer(&psi[i], &psi[j]);
                let b = linalg::outer(&pp[1 - i].to_vector()?, &pp[1 - j].to_vector()?);
                for _ in 0..self.m {
                    out = out.kronecker(&a);
                }
                for _ in 0..self.m_prime {
                    out = out.kronecker(&b);
                }
            }
        }
        Ok(out)
    }

    /// Largest residual of `C_ij† = C_ji` and `C_ij C_kl = δ_jk C_il`.
    /// Up to [`ALGEBRA_DENSE_LIMIT`] the products are formed densely; above
    /// it the relations are checked on the factors, which imply them.
    pub fn algebra_residual(&self) -> Result<f64> {
        if self.dense_dim()? > ALGEBRA_DENSE_LIMIT {
            return self.factor_residual();
        }
        let c = [[self.operator(0, 0)?, self.operator(0, 1)?], [self.operator(1, 0)?, self.operator(1, 1)?]];
        Ok(quartet_residual(&c))
    }

    fn factor_residual(&self) -> Result<f64> {
        let mut worst = gram_residual(&self.psi_vectors()?);
        if let Some(pp) = &self.psi_prime {
            worst = worst.max(gram_residual(&[pp[0].to_vector()?, pp[1].to_vector()?]));
        }
        if let Some(p) = &self.projector {
            // P was validated as a projector; the R relations follow from that.
            if self.m > 0 && p.nrows() * p.nrows() <= ALGEBRA_DENSE_LIMIT {
                let r = [[r_operator(p, 0, 0)?, r_operator(p, 0, 1)?], [r_operator(p, 1, 0)?, r_operator(p, 1, 1)?]];
                worst = worst.max(quartet_residual(&r));
            }
        }
        Ok(worst)
    }

    /// Dense `U = I - 2VV†`, after checking the quartet algebra.
    pub fn unitary(&self) -> Result<ComplexMatrix> {
        let dim = self.dense_dim()?;
        let residual = self.algebra_residual()?;
        if residual > ALGEBRA_TOL {
            return Err(Error::Algebra(format!("quartet relations off by {residual:.3e}")));
        }
        let mut u = linalg::identity(dim);
        for w in self.range_basis()? {
            u -= linalg::outer(&w, &w).scale(2.0);
        }
        Ok(u)
    }

    /// Orthonormal basis `V` of `range(Π)` with `Π = (C_00 + C_11 - C_01 - C_10) / 2`,
    /// so that `U = I - 2VV†`.
    pub fn range_basis(&self) -> Result<Vec<ComplexVector>> {
        self.dense_dim()?;
        Ok(self.range_pairs()?.into_iter().map(|(v, u)| (v - u).unscale(2f64.sqrt())).collect())
    }

    /// Pairs `(v, C_10 v)` with `v` running over an orthonormal basis of `range(C_00)`.
    fn range_pairs(&self) -> Result<Vec<(ComplexVector, ComplexVector)>> {
        let psi = self.psi_vectors()?;
        match &self.psi_prime {
            Some(pp) => {
                let (q0, q1) = (pp[0].to_vector()?, pp[1].to_vector()?);
                let build = |a: &ComplexVector, b: &ComplexVector| {
                    let mut v = ComplexVector::from_element(1, linalg::ONE);
                    for _ in 0..self.m {
                        v = linalg::kron_vec(&v, a);
                    }
                    for _ in 0..self.m_prime {
                        v = linalg::kron_vec(&v, b);
                    }
                    v
                };
                Ok(vec![(build(&psi[0], &q1), build(&psi[1], &q0))])
            }
            None => {
                let p = self.projector.as_ref().expect("variant A projector");
                let r00 = r_operator(p, 0, 0)?;
                let r10 = r_operator(p, 1, 0)?;
                let eig = linalg::hermitian_eig(&r00)?;
                let basis: Vec<ComplexVector> = (0..eig.dim()).filter(|&k| eig.values[k] > 0.5).map(|k| eig.vector(k)).collect();
                let mut pairs = vec![(ComplexVector::from_element(1, linalg::ONE), ComplexVector::from_element(1, linalg::ONE))];
                for _ in 0..self.m {
                    let mut next = Vec::with_capacity(pairs.len() * basis.len());
                    for (v, u) in &pairs {
                        for b in &basis {
                            next.push((linalg::kron_vec(v, b), linalg::kron_vec(u, &(&r10 * b))));
                        }
                    }
                    pairs = next;
                }
                Ok(pairs.into_iter().map(|(v, u)| (linalg::kron_vec(&v, &psi[0]), linalg::kron_vec(&u, &psi[1]))).collect())
            }
        }
    }

    /// `W(ρ^{⊗N}, H^(N), U)` evaluated on the N-copy space. With `V` an
    /// orthonormal basis of `range(Π)`, `U = I - 2VV†` and
    /// `W = 4 Re tr(V†ρHV) - 4 tr(V†ρV · V†HV)`.
    pub fn direct_work(&self, rho: &ComplexMatrix, h: &ComplexMatrix) -> Result<f64> {
        let n = self.copies();
        let cols = self.range_basis()?;
        let rho_v: Vec<ComplexVector> = cols.iter().map(|w| linalg::apply_power(rho, n, w)).collect();
        let h_v: Vec<ComplexVector> = cols.iter().map(|w| linalg::apply_extensive(h, n, w)).collect();
        let k = cols.len();
        let mut linear = 0.0;
        let mut quadratic = C64::new(0.0, 0.0);
        for a in 0..k {
            linear += rho_v[a].dotc(&h_v[a]).re;
            for b in 0..k {
                quadratic += cols[a].dotc(&rho_v[b]) * cols[b].dotc(&h_v[a]);
            }
        }
        Ok(4.0 * linear - 4.0 * quadratic.re)
    }

    pub fn describe(&self) -> String {
        match &self.psi_prime {
            None => format!(
                "A: M={} m={} L={} Ψ₀={:?} Ψ₁={:?}",
                self.big_m, self.m, self.psi[0].copies, self.psi[0].occupation, self.psi[1].occupation
            ),
            Some(pp) => format!(
                "B: m={} m′={} Ψ={:?}/{:?} Ψ′={:?}/{:?}",
                self.m, self.m_prime, self.psi[0].occupation, self.psi[1].occupation, pp[0].occupation, pp[1].occupation
            ),
        }
    }
}

/// Checks on a witness's `U = I - 2VV†`: unitarity, symmetry and
/// `[U†H^(N)U, H^(N)]`, all as Hilbert-Schmidt norms on the N-copy space.
/// Only `V` and N-copy matrix-vector products are formed, never `U` itself.
#[derive(Clone, Copy, Debug)]
pub struct DenseCheck {
    pub unitarity: f64,
    pub symmetry: f64,
    pub energy_commutator: f64,
}

impl DenseCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.unitarity.max(self.symmetry).max(self.energy_commutator) <= tol
    }
}

fn quartet_residual(c: &[[ComplexMatrix; 2]; 2]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max(linalg::hs_norm(&(c[i][j].adjoint() - &c[j][i])));
            for k in 0..2 {
                for l in 0..2 {
                    let prod = &c[i][j] * &c[k][l];
                    let r = if j == k { linalg::hs_norm(&(prod - &c[i][l])) } else { linalg::hs_norm(&prod) };
                    worst = worst.max(r);
                }
            }
        }
    }
    worst
}

fn gram(a: &[ComplexVector], b: &[ComplexVector]) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.len(), b.len(), |i, j| a[i].dotc(&b[j]))
}

fn gram_residual(v: &[ComplexVector]) -> f64 {
    linalg::hs_norm(&(gram(v, v) - linalg::identity(v.len())))
}

/// `||(I - VV†) x||` summed in quadrature over the columns `x`.
fn off_range(v: &[ComplexVector], xs: &[ComplexVector]) -> f64 {
    xs.iter()
        .map(|x| {
            let mut r = x.clone();
            for w in v {
                r -= w * w.dotc(x);
            }
            r.norm_squared()
        })
        .sum::<f64>()
        .sqrt()
}

fn apply_u(v: &[ComplexVector], x: &ComplexVector) -> ComplexVector {
    let mut out = x.clone();
    for w in v {
        out -= w * (w.dotc(x) * 2.0);
    }
    out
}

/// Orthonormal basis of `span(xs)` by modified Gram-Schmidt.
fn orthonormalize(xs: impl IntoIterator<Item = ComplexVector>) -> Vec<ComplexVector> {
    let mut basis: Vec<ComplexVector> = vec![];
    for x in xs {
        let scale = x.norm();
        let mut r = x;
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&r);
                r -= b * c;
            }
        }
        let n = r.norm();
        if n > 1e-10 * scale.max(1.0) {
            basis.push(r.unscale(n));
        }
    }
    basis
}

pub fn dense_check(spec: &QuartetSpec, h: &ComplexMatrix, model: &SymmetryModel) -> Result<DenseCheck> {
    let residual = spec.algebra_residual()?;
    if residual > ALGEBRA_TOL {
        return Err(Error::Algebra(format!("quartet relations off by {residual:.3e}")));
    }
    Ok(low_rank_check(&spec.range_basis()?, spec.copies(), h, model))
}

/// [`dense_check`] for `U = I - 2VV†` on `n` copies.
pub fn low_rank_check(v: &[ComplexVector], n: usize, h: &ComplexMatrix, model: &SymmetryModel) -> DenseCheck {
    // U†U - I = 4V(G² - G)V† with G = V†V.
    let g = gram(v, v);
    let unitarity = 4.0 * linalg::hs_norm(&(&g * &g - &g));

    // ||[U, X]|| = 2||[Π, X]|| = 2√2 ||(I - Π) X V|| for X Hermitian or unitary.
    let factor = 2.0 * 2f64.sqrt();
    let symmetry = match model.kind() {
        SymmetryKind::Trivial => 0.0,
        SymmetryKind::TimeReversal => {
            let wd = model.conjugation_basis().adjoint();
            let vt: Vec<ComplexVector> = v.iter().map(|x| linalg::apply_power(&wd, n, x)).collect();
            let conj: Vec<ComplexVector> = vt.iter().map(|x| x.map(|z| z.conj())).collect();
            factor * off_range(&vt, &conj)
        }
        kind => model
            .generators()
            .into_iter()
            .map(|gen| {
                let xs: Vec<ComplexVector> = v
                    .iter()
                    .map(|x| if kind.is_lie() { linalg::apply_extensive(gen, n, x) } else { linalg::apply_power(gen, n, x) })
                    .collect();
                factor * off_range(v, &xs)
            })
            .fold(0.0, f64::max),
    };

    // [UHU, H] maps span{V, HV, H²V} into itself and vanishes on its complement.
    let hv: Vec<ComplexVector> = v.iter().map(|x| linalg::apply_extensive(h, n, x)).collect();
    let hhv: Vec<ComplexVector> = hv.iter().map(|x| linalg::apply_extensive(h, n, x)).collect();
    let basis = orthonormalize(v.iter().chain(&hv).chain(&hhv).cloned());
    let hn = |x: &ComplexVector| linalg::apply_extensive(h, n, x);
    let image: Vec<ComplexVector> = basis
        .iter()
        .map(|b| apply_u(v, &hn(&apply_u(v, &hn(b)))) - hn(&apply_u(v, &hn(&apply_u(v, b)))))
        .collect();
    let energy_commutator = linalg::hs_norm(&gram(&basis, &image));

    DenseCheck { unitarity, symmetry, energy_commutator }
}
