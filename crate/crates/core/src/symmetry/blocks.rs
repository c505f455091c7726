use std::f64::consts::PI;
use std::fmt;

use super::{SymmetryKind, SymmetryModel};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector, C64, ZERO};

const CLUSTER_TOL: f64 = 1e-8;
const INVARIANT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub enum SectorLabel {
    /// Total spin `j`, stored as `2j`.
    Spin(u32),
    Charge(Vec<f64>),
    /// Cyclic irrep with `F(t) = exp(2πik/n)`.
    Phase { k: usize, n: usize },
    /// One-dimensional dihedral irrep: `F(t) = ±1`, `F(r) = sign`.
    DihedralA { k: usize, sign: i8 },
    /// Two-dimensional dihedral irrep with `F(t) = diag(z, z*)`.
    DihedralE { k: usize },
    Whole,
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SectorLabel::Spin(tj) if tj % 2 == 0 => write!(f, "spin{}", tj / 2),
            SectorLabel::Spin(tj) => write!(f, "spin{tj}/2"),
            SectorLabel::Charge(q) if q.len() == 1 => write!(f, "q={}", fmt_charge(q[0])),
            SectorLabel::Charge(q) => {
                let parts: Vec<String> = q.iter().map(|&x| fmt_charge(x)).collect();
                write!(f, "q=({})", parts.join(","))
            }
            SectorLabel::Phase { k, n } => write!(f, "k={k}/{n}"),
            SectorLabel::DihedralA { k, sign } => write!(f, "A({k},{})", if *sign > 0 { '+' } else { '-' }),
            SectorLabel::DihedralE { k } => write!(f, "E({k})"),
            SectorLabel::Whole => write!(f, "all"),
        }
    }
}

fn fmt_charge(x: f64) -> String {
    let r = (x * 1e6).round() / 1e6;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

/// One isotypic component: `ι: R ⊗ M → H` with column index `a·m + b`.
#[derive(Clone, Debug)]
pub struct Block {
    pub label: SectorLabel,
    /// Irrep dimension `r_λ`.
    pub r: usize,
    /// Multiplicity `m_λ`.
    pub m: usize,
    pub iota: ComplexMatrix,
}

impl Block {
    /// Column `ι(e_a ⊗ ψ)` for a multiplicity-space vector `ψ`.
    pub fn embed_vector(&self, a: usize, psi: &ComplexVector) -> ComplexVector {
        let d = self.iota.nrows();
        let mut out = ComplexVector::zeros(d);
        for b in 0..self.m {
            if psi[b] != ZERO {
                out += self.iota.column(a * self.m + b) * psi[b];
            }
        }
        out
    }

    /// `ι (I_R ⊗ X) ι†`.
    pub fn embed_operator(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let full = linalg::identity(self.r).kronecker(x);
        &self.iota * full * self.iota.adjoint()
    }

    pub fn compress(&self, op: &ComplexMatrix) -> ComplexMatrix {
        self.iota.adjoint() * op * &self.iota
    }
}

#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub dim: usize,
    pub blocks: Vec<Block>,
}

impl BlockDecomposition {
    pub fn labels(&self) -> Vec<String> {
        self.blocks.iter().map(|b| b.label.to_string()).collect()
    }

    pub fn find(&self, label: &str) -> Result<&Block> {
        self.blocks
            .iter()
            .find(|b| b.label.to_string() == label)
            .ok_or_else(|| Error::Parse(format!("unknown sector label `{label}`")))
    }

    /// `D = Π_λ r_λ`.
    pub fn irrep_dim_product(&self) -> usize {
        self.blocks.iter().map(|b| b.r).product()
    }

    /// `H_λ = tr_R(ι† H ι) / r_λ` for an operator already known to be symmetric.
    pub fn blocks_of_unchecked(&self, op: &ComplexMatrix) -> Vec<ComplexMatrix> {
        self.blocks
            .iter()
            .map(|b| linalg::trace_first(&b.compress(op), b.r, b.m).unscale(b.r as f64))
            .collect()
    }

    /// `ρ_λ = tr_R(ι† ρ ι)`; traces sum to `tr ρ`.
    pub fn reduced_state(&self, rho: &ComplexMatrix) -> Vec<ComplexMatrix> {
        self.blocks.iter().map(|b| linalg::trace_first(&b.compress(rho), b.r, b.m)).collect()
    }

    /// `Σ_λ ι ((I/r_λ) ⊗ ρ_λ) ι†`.
    pub fn symmetrize(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for (b, rl) in self.blocks.iter().zip(self.reduced_state(rho)) {
            out += b.embed_operator(&rl.unscale(b.r as f64));
        }
        out
    }

    /// `⊕_λ ι (I_R ⊗ U_λ) ι†`.
    pub fn assemble(&self, parts: &[ComplexMatrix]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for (b, u) in self.blocks.iter().zip(parts) {
            out += b.embed_operator(u);
        }
        out
    }
}

/// `H_λ` for each block; `op` must respect the symmetry.
pub fn blocks_of(op: &ComplexMatrix, decomp: &BlockDecomposition, model: &SymmetryModel) -> Result<Vec<ComplexMatrix>> {
    super::ensure_symmetric(op, model)?;
    Ok(decomp.blocks_of_unchecked(op))
}

/// Orthonormal basis of the eigenvalue-one space of a Hermitian projector.
fn range_basis(p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = linalg::hermitian_eig(p)?;
    let idx: Vec<usize> = (0..e.dim()).filter(|&k| e.values[k] > 0.5).collect();
    Ok(e.cluster_basis(&idx))
}

/// Eigen-clusters of `B† X B` lifted back through `B`, with mean eigenvalues.
fn split_by(basis: &ComplexMatrix, x: &ComplexMatrix) -> Result<Vec<(f64, ComplexMatrix)>> {
    let restricted = basis.adjoint() * x * basis;
    let e = linalg::hermitian_eig(&restricted)?;
    Ok(e.clusters(CLUSTER_TOL)
        .into_iter()
        .map(|c| {
            let mean = c.iter().map(|&k| e.values[k]).sum::<f64>() / c.len() as f64;
            (mean, basis * e.cluster_basis(&c))
        })
        .collect())
}

fn single_block(basis: ComplexMatrix, label: SectorLabel, r: usize) -> Block {
    let m = basis.ncols() / r;
    Block { label, r, m, iota: basis }
}

/// Isotypic decomposition `H = ⊕_λ R_λ ⊗ M_λ`; the result is checked against
/// `ι†ι = I`, `Σ ιι† = I` and `ι† F ι = F_λ ⊗ I` for every generator.
pub fn block_decompose(model: &SymmetryModel) -> Result<BlockDecomposition> {
    let d = model.dim();
    let blocks = match model.kind() {
        SymmetryKind::Trivial => vec![single_block(linalg::identity(d), SectorLabel::Whole, 1)],
        SymmetryKind::TimeReversal => vec![single_block(model.conjugation_basis().clone(), SectorLabel::Whole, 1)],
        SymmetryKind::U1 => u1_blocks(model)?,
        SymmetryKind::Su2 => su2_blocks(model)?,
        SymmetryKind::Cyclic(n) => cyclic_blocks(model, n)?,
        SymmetryKind::Dihedral(n) => dihedral_blocks(model, n)?,
    };
    let decomp = BlockDecomposition { dim: d, blocks };
    verify(&decomp, model)?;
    Ok(decomp)
}

fn u1_blocks(model: &SymmetryModel) -> Result<Vec<Block>> {
    let mut sectors: Vec<(Vec<f64>, ComplexMatrix)> = vec![(vec![], linalg::identity(model.dim()))];
    for q in model.charges() {
        let mut next = Vec::new();
        for (label, basis) in sectors {
            for (val, sub) in split_by(&basis, q)? {
                let mut l = label.clone();
                l.push(val);
                next.push((l, sub));
            }
        }
        sectors = next;
    }
    sectors.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    Ok(sectors.into_iter().map(|(q, basis)| single_block(basis, SectorLabel::Charge(q), 1)).collect())
}

fn su2_blocks(model: &SymmetryModel) -> Result<Vec<Block>> {
    let q = model.charges();
    let d = model.dim();
    let casimir = &q[0] * &q[0] + &q[1] * &q[1] + &q[2] * &q[2];
    let lower = &q[0] - &q[1] * linalg::I;
    let mut out = Vec::new();
    for (c, space) in split_by(&linalg::identity(d), &casimir)? {
        let two_j = ((1.0 + 4.0 * c).max(0.0).sqrt() - 1.0).round();
        let j = two_j / 2.0;
        if (j * (j + 1.0) - c).abs() > 1e-6 {
            return Err(Error::Decomposition(format!("Casimir eigenvalue {c} is not j(j+1)")));
        }
        let r = two_j as usize + 1;
        if space.ncols() % r != 0 {
            return Err(Error::Decomposition(format!("spin-{j} sector has dimension {} not divisible by {r}", space.ncols())));
        }
        let m = space.ncols() / r;
        let weights = split_by(&space, &q[2])?;
        let (top, highest) = weights.last().ok_or_else(|| Error::Decomposition("empty sector".into()))?;
        if (top - j).abs() > 1e-6 || highest.ncols() != m {
            return Err(Error::Decomposition(format!("highest weight of spin-{j} sector is inconsistent")));
        }
        let mut iota = ComplexMatrix::zeros(d, r * m);
        for b in 0..m {
            let mut v: ComplexVector = highest.column(b).into_owned();
            for a in 0..r {
                iota.set_column(a * m + b, &v);
                if a + 1 < r {
                    let norm = ((two_j - a as f64) * (a as f64 + 1.0)).sqrt();
                    v = (&lower * &v).unscale(norm);
                }
            }
        }
        out.push(Block { label: SectorLabel::Spin(two_j as u32), r, m, iota });
    }
    Ok(out)
}

/// `Π_k = (1/n) Σ_j exp(-2πijk/n) F(t)^j`.
fn phase_projector(model: &SymmetryModel, n: usize, k: usize) -> ComplexMatrix {
    let d = model.dim();
    let mut p = ComplexMatrix::zeros(d, d);
    for (j, g) in model.elements()[..n].iter().enumerate() {
        let phase = C64::from_polar(1.0 / n as f64, -2.0 * PI * (j * k) as f64 / n as f64);
        p += g * phase;
    }
    p
}

fn cyclic_blocks(model: &SymmetryModel, n: usize) -> Result<Vec<Block>> {
    let mut out = Vec::new();
    for k in 0..n {
        let basis = range_basis(&phase_projector(model, n, k))?;
        if basis.ncols() > 0 {
            out.push(single_block(basis, SectorLabel::Phase { k, n }, 1));
        }
    }
    Ok(out)
}

fn dihedral_blocks(model: &SymmetryModel, n: usize) -> Result<Vec<Block>> {
    let r_op = model.reflection().unwrap();
    let d = model.dim();
    let mut out = Vec::new();
    for k in 0..n {
        if (2 * k) % n == 0 {
            let basis = range_basis(&phase_projector(model, n, k))?;
            if basis.ncols() == 0 {
                continue;
            }
            for (val, sub) in split_by(&basis, r_op)?.into_iter().rev() {
                let sign = if val > 0.0 { 1 } else { -1 };
                if (val - sign as f64).abs() > 1e-6 {
                    return Err(Error::Decomposition(format!("F(r) eigenvalue {val} is not ±1")));
                }
                out.push(single_block(sub, SectorLabel::DihedralA { k, sign }, 1));
            }
        }
    }
    for k in 1..n {
        if 2 * k >= n {
            break;
        }
        let basis = range_basis(&phase_projector(model, n, k))?;
        let m = basis.ncols();
        if m == 0 {
            continue;
        }
        let mut iota = ComplexMatrix::zeros(d, 2 * m);
        for b in 0..m {
            let e = basis.column(b).into_owned();
            iota.set_column(b, &e);
            iota.set_column(m + b, &(r_op * &e));
        }
        out.push(Block { label: SectorLabel::DihedralE { k }, r: 2, m, iota });
    }
    Ok(out)
}

/// `tr_M(X) / m` for `X` on `R ⊗ M`.
fn irrep_part(x: &ComplexMatrix, r: usize, m: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(r, r, |a, c| (0..m).map(|b| x[(a * m + b, c * m + b)]).sum::<C64>() / m as f64)
}

fn verify(decomp: &BlockDecomposition, model: &SymmetryModel) -> Result<()> {
    let d = decomp.dim;
    let mut total = ComplexMatrix::zeros(d, d);
    for b in &decomp.blocks {
        let gram = b.iota.adjoint() * &b.iota;
        let err = linalg::hs_norm(&(gram - linalg::identity(b.r * b.m)));
        if err > INVARIANT_TOL {
            return Err(Error::Decomposition(format!("{}: isometry defect {err:.3e}", b.label)));
        }
        total += &b.iota * b.iota.adjoint();
    }
    let err = linalg::hs_norm(&(total - linalg::identity(d)));
    if err > INVARIANT_TOL {
        return Err(Error::Decomposition(format!("blocks do not resolve the identity ({err:.3e})")));
    }
    for g in model.generators() {
        let scale = linalg::hs_norm(g).max(1.0);
        for b in &decomp.blocks {
            let gi = g * &b.iota;
            let x = b.iota.adjoint() * &gi;
            let irrep = irrep_part(&x, b.r, b.m);
            let err = linalg::hs_norm(&(&x - irrep.kronecker(&linalg::identity(b.m))));
            if err > INVARIANT_TOL * scale {
                return Err(Error::Decomposition(format!("{}: generator is not F_λ ⊗ I ({err:.3e})", b.label)));
            }
            // The blocks resolve the identity, so this is the weight g moves into all other blocks.
            let leak = linalg::hs_norm(&(gi - &b.iota * &x));
            if leak > INVARIANT_TOL * scale {
                return Err(Error::Decomposition(format!("generator moves {} into other blocks ({leak:.3e})", b.label)));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use crate::symmetry::presets::*;
    use crate::symmetry::tensor_power_model;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn shape(dec: &BlockDecomposition) -> Vec<(String, usize, usize)> {
        dec.blocks.iter().map(|b| (b.label.to_string(), b.r, b.m)).collect()
    }

    #[test]
    fn dimer_sectors() {
        let dec = block_decompose(&su2_dimer()).unwrap();
        assert_eq!(shape(&dec), vec![("spin0".into(), 1, 1), ("spin1".into(), 3, 1)]);
        let hb = blocks_of(&dimer_hamiltonian(), &dec, &su2_dimer()).unwrap();
        assert!((hb[0][(0, 0)].re + 0.75).abs() < 1e-14);
        assert!((hb[1][(0, 0)].re - 0.25).abs() < 1e-14);
        assert_eq!(dec.irrep_dim_product(), 3);
    }

    #[test]
    fn trivial_and_u1_shapes() {
        let dec = block_decompose(&crate::symmetry::SymmetryModel::trivial(5)).unwrap();
        assert_eq!(shape(&dec), vec![("all".into(), 1, 5)]);
        let u1 = crate::symmetry::SymmetryModel::u1(vec![linalg::diag(&[0.0, 1.0, 1.0])]).unwrap();
        assert_eq!(shape(&block_decompose(&u1).unwrap()), vec![("q=0".into(), 1, 1), ("q=1".into(), 1, 2)]);
    }

    #[test]
    fn two_dimers_spin_content() {
        let m = tensor_power_model(&su2_dimer(), 2).unwrap();
        let dec = block_decompose(&m).unwrap();
        assert_eq!(shape(&dec), vec![("spin0".into(), 1, 2), ("spin1".into(), 3, 3), ("spin2".into(), 5, 1)]);
    }

    #[test]
    fn odd_spin_chain() {
        let m = tensor_power_model(&spin_half_model(), 3).unwrap();
        let dec = block_decompose(&m).unwrap();
        assert_eq!(shape(&dec), vec![("spin1/2".into(), 2, 2), ("spin3/2".into(), 4, 1)]);
    }

    fn spin_half_model() -> crate::symmetry::SymmetryModel {
        crate::symmetry::SymmetryModel::su2(spin_half().to_vec()).unwrap()
    }

    #[test]
    fn finite_group_sectors() {
        let dec = block_decompose(&cyclic_ring(4).unwrap()).unwrap();
        assert_eq!(dec.blocks.len(), 4);
        let dec = block_decompose(&dihedral_ring(3).unwrap()).unwrap();
        assert_eq!(shape(&dec), vec![("A(0,+)".into(), 1, 1), ("E(1)".into(), 2, 1)]);
        let dec = block_decompose(&dihedral_ring(4).unwrap()).unwrap();
        assert_eq!(shape(&dec), vec![("A(0,+)".into(), 1, 1), ("A(2,+)".into(), 1, 1), ("E(1)".into(), 2, 1)]);
        let pair = tensor_power_model(&dihedral_ring(3).unwrap(), 2).unwrap();
        let dec = block_decompose(&pair).unwrap();
        let total: usize = dec.blocks.iter().map(|b| b.r * b.m).sum();
        assert_eq!(total, 9);
    }

    #[test]
    fn reduced_traces_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for model in [su2_dimer(), dihedral_ring(5).unwrap(), u1_pair()] {
            let dec = block_decompose(&model).unwrap();
            let rho = sampling::random_state(model.dim(), &mut rng);
            let total: f64 = dec.reduced_state(&rho).iter().map(|x| x.trace().re).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn blocks_of_rejects_asymmetric_operator() {
        let m = su2_dimer();
        let dec = block_decompose(&m).unwrap();
        let x = m.charges()[0].clone();
        assert!(matches!(blocks_of(&x, &dec, &m), Err(Error::Commutation(_))));
    }
}
