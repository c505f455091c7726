//! Charge-matched product states `Φ(n)` built from antisymmetrized irrep copies.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector, C64};
use crate::symmetry::{self, BlockDecomposition, SymmetryKind, SymmetryModel};

const EIGEN_RESIDUAL: f64 = 1e-8;
const CHARGE_MATCH: f64 = 1e-8;
pub const ENERGY_TOL: f64 = 1e-9;

/// `A(φ_1..φ_r) = (1/√r!) Σ_σ sgn σ φ_σ(1) ⊗ … ⊗ φ_σ(r)` for orthonormal `φ`.
pub fn antisym_state(vectors: &[ComplexVector]) -> Result<ComplexVector> {
    let r = vectors.len();
    if r == 0 {
        return Ok(ComplexVector::from_element(1, linalg::ONE));
    }
    let d = vectors[0].len();
    if vectors.iter().any(|v| v.len() != d) {
        return Err(Error::Shape("vectors differ in dimension".into()));
    }
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate() {
            let expect = if i == j { 1.0 } else { 0.0 };
            if (a.dotc(b) - C64::new(expect, 0.0)).norm() > 1e-10 {
                return Err(Error::Rank("antisymmetrization needs an orthonormal set".into()));
            }
        }
    }
    let dim = linalg::copies_dim(d, r)?;
    let mut out = ComplexVector::zeros(dim);
    let norm = (1..=r).map(|k| k as f64).product::<f64>().sqrt();
    for perm in (0..r).permutations(r) {
        let inversions = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count();
        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        let mut term = ComplexVector::from_element(1, linalg::ONE);
        for &p in &perm {
            term = linalg::kron_vec(&term, &vectors[p]);
        }
        out += term.scale(sign / norm);
    }
    Ok(out)
}

/// One multiplicity-space energy level `(λ, j)` and its antisymmetrized factor
/// `a = ι^{⊗r}(A_R ⊗ ψ^{⊗r})` on `r` copies.
#[derive(Clone, Debug)]
pub struct Level {
    pub block: usize,
    pub label: String,
    pub index: usize,
    pub energy: f64,
    pub r: usize,
    /// `None` when `d^r` exceeds the size limit.
    pub factor: Option<ComplexVector>,
    /// Eigenvalues of `Q_i^(r)` on the factor (Lie kinds).
    pub charges: Vec<f64>,
    /// Eigenvalues of `F(g)^{⊗r}` on the factor for each generator (finite kinds).
    pub phases: Vec<C64>,
}

/// `Φ(n) = ⊗_k (a_k^{⊗D/r_k})^{⊗ fold·n_k}`, kept in factorized form.
#[derive(Clone, Debug)]
pub struct PhiState {
    pub d: usize,
    pub occupation: Vec<usize>,
    /// `(factor, r, repetitions)`.
    pub factors: Vec<(ComplexVector, usize, usize)>,
    pub copies: usize,
    pub energy: f64,
    pub charges: Vec<f64>,
    pub phases: Vec<C64>,
}

impl PhiState {
    /// `log ⟨Φ|ρ^{⊗L}|Φ⟩`.
    pub fn log_weight(&self, rho: &ComplexMatrix) -> f64 {
        self.factors
            .iter()
            .map(|(a, r, count)| {
                let w = a.dotc(&linalg::apply_power(rho, *r, a)).re;
                if w > 0.0 {
                    *count as f64 * w.ln()
                } else {
                    f64::NEG_INFINITY
                }
            })
            .sum()
    }

    /// `S = -log ⟨Φ|ρ^{⊗L}|Φ⟩`.
    pub fn entropy_weight(&self, rho: &ComplexMatrix) -> f64 {
        -self.log_weight(rho)
    }

    pub fn to_vector(&self) -> Result<ComplexVector> {
        linalg::copies_dim(self.d, self.copies)?;
        let mut out = ComplexVector::from_element(1, linalg::ONE);
        for (a, _, count) in &self.factors {
            for _ in 0..*count {
                out = linalg::kron_vec(&out, a);
            }
        }
        Ok(out)
    }

    pub fn same_sector(&self, other: &PhiState) -> bool {
        self.copies == other.copies
            && self.charges.iter().zip(&other.charges).all(|(a, b)| (a - b).abs() <= CHARGE_MATCH)
            && self.phases.iter().zip(&other.phases).all(|(a, b)| (a - b).norm() <= CHARGE_MATCH)
    }
}

/// Everything needed to build `Φ(n)` states for a model and Hamiltonian.
#[derive(Clone, Debug)]
pub struct PhiBuilder {
    pub d: usize,
    pub levels: Vec<Level>,
    /// `D = Π_λ r_λ`.
    pub irrep_product: usize,
    /// `|G|` for finite groups so that every `Φ` has trivial group phase.
    pub fold: usize,
}

fn block_eigen(hl: &ComplexMatrix, real: bool) -> Result<(Vec<f64>, ComplexMatrix)> {
    if real {
        let (vals, vecs) = linalg::real_symmetric_eig(&hl.map(|z| z.re));
        Ok((vals, vecs.map(|x| C64::new(x, 0.0))))
    } else {
        let e = linalg::hermitian_eig(hl)?;
        Ok((e.values, e.vectors))
    }
}

fn eigen_residual(op_apply: impl Fn(&ComplexVector) -> ComplexVector, v: &ComplexVector) -> (C64, f64) {
    let w = op_apply(v);
    let lambda = v.dotc(&w);
    (lambda, (w - v * lambda).norm())
}

impl PhiBuilder {
    pub fn new(model: &SymmetryModel, h: &ComplexMatrix, decomp: &BlockDecomposition) -> Result<Self> {
        let h_blocks = symmetry::blocks_of(h, decomp, model)?;
        let real = model.kind() == SymmetryKind::TimeReversal;
        let d = model.dim();
        let mut levels = Vec::new();
        for (bi, (b, hl)) in decomp.blocks.iter().zip(&h_blocks).enumerate() {
            let (vals, vecs) = block_eigen(hl, real)?;
            for j in 0..b.m {
                let psi = vecs.column(j).into_owned();
                let phis: Vec<ComplexVector> = (0..b.r).map(|a| b.embed_vector(a, &psi)).collect();
                let factor = match linalg::copies_dim(d, b.r) {
                    Ok(_) => Some(antisym_state(&phis)?),
                    Err(Error::SizeLimit { .. }) => None,
                    Err(e) => return Err(e),
                };
                let mut level = Level {
                    block: bi,
                    label: b.label.to_string(),
                    index: j,
                    energy: vals[j],
                    r: b.r,
                    factor,
                    charges: vec![],
                    phases: vec![],
                };
                if let Some(a) = &level.factor {
                    let (e, res) = eigen_residual(|v| linalg::apply_extensive(h, b.r, v), a);
                    if res > EIGEN_RESIDUAL || (e.re - b.r as f64 * vals[j]).abs() > EIGEN_RESIDUAL {
                        return Err(Error::Decomposition(format!("level {}:{j} is not an energy eigenvector", level.label)));
                    }
                    for q in model.gge_charges() {
                        let (c, res) = eigen_residual(|v| linalg::apply_extensive(q, b.r, v), a);
                        if res > EIGEN_RESIDUAL {
                            return Err(Error::Decomposition(format!("level {}:{j} is not a charge eigenvector", level.label)));
                        }
                        level.charges.push(c.re);
                    }
                    if model.kind().is_finite_group() {
                        for g in model.generators() {
                            let (c, res) = eigen_residual(|v| linalg::apply_power(g, b.r, v), a);
                            if res > EIGEN_RESIDUAL {
                                return Err(Error::Decomposition(format!("level {}:{j} is not a group eigenvector", level.label)));
                            }
                            level.phases.push(c);
                        }
                    }
                }
                levels.push(level);
            }
        }
        let fold = if model.kind().is_finite_group() { model.group_order() } else { 1 };
        Ok(Self { d, levels, irrep_product: decomp.irrep_dim_product(), fold })
    }

    pub fn phi(&self, occupation: &[usize]) -> Result<PhiState> {
        if occupation.len() != self.levels.len() {
            return Err(Error::Shape(format!("occupation has {} entries for {} levels", occupation.len(), self.levels.len())));
        }
        let n_charges = self.levels.first().map_or(0, |l| l.charges.len());
        let n_phases = self.levels.first().map_or(0, |l| l.phases.len());
        let mut state = PhiState {
            d: self.d,
            occupation: occupation.to_vec(),
            factors: vec![],
            copies: 0,
            energy: 0.0,
            charges: vec![0.0; n_charges],
            phases: vec![linalg::ONE; n_phases],
        };
        for (level, &n) in self.levels.iter().zip(occupation) {
            if n == 0 {
                continue;
            }
            let a = level
                .factor
                .clone()
                .ok_or_else(|| Error::SizeLimit { dim: usize::MAX, limit: linalg::max_dim() })?;
            let reps = self.fold * n * self.irrep_product / level.r;
            state.copies += reps * level.r;
            state.energy += (reps * level.r) as f64 * level.energy;
            for (acc, q) in state.charges.iter_mut().zip(&level.charges) {
                *acc += reps as f64 * q;
            }
            for (acc, p) in state.phases.iter_mut().zip(&level.phases) {
                *acc *= p.powu(reps as u32);
            }
            state.factors.push((a, level.r, reps));
        }
        Ok(state)
    }

    /// Occupation vectors with `Σ n_k = total` over levels that have a factor.
    pub fn occupations(&self, total: usize) -> Vec<Vec<usize>> {
        let usable: Vec<usize> = (0..self.levels.len()).filter(|&k| self.levels[k].factor.is_some()).collect();
        let mut out = Vec::new();
        for combo in usable.iter().combinations_with_replacement(total) {
            let mut n = vec![0; self.levels.len()];
            for &&k in &combo {
                n[k] += 1;
            }
            out.push(n);
        }
        out
    }

    /// All sector-matched pairs `(lower, higher)` with `Σ n ≤ max_total`, energy-sorted.
    pub fn matched_pairs(&self, max_total: usize) -> Result<Vec<(PhiState, PhiState)>> {
        let mut pairs = Vec::new();
        for total in 1..=max_total {
            let states = self.occupations(total).iter().map(|n| self.phi(n)).collect::<Result<Vec<_>>>()?;
            for (i, a) in states.iter().enumerate() {
                for b in &states[i + 1..] {
                    if a.same_sector(b) {
                        let (lo, hi) = if a.energy <= b.energy { (a, b) } else { (b, a) };
                        pairs.push((lo.clone(), hi.clone()));
                    }
                }
            }
        }
        Ok(pairs)
    }

    /// The pair used for variant A: same sector, largest energy gap, fewest copies.
    pub fn psi_pair(&self, max_total: usize) -> Result<(PhiState, PhiState)> {
        for total in 1..=max_total {
            let states = self.occupations(total).iter().map(|n| self.phi(n)).collect::<Result<Vec<_>>>()?;
            let mut best: Option<(f64, usize, usize)> = None;
            for (i, a) in states.iter().enumerate() {
                for (j, b) in states.iter().enumerate().skip(i + 1) {
                    let gap = (a.energy - b.energy).abs();
                    if a.same_sector(b) && gap > ENERGY_TOL && best.is_none_or(|(g, _, _)| gap > g + ENERGY_TOL) {
                        best = Some((gap, i, j));
                    }
                }
            }
            if let Some((_, i, j)) = best {
                let (a, b) = (&states[i], &states[j]);
                return Ok(if a.energy < b.energy { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) });
            }
        }
        Err(Error::DegeneratePair("no sector-matched Φ pair with distinct energies".into()))
    }
}

/// `β_virtual = (S_1 - S_0) / (ℰ_1 - ℰ_0)` with `S = -log ⟨Φ|ρ^{⊗L}|Φ⟩`.
pub fn virtual_beta(rho: &ComplexMatrix, psi0: &PhiState, psi1: &PhiState) -> Result<f64> {
    let de = psi1.energy - psi0.energy;
    if de.abs() <= ENERGY_TOL {
        return Err(Error::DegeneratePair("Ψ₀ and Ψ₁ have equal energy".into()));
    }
    Ok((psi1.entropy_weight(rho) - psi0.entropy_weight(rho)) / de)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;
    use crate::state;
    use crate::symmetry::block_decompose;
    use crate::symmetry::presets::*;

    fn dimer_builder() -> PhiBuilder {
        let m = su2_dimer();
        PhiBuilder::new(&m, &dimer_hamiltonian(), &block_decompose(&m).unwrap()).unwrap()
    }

    #[test]
    fn antisym_of_two_basis_vectors() {
        let e0 = ComplexVector::from_vec(vec![linalg::ONE, ZERO]);
        let e1 = ComplexVector::from_vec(vec![ZERO, linalg::ONE]);
        let a = antisym_state(&[e0.clone(), e1]).unwrap();
        let r = 0.5f64.sqrt();
        assert!((a[1].re - r).abs() < 1e-15 && (a[2].re + r).abs() < 1e-15);
        assert!(antisym_state(&[e0.clone(), e0]).is_err());
    }

    #[test]
    fn antisym_carries_determinant() {
        // Ω^{⊗r} A = det(Ω) A.
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let u = crate::sampling::haar_unitary(3, &mut rng);
        let basis: Vec<ComplexVector> = (0..3).map(|k| linalg::identity(3).column(k).into_owned()).collect();
        let a = antisym_state(&basis).unwrap();
        let ua = linalg::apply_power(&u, 3, &a);
        let det = u.determinant();
        assert!((ua - a.scale(1.0) * det).norm() < 1e-12);
    }

    #[test]
    fn dimer_psi_pair() {
        let b = dimer_builder();
        assert_eq!(b.irrep_product, 3);
        let (p0, p1) = b.psi_pair(3).unwrap();
        assert_eq!((p0.copies, p1.copies), (3, 3));
        assert!((p0.energy + 2.25).abs() < 1e-12 && (p1.energy - 0.75).abs() < 1e-12);
        let v0 = p0.to_vector().unwrap();
        let v1 = p1.to_vector().unwrap();
        let h3 = linalg::extensive_sum(&dimer_hamiltonian(), 3).unwrap();
        assert!((&h3 * &v0 + v0.scale(2.25)).norm() < 1e-10);
        assert!((&h3 * &v1 - v1.scale(0.75)).norm() < 1e-10);
        for q in su2_dimer().charges() {
            let q3 = linalg::extensive_sum(q, 3).unwrap();
            assert!((&q3 * &v0).norm() < 1e-10 && (&q3 * &v1).norm() < 1e-10);
        }
    }

    #[test]
    fn gge_virtual_beta_is_beta() {
        let m = su2_dimer();
        let h = dimer_hamiltonian();
        let (rho, _) = state::gge_state(&h, m.charges(), 0.9, &[0.2, 0.1, -0.4]).unwrap();
        let (p0, p1) = dimer_builder().psi_pair(3).unwrap();
        assert!((virtual_beta(&rho, &p0, &p1).unwrap() - 0.9).abs() < 1e-10);
        for (a, b) in dimer_builder().matched_pairs(3).unwrap() {
            if b.energy - a.energy > ENERGY_TOL {
                assert!((virtual_beta(&rho, &a, &b).unwrap() - 0.9).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn finite_group_phi_is_invariant() {
        let m = dihedral_ring(3).unwrap();
        let b = PhiBuilder::new(&m, &ring_hamiltonian(3), &block_decompose(&m).unwrap()).unwrap();
        assert_eq!((b.fold, b.irrep_product), (6, 2));
        let (p0, p1) = b.psi_pair(1).unwrap();
        assert_eq!(p0.copies, 12);
        for p in p0.phases.iter().chain(&p1.phases) {
            assert!((p - linalg::ONE).norm() < 1e-9);
        }
    }
}
