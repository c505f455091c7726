//! Energy-conserving symmetric unitaries on a few copies.
//!
//! When `[U†HU, H] = 0`, `U†HU` is block diagonal in the energy eigenspaces of
//! `H`, so `tr(UρU†H) = tr(UΔ(ρ)U†H)` with `Δ` the energy dephasing. The best
//! such symmetric `U` on `N` copies therefore extracts the symmetry-protected
//! ergotropy of `Δ(ρ^{⊗N})`. We build it from energy eigenvectors only, so it
//! maps eigenvectors of `H^(N)` to eigenvectors and keeps the commutation exactly.

use serde_json::{json, Value};

use super::phi::ENERGY_TOL;
use crate::error::Result;
use crate::linalg::{self, ComplexMatrix, ComplexVector, C64};
use crate::symmetry::{self, BlockDecomposition, SymmetryKind, SymmetryModel};

/// Largest N-copy dimension searched directly.
pub const DIRECT_LIMIT: usize = 256;

#[derive(Clone, Debug)]
struct BlockSpectrum {
    /// Orthonormal bases of the energy eigenspaces of `H_λ`, with their energies.
    clusters: Vec<(f64, ComplexMatrix)>,
}

/// Block structure of `H^(N)` under the N-copy symmetry, computed once.
#[derive(Clone, Debug)]
pub struct CopySpace {
    pub copies: usize,
    d: usize,
    real: bool,
    decomp: BlockDecomposition,
    blocks: Vec<BlockSpectrum>,
}

/// Optimal energy-conserving symmetric unitary on `copies` copies.
#[derive(Clone, Debug)]
pub struct DirectWitness {
    pub copies: usize,
    pub unitary: ComplexMatrix,
    pub work: f64,
}

impl DirectWitness {
    pub fn to_json(&self) -> Value {
        json!({ "copies": self.copies, "work": self.work })
    }
}

fn real_eig(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let (vals, vecs) = linalg::real_symmetric_eig(&m.map(|z| z.re));
    (vals, vecs.map(|x| C64::new(x, 0.0)))
}

/// Inputs are Hermitian by construction; blocks that are numerically zero can
/// still fail a relative Hermiticity test, so take the Hermitian part first.
fn eig(m: &ComplexMatrix, real: bool) -> Result<(Vec<f64>, ComplexMatrix)> {
    let m = &(m + m.adjoint()).unscale(2.0);
    if real {
        Ok(real_eig(m))
    } else {
        let e = linalg::hermitian_eig(m)?;
        Ok((e.values, e.vectors))
    }
}

impl CopySpace {
    pub fn new(model: &SymmetryModel, h: &ComplexMatrix, copies: usize) -> Result<Self> {
        let model_n = symmetry::tensor_power_model(model, copies)?;
        let hn = linalg::extensive_sum(h, copies)?;
        let decomp = symmetry::block_decompose(&model_n)?;
        let real = model.kind() == SymmetryKind::TimeReversal;
        let h_blocks = symmetry::blocks_of(&hn, &decomp, &model_n)?;
        let mut blocks = Vec::with_capacity(h_blocks.len());
        for hl in &h_blocks {
            let (vals, vecs) = eig(hl, real)?;
            let clusters = linalg::cluster_sorted(&vals, ENERGY_TOL)
                .into_iter()
                .map(|c| {
                    let e = c.iter().map(|&k| vals[k]).sum::<f64>() / c.len() as f64;
                    let basis = ComplexMatrix::from_columns(&c.iter().map(|&k| vecs.column(k)).collect::<Vec<_>>());
                    (e, basis)
                })
                .collect();
            blocks.push(BlockSpectrum { clusters });
        }
        Ok(Self { copies, d: model.dim(), real, decomp, blocks })
    }

    /// Best energy-conserving symmetric unitary for `ρ^{⊗N}` and its work.
    pub fn optimum(&self, rho: &ComplexMatrix) -> Result<DirectWitness> {
        let power = linalg::tensor_power(rho, self.copies)?;
        let reduced = self.decomp.reduced_state(&power);
        let mut parts = Vec::with_capacity(self.blocks.len());
        let mut work = 0.0;
        for (spec, rl) in self.blocks.iter().zip(&reduced) {
            let sigma = if self.real { rl.map(|z| C64::new(z.re, 0.0)) } else { rl.clone() };
            // Eigenvectors of the dephased block state, each inside one energy eigenspace.
            let mut levels: Vec<(f64, f64, ComplexVector)> = Vec::new();
            for (e, basis) in &spec.clusters {
                let (pops, vecs) = eig(&(basis.adjoint() * &sigma * basis), self.real)?;
                for (k, p) in pops.into_iter().enumerate() {
                    levels.push((*e, p, basis * vecs.column(k)));
                }
            }
            let mut by_pop: Vec<usize> = (0..levels.len()).collect();
            by_pop.sort_by(|&a, &b| levels[b].1.total_cmp(&levels[a].1));
            let mut by_energy: Vec<usize> = (0..levels.len()).collect();
            by_energy.sort_by(|&a, &b| levels[a].0.total_cmp(&levels[b].0));
            let m = levels.first().map_or(0, |l| l.2.len());
            let mut u = ComplexMatrix::zeros(m, m);
            for (&from, &to) in by_pop.iter().zip(&by_energy) {
                work += levels[from].1 * (levels[from].0 - levels[to].0);
                u += &levels[to].2 * levels[from].2.adjoint();
            }
            parts.push(u);
        }
        Ok(DirectWitness { copies: self.copies, unitary: self.decomp.assemble(&parts), work: work.max(0.0) })
    }

    pub fn dim(&self) -> usize {
        self.d.pow(self.copies as u32)
    }
}

/// Copy spaces for `N = 2, 3, …` while `d^N` stays within [`DIRECT_LIMIT`].
pub fn copy_spaces(model: &SymmetryModel, h: &ComplexMatrix) -> Result<Vec<CopySpace>> {
    let mut out = Vec::new();
    let mut n = 2;
    while model.dim().checked_pow(n as u32).is_some_and(|dim| dim <= DIRECT_LIMIT) {
        out.push(CopySpace::new(model, h, n)?);
        n += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::passivity;
    use crate::sampling;
    use crate::state::{self, Hamiltonian, QuantumState};
    use crate::storage;
    use crate::symmetry::presets::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_symmetric_ergotropy_of_the_dephased_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let model = su2_dimer();
        let h = dimer_hamiltonian();
        let space = CopySpace::new(&model, &h, 2).unwrap();
        let h2 = Hamiltonian::new(linalg::extensive_sum(&h, 2).unwrap()).unwrap();
        let model2 = symmetry::tensor_power_model(&model, 2).unwrap();
        for _ in 0..5 {
            let rho = sampling::random_state(4, &mut rng);
            let w = space.optimum(&rho).unwrap();
            let big = QuantumState::new(linalg::tensor_power(&rho, 2).unwrap()).unwrap();
            let dephased = storage::apply_d(&big, &h2, &storage::MomentumDistribution::PositionEigenstate).unwrap();
            let oracle = passivity::sp_ergotropy(&dephased, &h2, &model2).unwrap().ergotropy;
            assert!((w.work - oracle).abs() < 1e-12, "{} vs {oracle}", w.work);
            // The work on the undephased copies is the same.
            let dense = state::extracted_work(&big, &h2, &w.unitary).unwrap();
            assert!((w.work - dense).abs() < 1e-12);
            assert!(linalg::hs_norm(&linalg::commutator(&(w.unitary.adjoint() * h2.matrix() * &w.unitary), h2.matrix())) < 1e-10);
            assert!(symmetry::symmetry_violation(&w.unitary, &model2) < 1e-10);
        }
    }

    #[test]
    fn gge_powers_give_nothing() {
        let model = su2_dimer();
        let h = dimer_hamiltonian();
        let (rho, _) = state::gge_state(&h, model.charges(), 0.7, &[0.3, -0.2, 0.1]).unwrap();
        for space in copy_spaces(&model, &h).unwrap() {
            assert!(space.optimum(rho.matrix()).unwrap().work < 1e-12);
        }
    }

    #[test]
    fn time_reversal_witness_is_real() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let model = time_reversal(3);
        let h = chain_hamiltonian(3);
        let space = CopySpace::new(&model, &h, 2).unwrap();
        let w = space.optimum(&sampling::random_state(3, &mut rng)).unwrap();
        let model2 = symmetry::tensor_power_model(&model, 2).unwrap();
        assert!(symmetry::symmetry_violation(&w.unitary, &model2) < 1e-10);
        assert!(linalg::unitarity_defect(&w.unitary) < 1e-10);
    }

    #[test]
    fn copy_limit() {
        let spaces = copy_spaces(&su2_dimer(), &dimer_hamiltonian()).unwrap();
        assert_eq!(spaces.iter().map(|s| s.copies).collect::<Vec<_>>(), vec![2, 3, 4]);
        assert!(copy_spaces(&SymmetryModel::trivial(20), &linalg::identity(20)).unwrap().is_empty());
    }
}
