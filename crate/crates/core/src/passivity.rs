//! Ergotropy: unrestricted, symmetry-protected and time-reversal-protected.

use nalgebra::DMatrix;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, C64};
use crate::state::{Hamiltonian, QuantumState};
use crate::symmetry::{self, BlockDecomposition, SymmetryKind, SymmetryModel};

/// A state counts as passive when its ergotropy is at most this.
pub const PASSIVE_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct PassivityReport {
    pub ergotropy: f64,
    pub optimal_unitary: ComplexMatrix,
    pub is_passive: bool,
    /// `(label, r_λ W(σ_λ, H_λ))`; empty for the unrestricted ergotropy.
    pub per_block: Vec<(String, f64)>,
}

impl PassivityReport {
    fn new(ergotropy: f64, optimal_unitary: ComplexMatrix, per_block: Vec<(String, f64)>) -> Self {
        Self { ergotropy, optimal_unitary, is_passive: ergotropy <= PASSIVE_TOL, per_block }
    }

    pub fn to_json(&self) -> Value {
        let blocks: Map<String, Value> = self.per_block.iter().map(|(k, w)| (k.clone(), json!(w))).collect();
        json!({ "ergotropy": self.ergotropy, "is_passive": self.is_passive, "per_block": blocks })
    }

    /// Checks that a parsed report's verdict follows from its numbers.
    pub fn json_is_consistent(v: &Value) -> bool {
        let (Some(w), Some(p)) = (v["ergotropy"].as_f64(), v["is_passive"].as_bool()) else {
            return false;
        };
        let block_sum: f64 = v["per_block"].as_object().map_or(0.0, |m| m.values().filter_map(Value::as_f64).sum());
        let blocks_ok = v["per_block"].as_object().is_none_or(|m| m.is_empty() || (block_sum - w).abs() <= 1e-9 * w.abs().max(1.0));
        p == (w <= PASSIVE_TOL) && blocks_ok
    }
}

/// Ergotropy of a positive (not necessarily normalized) matrix and a unitary
/// that attains it: sorted `ρ` eigenvectors go to sorted `H` eigenvectors.
pub fn ergotropy_of(rho: &ComplexMatrix, h: &ComplexMatrix) -> Result<(f64, ComplexMatrix)> {
    let d = linalg::square_dim(rho)?;
    if h.shape() != (d, d) {
        return Err(Error::Shape(format!("state dim {d} vs hamiltonian dim {}", h.nrows())));
    }
    if d == 0 {
        return Ok((0.0, ComplexMatrix::zeros(0, 0)));
    }
    let er = linalg::hermitian_eig(rho)?;
    let eh = linalg::hermitian_eig(h)?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| er.values[b].total_cmp(&er.values[a]));
    let mut u = ComplexMatrix::zeros(d, d);
    let mut passive_energy = 0.0;
    for (j, &k) in order.iter().enumerate() {
        passive_energy += er.values[k] * eh.values[j];
        u += eh.vectors.column(j) * er.vectors.column(k).adjoint();
    }
    let energy = linalg::trace_product(rho, h).re;
    Ok(((energy - passive_energy).max(0.0), u))
}

pub fn ergotropy(state: &QuantumState, h: &Hamiltonian) -> Result<PassivityReport> {
    let (w, u) = ergotropy_of(state.matrix(), h.matrix())?;
    Ok(PassivityReport::new(w, u, vec![]))
}

/// Maximal work over symmetry-respecting unitaries, `Σ_λ r_λ W(σ_λ, H_λ)`.
pub fn sp_ergotropy(state: &QuantumState, h: &Hamiltonian, model: &SymmetryModel) -> Result<PassivityReport> {
    if model.kind() == SymmetryKind::TimeReversal {
        return tr_ergotropy(state, h, model);
    }
    let decomp = symmetry::block_decompose(model)?;
    sp_ergotropy_with(state, h, model, &decomp)
}

pub fn sp_ergotropy_with(state: &QuantumState, h: &Hamiltonian, model: &SymmetryModel, decomp: &BlockDecomposition) -> Result<PassivityReport> {
    if state.dim() != model.dim() || h.dim() != model.dim() {
        return Err(Error::Shape("state, hamiltonian and model must share a dimension".into()));
    }
    let h_blocks = symmetry::blocks_of(h.matrix(), decomp, model)?;
    let rho_blocks = decomp.reduced_state(state.matrix());
    let mut total = 0.0;
    let mut per_block = Vec::new();
    let mut parts = Vec::new();
    for ((b, hl), rl) in decomp.blocks.iter().zip(&h_blocks).zip(&rho_blocks) {
        let sigma = rl.unscale(b.r as f64);
        let (w, u) = ergotropy_of(&sigma, hl)?;
        let w = w * b.r as f64;
        total += w;
        per_block.push((b.label.to_string(), w));
        parts.push(u);
    }
    Ok(PassivityReport::new(total, decomp.assemble(&parts), per_block))
}

fn real_part(m: &ComplexMatrix) -> DMatrix<f64> {
    m.map(|z| z.re)
}

/// Ergotropy under real orthogonal (time-reversal symmetric) unitaries,
/// equal to the ergotropy of `S_T(ρ)`.
pub fn tr_ergotropy(state: &QuantumState, h: &Hamiltonian, model: &SymmetryModel) -> Result<PassivityReport> {
    if model.kind() != SymmetryKind::TimeReversal {
        return Err(Error::WrongModelKind(format!("tr_ergotropy needs a time_reversal model, got {}", model.kind())));
    }
    if state.dim() != model.dim() || h.dim() != model.dim() {
        return Err(Error::Shape("state, hamiltonian and model must share a dimension".into()));
    }
    let hc = model.to_conjugation_basis(h.matrix());
    let imag = hc.iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
    if imag > symmetry::RESPECT_TOL {
        return Err(Error::Commutation(imag));
    }
    let rho_re = real_part(&model.to_conjugation_basis(state.matrix()));
    let (pv, pvec) = linalg::real_symmetric_eig(&rho_re);
    let (ev, evec) = linalg::real_symmetric_eig(&real_part(&hc));
    let d = pv.len();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| pv[b].total_cmp(&pv[a]));
    let mut u = DMatrix::<f64>::zeros(d, d);
    let mut passive_energy = 0.0;
    for (j, &k) in order.iter().enumerate() {
        passive_energy += pv[k] * ev[j];
        u += evec.column(j) * pvec.column(k).transpose();
    }
    let energy = (rho_re.component_mul(&real_part(&hc).transpose())).sum();
    let w = (energy - passive_energy).max(0.0);
    let uc = u.map(|x| C64::new(x, 0.0));
    Ok(PassivityReport::new(w, model.from_conjugation_basis(&uc), vec![("all".into(), w)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::diag;
    use crate::sampling;
    use crate::symmetry::presets::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inverted_qubit() {
        let rho = QuantumState::new(diag(&[0.3, 0.7])).unwrap();
        let h = Hamiltonian::new(diag(&[0.0, 1.0])).unwrap();
        let rep = ergotropy(&rho, &h).unwrap();
        assert!((rep.ergotropy - 0.4).abs() < 1e-14);
        assert!(!rep.is_passive);
        let w = crate::state::extracted_work(&rho, &h, &rep.optimal_unitary).unwrap();
        assert!((w - 0.4).abs() < 1e-14);
    }

    #[test]
    fn gibbs_is_passive() {
        let h = dimer_hamiltonian();
        let g = crate::state::gibbs_state(&h, 1.3).unwrap();
        assert!(ergotropy(&g, &h).unwrap().is_passive);
    }

    #[test]
    fn optimal_unitary_attains_ergotropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in [2, 3, 6] {
            let rho = QuantumState::new(sampling::random_state(d, &mut rng)).unwrap();
            let h = Hamiltonian::new(sampling::random_hermitian(d, &mut rng)).unwrap();
            let rep = ergotropy(&rho, &h).unwrap();
            let w = crate::state::extracted_work(&rho, &h, &rep.optimal_unitary).unwrap();
            assert!((w - rep.ergotropy).abs() < 1e-10);
        }
    }

    #[test]
    fn dimer_sp_ergotropy_blocks() {
        let m = su2_dimer();
        let h = dimer_hamiltonian();
        let s = singlet();
        let t = &triplet()[1];
        // Coherent superposition of singlet and triplet: only the coherence is locked.
        let psi = (s + t).unscale(2f64.sqrt());
        let rho = QuantumState::pure(&psi).unwrap();
        let sp = sp_ergotropy(&rho, &h, &m).unwrap();
        let plain = ergotropy(&rho, &h).unwrap();
        assert!((plain.ergotropy - 0.5).abs() < 1e-12);
        // Triplet weight 1/2 spread over three copies of R: σ = 1/6 per state at E = 1/4, all passive.
        assert!(sp.ergotropy.abs() < 1e-12);
        assert_eq!(sp.per_block.len(), 2);
    }

    #[test]
    fn tr_requires_real_hamiltonian() {
        let m = time_reversal(2);
        let h = Hamiltonian::new(crate::state::pauli()[1].clone()).unwrap();
        let rho = QuantumState::maximally_mixed(2);
        assert!(matches!(tr_ergotropy(&rho, &h, &m), Err(Error::Commutation(_))));
        assert!(matches!(tr_ergotropy(&rho, &h, &su2_dimer()), Err(Error::WrongModelKind(_))));
    }

    #[test]
    fn report_json_consistency() {
        let rho = QuantumState::new(diag(&[0.3, 0.7])).unwrap();
        let h = Hamiltonian::new(diag(&[0.0, 1.0])).unwrap();
        let v = ergotropy(&rho, &h).unwrap().to_json();
        assert!(PassivityReport::json_is_consistent(&v));
        let mut bad = v.clone();
        bad["is_passive"] = json!(true);
        assert!(!PassivityReport::json_is_consistent(&bad));
    }
}
