//! Density matrices, Hamiltonians and (generalized) Gibbs states.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector, C64};

pub const EIGEN_FLOOR: f64 = -1e-12;
pub const TRACE_RENORMALIZE: f64 = 1e-8;
pub const PD_THRESHOLD: f64 = 1e-12;
pub const UNITARITY_TOL: f64 = 1e-10;
pub const COMMUTATION_TOL: f64 = 1e-10;

/// A validated density matrix.
#[derive(Clone, Debug)]
pub struct QuantumState {
    rho: ComplexMatrix,
    min_eigenvalue: f64,
}

impl QuantumState {
    /// Validates Hermiticity, positivity and trace; traces within `1e-8` of one are renormalized.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let rho = linalg::symmetrized(&m).map_err(|e| match e {
            Error::NotHermitian { asym, .. } => Error::InvalidState(format!("not hermitian (asymmetry {asym:.3e})")),
            other => other,
        })?;
        let tr = rho.trace().re;
        if (tr - 1.0).abs() > TRACE_RENORMALIZE {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let rho = rho.unscale(tr);
        let eig = linalg::hermitian_eig(&rho)?;
        let min_eigenvalue = eig.values.first().copied().unwrap_or(0.0);
        if min_eigenvalue < EIGEN_FLOOR {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eigenvalue:.3e}")));
        }
        Ok(Self { rho, min_eigenvalue })
    }

    pub fn pure(psi: &ComplexVector) -> Result<Self> {
        let n = psi.norm();
        if n == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v = psi.unscale(n);
        Self::new(linalg::outer(&v, &v))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { rho: linalg::identity(d).unscale(d as f64), min_eigenvalue: 1.0 / d as f64 }
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.rho
    }

    pub fn is_positive_definite(&self) -> bool {
        self.min_eigenvalue > PD_THRESHOLD
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn energy(&self, h: &Hamiltonian) -> f64 {
        linalg::trace_product(&self.rho, h.matrix()).re
    }
}

impl Deref for QuantumState {
    type Target = ComplexMatrix;
    fn deref(&self) -> &ComplexMatrix {
        &self.rho
    }
}

#[derive(Clone, Debug)]
pub struct Hamiltonian {
    h: ComplexMatrix,
}

impl Hamiltonian {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Ok(Self { h: linalg::symmetrized(&m)? })
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.h
    }

    /// `H^(n) = Σ_k H_k` on `n` copies.
    pub fn extensive(&self, n: usize) -> Result<Hamiltonian> {
        Ok(Hamiltonian { h: linalg::extensive_sum(&self.h, n)? })
    }
}

impl Deref for Hamiltonian {
    type Target = ComplexMatrix;
    fn deref(&self) -> &ComplexMatrix {
        &self.h
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GGEParams {
    pub beta: f64,
    pub mu: Vec<f64>,
    pub log_partition: f64,
}

fn check_dims(a: usize, b: usize, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::Shape(format!("{what}: dimension {a} vs {b}")));
    }
    Ok(())
}

/// `tr(ρH) - tr(UρU†H)` for a unitary `U`.
pub fn extracted_work(state: &QuantumState, h: &Hamiltonian, u: &ComplexMatrix) -> Result<f64> {
    check_dims(state.dim(), h.dim(), "state vs hamiltonian")?;
    check_dims(state.dim(), u.nrows(), "state vs unitary")?;
    linalg::ensure_unitary(u, UNITARITY_TOL)?;
    Ok(work_unchecked(state.matrix(), h.matrix(), u))
}

pub(crate) fn work_unchecked(rho: &ComplexMatrix, h: &ComplexMatrix, u: &ComplexMatrix) -> f64 {
    let evolved = u * rho * u.adjoint();
    (linalg::trace_product(rho, h) - linalg::trace_product(&evolved, h)).re
}

/// Normalized `exp(-X)` for Hermitian `X`, with the spectrum shifted for stability.
/// Returns the state and `log tr exp(-X)`.
fn normalized_exp_neg(x: &ComplexMatrix) -> Result<(QuantumState, f64)> {
    let eig = linalg::hermitian_eig(x)?;
    let shift = eig.values.first().copied().unwrap_or(0.0);
    let weights: Vec<f64> = eig.values.iter().map(|&v| (-(v - shift)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let rho = eig.apply(|v| (-(v - shift)).exp() / z);
    let state = QuantumState::new(rho)?;
    Ok((state, z.ln() - shift))
}

pub fn gibbs_state(h: &Hamiltonian, beta: f64) -> Result<QuantumState> {
    if !beta.is_finite() {
        return Err(Error::Domain("beta must be finite".into()));
    }
    Ok(normalized_exp_neg(&h.matrix().scale(beta))?.0)
}

/// `exp(-βH - Σ μ_i Q_i) / Z`; every charge must commute with `H`.
pub fn gge_state(h: &Hamiltonian, charges: &[ComplexMatrix], beta: f64, mu: &[f64]) -> Result<(QuantumState, GGEParams)> {
    if charges.len() != mu.len() {
        return Err(Error::Shape(format!("{} charges but {} chemical potentials", charges.len(), mu.len())));
    }
    if !beta.is_finite() || mu.iter().any(|m| !m.is_finite()) {
        return Err(Error::Domain("GGE parameters must be finite".into()));
    }
    let mut x = h.matrix().scale(beta);
    for (q, &m) in charges.iter().zip(mu) {
        check_dims(h.dim(), q.nrows(), "hamiltonian vs charge")?;
        let c = linalg::hs_norm(&linalg::commutator(h.matrix(), q));
        if c > COMMUTATION_TOL * linalg::hs_norm(h.matrix()).max(1.0) * linalg::hs_norm(q).max(1.0) {
            return Err(Error::Commutation(c));
        }
        x += q.scale(m);
    }
    let (state, log_partition) = normalized_exp_neg(&x)?;
    Ok((state, GGEParams { beta, mu: mu.to_vec(), log_partition }))
}

pub fn pauli() -> [ComplexMatrix; 3] {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        ComplexMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        ComplexMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        ComplexMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::diag;

    #[test]
    fn qubit_swap_work() {
        let rho = QuantumState::new(diag(&[0.3, 0.7])).unwrap();
        let h = Hamiltonian::new(diag(&[0.0, 1.0])).unwrap();
        let w = extracted_work(&rho, &h, &pauli()[0]).unwrap();
        assert!((w - 0.4).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_states() {
        assert!(matches!(QuantumState::new(diag(&[0.5, 0.6])), Err(Error::InvalidState(_))));
        assert!(matches!(QuantumState::new(diag(&[1.2, -0.2])), Err(Error::InvalidState(_))));
        let nh = ComplexMatrix::from_row_slice(2, 2, &[C64::new(0.5, 0.0), C64::new(0.1, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0)]);
        assert!(matches!(QuantumState::new(nh), Err(Error::InvalidState(_))));
    }

    #[test]
    fn small_trace_error_is_renormalized() {
        let s = QuantumState::new(diag(&[0.3, 0.7 + 5e-9])).unwrap();
        assert!((s.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_unitary_is_rejected() {
        let rho = QuantumState::maximally_mixed(2);
        let h = Hamiltonian::new(diag(&[0.0, 1.0])).unwrap();
        assert!(matches!(extracted_work(&rho, &h, &diag(&[1.0, 2.0])), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn gibbs_populations() {
        let h = Hamiltonian::new(diag(&[0.0, 1.0, 5.0])).unwrap();
        let g = gibbs_state(&h, 2.0).unwrap();
        let z = 1.0 + (-2.0f64).exp() + (-10.0f64).exp();
        assert!((g[(1, 1)].re - (-2.0f64).exp() / z).abs() < 1e-14);
        let hot = gibbs_state(&h, -300.0).unwrap();
        assert!((hot[(2, 2)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gge_requires_commuting_charges() {
        let h = Hamiltonian::new(diag(&[0.0, 1.0])).unwrap();
        let r = gge_state(&h, &[pauli()[0].clone()], 1.0, &[0.5]);
        assert!(matches!(r, Err(Error::Commutation(_))));
    }
}
