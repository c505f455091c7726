//! Fitting a generalized Gibbs ensemble to a state.
//!
//! With `ξ = -log ρ`, the state is a GGE exactly when `ξ` lies in
//! `span{I, H, Q_1, …}`. The fit is the orthogonal HS projection onto that span.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::state::{self, GGEParams, Hamiltonian, QuantumState};

/// Residual tolerance relative to `||log ρ||_HS`.
pub const DEFAULT_TOL: f64 = 1e-7;
pub const BETA_FLOOR: f64 = -1e-9;

#[derive(Clone, Debug)]
pub struct GGEFit {
    pub params: GGEParams,
    /// `||ξ - proj ξ||_HS`.
    pub residual: f64,
    /// `residual / ||ξ||_HS`.
    pub relative_residual: f64,
    pub beta_nonneg: bool,
    pub is_gge: bool,
    pub tolerance: f64,
}

impl GGEFit {
    pub fn to_json(&self) -> Value {
        json!({
            "beta": self.params.beta,
            "mu": self.params.mu,
            "residual": self.residual,
            "relative_residual": self.relative_residual,
            "beta_nonneg": self.beta_nonneg,
            "is_gge": self.is_gge,
        })
    }

    pub fn json_is_consistent(v: &Value, tol: f64) -> bool {
        let (Some(beta), Some(rel), Some(flag)) = (v["beta"].as_f64(), v["relative_residual"].as_f64(), v["is_gge"].as_bool()) else {
            return false;
        };
        flag == (rel <= tol && beta >= BETA_FLOOR)
    }
}

/// Projects `-log ρ` onto `span{I, H, Q_i}` and reads off `(β, μ)`.
pub fn gge_fit(state: &QuantumState, h: &Hamiltonian, charges: &[ComplexMatrix], tol: Option<f64>) -> Result<GGEFit> {
    let tolerance = tol.unwrap_or(DEFAULT_TOL);
    if !state.is_positive_definite() {
        return Err(Error::Domain(format!(
            "GGE fit needs a positive definite state (min eigenvalue {:.3e})",
            state.min_eigenvalue()
        )));
    }
    let d = state.dim();
    if h.dim() != d || charges.iter().any(|q| q.shape() != (d, d)) {
        return Err(Error::Shape("state, hamiltonian and charges must share a dimension".into()));
    }
    let xi = -linalg::herm_log(state.matrix())?;
    let mut basis = vec![linalg::identity(d), h.matrix().clone()];
    basis.extend(charges.iter().cloned());
    let proj = linalg::project_onto_span(&xi, &basis)?;
    let norm = linalg::hs_norm(&xi);
    let relative_residual = if norm > 0.0 { proj.residual / norm } else { 0.0 };
    let beta = proj.coefficients[1].re;
    let mu: Vec<f64> = proj.coefficients[2..].iter().map(|c| c.re).collect();
    let log_partition = proj.coefficients[0].re;
    let beta_nonneg = beta >= BETA_FLOOR;
    Ok(GGEFit {
        params: GGEParams { beta, mu, log_partition },
        residual: proj.residual,
        relative_residual,
        beta_nonneg,
        is_gge: relative_residual <= tolerance && beta_nonneg,
        tolerance,
    })
}

/// The normalized GGE with the fitted parameters.
pub fn fitted_state(fit: &GGEFit, h: &Hamiltonian, charges: &[ComplexMatrix]) -> Result<QuantumState> {
    Ok(state::gge_state(h, charges, fit.params.beta, &fit.params.mu)?.0)
}

/// Trace distance `½||ρ - ρ_fit||_1` to the fitted GGE.
pub fn gge_distance(state: &QuantumState, fit: &GGEFit, h: &Hamiltonian, charges: &[ComplexMatrix]) -> Result<f64> {
    let fitted = fitted_state(fit, h, charges)?;
    Ok(0.5 * linalg::trace_norm(&(state.matrix() - fitted.matrix()))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use crate::symmetry::presets::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn recovers_dimer_parameters() {
        let m = su2_dimer();
        let h = dimer_hamiltonian();
        let (rho, p) = state::gge_state(&h, m.charges(), 0.7, &[0.1, -0.2, 0.3]).unwrap();
        let fit = gge_fit(&rho, &h, m.charges(), None).unwrap();
        assert!(fit.is_gge);
        assert!((fit.params.beta - 0.7).abs() < 1e-10);
        for (a, b) in fit.params.mu.iter().zip([0.1, -0.2, 0.3]) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!((fit.params.log_partition - p.log_partition).abs() < 1e-10);
        assert!(gge_distance(&rho, &fit, &h, m.charges()).unwrap() < 1e-12);
    }

    #[test]
    fn negative_temperature_is_not_gge() {
        let h = dimer_hamiltonian();
        let rho = state::gibbs_state(&h, -0.5).unwrap();
        let fit = gge_fit(&rho, &h, &[], None).unwrap();
        assert!(fit.relative_residual < 1e-10);
        assert!(!fit.beta_nonneg && !fit.is_gge);
        assert!((fit.params.beta + 0.5).abs() < 1e-10);
    }

    #[test]
    fn generic_state_is_not_gge() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rho = QuantumState::new(sampling::random_state(4, &mut rng)).unwrap();
        let fit = gge_fit(&rho, &dimer_hamiltonian(), su2_dimer().charges(), None).unwrap();
        assert!(!fit.is_gge);
        assert!(GGEFit::json_is_consistent(&fit.to_json(), DEFAULT_TOL));
    }

    #[test]
    fn pure_state_is_rejected() {
        let rho = QuantumState::pure(&singlet()).unwrap();
        assert!(matches!(gge_fit(&rho, &dimer_hamiltonian(), &[], None), Err(Error::Domain(_))));
    }
}
