//! Recovering (β, μ) from a dimer GGE, and the residual of a state that is not one.

use passivity::gge::{gge_distance, gge_fit};
use passivity::state::{gge_state, QuantumState};
use passivity::symmetry::presets;
use passivity::{linalg, sampling};
use rand::SeedableRng;

fn main() -> passivity::Result<()> {
    let model = presets::su2_dimer();
    let h = presets::dimer_hamiltonian();
    let (rho, params) = gge_state(&h, model.charges(), 1.1, &[0.3, 0.0, -0.4])?;
    let fit = gge_fit(&rho, &h, model.charges(), None)?;
    println!("drawn  β = {:.6}, μ = {:.6?}", params.beta, params.mu);
    println!("fitted β = {:.6}, μ = {:.6?}, is_gge = {}", fit.params.beta, fit.params.mu, fit.is_gge);

    // Closed forms for the dimer.
    let log_rho = linalg::herm_log(rho.matrix())?;
    println!("-4 tr(log ρ H)/3 = {:.6}", -4.0 * linalg::trace_product(&log_rho, &h).re / 3.0);

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let other = QuantumState::new(sampling::random_state(4, &mut rng))?;
    let fit = gge_fit(&other, &h, model.charges(), None)?;
    println!(
        "random state: relative residual {:.3e}, trace distance to fit {:.3}, is_gge = {}",
        fit.relative_residual,
        gge_distance(&other, &fit, &h, model.charges())?,
        fit.is_gge
    );
    Ok(())
}
