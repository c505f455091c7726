//! Time-reversal symmetry: restricted ergotropy equals the ergotropy of the
//! time-reversal-symmetrized state.

use passivity::passivity::{ergotropy, tr_ergotropy};
use passivity::state::QuantumState;
use passivity::symmetry::{self, presets};
use passivity::sampling;
use rand::SeedableRng;

fn main() -> passivity::Result<()> {
    let model = presets::time_reversal(4);
    let h = presets::chain_hamiltonian(4);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..3 {
        let rho = QuantumState::new(sampling::random_state(4, &mut rng))?;
        let st = QuantumState::new(symmetry::time_reversal_symmetrize(rho.matrix(), &model)?)?;
        println!(
            "W = {:.4}, W_T = {:.4}, W(S_T ρ) = {:.4}",
            ergotropy(&rho, &h)?.ergotropy,
            tr_ergotropy(&rho, &h, &model)?.ergotropy,
            ergotropy(&st, &h)?.ergotropy
        );
    }
    Ok(())
}
