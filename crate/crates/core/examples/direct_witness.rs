//! The energy-conserving symmetric optimum on a few copies, for states whose
//! quartet witnesses would need many copies.

use passivity::probe::copy_spaces;
use passivity::state::QuantumState;
use passivity::symmetry::presets;
use passivity::{passivity as pass, sampling};
use rand::SeedableRng;

fn main() -> passivity::Result<()> {
    let model = presets::su2_dimer();
    let h = presets::dimer_hamiltonian();
    let spaces = copy_spaces(&model, &h)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..3 {
        let rho = QuantumState::new(sampling::random_state(4, &mut rng))?;
        let one = pass::sp_ergotropy(&rho, &h, &model)?.ergotropy;
        let per_copy: Vec<String> = spaces
            .iter()
            .map(|s| s.optimum(rho.matrix()).map(|w| format!("N={}: {:.2e}", s.copies, w.work)))
            .collect::<passivity::Result<_>>()?;
        println!("one copy {one:.2e}; {}", per_copy.join(", "));
    }
    Ok(())
}
