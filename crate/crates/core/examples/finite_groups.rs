//! Cyclic and dihedral ring symmetries: Gibbs states pass, asymmetric states do not.

use passivity::probe::{CpProber, ProbeBudget};
use passivity::state::{gibbs_state, QuantumState};
use passivity::symmetry::presets;
use passivity::{passivity as pass, sampling};
use rand::SeedableRng;

fn main() -> passivity::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for name in ["cyclic-3", "dihedral-3", "dihedral-4"] {
        let model = presets::preset(name)?;
        let h = presets::preset_hamiltonian(name)?;
        let prober = CpProber::new(&h, &model, ProbeBudget::default())?;
        let gibbs = prober.probe(&gibbs_state(&h, 0.8)?)?;
        let rho = QuantumState::new(sampling::random_state(model.dim(), &mut rng))?;
        let rep = prober.probe(&rho)?;
        println!(
            "{name}: Gibbs {}; random state {} (W = {:.3e}), one-copy symmetric ergotropy {:.3e}",
            gibbs.verdict,
            rep.verdict,
            rep.witness.as_ref().map_or(0.0, |w| w.work),
            pass::sp_ergotropy(&rho, &h, &model)?.ergotropy
        );
    }
    Ok(())
}
