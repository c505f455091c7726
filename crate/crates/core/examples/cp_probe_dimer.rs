//! Complete-passivity probe on the spin dimer: a GGE passes, other states get a
//! multi-copy witness that is checked on the full copy space.

use passivity::probe::{CpProber, ProbeBudget};
use passivity::state::{gge_state, QuantumState};
use passivity::symmetry::presets;
use passivity::sampling;
use rand::SeedableRng;

fn main() -> passivity::Result<()> {
    let model = presets::su2_dimer();
    let h = presets::dimer_hamiltonian();
    let prober = CpProber::new(&h, &model, ProbeBudget::default())?;

    let (gge, _) = gge_state(&h, model.charges(), 0.7, &[0.2, -0.1, 0.0])?;
    let rep = prober.probe(&gge)?;
    println!("GGE: {} (largest probe work {:.1e})", rep.verdict, rep.max_probe_work);

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..4 {
        let rho = QuantumState::new(sampling::random_state(4, &mut rng))?;
        let mut rep = prober.probe(&rho)?;
        let check = rep.dense_check(&rho, &h, &model)?;
        match &rep.witness {
            Some(w) => println!(
                "{}: {} copies, W = {:.3e} [{}], dense check passes: {:?}",
                rep.verdict,
                w.copies(),
                w.work,
                w.description,
                check.map(|c| c.passes(1e-9))
            ),
            None => println!("{}", rep.verdict),
        }
    }
    Ok(())
}
