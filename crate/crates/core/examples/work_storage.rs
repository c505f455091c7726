//! Work extraction into an explicit storage: a sharp storage momentum changes
//! nothing, a sharp position dephases the system and locks the coherent work.

use passivity::linalg;
use passivity::passivity::ergotropy;
use passivity::state::{Hamiltonian, QuantumState};
use passivity::storage::{ws_ergotropy, ws_work_kitaev, MomentumDistribution};

fn main() -> passivity::Result<()> {
    let h = Hamiltonian::new(linalg::diag(&[0.0, 1.0]))?;
    // Inverted populations plus a coherence.
    let rho = QuantumState::new(linalg::from_real(&[&[0.2, 0.3], &[0.3, 0.8]]))?;
    println!("ergotropy: {:.4}", ergotropy(&rho, &h)?.ergotropy);

    let dists = [
        ("momentum eigenstate", MomentumDistribution::PointMass(0.3)),
        ("two momenta 0 and 1", MomentumDistribution::weighted(vec![(0.0, 0.5), (1.0, 0.5)])?),
        ("position eigenstate", MomentumDistribution::PositionEigenstate),
    ];
    for (name, dist) in &dists {
        println!("  storage, {name}: {:.4}", ws_ergotropy(&rho, &h, dist, None)?);
    }

    // A swap of the two levels commutes U†HU with H, so the storage never matters.
    let swap = linalg::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
    for (name, dist) in &dists {
        let rep = ws_work_kitaev(&rho, &h, dist, &swap)?;
        println!("  swap with {name}: stored {:.4}, direct {:.4}", rep.ws_work, rep.dense_work);
    }
    Ok(())
}
