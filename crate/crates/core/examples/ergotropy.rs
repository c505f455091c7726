//! Ergotropy of a qubit and of the spin dimer, with and without the symmetry constraint.

use passivity::linalg::{self, C64};
use passivity::passivity::{ergotropy, sp_ergotropy};
use passivity::state::{Hamiltonian, QuantumState};
use passivity::symmetry::presets;

fn main() -> passivity::Result<()> {
    let h = Hamiltonian::new(linalg::diag(&[0.0, 1.0]))?;
    let excited = QuantumState::new(linalg::diag(&[0.2, 0.8]))?;
    let w = ergotropy(&excited, &h)?;
    println!("population-inverted qubit: W = {:.4} (passive: {})", w.ergotropy, w.is_passive);

    let plus = linalg::ComplexVector::from_element(2, C64::new(0.5f64.sqrt(), 0.0));
    println!("|+⟩: W = {:.4}", ergotropy(&QuantumState::pure(&plus)?, &h)?.ergotropy);

    // Singlet/triplet coherence: a generic unitary can use it, a symmetric one cannot.
    let v = (presets::singlet() + &presets::triplet()[0]).unscale(2f64.sqrt());
    let rho = QuantumState::new(linalg::identity(4).scale(0.125) + linalg::outer(&v, &v).scale(0.5))?;
    let h = presets::dimer_hamiltonian();
    let free = ergotropy(&rho, &h)?;
    let sym = sp_ergotropy(&rho, &h, &presets::su2_dimer())?;
    println!("dimer: W = {:.4}, SU(2)-restricted W = {:.4}", free.ergotropy, sym.ergotropy);
    for (label, w) in &sym.per_block {
        println!("  block {label}: {w:.4}");
    }
    Ok(())
}
