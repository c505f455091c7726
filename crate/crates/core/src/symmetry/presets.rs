//! Ready-made models and matching Hamiltonians.
//!
//! | name              | symmetry                          | Hamiltonian                 |
//! |-------------------|-----------------------------------|-----------------------------|
//! | `su2-dimer`       | total spin of two spin-1/2        | `s₁·s₂`                     |
//! | `u1-qubit`        | `σ_z/2`                           | `diag(0, 1)` (trivial)      |
//! | `u1-pair`         | total `σ_z/2` of two qubits       | XY hopping                  |
//! | `cyclic-n`        | translations of an `n`-site ring  | nearest-neighbour hopping   |
//! | `dihedral-n`      | translations and reflection       | nearest-neighbour hopping   |
//! | `time-reversal-d` | complex conjugation on `C^d`      | real tilted chain           |
//! | `trivial-d`       | none                              | real tilted chain           |

use super::SymmetryModel;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector, C64, ONE, ZERO};
use crate::state::{pauli, Hamiltonian};

pub fn spin_half() -> [ComplexMatrix; 3] {
    pauli().map(|p| p.scale(0.5))
}

fn local_pair(a: &ComplexMatrix) -> ComplexMatrix {
    let i2 = linalg::identity(2);
    a.kronecker(&i2) + i2.kronecker(a)
}

pub fn su2_dimer() -> SymmetryModel {
    SymmetryModel::su2(spin_half().iter().map(local_pair).collect()).expect("spin generators")
}

/// `H = s₁·s₂`: singlet at `-3/4`, triplet at `+1/4`.
pub fn dimer_hamiltonian() -> Hamiltonian {
    let s = spin_half();
    let h = s.iter().map(|a| a.kronecker(a)).fold(ComplexMatrix::zeros(4, 4), |acc, x| acc + x);
    Hamiltonian::new(h).expect("hermitian")
}

pub fn singlet() -> ComplexVector {
    let r = 0.5f64.sqrt();
    ComplexVector::from_vec(vec![ZERO, C64::new(r, 0.0), C64::new(-r, 0.0), ZERO])
}

/// Triplet states with `m = +1, 0, -1`.
pub fn triplet() -> [ComplexVector; 3] {
    let r = C64::new(0.5f64.sqrt(), 0.0);
    [
        ComplexVector::from_vec(vec![ONE, ZERO, ZERO, ZERO]),
        ComplexVector::from_vec(vec![ZERO, r, r, ZERO]),
        ComplexVector::from_vec(vec![ZERO, ZERO, ZERO, ONE]),
    ]
}

pub fn u1_qubit() -> SymmetryModel {
    SymmetryModel::u1(vec![pauli()[2].scale(0.5)]).expect("hermitian charge")
}

pub fn u1_pair() -> SymmetryModel {
    SymmetryModel::u1(vec![local_pair(&pauli()[2]).scale(0.5)]).expect("hermitian charge")
}

/// `(σˣσˣ + σʸσʸ)/2` plus a weak field: charge sectors `q = ±1` at `∓0.3`, `q = 0` at `±1`.
pub fn u1_pair_hamiltonian() -> Hamiltonian {
    let p = pauli();
    let hop = (p[0].kronecker(&p[0]) + p[1].kronecker(&p[1])).scale(0.5);
    let field = local_pair(&p[2]).scale(-0.15);
    Hamiltonian::new(hop + field).expect("hermitian")
}

pub fn shift(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| if i == (j + 1) % n { ONE } else { ZERO })
}

pub fn reflection(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| if i == (n - j) % n { ONE } else { ZERO })
}

pub fn cyclic_ring(n: usize) -> Result<SymmetryModel> {
    SymmetryModel::cyclic(shift(n), n)
}

pub fn dihedral_ring(n: usize) -> Result<SymmetryModel> {
    SymmetryModel::dihedral(shift(n), reflection(n), n)
}

/// `-Σ_j (|j⟩⟨j+1| + h.c.)` on a ring of `n` sites.
pub fn ring_hamiltonian(n: usize) -> Hamiltonian {
    let mut h = ComplexMatrix::zeros(n, n);
    if n > 1 {
        let edges = if n == 2 { 1 } else { n };
        for j in 0..edges {
            let k = (j + 1) % n;
            h[(j, k)] -= ONE;
            h[(k, j)] -= ONE;
        }
    }
    Hamiltonian::new(h).expect("hermitian")
}

pub fn time_reversal(d: usize) -> SymmetryModel {
    SymmetryModel::time_reversal(linalg::identity(d)).expect("identity basis")
}

/// Real open chain with hopping `-1` and on-site energies `j/2`.
pub fn chain_hamiltonian(d: usize) -> Hamiltonian {
    let h = ComplexMatrix::from_fn(d, d, |i, j| {
        if i == j {
            C64::new(i as f64 / 2.0, 0.0)
        } else if i.abs_diff(j) == 1 {
            -ONE
        } else {
            ZERO
        }
    });
    Hamiltonian::new(h).expect("hermitian")
}

/// `H' = Σ_k s_{1,k}·s_{2,k} + Σ_k s_{2,k}·s_{1,k+1}` on an open chain of `n` dimers.
pub fn xxx_quench(n: usize) -> Result<Hamiltonian> {
    let sites = 2 * n;
    let dim = linalg::copies_dim(2, sites)?;
    let s = spin_half();
    let mut h = ComplexMatrix::zeros(dim, dim);
    for a in 0..sites.saturating_sub(1) {
        for sa in &s {
            let mut term = linalg::identity(1);
            for site in 0..sites {
                let f = if site == a || site == a + 1 { sa.clone() } else { linalg::identity(2) };
                term = term.kronecker(&f);
            }
            h += term;
        }
    }
    Hamiltonian::new(h)
}

fn suffix(name: &str, prefix: &str) -> Option<usize> {
    name.strip_prefix(prefix).and_then(|n| n.parse().ok())
}

pub fn preset(name: &str) -> Result<SymmetryModel> {
    match name {
        "su2-dimer" => Ok(su2_dimer()),
        "u1-qubit" => Ok(u1_qubit()),
        "u1-pair" => Ok(u1_pair()),
        _ => {
            if let Some(n) = suffix(name, "cyclic-") {
                cyclic_ring(n)
            } else if let Some(n) = suffix(name, "dihedral-") {
                dihedral_ring(n)
            } else if let Some(d) = suffix(name, "time-reversal-") {
                Ok(time_reversal(d))
            } else if let Some(d) = suffix(name, "trivial-") {
                Ok(SymmetryModel::trivial(d))
            } else {
                Err(Error::Parse(format!("unknown preset `{name}`")))
            }
        }
    }
}

/// The Hamiltonian that goes with a preset model name.
pub fn preset_hamiltonian(name: &str) -> Result<Hamiltonian> {
    match name {
        "su2-dimer" => Ok(dimer_hamiltonian()),
        "u1-qubit" => Hamiltonian::new(linalg::diag(&[0.0, 1.0])),
        "u1-pair" => Ok(u1_pair_hamiltonian()),
        _ => {
            if let Some(n) = suffix(name, "cyclic-").or_else(|| suffix(name, "dihedral-")) {
                Ok(ring_hamiltonian(n))
            } else if let Some(d) = suffix(name, "time-reversal-").or_else(|| suffix(name, "trivial-")) {
                Ok(chain_hamiltonian(d))
            } else {
                Err(Error::Parse(format!("unknown preset `{name}`")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::is_symmetry_respecting;

    #[test]
    fn preset_hamiltonians_respect_their_symmetry() {
        for name in ["su2-dimer", "u1-qubit", "u1-pair", "cyclic-2", "cyclic-5", "dihedral-3", "dihedral-4", "time-reversal-4", "trivial-3"] {
            let m = preset(name).unwrap();
            let h = preset_hamiltonian(name).unwrap();
            assert!(is_symmetry_respecting(&h, &m).0, "{name}");
        }
        assert!(preset("spin-9").is_err());
    }

    #[test]
    fn dimer_eigenvectors() {
        let h = dimer_hamiltonian();
        let s = singlet();
        assert!((&*h * &s + s.scale(0.75)).norm() < 1e-15);
        for t in triplet() {
            assert!((&*h * &t - t.scale(0.25)).norm() < 1e-15);
        }
    }

    #[test]
    fn xxx_quench_commutes_with_total_spin() {
        let h = xxx_quench(2).unwrap();
        let m = crate::symmetry::tensor_power_model(&su2_dimer(), 2).unwrap();
        assert!(is_symmetry_respecting(&h, &m).0);
    }
}
