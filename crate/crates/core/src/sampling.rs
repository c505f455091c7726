//! Random states, Hermitian matrices and Haar unitaries for examples and tests.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, ComplexVector, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn ginibre<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(d, rng);
    (&g + g.adjoint()).scale(0.5)
}

/// Hilbert-Schmidt random density matrix (full rank almost surely).
pub fn random_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(d, rng);
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho.unscale(tr)
}

pub fn random_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexVector {
    let v = ComplexVector::from_fn(d, |_, _| gaussian(rng));
    let n = v.norm();
    v.unscale(n)
}

/// Haar random unitary via QR of a Ginibre matrix with the phase fix.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let qr = ginibre(d, rng).qr();
    let (q, r) = qr.unpack();
    let mut u = q;
    for k in 0..d {
        let z = r[(k, k)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            u[(i, k)] *= phase;
        }
    }
    u
}

/// Haar random real orthogonal matrix.
pub fn haar_orthogonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = nalgebra::DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
    let (q, r) = g.qr().unpack();
    ComplexMatrix::from_fn(d, d, |i, k| C64::new(q[(i, k)] * r[(k, k)].signum(), 0.0))
}
