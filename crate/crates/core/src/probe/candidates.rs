//! Projectors `P` on `M` copies commuting with `H^(M)` and the symmetry.

use super::phi::ENERGY_TOL;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector, C64};
use crate::symmetry::{self, BlockDecomposition, SymmetryKind, SymmetryModel};

const CASIMIR_CLUSTER_TOL: f64 = 1e-8;
const VERIFY_TOL: f64 = 1e-9;
const DUPLICATE_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct OmegaCandidate {
    pub copies: usize,
    pub projector: ComplexMatrix,
    pub description: String,
}

struct Collector {
    dim: usize,
    out: Vec<OmegaCandidate>,
}

impl Collector {
    fn push(&mut self, copies: usize, projector: ComplexMatrix, description: String) {
        let d = projector.nrows();
        let trivial = linalg::hs_norm(&projector) < DUPLICATE_TOL || linalg::hs_norm(&(&projector - linalg::identity(d))) < DUPLICATE_TOL;
        let seen = self
            .out
            .iter()
            .any(|c| c.copies == copies && linalg::hs_norm(&(&c.projector - &projector)) < DUPLICATE_TOL);
        if !trivial && !seen && d == self.dim.pow(copies as u32) {
            self.out.push(OmegaCandidate { copies, projector, description });
        }
    }
}

fn multiplicity_eigen(hl: &ComplexMatrix, real: bool) -> Result<(Vec<f64>, ComplexMatrix)> {
    if real {
        let (vals, vecs) = linalg::real_symmetric_eig(&hl.map(|z| z.re));
        Ok((vals, vecs.map(|x| C64::new(x, 0.0))))
    } else {
        let e = linalg::hermitian_eig(hl)?;
        Ok((e.values, e.vectors))
    }
}

fn single_copy(model: &SymmetryModel, h: &ComplexMatrix, decomp: &BlockDecomposition, acc: &mut Collector) -> Result<()> {
    let real = model.kind() == SymmetryKind::TimeReversal;
    for (e, p) in linalg::hermitian_eig(h)?.spectral_projectors(ENERGY_TOL) {
        acc.push(1, p, format!("energy projector E={e:.6}"));
    }
    let h_blocks = symmetry::blocks_of(h, decomp, model)?;
    for (b, hl) in decomp.blocks.iter().zip(&h_blocks) {
        let (vals, vecs) = multiplicity_eigen(hl, real)?;
        for cluster in linalg::cluster_sorted(&vals, ENERGY_TOL) {
            let cols: Vec<ComplexVector> = cluster.iter().map(|&k| vecs.column(k).into_owned()).collect();
            let pi = cols.iter().fold(ComplexMatrix::zeros(b.m, b.m), |acc, v| acc + linalg::outer(v, v));
            let e = vals[cluster[0]];
            acc.push(1, b.embed_operator(&pi), format!("sector {} projector E={e:.6}", b.label));
            if cols.len() < 2 {
                continue;
            }
            let rank_one = |v: &ComplexVector| b.embed_operator(&linalg::outer(v, v));
            for (a, va) in cols.iter().enumerate() {
                acc.push(1, rank_one(va), format!("sector {} E={e:.6} basis {a}", b.label));
            }
            let s = 0.5f64.sqrt();
            for a in 0..cols.len() {
                for c in a + 1..cols.len() {
                    acc.push(1, rank_one(&(&cols[a] + &cols[c]).scale(s)), format!("sector {} E={e:.6} ({a}+{c})", b.label));
                    if !real {
                        let v = (&cols[a] + &cols[c] * linalg::I).scale(s);
                        acc.push(1, rank_one(&v), format!("sector {} E={e:.6} ({a}+i{c})", b.label));
                    }
                }
            }
        }
    }
    Ok(())
}

fn two_copy(model: &SymmetryModel, acc: &mut Collector) -> Result<()> {
    if model.kind().is_lie() {
        let c = symmetry::casimir_two_copy(model)?;
        for (w, p) in linalg::hermitian_eig(&c)?.spectral_projectors(CASIMIR_CLUSTER_TOL) {
            acc.push(2, p, format!("two-copy Casimir projector ω={w:.6}"));
        }
    }
    if let (SymmetryKind::Dihedral(n), Some(t)) = (model.kind(), model.translation()) {
        // Π_z = (1/n) Σ_j z^{-j} t^j.
        let d = model.dim();
        for k in 1..n {
            if 2 * k >= n {
                break;
            }
            let z = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64);
            let proj = |z: C64| {
                let mut acc = ComplexMatrix::zeros(d, d);
                let mut power = linalg::identity(d);
                for j in 0..n {
                    acc += &power * z.powu(j as u32).conj();
                    power = &power * t;
                }
                acc.unscale(n as f64)
            };
            let (pz, pzc) = (proj(z), proj(z.conj()));
            if linalg::hs_norm(&pz) < DUPLICATE_TOL {
                continue;
            }
            let p = linalg::tensor_product(&pz, &pz)? + linalg::tensor_product(&pzc, &pzc)?;
            acc.push(2, p, format!("Π_z⊗Π_z + Π_z*⊗Π_z* for z=e^(2πi·{k}/{n})"));
        }
    }
    Ok(())
}

/// Candidate projectors on up to `max_copies ∈ {1, 2}` copies, each verified
/// to commute with `H^(M)` and the `M`-copy symmetry.
pub fn omega_candidates(model: &SymmetryModel, h: &ComplexMatrix, max_copies: usize) -> Result<Vec<OmegaCandidate>> {
    if !(1..=2).contains(&max_copies) {
        return Err(Error::Domain(format!("candidate copies must be 1 or 2, got {max_copies}")));
    }
    let decomp = symmetry::block_decompose(model)?;
    omega_candidates_with(model, h, &decomp, max_copies)
}

pub fn omega_candidates_with(model: &SymmetryModel, h: &ComplexMatrix, decomp: &BlockDecomposition, max_copies: usize) -> Result<Vec<OmegaCandidate>> {
    let mut acc = Collector { dim: model.dim(), out: vec![] };
    single_copy(model, h, decomp, &mut acc)?;
    if max_copies >= 2 {
        two_copy(model, &mut acc)?;
    }
    let mut verified = Vec::with_capacity(acc.out.len());
    for cand in acc.out {
        let hm = linalg::extensive_sum(h, cand.copies)?;
        let model_m = symmetry::tensor_power_model(model, cand.copies)?;
        let comm = linalg::hs_norm(&linalg::commutator(&hm, &cand.projector));
        let sym = symmetry::symmetry_violation(&cand.projector, &model_m);
        if comm <= VERIFY_TOL * linalg::hs_norm(&hm).max(1.0) && sym <= VERIFY_TOL {
            verified.push(cand);
        }
    }
    Ok(verified)
}
