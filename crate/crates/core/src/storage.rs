//! Work extraction with an explicit work storage.
//!
//! Energy-conserving, translation-invariant unitaries on system plus storage
//! act on the system through the map `D(ρ) = ∫dq ⟨q|ρ_W|q⟩ e^{-iqH} ρ e^{iqH}`,
//! and the stored work equals `W(D(ρ), U)`. Only the momentum distribution of
//! the storage state matters, so that is all we model.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, Eigh, C64};
use crate::passivity;
use crate::state::{self, Hamiltonian, QuantumState};
use crate::symmetry::SymmetryModel;

pub const ENERGY_CLUSTER_TOL: f64 = 1e-9;
pub const EQUAL_TOL: f64 = 1e-9;
const WEIGHT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum MomentumDistribution {
    /// Storage in a momentum eigenstate: `D` is conjugation by `exp(-iqH)`.
    PointMass(f64),
    /// Storage in a position eigenstate: `D` dephases in the energy basis.
    PositionEigenstate,
    /// Finite mixture `Σ w_k δ(q - q_k)`.
    Weighted(Vec<(f64, f64)>),
}

impl MomentumDistribution {
    pub fn weighted(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() || points.iter().any(|&(q, w)| !q.is_finite() || !(w >= 0.0)) {
            return Err(Error::Domain("weights must be non-negative with finite momenta".into()));
        }
        let total: f64 = points.iter().map(|p| p.1).sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::Domain(format!("weights sum to {total}, not 1")));
        }
        Ok(Self::Weighted(points))
    }

    pub fn to_json(&self) -> Value {
        match self {
            Self::PointMass(q) => json!({ "kind": "point", "q": q }),
            Self::PositionEigenstate => json!({ "kind": "position" }),
            Self::Weighted(points) => json!({ "kind": "weighted", "points": points.iter().map(|&(q, w)| json!([q, w])).collect::<Vec<_>>() }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        match v["kind"].as_str() {
            Some("point") => Ok(Self::PointMass(v["q"].as_f64().unwrap_or(0.0))),
            Some("position") => Ok(Self::PositionEigenstate),
            Some("weighted") => {
                let pts = v["points"].as_array().ok_or_else(|| Error::Parse("weighted needs `points`".into()))?;
                let parsed = pts
                    .iter()
                    .map(|p| match (p[0].as_f64(), p[1].as_f64()) {
                        (Some(q), Some(w)) => Ok((q, w)),
                        _ => Err(Error::Parse("points must be [q, w] pairs".into())),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::weighted(parsed)
            }
            _ => Err(Error::Parse("distribution kind must be point, position or weighted".into())),
        }
    }
}

fn evolve(eig: &Eigh, q: f64, rho: &ComplexMatrix) -> ComplexMatrix {
    let d = eig.dim();
    let mut phased = eig.vectors.clone();
    for k in 0..d {
        let phase = C64::from_polar(1.0, -q * eig.values[k]);
        for i in 0..d {
            phased[(i, k)] *= phase;
        }
    }
    let u = phased * eig.vectors.adjoint();
    &u * rho * u.adjoint()
}

/// Energy-basis dephasing `Σ_E Π_E ρ Π_E`.
pub fn dephase(rho: &ComplexMatrix, h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = linalg::hermitian_eig(h)?;
    let mut out = ComplexMatrix::zeros(rho.nrows(), rho.ncols());
    for (_, p) in eig.spectral_projectors(ENERGY_CLUSTER_TOL) {
        out += &p * rho * &p;
    }
    Ok(out)
}

pub fn apply_d_matrix(rho: &ComplexMatrix, h: &ComplexMatrix, dist: &MomentumDistribution) -> Result<ComplexMatrix> {
    if rho.shape() != h.shape() {
        return Err(Error::Shape("state and hamiltonian differ in dimension".into()));
    }
    match dist {
        MomentumDistribution::PositionEigenstate => dephase(rho, h),
        MomentumDistribution::PointMass(q) => Ok(evolve(&linalg::hermitian_eig(h)?, *q, rho)),
        MomentumDistribution::Weighted(points) => {
            let eig = linalg::hermitian_eig(h)?;
            let mut out = ComplexMatrix::zeros(rho.nrows(), rho.ncols());
            for &(q, w) in points {
                out += evolve(&eig, q, rho).scale(w);
            }
            Ok(out)
        }
    }
}

pub fn apply_d(state: &QuantumState, h: &Hamiltonian, dist: &MomentumDistribution) -> Result<QuantumState> {
    QuantumState::new(apply_d_matrix(state.matrix(), h.matrix(), dist)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WsWorkReport {
    /// Work stored when `C(U)` acts on system plus storage.
    pub ws_work: f64,
    /// `W(ρ, U)` without a storage.
    pub dense_work: f64,
    pub equal: bool,
}

impl WsWorkReport {
    pub fn to_json(&self) -> Value {
        json!({ "ws_work": self.ws_work, "dense_work": self.dense_work, "equal": self.equal })
    }
}

/// Stored work of the Kitaev lift of `U`, evaluated as `W(D(ρ), U)`.
pub fn ws_work_kitaev(state: &QuantumState, h: &Hamiltonian, dist: &MomentumDistribution, u: &ComplexMatrix) -> Result<WsWorkReport> {
    let dense_work = state::extracted_work(state, h, u)?;
    let ws_work = state::extracted_work(&apply_d(state, h, dist)?, h, u)?;
    Ok(WsWorkReport { ws_work, dense_work, equal: (ws_work - dense_work).abs() <= EQUAL_TOL })
}

/// Maximal stored work, `W_max(D(ρ))`; with a model, the symmetry-protected one.
pub fn ws_ergotropy(state: &QuantumState, h: &Hamiltonian, dist: &MomentumDistribution, model: Option<&SymmetryModel>) -> Result<f64> {
    let d = apply_d(state, h, dist)?;
    Ok(match model {
        Some(m) => passivity::sp_ergotropy(&d, h, m)?.ergotropy,
        None => passivity::ergotropy(&d, h)?.ergotropy,
    })
}
