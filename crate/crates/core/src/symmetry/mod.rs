//! Symmetry models: Lie charges, finite groups and time reversal.

mod blocks;
pub mod presets;

use std::fmt;

use serde_json::{json, Value};

pub use blocks::{block_decompose, blocks_of, Block, BlockDecomposition, SectorLabel};

use crate::error::{Error, Result};
use crate::io;
use crate::linalg::{self, ComplexMatrix, C64};

/// Threshold on [`symmetry_violation`] for an operator to count as symmetric.
pub const RESPECT_TOL: f64 = 1e-9;
const RELATION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryKind {
    U1,
    Su2,
    Cyclic(usize),
    Dihedral(usize),
    TimeReversal,
    Trivial,
}

impl SymmetryKind {
    pub fn is_lie(self) -> bool {
        matches!(self, SymmetryKind::U1 | SymmetryKind::Su2)
    }

    pub fn is_finite_group(self) -> bool {
        matches!(self, SymmetryKind::Cyclic(_) | SymmetryKind::Dihedral(_))
    }
}

impl fmt::Display for SymmetryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymmetryKind::U1 => write!(f, "u1"),
            SymmetryKind::Su2 => write!(f, "su2"),
            SymmetryKind::Cyclic(n) => write!(f, "cyclic({n})"),
            SymmetryKind::Dihedral(n) => write!(f, "dihedral({n})"),
            SymmetryKind::TimeReversal => write!(f, "time_reversal"),
            SymmetryKind::Trivial => write!(f, "trivial"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SymmetryModel {
    kind: SymmetryKind,
    dim: usize,
    charges: Vec<ComplexMatrix>,
    /// Finite groups: `t^k` for `k < n`, then (dihedral) `r t^k`.
    elements: Vec<ComplexMatrix>,
    /// Columns form the basis in which time reversal is complex conjugation.
    conjugation_basis: ComplexMatrix,
}

fn norm_scale(m: &ComplexMatrix) -> f64 {
    linalg::hs_norm(m).max(1.0)
}

impl SymmetryModel {
    pub fn trivial(dim: usize) -> Self {
        Self { kind: SymmetryKind::Trivial, dim, charges: vec![], elements: vec![], conjugation_basis: linalg::identity(dim) }
    }

    /// Abelian charges; several commuting charges describe a torus.
    pub fn u1(charges: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = Self::check_charges(&charges)?;
        for (i, a) in charges.iter().enumerate() {
            for b in &charges[i + 1..] {
                let c = linalg::hs_norm(&linalg::commutator(a, b));
                if c > RELATION_TOL * norm_scale(a) * norm_scale(b) {
                    return Err(Error::InvalidModel(format!("u1 charges do not commute ({c:.3e})")));
                }
            }
        }
        Ok(Self { kind: SymmetryKind::U1, dim, charges, elements: vec![], conjugation_basis: linalg::identity(dim) })
    }

    /// Generators `(Q_x, Q_y, Q_z)` with `[Q_x, Q_y] = i Q_z` and cyclic.
    pub fn su2(charges: Vec<ComplexMatrix>) -> Result<Self> {
        if charges.len() != 3 {
            return Err(Error::InvalidModel("su2 needs exactly three generators".into()));
        }
        let dim = Self::check_charges(&charges)?;
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            let lhs = linalg::commutator(&charges[a], &charges[b]);
            let rhs = &charges[c] * linalg::I;
            let err = linalg::hs_norm(&(lhs - rhs));
            if err > RELATION_TOL * norm_scale(&charges[c]) {
                return Err(Error::InvalidModel(format!("su2 commutation relations fail ({err:.3e})")));
            }
        }
        Ok(Self { kind: SymmetryKind::Su2, dim, charges, elements: vec![], conjugation_basis: linalg::identity(dim) })
    }

    pub fn cyclic(t: ComplexMatrix, n: usize) -> Result<Self> {
        let dim = Self::check_unitary(&t)?;
        if n == 0 {
            return Err(Error::InvalidModel("group order must be positive".into()));
        }
        let elements = powers(&t, n);
        let back = &elements[n - 1] * &t;
        if linalg::hs_norm(&(back - linalg::identity(dim))) > RELATION_TOL * (dim as f64).sqrt() {
            return Err(Error::InvalidModel(format!("F(t)^{n} is not the identity")));
        }
        Ok(Self { kind: SymmetryKind::Cyclic(n), dim, charges: vec![], elements, conjugation_basis: linalg::identity(dim) })
    }

    pub fn dihedral(t: ComplexMatrix, r: ComplexMatrix, n: usize) -> Result<Self> {
        let cyc = Self::cyclic(t.clone(), n)?;
        let dim = cyc.dim;
        if Self::check_unitary(&r)? != dim {
            return Err(Error::Shape("F(t) and F(r) differ in dimension".into()));
        }
        let scale = (dim as f64).sqrt();
        if linalg::hs_norm(&(&r * &r - linalg::identity(dim))) > RELATION_TOL * scale {
            return Err(Error::InvalidModel("F(r)^2 is not the identity".into()));
        }
        let t_inv = t.adjoint();
        if linalg::hs_norm(&(&r * &t - &t_inv * &r)) > RELATION_TOL * scale {
            return Err(Error::InvalidModel("F(r) F(t) != F(t)^-1 F(r)".into()));
        }
        let mut elements = cyc.elements;
        let reflected: Vec<ComplexMatrix> = elements.iter().map(|g| &r * g).collect();
        elements.extend(reflected);
        Ok(Self { kind: SymmetryKind::Dihedral(n), dim, charges: vec![], elements, conjugation_basis: linalg::identity(dim) })
    }

    /// Time reversal acting as complex conjugation in the basis given by the columns of `basis`.
    pub fn time_reversal(basis: ComplexMatrix) -> Result<Self> {
        let dim = Self::check_unitary(&basis)?;
        Ok(Self { kind: SymmetryKind::TimeReversal, dim, charges: vec![], elements: vec![], conjugation_basis: basis })
    }

    fn check_charges(charges: &[ComplexMatrix]) -> Result<usize> {
        let first = charges.first().ok_or_else(|| Error::InvalidModel("no charges given".into()))?;
        let dim = linalg::square_dim(first)?;
        for q in charges {
            if linalg::square_dim(q)? != dim {
                return Err(Error::Shape("charges differ in dimension".into()));
            }
            linalg::symmetrized(q)?;
        }
        Ok(dim)
    }

    fn check_unitary(u: &ComplexMatrix) -> Result<usize> {
        let dim = linalg::square_dim(u)?;
        linalg::ensure_finite(u)?;
        let defect = linalg::unitarity_defect(u);
        if defect > 1e-10 * (dim as f64).sqrt().max(1.0) {
            return Err(Error::InvalidModel(format!("group element is not unitary ({defect:.3e})")));
        }
        Ok(dim)
    }

    pub fn kind(&self) -> SymmetryKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Conserved charges (Lie kinds only); these enter the GGE.
    pub fn charges(&self) -> &[ComplexMatrix] {
        &self.charges
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn group_order(&self) -> usize {
        self.elements.len()
    }

    pub fn conjugation_basis(&self) -> &ComplexMatrix {
        &self.conjugation_basis
    }

    /// `F(t)` for finite groups.
    pub fn translation(&self) -> Option<&ComplexMatrix> {
        match self.kind {
            SymmetryKind::Cyclic(n) | SymmetryKind::Dihedral(n) => Some(&self.elements[if n > 1 { 1 } else { 0 }]),
            _ => None,
        }
    }

    /// `F(r)` for dihedral groups.
    pub fn reflection(&self) -> Option<&ComplexMatrix> {
        match self.kind {
            SymmetryKind::Dihedral(n) => Some(&self.elements[n]),
            _ => None,
        }
    }

    /// Operators whose commutant defines the symmetry: charges or group generators.
    pub fn generators(&self) -> Vec<&ComplexMatrix> {
        match self.kind {
            SymmetryKind::U1 | SymmetryKind::Su2 => self.charges.iter().collect(),
            SymmetryKind::Cyclic(_) => self.translation().into_iter().collect(),
            SymmetryKind::Dihedral(_) => vec![self.translation().unwrap(), self.reflection().unwrap()],
            SymmetryKind::TimeReversal | SymmetryKind::Trivial => vec![],
        }
    }

    /// Charges that enter a GGE fit; empty unless the symmetry is a Lie group.
    pub fn gge_charges(&self) -> &[ComplexMatrix] {
        if self.kind.is_lie() {
            &self.charges
        } else {
            &[]
        }
    }

    /// Expresses `op` in the conjugation basis.
    pub fn to_conjugation_basis(&self, op: &ComplexMatrix) -> ComplexMatrix {
        self.conjugation_basis.adjoint() * op * &self.conjugation_basis
    }

    pub fn from_conjugation_basis(&self, op: &ComplexMatrix) -> ComplexMatrix {
        &self.conjugation_basis * op * self.conjugation_basis.adjoint()
    }

    pub fn to_json(&self) -> Value {
        let mats = |ms: &[&ComplexMatrix]| Value::Array(ms.iter().map(|m| io::matrix_to_value(m)).collect());
        let (kind, params) = match self.kind {
            SymmetryKind::U1 => ("u1", json!({})),
            SymmetryKind::Su2 => ("su2", json!({})),
            SymmetryKind::Cyclic(n) => ("cyclic", json!({ "n": n })),
            SymmetryKind::Dihedral(n) => ("dihedral", json!({ "n": n })),
            SymmetryKind::TimeReversal => ("time_reversal", json!({ "basis": io::matrix_to_value(&self.conjugation_basis) })),
            SymmetryKind::Trivial => ("trivial", json!({})),
        };
        let charges: Vec<&ComplexMatrix> = self.charges.iter().collect();
        let elements = if self.kind.is_finite_group() { self.generators() } else { vec![] };
        json!({
            "kind": kind,
            "dim": self.dim,
            "charges": mats(&charges),
            "elements": mats(&elements),
            "params": params,
        })
    }

    /// Parses the model JSON; finite groups list their generators in `elements`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let kind = v["kind"].as_str().ok_or_else(|| Error::Parse("model needs a string `kind`".into()))?;
        let dim = v["dim"].as_u64().ok_or_else(|| Error::Parse("model needs an integer `dim`".into()))? as usize;
        let list = |key: &str| -> Result<Vec<ComplexMatrix>> {
            match &v[key] {
                Value::Null => Ok(vec![]),
                Value::Array(items) => items.iter().map(io::matrix_from_value).collect(),
                _ => Err(Error::Parse(format!("`{key}` must be an array of matrices"))),
            }
        };
        let n_param = || -> Result<usize> {
            v["params"]["n"].as_u64().map(|n| n as usize).ok_or_else(|| Error::Parse("finite groups need params.n".into()))
        };
        let charges = list("charges")?;
        let elements = list("elements")?;
        let model = match kind {
            "u1" => Self::u1(charges)?,
            "su2" => Self::su2(charges)?,
            "cyclic" => {
                let t = elements.into_iter().next().ok_or_else(|| Error::Parse("cyclic needs F(t) in elements".into()))?;
                Self::cyclic(t, n_param()?)?
            }
            "dihedral" => {
                let mut it = elements.into_iter();
                let (t, r) = match (it.next(), it.next()) {
                    (Some(t), Some(r)) => (t, r),
                    _ => return Err(Error::Parse("dihedral needs [F(t), F(r)] in elements".into())),
                };
                Self::dihedral(t, r, n_param()?)?
            }
            "time_reversal" => match &v["params"]["basis"] {
                Value::Null => Self::time_reversal(linalg::identity(dim))?,
                b => Self::time_reversal(io::matrix_from_value(b)?)?,
            },
            "trivial" => Self::trivial(dim),
            other => return Err(Error::Parse(format!("unknown symmetry kind `{other}`"))),
        };
        if model.dim != dim {
            return Err(Error::Shape(format!("model declares dim {dim} but operators have dim {}", model.dim)));
        }
        Ok(model)
    }
}

fn powers(t: &ComplexMatrix, n: usize) -> Vec<ComplexMatrix> {
    let mut out = vec![linalg::identity(t.nrows())];
    for k in 1..n {
        let next = &out[k - 1] * t;
        out.push(next);
    }
    out
}

/// Largest commutator norm of `op` with the symmetry.
pub fn symmetry_violation(op: &ComplexMatrix, model: &SymmetryModel) -> f64 {
    match model.kind {
        SymmetryKind::TimeReversal => {
            let x = model.to_conjugation_basis(op);
            linalg::hs_norm(&(&x - x.map(|z| z.conj())))
        }
        SymmetryKind::Trivial => 0.0,
        _ => model
            .generators()
            .into_iter()
            .map(|g| linalg::hs_norm(&linalg::commutator(op, g)))
            .fold(0.0, f64::max),
    }
}

pub fn is_symmetry_respecting(op: &ComplexMatrix, model: &SymmetryModel) -> (bool, f64) {
    let v = symmetry_violation(op, model);
    (v <= RESPECT_TOL, v)
}

pub fn ensure_symmetric(op: &ComplexMatrix, model: &SymmetryModel) -> Result<()> {
    if op.nrows() != model.dim() {
        return Err(Error::Shape(format!("operator dim {} vs model dim {}", op.nrows(), model.dim())));
    }
    let (ok, v) = is_symmetry_respecting(op, model);
    if ok {
        Ok(())
    } else {
        Err(Error::Commutation(v))
    }
}

/// The same symmetry acting on `n` copies: `Q^(n)`, `F(g)^{⊗n}` or `W^{⊗n}`.
pub fn tensor_power_model(model: &SymmetryModel, n: usize) -> Result<SymmetryModel> {
    if n == 0 {
        return Err(Error::Domain("need at least one copy".into()));
    }
    let dim = linalg::copies_dim(model.dim, n)?;
    let charges = model.charges.iter().map(|q| linalg::extensive_sum(q, n)).collect::<Result<Vec<_>>>()?;
    let elements = model.elements.iter().map(|g| linalg::tensor_power(g, n)).collect::<Result<Vec<_>>>()?;
    let conjugation_basis = linalg::tensor_power(&model.conjugation_basis, n)?;
    Ok(SymmetryModel { kind: model.kind, dim, charges, elements, conjugation_basis })
}

/// Projection of `ρ` onto symmetric operators.
pub fn symmetrize(rho: &ComplexMatrix, model: &SymmetryModel) -> Result<ComplexMatrix> {
    if rho.nrows() != model.dim() {
        return Err(Error::Shape("state and model differ in dimension".into()));
    }
    match model.kind {
        SymmetryKind::Cyclic(_) | SymmetryKind::Dihedral(_) => {
            let mut acc = ComplexMatrix::zeros(model.dim, model.dim);
            for g in &model.elements {
                acc += g * rho * g.adjoint();
            }
            Ok(acc.unscale(model.elements.len() as f64))
        }
        SymmetryKind::TimeReversal => time_reversal_symmetrize(rho, model),
        SymmetryKind::Trivial => Ok(rho.clone()),
        SymmetryKind::U1 | SymmetryKind::Su2 => Ok(block_decompose(model)?.symmetrize(rho)),
    }
}

/// `S_T(ρ) = (ρ + T ρ T^{-1}) / 2`.
pub fn time_reversal_symmetrize(rho: &ComplexMatrix, model: &SymmetryModel) -> Result<ComplexMatrix> {
    if model.kind != SymmetryKind::TimeReversal {
        return Err(Error::WrongModelKind(format!("time reversal symmetrization needs a time_reversal model, got {}", model.kind)));
    }
    let x = model.to_conjugation_basis(rho);
    let real = x.map(|z| C64::new(z.re, 0.0));
    Ok(model.from_conjugation_basis(&real))
}

/// `C = Σ (G^{-1})_{ij} Q_i ⊗ Q_j` with Gram matrix `G_ij = tr(Q_i Q_j)`.
pub fn casimir_two_copy(model: &SymmetryModel) -> Result<ComplexMatrix> {
    if !model.kind.is_lie() {
        return Err(Error::WrongModelKind(format!("two-copy Casimir needs a Lie symmetry, got {}", model.kind)));
    }
    let q = &model.charges;
    let n = q.len();
    let gram = nalgebra::DMatrix::<f64>::from_fn(n, n, |i, j| linalg::trace_product(&q[i], &q[j]).re);
    let (vals, _) = linalg::real_symmetric_eig(&gram);
    let top = vals.last().copied().unwrap_or(0.0);
    if vals.first().copied().unwrap_or(0.0) <= 1e-10 * top.max(f64::MIN_POSITIVE) {
        return Err(Error::Rank("charge Gram matrix is singular".into()));
    }
    let inv = gram.try_inverse().ok_or_else(|| Error::Rank("charge Gram matrix is singular".into()))?;
    let d = model.dim;
    let mut c = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..n {
        for j in 0..n {
            if inv[(i, j)] != 0.0 {
                c += linalg::tensor_product(&q[i], &q[j])?.scale(inv[(i, j)]);
            }
        }
    }
    Ok(c)
}

/// Residual of `H` against `span{I, charges}`, relative to `||H||`.
/// Zero means every state is completely passive for this symmetry.
pub fn triviality_residual(h: &ComplexMatrix, model: &SymmetryModel) -> Result<f64> {
    let mut basis = vec![linalg::identity(h.nrows())];
    basis.extend(model.gge_charges().iter().cloned());
    let p = linalg::project_onto_span(h, &basis)?;
    Ok(p.residual / linalg::hs_norm(h).max(f64::MIN_POSITIVE))
}

#[cfg(test)]
fn zero_like(d: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(d, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use presets::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dimer_casimir_is_half_sum() {
        let m = su2_dimer();
        let c = casimir_two_copy(&m).unwrap();
        let q = m.charges();
        let mut expect = zero_like(16);
        for a in 0..3 {
            expect += q[a].kronecker(&q[a]).scale(0.5);
        }
        assert!(linalg::hs_norm(&(c - expect)) < 1e-13);
        assert!(linalg::hs_norm(&linalg::commutator(&casimir_two_copy(&m).unwrap(), &linalg::extensive_sum(&dimer_hamiltonian(), 2).unwrap())) < 1e-12);
    }

    #[test]
    fn dependent_charges_make_gram_singular() {
        let q = u1_qubit().charges()[0].clone();
        let m = SymmetryModel::u1(vec![q.clone(), q.scale(2.0)]).unwrap();
        assert!(matches!(casimir_two_copy(&m), Err(Error::Rank(_))));
        assert!(matches!(casimir_two_copy(&cyclic_ring(3).unwrap()), Err(Error::WrongModelKind(_))));
    }

    #[test]
    fn finite_tensor_power_model() {
        let m = cyclic_ring(2).unwrap();
        let p = tensor_power_model(&m, 3).unwrap();
        let x = m.translation().unwrap();
        let expect = linalg::tensor_power(x, 3).unwrap();
        assert!(linalg::hs_norm(&(p.translation().unwrap() - expect)) < 1e-15);
    }

    #[test]
    fn symmetrize_is_idempotent_and_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for model in [su2_dimer(), u1_qubit(), cyclic_ring(3).unwrap(), dihedral_ring(4).unwrap(), time_reversal(3)] {
            let rho = sampling::random_state(model.dim(), &mut rng);
            let s = symmetrize(&rho, &model).unwrap();
            let s2 = symmetrize(&s, &model).unwrap();
            assert!(linalg::hs_norm(&(&s2 - &s)) < 1e-12, "{}", model.kind());
            assert!(is_symmetry_respecting(&s, &model).0, "{}", model.kind());
            assert!((s.trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lie_symmetrize_matches_haar_average_on_qubit() {
        // U(1) on a qubit: the twirl kills off-diagonal entries.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = sampling::random_state(2, &mut rng);
        let s = symmetrize(&rho, &u1_qubit()).unwrap();
        assert!(s[(0, 1)].norm() < 1e-14);
        assert!((s[(0, 0)] - rho[(0, 0)]).norm() < 1e-14);
    }

    #[test]
    fn model_json_roundtrip() {
        for model in [su2_dimer(), dihedral_ring(3).unwrap(), time_reversal(2), SymmetryModel::trivial(3)] {
            let back = SymmetryModel::from_json(&model.to_json()).unwrap();
            assert_eq!(back.kind(), model.kind());
            assert_eq!(back.group_order(), model.group_order());
            assert_eq!(back.charges().len(), model.charges().len());
        }
    }

    #[test]
    fn invalid_models_are_rejected() {
        let x = state_pauli(0);
        assert!(SymmetryModel::cyclic(x.clone(), 3).is_err());
        let q = state_pauli(0).scale(0.5);
        assert!(SymmetryModel::su2(vec![q.clone(), q.clone(), q]).is_err());
        assert!(SymmetryModel::from_json(&json!({"kind": "spin", "dim": 2})).is_err());
    }

    fn state_pauli(k: usize) -> ComplexMatrix {
        crate::state::pauli()[k].clone()
    }

    #[test]
    fn triviality_detects_charge_hamiltonians() {
        let h = linalg::diag(&[0.0, 1.0]);
        assert!(triviality_residual(&h, &u1_qubit()).unwrap() < 1e-12);
        assert!(triviality_residual(&dimer_hamiltonian(), &su2_dimer()).unwrap() > 0.5);
    }
}
