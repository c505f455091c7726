use std::path::{Path, PathBuf};
use std::process::Command;

use passivity::linalg::{self, ComplexMatrix};
use passivity::probe::ProbeReport;
use passivity::state::{self, QuantumState};
use passivity::symmetry::presets;
use passivity::{gge, io, passivity as pass};
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", self.stdout))
    }
}

fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_passivity")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, m: &ComplexMatrix) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, io::to_json_string(&io::matrix_to_value(m))).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn coherent_dimer() -> QuantumState {
    let v = (presets::singlet() + &presets::triplet()[0]).unscale(2f64.sqrt());
    QuantumState::new(linalg::identity(4).scale(0.125) + linalg::outer(&v, &v).scale(0.5)).unwrap()
}

#[test]
fn ergotropy_of_gibbs_is_zero() {
    let dir = TempDir::new().unwrap();
    let h = presets::dimer_hamiltonian();
    let rho = write(&dir, "gibbs.json", state::gibbs_state(&h, 1.3).unwrap().matrix());
    let ham = write(&dir, "h.json", &h);
    let r = run(&["ergotropy", "--state", s(&rho), "--ham", s(&ham)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert!(v["ergotropy"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(v["is_passive"], Value::Bool(true));
}

#[test]
fn symmetric_ergotropy_matches_library() {
    let dir = TempDir::new().unwrap();
    let state = coherent_dimer();
    let rho = write(&dir, "rho.json", state.matrix());
    let r = run(&["ergotropy", "--state", s(&rho), "--ham", "su2-dimer", "--model", "su2-dimer"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    let lib = pass::sp_ergotropy(&state, &presets::dimer_hamiltonian(), &presets::su2_dimer()).unwrap();
    assert!((v["ergotropy"].as_f64().unwrap() - lib.ergotropy).abs() < 1e-15);
    let blocks = v["per_block"].as_object().unwrap();
    assert_eq!(blocks.len(), lib.per_block.len());
    for (label, w) in &lib.per_block {
        assert!((blocks[label].as_f64().unwrap() - w).abs() < 1e-15);
    }
    assert!(pass::PassivityReport::json_is_consistent(&v));
}

#[test]
fn missing_file_is_an_input_error() {
    let r = run(&["ergotropy", "--state", "/nonexistent/rho.json", "--ham", "su2-dimer"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("error"));
}

#[test]
fn gge_fit_roundtrip_and_flags() {
    let dir = TempDir::new().unwrap();
    let h = presets::dimer_hamiltonian();
    let model = presets::su2_dimer();
    let (rho, params) = state::gge_state(&h, model.charges(), 0.9, &[0.2, -0.1, 0.3]).unwrap();
    let path = write(&dir, "gge.json", rho.matrix());
    let r = run(&["gge-fit", "--state", s(&path), "--ham", "su2-dimer", "--model", "su2-dimer"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["is_gge"], Value::Bool(true));
    assert!((v["beta"].as_f64().unwrap() - params.beta).abs() < 1e-9);
    for (a, b) in v["mu"].as_array().unwrap().iter().zip(&params.mu) {
        assert!((a.as_f64().unwrap() - b).abs() < 1e-9);
    }
    assert!(gge::GGEFit::json_is_consistent(&v, gge::DEFAULT_TOL));

    let mixed = write(&dir, "mixed.json", QuantumState::maximally_mixed(4).matrix());
    let v = run(&["gge-fit", "--state", s(&mixed), "--ham", "su2-dimer", "--model", "su2-dimer"]).json();
    assert!(v["beta"].as_f64().unwrap().abs() < 1e-12);
    assert!(v["mu"].as_array().unwrap().iter().all(|m| m.as_f64().unwrap().abs() < 1e-12));

    let (hot, _) = state::gge_state(&h, model.charges(), -0.7, &[0.0, 0.0, 0.1]).unwrap();
    let path = write(&dir, "hot.json", hot.matrix());
    let v = run(&["gge-fit", "--state", s(&path), "--ham", "su2-dimer", "--model", "su2-dimer"]).json();
    assert_eq!(v["beta_nonneg"], Value::Bool(false));
    assert_eq!(v["is_gge"], Value::Bool(false));

    let bad_tol = run(&["gge-fit", "--state", s(&path), "--ham", "su2-dimer", "--tol", "-1"]);
    assert_eq!(bad_tol.code, 2);
}

#[test]
fn cp_probe_verdicts_and_exit_codes() {
    let dir = TempDir::new().unwrap();
    let h = presets::dimer_hamiltonian();
    let model = presets::su2_dimer();
    let (rho, _) = state::gge_state(&h, model.charges(), 0.5, &[0.1, 0.0, -0.2]).unwrap();
    let gge_path = write(&dir, "gge.json", rho.matrix());
    let r = run(&["cp-probe", "--state", s(&gge_path), "--ham", "su2-dimer", "--model", "su2-dimer"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["verdict"], "gge_consistent");
    assert!(ProbeReport::json_is_consistent(&v));

    let coh = write(&dir, "coherent.json", coherent_dimer().matrix());
    let r = run(&["cp-probe", "--state", s(&coh), "--ham", "su2-dimer", "--model", "su2-dimer", "--dense-check"]);
    assert_eq!(r.code, 1, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["verdict"], "witness_found");
    assert!(ProbeReport::json_is_consistent(&v));
    assert_eq!(v["dense_check"]["passes"], Value::Bool(true));

    let qubit = write(&dir, "qubit.json", &linalg::diag(&[0.7, 0.3]));
    let r = run(&["cp-probe", "--state", s(&qubit), "--ham", "u1-qubit", "--model", "u1-qubit"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("trivial"), "{}", r.stderr);
}

#[test]
fn tiny_budget_is_inconclusive() {
    let dir = TempDir::new().unwrap();
    // Populations far from uniform and weak coherence push the first witness m upward.
    let v = (presets::singlet().scale(0.999f64.sqrt()) + presets::triplet()[0].scale(0.001f64.sqrt())).normalize();
    let rho = linalg::diag(&[0.05, 0.05, 0.05, 0.05]) + linalg::outer(&v, &v).scale(0.8);
    let path = write(&dir, "weak.json", &rho);
    let r = run(&["cp-probe", "--state", s(&path), "--ham", "su2-dimer", "--model", "su2-dimer", "--m-max", "0", "--mprime-max", "0"]);
    assert_eq!(r.code, 3, "{}", r.stdout);
    assert!(ProbeReport::json_is_consistent(&r.json()));
}

#[test]
fn ws_relations() {
    let dir = TempDir::new().unwrap();
    let h = linalg::diag(&[0.0, 1.0]);
    let ham = write(&dir, "h.json", &h);
    let r = 0.5f64.sqrt();
    let plus = linalg::ComplexVector::from_vec(vec![linalg::C64::new(r, 0.0), linalg::C64::new(r, 0.0)]);
    let rho = write(&dir, "plus.json", &linalg::outer(&plus, &plus));
    let swap = write(&dir, "swap.json", &linalg::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]));

    let point = run(&["ws", "--state", s(&rho), "--ham", s(&ham), "--dist", "point:0.4", "--unitary", s(&swap)]).json();
    assert!((point["ws_ergotropy"].as_f64().unwrap() - point["ergotropy"].as_f64().unwrap()).abs() < 1e-9);
    assert_eq!(point["unitary"]["equal"], Value::Bool(true));

    let locked = run(&["ws", "--state", s(&rho), "--ham", s(&ham), "--dist", "position"]);
    assert_eq!(locked.code, 0, "{}", locked.stderr);
    let v = locked.json();
    assert!(v["ws_ergotropy"].as_f64().unwrap() < v["ergotropy"].as_f64().unwrap() - 1e-3);

    let gibbs = write(&dir, "gibbs.json", &linalg::diag(&[0.8, 0.2]));
    let weighted = r#"{"kind": "weighted", "points": [[-1.0, 0.25], [0.5, 0.75]]}"#;
    let v = run(&["ws", "--state", s(&gibbs), "--ham", s(&ham), "--dist", weighted]).json();
    assert!(v["ws_ergotropy"].as_f64().unwrap().abs() < 1e-12);

    let bad = run(&["ws", "--state", s(&gibbs), "--ham", s(&ham), "--dist", r#"{"kind": "weighted", "points": [[0.0, 0.5]]}"#]);
    assert_eq!(bad.code, 2);
}

#[test]
fn demo_dimer_is_deterministic() {
    let a = run(&["demo-dimer", "--seed", "11"]);
    let b = run(&["demo-dimer", "--seed", "11"]);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    let v = a.json();
    let spectrum: Vec<f64> = v["spectrum"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (x, e) in spectrum.iter().zip([-0.75, 0.25, 0.25, 0.25]) {
        assert!((x - e).abs() < 1e-12);
    }
    let e = &v["psi"]["energies"];
    assert!((e[0].as_f64().unwrap() + 2.25).abs() < 1e-10 && (e[1].as_f64().unwrap() - 0.75).abs() < 1e-10);
    let step = &v["step3"];
    let (w, law) = (step["work_m0"].as_f64().unwrap(), step["a_one_minus_exp_3beta"].as_f64().unwrap());
    assert!((w - law).abs() <= 1e-9 * law.abs().max(1e-300));
    assert_eq!(v["coherent_probe"]["verdict"], "witness_found");
}

#[test]
fn model_json_file_is_accepted() {
    let dir = TempDir::new().unwrap();
    let model_path = dir.path().join("model.json");
    std::fs::write(&model_path, io::to_json_string(&presets::su2_dimer().to_json())).unwrap();
    let rho = write(&dir, "rho.json", coherent_dimer().matrix());
    let from_file = run(&["ergotropy", "--state", s(&rho), "--ham", "su2-dimer", "--model", s(&model_path)]);
    let from_preset = run(&["ergotropy", "--state", s(&rho), "--ham", "su2-dimer", "--model", "su2-dimer"]);
    assert_eq!(from_file.code, 0, "{}", from_file.stderr);
    assert_eq!(from_file.stdout, from_preset.stdout);
}
