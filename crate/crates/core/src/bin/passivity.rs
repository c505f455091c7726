use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use passivity::probe::{self, ProbeBudget, QuartetSpec, Verdict};
use passivity::state::{Hamiltonian, QuantumState};
use passivity::storage::MomentumDistribution;
use passivity::symmetry::{presets, SymmetryModel};
use passivity::{gge, io, linalg, passivity as pass, storage, Error, Result};

#[derive(Parser)]
#[command(name = "passivity", version, about = "Passivity, GGE fits and complete-passivity probes for finite quantum systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Ergotropy, symmetry-protected when a model is given.
    Ergotropy(Inputs),
    /// Fit a generalized Gibbs ensemble.
    GgeFit {
        #[command(flatten)]
        inputs: Inputs,
        /// Extra charge matrix files (used on top of the model's charges).
        #[arg(long = "charge")]
        charges: Vec<PathBuf>,
        /// Membership tolerance on the relative residual.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Probe complete passivity under the model's symmetry.
    CpProbe {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value_t = ProbeBudget::default().m_max)]
        m_max: usize,
        #[arg(long, default_value_t = ProbeBudget::default().mprime_max)]
        mprime_max: usize,
        /// Check the witness unitary on the N-copy space.
        #[arg(long)]
        dense_check: bool,
    },
    /// Work extraction with a work storage.
    Ws {
        #[command(flatten)]
        inputs: Inputs,
        /// Distribution file, inline JSON, `position` or `point:<q>`.
        #[arg(long, default_value = "point:0")]
        dist: String,
        /// Unitary matrix file; adds the stored vs. unassisted work of that unitary.
        #[arg(long)]
        unitary: Option<PathBuf>,
    },
    /// Reproduce the two-spin dimer numbers.
    DemoDimer {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct Inputs {
    /// State matrix file.
    #[arg(long)]
    state: PathBuf,
    /// Hamiltonian matrix file or preset name.
    #[arg(long)]
    ham: String,
    /// Symmetry model file or preset name.
    #[arg(long)]
    model: Option<String>,
}

struct Loaded {
    state: QuantumState,
    h: Hamiltonian,
    model: Option<SymmetryModel>,
}

impl Inputs {
    fn load(&self) -> Result<Loaded> {
        let state = QuantumState::new(io::read_matrix(&self.state)?)?;
        let h = if Path::new(&self.ham).exists() {
            Hamiltonian::new(io::read_matrix(Path::new(&self.ham))?)?
        } else {
            presets::preset_hamiltonian(&self.ham)
                .map_err(|_| Error::Parse(format!("`{}` is neither a readable file nor a preset", self.ham)))?
        };
        let model = self.model.as_deref().map(load_model).transpose()?;
        Ok(Loaded { state, h, model })
    }
}

fn load_model(spec: &str) -> Result<SymmetryModel> {
    if Path::new(spec).exists() {
        SymmetryModel::from_json(&io::read_json(Path::new(spec))?)
    } else {
        presets::preset(spec)
    }
}

fn load_dist(spec: &str) -> Result<MomentumDistribution> {
    if spec == "position" {
        return Ok(MomentumDistribution::PositionEigenstate);
    }
    if let Some(q) = spec.strip_prefix("point:") {
        let q = q.parse().map_err(|_| Error::Parse(format!("bad momentum `{q}`")))?;
        return Ok(MomentumDistribution::PointMass(q));
    }
    let v: Value = if spec.trim_start().starts_with('{') { serde_json::from_str(spec)? } else { io::read_json(Path::new(spec))? };
    MomentumDistribution::from_json(&v)
}

struct Outcome {
    report: Value,
    summary: String,
    code: u8,
}

impl Outcome {
    fn ok(report: Value, summary: String) -> Self {
        Self { report, summary, code: 0 }
    }
}

fn cmd_ergotropy(inputs: &Inputs) -> Result<Outcome> {
    let l = inputs.load()?;
    let report = match &l.model {
        Some(m) => pass::sp_ergotropy(&l.state, &l.h, m)?,
        None => pass::ergotropy(&l.state, &l.h)?,
    };
    let summary = format!("ergotropy {} (passive: {})", io::format_float(report.ergotropy), report.is_passive);
    Ok(Outcome::ok(report.to_json(), summary))
}

fn cmd_gge_fit(inputs: &Inputs, extra: &[PathBuf], tol: Option<f64>) -> Result<Outcome> {
    if tol.is_some_and(|t| !(t > 0.0)) {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let l = inputs.load()?;
    let mut charges: Vec<_> = l.model.as_ref().map_or(vec![], |m| m.gge_charges().to_vec());
    for path in extra {
        charges.push(io::read_matrix(path)?);
    }
    let fit = gge::gge_fit(&l.state, &l.h, &charges, tol)?;
    let mut report = fit.to_json();
    report["tolerance"] = json!(fit.tolerance);
    report["gge_distance"] = json!(gge::gge_distance(&l.state, &fit, &l.h, &charges)?);
    let summary = format!(
        "β {} μ {:?} relative residual {:.3e}: {}",
        io::format_float(fit.params.beta),
        fit.params.mu,
        fit.relative_residual,
        if fit.is_gge { "GGE" } else if !fit.beta_nonneg { "negative β" } else { "not a GGE" }
    );
    Ok(Outcome::ok(report, summary))
}

fn cmd_cp_probe(inputs: &Inputs, budget: ProbeBudget, dense: bool) -> Result<Outcome> {
    let l = inputs.load()?;
    let model = l.model.clone().unwrap_or_else(|| SymmetryModel::trivial(l.state.dim()));
    let mut report = probe::cp_probe(&l.state, &l.h, &model, budget)?;
    let check = if dense { report.dense_check(&l.state, &l.h, &model)? } else { None };
    let mut out = report.to_json();
    if let Some(c) = check {
        out["dense_check"] = json!({
            "unitarity": c.unitarity,
            "symmetry": c.symmetry,
            "energy_commutator": c.energy_commutator,
            "passes": c.passes(probe::ALGEBRA_TOL),
        });
    }
    let code = match report.verdict {
        Verdict::GgeConsistent => 0,
        Verdict::WitnessFound => 1,
        Verdict::Inconclusive => 3,
    };
    let mut summary = report.verdict.to_string();
    if let Some(w) = &report.witness {
        summary += &format!(": {} on {} copies, work {}", w.description, w.copies(), io::format_float(w.work));
    }
    Ok(Outcome { report: out, summary, code })
}

fn cmd_ws(inputs: &Inputs, dist: &str, unitary: Option<&Path>) -> Result<Outcome> {
    let l = inputs.load()?;
    let dist = load_dist(dist)?;
    let plain = match &l.model {
        Some(m) => pass::sp_ergotropy(&l.state, &l.h, m)?.ergotropy,
        None => pass::ergotropy(&l.state, &l.h)?.ergotropy,
    };
    let stored = storage::ws_ergotropy(&l.state, &l.h, &dist, l.model.as_ref())?;
    let mut report = json!({ "dist": dist.to_json(), "ergotropy": plain, "ws_ergotropy": stored });
    let mut summary = format!("ws_ergotropy {} vs ergotropy {}", io::format_float(stored), io::format_float(plain));
    if let Some(path) = unitary {
        let u = io::read_matrix(path)?;
        let w = storage::ws_work_kitaev(&l.state, &l.h, &dist, &u)?;
        summary += &format!("; unitary: ws_work {} dense_work {}", io::format_float(w.ws_work), io::format_float(w.dense_work));
        report["unitary"] = w.to_json();
    }
    Ok(Outcome::ok(report, summary))
}

fn cmd_demo_dimer(seed: u64) -> Result<Outcome> {
    let model = presets::su2_dimer();
    let h = presets::dimer_hamiltonian();
    let spectrum = linalg::hermitian_eig(&h)?.values;

    let decomp = passivity::symmetry::block_decompose(&model)?;
    let (psi0, psi1) = probe::PhiBuilder::new(&model, &h, &decomp)?.psi_pair(1)?;
    let h3 = linalg::extensive_sum(&h, 3)?;
    let mut charge_residual: f64 = 0.0;
    for psi in [&psi0, &psi1] {
        let v = psi.to_vector()?;
        for q in model.charges() {
            charge_residual = charge_residual.max(linalg::apply_extensive(q, 3, &v).norm());
        }
    }
    let energy = |v: &linalg::ComplexVector| v.dotc(&(&h3 * v)).re;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let beta = rng.gen_range(0.0..3.0);
    let mu: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let (rho, _) = passivity::state::gge_state(&h, model.charges(), beta, &mu)?;
    let fit = gge::gge_fit(&rho, &h, model.charges(), None)?;
    let log_rho = linalg::herm_log(rho.matrix())?;
    let beta_formula = -4.0 * linalg::trace_product(&log_rho, &h).re / 3.0;
    let mu_formula: Vec<f64> = model.charges().iter().map(|q| -linalg::trace_product(&log_rho, q).re / 2.0).collect();

    let singlet = presets::singlet();
    let p = linalg::outer(&singlet, &singlet);
    let spec = QuartetSpec::variant_a(p, 1, 0, [psi0.clone(), psi1.clone()], &h)?;
    let work = spec.work_closed_form(rho.matrix())?;
    let a = spec.energy_gap() * psi1.log_weight(rho.matrix()).exp();
    let sign_law = a * (1.0 - (3.0 * beta).exp());

    let t0 = &presets::triplet()[0];
    let coherent = (&singlet + t0).unscale(2f64.sqrt());
    let mixed = QuantumState::new(QuantumState::maximally_mixed(4).matrix().scale(0.5) + linalg::outer(&coherent, &coherent).scale(0.5))?;
    let probe = probe::cp_probe(&mixed, &h, &model, ProbeBudget::default())?;

    let report = json!({
        "seed": seed,
        "spectrum": spectrum,
        "psi": {
            "energies": [energy(&psi0.to_vector()?), energy(&psi1.to_vector()?)],
            "charge_residual": charge_residual,
        },
        "gge": {
            "beta": beta,
            "mu": mu,
            "fit": fit.to_json(),
            "beta_formula": beta_formula,
            "mu_formula": mu_formula,
        },
        "step3": { "work_m0": work, "a": a, "a_one_minus_exp_3beta": sign_law },
        "coherent_probe": probe.to_json(),
    });
    let summary = format!(
        "spectrum {:?}; Ψ energies {:.6}/{:.6}; fitted β {:.6} (drawn {:.6}); W(m=0) {:.6e}; coherent state: {}",
        spectrum,
        energy(&psi0.to_vector()?),
        energy(&psi1.to_vector()?),
        fit.params.beta,
        beta,
        work,
        probe.verdict
    );
    Ok(Outcome::ok(report, summary))
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Ergotropy(inputs) => cmd_ergotropy(inputs),
        Command::GgeFit { inputs, charges, tol } => cmd_gge_fit(inputs, charges, *tol),
        Command::CpProbe { inputs, m_max, mprime_max, dense_check } => {
            cmd_cp_probe(inputs, ProbeBudget { m_max: *m_max, mprime_max: *mprime_max }, *dense_check)
        }
        Command::Ws { inputs, dist, unitary } => cmd_ws(inputs, dist, unitary.as_deref()),
        Command::DemoDimer { seed } => cmd_demo_dimer(*seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json => println!("{}", io::to_json_string(&out.report)),
                Format::Text => println!("{}", out.summary),
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
