use eglab_core::csvfmt::fmt_f64;
use eglab_core::egsolve::EgError;
use eglab_core::sampling::unit_vector;
use eglab_core::stepan::{uniform_grid, write_sweep_csv, StepAnalysis};
use eglab_core::viclass::sample_constants;
use eglab_core::{
    analyze, classify_linear, gamma_sweep, make_normal_from_spectrum, one_step_bound_check, q_of_gamma, run,
    ClassReport, CubicSaddle, LinearOperator, SolverConfig, Spectrum, SweepRow, Termination, Trajectory,
    VectorField,
};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{AnalysisSpec, ExperimentConfig, Format, NamedOperator, OperatorSpec};
use crate::report::{Provenance, RunReport, StepSummary, TrajectorySummary};
use crate::CliError;

/// Pairs drawn when an operator's constants can only be sampled.
pub const SAMPLED_PAIRS: usize = 100_000;
pub const SAMPLE_RADIUS: f64 = 1.0;
const CHECK_TOL: f64 = 1e-9;

pub const REPRODUCE_CASES: [&str; 4] = ["divergence", "monotone_control", "bound_tightness", "q_claim_sweep"];

/// One file produced by a command.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub format: Format,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn json<T: Serialize>(name: &str, value: &T) -> Result<Self, CliError> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Numeric(e.to_string()))?;
        bytes.push(b'\n');
        Ok(Self { name: name.into(), format: Format::Json, bytes })
    }

    fn csv(name: &str, bytes: Vec<u8>) -> Self {
        Self { name: name.into(), format: Format::Csv, bytes }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub stdout: String,
    pub artifacts: Vec<Artifact>,
    /// False when a reproduction check failed.
    pub all_passed: bool,
}

impl CommandOutput {
    fn new(stdout: String, artifacts: Vec<Artifact>) -> Self {
        Self { stdout, artifacts, all_passed: true }
    }

    pub fn artifact(&self, name: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.name == name)
    }

    /// Picks the stdout rendering matching `format` among the artifacts.
    fn select_stdout(mut self, format: Format, csv_name: &str, json_name: &str) -> Self {
        let name = match format {
            Format::Csv => csv_name,
            Format::Json => json_name,
        };
        if let Some(a) = self.artifact(name) {
            self.stdout = String::from_utf8_lossy(&a.bytes).into_owned();
        }
        self
    }
}

pub enum Operator {
    Linear(LinearOperator),
    Saddle(CubicSaddle),
}

impl Operator {
    pub fn field(&self) -> &dyn VectorField {
        match self {
            Operator::Linear(op) => op,
            Operator::Saddle(s) => s,
        }
    }

    pub fn dim(&self) -> usize {
        self.field().dim()
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn numeric_err(e: impl std::fmt::Display) -> CliError {
    CliError::Numeric(e.to_string())
}

pub fn build_operator(spec: &OperatorSpec, seed: u64) -> Result<Operator, CliError> {
    let op = match spec {
        OperatorSpec::Spectrum { eigenvalues, seed: op_seed } => {
            let spectrum = Spectrum::from_pairs(eigenvalues).map_err(config_err)?;
            make_normal_from_spectrum(&spectrum, op_seed.unwrap_or(seed)).map_err(config_err)?
        }
        OperatorSpec::Matrix { entries } => LinearOperator::from_rows(entries).map_err(config_err)?,
        OperatorSpec::Named { name, a, b } => match name {
            NamedOperator::NegIdentity => LinearOperator::scalar(2, -1.0).map_err(config_err)?,
            NamedOperator::Rotation => rotation(),
            NamedOperator::DampedRotation => {
                let (a, b) = a.zip(*b).ok_or_else(|| config_err("damped_rotation needs `a` and `b`"))?;
                damped_rotation(a, b).map_err(config_err)?
            }
            NamedOperator::CubicSaddle => return Ok(Operator::Saddle(CubicSaddle)),
        },
    };
    Ok(Operator::Linear(op))
}

pub fn rotation() -> LinearOperator {
    LinearOperator::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).expect("fixed 2x2")
}

/// Eigenvalues `−a ± ib`: hypomonotone with modulus `a` when `a > 0`.
pub fn damped_rotation(a: f64, b: f64) -> Result<LinearOperator, eglab_core::LinopError> {
    LinearOperator::from_rows(&[vec![-a, b], vec![-b, -a]])
}

/// Exact class for linear operators, sampled constants otherwise.
pub fn classify_operator(op: &Operator, seed: u64) -> Result<(ClassReport, &'static str), CliError> {
    match op {
        Operator::Linear(lin) => Ok((classify_linear(lin), "exact")),
        Operator::Saddle(s) => {
            let sampled = sample_constants(s, SAMPLED_PAIRS, SAMPLE_RADIUS, seed).map_err(numeric_err)?;
            Ok((sampled.to_report(), "sampled"))
        }
    }
}

/// `(μ, L)` for the step analysis: overrides first, then the class report.
pub fn step_constants(cfg: &ExperimentConfig, class: &ClassReport) -> (f64, f64) {
    match &cfg.analysis {
        Some(AnalysisSpec::Explicit(o)) => {
            (o.mu.unwrap_or(class.hypo_modulus), o.lipschitz.unwrap_or(class.lipschitz))
        }
        _ => (class.hypo_modulus, class.lipschitz),
    }
}

#[derive(Debug, Clone)]
pub struct RunContext {
    pub seed: u64,
    pub config_hash: String,
    pub format: Format,
}

pub fn cmd_classify(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<CommandOutput, CliError> {
    let op = build_operator(&cfg.operator, ctx.seed)?;
    let (report, _) = classify_operator(&op, ctx.seed)?;
    let mut csv_bytes = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut csv_bytes);
        w.write_record(["monotone", "mu", "lipschitz", "cohypo", "min_sym_eig"]).map_err(numeric_err)?;
        w.write_record([
            report.monotone.to_string(),
            fmt_f64(report.hypo_modulus),
            fmt_f64(report.lipschitz),
            report.cohypo_modulus.map(fmt_f64).unwrap_or_default(),
            fmt_f64(report.min_sym_eigenvalue),
        ])
        .map_err(numeric_err)?;
        w.flush().map_err(numeric_err)?;
    }
    let out = CommandOutput::new(
        String::new(),
        vec![Artifact::json("class_report.json", &report)?, Artifact::csv("class_report.csv", csv_bytes)],
    );
    Ok(out.select_stdout(ctx.format, "class_report.csv", "class_report.json"))
}

pub struct SolveResult {
    pub output: CommandOutput,
    pub report: RunReport,
    pub trajectory: Trajectory,
}

pub fn cmd_solve(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<SolveResult, CliError> {
    let section = cfg.solver.as_ref().ok_or_else(|| config_err("solve needs a `solver` section"))?;
    let solver = section.solver_config();
    let op = build_operator(&cfg.operator, ctx.seed)?;
    let n = op.dim();

    let x0 = match &section.x0 {
        Some(v) if v.len() != n => return Err(config_err(format!("solver.x0 has length {}, operator has dim {n}", v.len()))),
        Some(v) => DVector::from_column_slice(v),
        None => unit_vector(&mut ChaCha8Rng::seed_from_u64(ctx.seed), n),
    };
    let x_star = match &section.x_star {
        Some(v) if v.len() != n => {
            return Err(config_err(format!("solver.x_star has length {}, operator has dim {n}", v.len())))
        }
        Some(v) => DVector::from_column_slice(v),
        None => DVector::zeros(n),
    };

    let trajectory = run(op.field(), &x0, Some(&x_star), &solver).map_err(|e| match e {
        EgError::NotASolution { .. } | EgError::InvalidConfig(_) | EgError::DimensionMismatch { .. } => config_err(e),
        e => numeric_err(e),
    })?;

    let (class, source) = classify_operator(&op, ctx.seed)?;
    let (mu, l) = step_constants(cfg, &class);
    let analysis = analyze(mu, l, cfg.gamma_max().max(solver.gamma)).map_err(numeric_err)?;

    let report = RunReport {
        class_report: class,
        constants_source: source.into(),
        step_analysis: StepSummary::new(&analysis, solver.gamma),
        trajectory: TrajectorySummary::new(&trajectory),
        provenance: Provenance::new(ctx.config_hash.clone(), ctx.seed),
    };
    let mut csv_bytes = Vec::new();
    trajectory.write_csv(&mut csv_bytes).map_err(numeric_err)?;
    let output = CommandOutput::new(
        String::new(),
        vec![Artifact::csv("trajectory.csv", csv_bytes), Artifact::json("report.json", &report)?],
    )
    .select_stdout(ctx.format, "trajectory.csv", "report.json");
    Ok(SolveResult { output, report, trajectory })
}

/// Inputs of `analyze`/`sweep`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInputs {
    pub mu: f64,
    pub lipschitz: f64,
    pub gamma_max: f64,
    pub grid_size: usize,
}

impl StepInputs {
    pub fn from_config(cfg: &ExperimentConfig, seed: u64) -> Result<Self, CliError> {
        let (mu, lipschitz) = match &cfg.analysis {
            Some(AnalysisSpec::Explicit(o)) if o.mu.is_some() && o.lipschitz.is_some() => {
                (o.mu.unwrap_or_default(), o.lipschitz.unwrap_or_default())
            }
            _ => {
                let op = build_operator(&cfg.operator, seed)?;
                step_constants(cfg, &classify_operator(&op, seed)?.0)
            }
        };
        Ok(Self { mu, lipschitz, gamma_max: cfg.gamma_max(), grid_size: cfg.grid_size() })
    }

    fn check(&self) -> Result<(), CliError> {
        if !(self.mu >= 0.0 && self.lipschitz >= 0.0 && self.mu.is_finite() && self.lipschitz.is_finite()) {
            return Err(config_err("mu and L must be finite and non-negative"));
        }
        if !(self.gamma_max > 0.0 && self.gamma_max.is_finite()) {
            return Err(config_err("gamma_max must be positive"));
        }
        if self.grid_size == 0 {
            return Err(config_err("grid_size must be at least 1"));
        }
        Ok(())
    }
}

fn sweep_rows(inputs: &StepInputs) -> Result<Vec<SweepRow>, CliError> {
    gamma_sweep(inputs.mu, inputs.lipschitz, &uniform_grid(inputs.gamma_max, inputs.grid_size)).map_err(numeric_err)
}

fn sweep_csv(rows: &[SweepRow]) -> Result<Vec<u8>, CliError> {
    let mut bytes = Vec::new();
    write_sweep_csv(rows, &mut bytes).map_err(numeric_err)?;
    Ok(bytes)
}

pub fn cmd_analyze(inputs: &StepInputs, format: Format) -> Result<(CommandOutput, StepAnalysis), CliError> {
    inputs.check()?;
    let analysis = analyze(inputs.mu, inputs.lipschitz, inputs.gamma_max).map_err(numeric_err)?;
    let rows = sweep_rows(inputs)?;
    let out = CommandOutput::new(
        String::new(),
        vec![Artifact::json("analysis.json", &analysis)?, Artifact::csv("sweep.csv", sweep_csv(&rows)?)],
    )
    .select_stdout(format, "sweep.csv", "analysis.json");
    Ok((out, analysis))
}

pub fn cmd_sweep(inputs: &StepInputs, format: Format) -> Result<CommandOutput, CliError> {
    inputs.check()?;
    let rows = sweep_rows(inputs)?;
    let out = CommandOutput::new(
        String::new(),
        vec![Artifact::csv("sweep.csv", sweep_csv(&rows)?), Artifact::json("sweep.json", &rows)?],
    );
    Ok(out.select_stdout(format, "sweep.csv", "sweep.json"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &str, pass: bool, detail: String) -> Check {
    Check { name: name.into(), pass, detail }
}

fn max_deviation(values: &[f64], target: f64) -> f64 {
    values.iter().map(|v| (v - target).abs()).fold(0.0, f64::max)
}

fn trajectory_csv(t: &Trajectory) -> Result<Vec<u8>, CliError> {
    let mut bytes = Vec::new();
    t.write_csv(&mut bytes).map_err(numeric_err)?;
    Ok(bytes)
}

fn reproduce_divergence() -> Result<(Vec<Check>, Vec<Artifact>), CliError> {
    let op = LinearOperator::scalar(2, -1.0).map_err(numeric_err)?;
    let x0 = DVector::from_column_slice(&[1.0, 0.0]);
    let t = run(&op, &x0, Some(&DVector::zeros(2)), &SolverConfig::new(0.5, 20)).map_err(numeric_err)?;
    let ratios = t.error_ratios();
    let dev = max_deviation(&ratios, 1.75);
    let summary = TrajectorySummary::new(&t);
    let checks = vec![
        check("ratio_1.75", ratios.len() == 20 && dev <= CHECK_TOL, format!("{} ratios, max deviation {dev:.1e}", ratios.len())),
        check(
            "non_convergent",
            !t.converged() && summary.verdict == crate::report::Verdict::Diverged,
            format!("termination {:?}, verdict {:?}", t.termination, summary.verdict),
        ),
    ];
    Ok((checks, vec![Artifact::csv("divergence_trajectory.csv", trajectory_csv(&t)?)]))
}

fn reproduce_monotone_control() -> Result<(Vec<Check>, Vec<Artifact>), CliError> {
    let x0 = DVector::from_column_slice(&[1.0, 0.0]);
    let cfg = SolverConfig::new(0.5, 200).with_residual_stop(1e-8);
    let t = run(&rotation(), &x0, Some(&DVector::zeros(2)), &cfg).map_err(numeric_err)?;
    let dev = max_deviation(&t.error_ratios(), 0.8125f64.sqrt());
    let checks = vec![
        check("ratio_sqrt_0.8125", dev <= CHECK_TOL, format!("max deviation {dev:.1e}")),
        check(
            "residual_below_1e-8",
            t.termination == Termination::ResidualMet,
            format!("termination {:?} after {} iterations", t.termination, t.len() - 1),
        ),
    ];
    Ok((checks, vec![Artifact::csv("monotone_control_trajectory.csv", trajectory_csv(&t)?)]))
}

fn reproduce_bound_tightness(seed: u64) -> Result<(Vec<Check>, Vec<Artifact>), CliError> {
    let op = LinearOperator::scalar(2, -1.0).map_err(numeric_err)?;
    let r = one_step_bound_check(&op, &DVector::zeros(2), 0.5, 1.0, 1.0, 10_000, 1.0, seed).map_err(numeric_err)?;

    let mut bytes = Vec::new();
    let mut worst: f64 = 0.0;
    {
        let mut w = csv::Writer::from_writer(&mut bytes);
        w.write_record(["gamma", "q", "square_form"]).map_err(numeric_err)?;
        for k in 1..=100 {
            let g = k as f64 / 100.0;
            let q = q_of_gamma(1.0, 1.0, g);
            let s = (1.0 + g + g * g).powi(2);
            worst = worst.max((q - s).abs() / s);
            w.write_record([fmt_f64(g), fmt_f64(q), fmt_f64(s)]).map_err(numeric_err)?;
        }
        w.flush().map_err(numeric_err)?;
    }
    let checks = vec![
        check("worst_ratio_1", (r.worst_ratio - 1.0).abs() <= CHECK_TOL, format!("worst_ratio {:.15}", r.worst_ratio)),
        check("q_square_identity", worst <= 1e-12, format!("max relative deviation {worst:.1e}")),
    ];
    Ok((checks, vec![Artifact::csv("bound_tightness.csv", bytes)]))
}

fn reproduce_q_claim_sweep() -> Result<(Vec<Check>, Vec<Artifact>), CliError> {
    let grid = uniform_grid(1.0, 100);
    let small = gamma_sweep(0.01, 1.0, &grid).map_err(numeric_err)?;
    let large = gamma_sweep(1.0, 1.0, &grid).map_err(numeric_err)?;
    let half = small.iter().find(|r| r.gamma == 0.5).ok_or_else(|| numeric_err("grid misses 0.5"))?;
    let min_large = large.iter().map(|r| r.q).fold(f64::INFINITY, f64::min);
    let checks = vec![
        check("small_mu_contractive_at_0.5", half.q < 1.0, format!("(0.01, 1): q(0.5) = {}", fmt_f64(half.q))),
        check("mu_equals_L_expansive", min_large > 1.0, format!("(1, 1): min q on (0, 1] = {}", fmt_f64(min_large))),
    ];
    Ok((
        checks,
        vec![
            Artifact::csv("q_claim_sweep_mu0.01_L1.csv", sweep_csv(&small)?),
            Artifact::csv("q_claim_sweep_mu1_L1.csv", sweep_csv(&large)?),
        ],
    ))
}

pub fn cmd_reproduce(case: &str, seed: u64) -> Result<(CommandOutput, Vec<Check>), CliError> {
    let (checks, mut artifacts) = match case {
        "divergence" => reproduce_divergence()?,
        "monotone_control" => reproduce_monotone_control()?,
        "bound_tightness" => reproduce_bound_tightness(seed)?,
        "q_claim_sweep" => reproduce_q_claim_sweep()?,
        other => {
            return Err(CliError::Config(format!(
                "unknown case `{other}`; valid cases: {}",
                REPRODUCE_CASES.join(", ")
            )))
        }
    };
    let mut stdout = String::new();
    for c in &checks {
        stdout.push_str(&format!("[{}] {case}/{}: {}\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail));
    }
    artifacts.push(Artifact::json(&format!("{case}_summary.json"), &checks)?);
    let all_passed = checks.iter().all(|c| c.pass);
    Ok((CommandOutput { stdout, artifacts, all_passed }, checks))
}
