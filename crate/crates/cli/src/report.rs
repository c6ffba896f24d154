use eglab_core::{ClassReport, StepAnalysis, Termination, Trajectory};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub class_report: ClassReport,
    /// How the class report was obtained: exact decomposition or sampling.
    pub constants_source: String,
    pub step_analysis: StepSummary,
    pub trajectory: TrajectorySummary,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    pub mu: f64,
    #[serde(rename = "L")]
    pub lipschitz: f64,
    pub gamma: f64,
    pub q_at_gamma: f64,
    pub gamma_contractive: bool,
    pub sign_pattern: String,
    pub sign_changes: usize,
    pub positive_roots: Vec<f64>,
    pub rouche_radius: Option<f64>,
    pub rouche_absent_reason: Option<String>,
    pub contractive_intervals: Vec<[f64; 2]>,
}

impl StepSummary {
    pub fn new(a: &StepAnalysis, gamma: f64) -> Self {
        let q = a.polynomial.q(gamma);
        Self {
            mu: a.polynomial.mu,
            lipschitz: a.polynomial.lipschitz,
            gamma,
            q_at_gamma: q,
            gamma_contractive: q < 1.0,
            sign_pattern: a.sign_pattern.clone(),
            sign_changes: a.sign_changes,
            positive_roots: a.positive_roots.iter().map(|r| r.value).collect(),
            rouche_radius: a.rouche_radius,
            rouche_absent_reason: a.rouche_absent_reason.clone(),
            contractive_intervals: a.contractive_gammas.clone(),
        }
    }
}

/// Outcome of a run. `termination` is the solver's stop reason; `verdict`
/// also labels runs that hit the budget while growing as diverged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converged,
    Diverged,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub termination: Termination,
    pub verdict: Verdict,
    pub iterations: usize,
    pub outside_theorem_interval: bool,
    pub final_error_norm: Option<f64>,
    pub final_residual_norm: f64,
    pub geometric_mean_ratio: Option<f64>,
    pub overflow_at: Option<usize>,
}

impl TrajectorySummary {
    pub fn new(t: &Trajectory) -> Self {
        let gm = t.geometric_mean_ratio();
        let verdict = match t.termination {
            Termination::ResidualMet => Verdict::Converged,
            Termination::Diverged => Verdict::Diverged,
            Termination::BudgetExhausted => match gm {
                Some(r) if r > 1.0 => Verdict::Diverged,
                _ => Verdict::Inconclusive,
            },
        };
        Self {
            termination: t.termination,
            verdict,
            iterations: t.len().saturating_sub(1),
            outside_theorem_interval: t.outside_theorem_interval,
            final_error_norm: t.final_error_norm(),
            final_residual_norm: t.residual_norms.last().copied().unwrap_or(f64::NAN),
            geometric_mean_ratio: gm,
            overflow_at: t.overflow_at,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: String,
}

impl Provenance {
    pub fn new(config_hash: String, seed: u64) -> Self {
        Self { config_hash, seed, tool_version: env!("CARGO_PKG_VERSION").to_string() }
    }
}
