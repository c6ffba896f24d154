//! The extragradient iteration
//!
//! ```text
//! y_{k+1} = x_k − γ F(x_k)
//! x_{k+1} = x_k − γ F(y_{k+1})
//! ```
//!
//! with trajectory recording and an empirical test of the one-step bound
//! `‖e_{k+1}‖² ≤ q(γ)‖e_k‖²`.

use std::io::Write;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csvfmt::fmt_f64;
use crate::field::VectorField;
use crate::sampling::uniform_in_ball;
use crate::stepan::q_of_gamma;

pub const DEFAULT_KEEP_VECTORS: usize = 100;
pub const DEFAULT_DIVERGENCE_STOP: f64 = 1e12;
/// A claimed solution must satisfy `‖F(x*)‖ ≤ SOLUTION_TOL`.
pub const SOLUTION_TOL: f64 = 1e-9;
/// Relative slack in `‖e₁‖² ≤ q‖e₀‖²(1 + BOUND_SLACK)`, absorbing rounding
/// in the exactly tight cases.
pub const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EgError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite operator value at iterate {iter}")]
    NumericOverflow { iter: usize },
    #[error("x* is not a zero of F (residual {residual:e} > {SOLUTION_TOL:e})")]
    NotASolution { residual: f64 },
    #[error("dimension mismatch: operator is {expected}-dimensional, vector has length {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

fn default_divergence_stop() -> f64 {
    DEFAULT_DIVERGENCE_STOP
}

fn default_keep_vectors() -> usize {
    DEFAULT_KEEP_VECTORS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub gamma: f64,
    pub max_iters: usize,
    /// Stop once `‖F(x_k)‖ < residual_stop`.
    #[serde(default)]
    pub residual_stop: f64,
    /// Stop once `‖e_k‖` or `‖x_k‖` exceeds this.
    #[serde(default = "default_divergence_stop")]
    pub divergence_stop: f64,
    /// Number of leading iterates kept in full.
    #[serde(default = "default_keep_vectors")]
    pub keep_vectors: usize,
}

impl SolverConfig {
    pub fn new(gamma: f64, max_iters: usize) -> Self {
        Self {
            gamma,
            max_iters,
            residual_stop: 0.0,
            divergence_stop: DEFAULT_DIVERGENCE_STOP,
            keep_vectors: DEFAULT_KEEP_VECTORS,
        }
    }

    pub fn with_residual_stop(mut self, tol: f64) -> Self {
        self.residual_stop = tol;
        self
    }

    pub fn with_divergence_stop(mut self, limit: f64) -> Self {
        self.divergence_stop = limit;
        self
    }

    pub fn with_keep_vectors(mut self, m: usize) -> Self {
        self.keep_vectors = m;
        self
    }

    pub fn validate(&self) -> Result<(), EgError> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(EgError::InvalidConfig(format!("gamma must be positive, got {}", self.gamma)));
        }
        if self.max_iters == 0 {
            return Err(EgError::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.residual_stop >= 0.0) {
            return Err(EgError::InvalidConfig("residual_stop must be non-negative".into()));
        }
        if !(self.divergence_stop > self.residual_stop) {
            return Err(EgError::InvalidConfig(
                "divergence_stop must exceed residual_stop".into(),
            ));
        }
        Ok(())
    }

    /// True when `γ ∉ (0, 1)`. Such runs proceed but are flagged.
    pub fn outside_theorem_interval(&self) -> bool {
        !(self.gamma > 0.0 && self.gamma < 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ResidualMet,
    Diverged,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub gamma: f64,
    pub outside_theorem_interval: bool,
    /// `x_0, x_1, …` up to the configured count.
    pub iterates: Vec<DVector<f64>>,
    /// `extrapolations[k]` is `y_{k+1}`.
    pub extrapolations: Vec<DVector<f64>>,
    /// `‖x_k − x*‖`, present when `x*` was supplied.
    pub error_norms: Option<Vec<f64>>,
    /// `‖F(x_k)‖`.
    pub residual_norms: Vec<f64>,
    pub termination: Termination,
    /// Iterate at which a non-finite value appeared, if any.
    pub overflow_at: Option<usize>,
}

fn all_finite(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn forward(x: &DVector<f64>, fx: &DVector<f64>, gamma: f64) -> DVector<f64> {
    x.zip_map(fx, |xi, fi| xi - gamma * fi)
}

/// One step from `x` given `fx = F(x)`.
fn step_from<F: VectorField + ?Sized>(
    f: &F,
    x: &DVector<f64>,
    fx: &DVector<f64>,
    gamma: f64,
    iter: usize,
) -> Result<(DVector<f64>, DVector<f64>), EgError> {
    let y = forward(x, fx, gamma);
    let fy = f.eval(&y);
    if !all_finite(&fy) {
        return Err(EgError::NumericOverflow { iter });
    }
    Ok((forward(x, &fy, gamma), y))
}

/// One extragradient step. Returns `(y_next, x_next)`.
pub fn eg_step<F: VectorField + ?Sized>(
    f: &F,
    x: &DVector<f64>,
    gamma: f64,
) -> Result<(DVector<f64>, DVector<f64>), EgError> {
    if !(gamma > 0.0) {
        return Err(EgError::InvalidConfig(format!("gamma must be positive, got {gamma}")));
    }
    if x.len() != f.dim() {
        return Err(EgError::DimensionMismatch { expected: f.dim(), found: x.len() });
    }
    let fx = f.eval(x);
    if !all_finite(&fx) {
        return Err(EgError::NumericOverflow { iter: 0 });
    }
    let (x_next, y) = step_from(f, x, &fx, gamma, 0)?;
    Ok((y, x_next))
}

fn check_solution<F: VectorField + ?Sized>(f: &F, x_star: &DVector<f64>) -> Result<(), EgError> {
    if x_star.len() != f.dim() {
        return Err(EgError::DimensionMismatch { expected: f.dim(), found: x_star.len() });
    }
    let residual = f.eval(x_star).norm();
    if residual <= SOLUTION_TOL {
        Ok(())
    } else {
        Err(EgError::NotASolution { residual })
    }
}

/// Runs at most `cfg.max_iters` steps from `x0`.
///
/// Norms are recorded at every iterate, vectors only for the first
/// `cfg.keep_vectors`. A non-finite operator value truncates the run with
/// [`Termination::Diverged`].
pub fn run<F: VectorField + ?Sized>(
    f: &F,
    x0: &DVector<f64>,
    x_star: Option<&DVector<f64>>,
    cfg: &SolverConfig,
) -> Result<Trajectory, EgError> {
    cfg.validate()?;
    if x0.len() != f.dim() {
        return Err(EgError::DimensionMismatch { expected: f.dim(), found: x0.len() });
    }
    if let Some(xs) = x_star {
        check_solution(f, xs)?;
    }

    let gamma = cfg.gamma;
    let mut traj = Trajectory {
        gamma,
        outside_theorem_interval: cfg.outside_theorem_interval(),
        iterates: Vec::new(),
        extrapolations: Vec::new(),
        error_norms: x_star.map(|_| Vec::new()),
        residual_norms: Vec::new(),
        termination: Termination::BudgetExhausted,
        overflow_at: None,
    };

    let mut x = x0.clone();
    for k in 0..=cfg.max_iters {
        let fx = f.eval(&x);
        if !all_finite(&x) || !all_finite(&fx) {
            traj.termination = Termination::Diverged;
            traj.overflow_at = Some(k);
            break;
        }
        let resid = scaled_norm(&fx);
        let err = x_star.map(|xs| scaled_norm(&(&x - xs)));
        traj.residual_norms.push(resid);
        if let (Some(errs), Some(e)) = (traj.error_norms.as_mut(), err) {
            errs.push(e);
        }
        if k < cfg.keep_vectors {
            traj.iterates.push(x.clone());
        }

        if resid < cfg.residual_stop {
            traj.termination = Termination::ResidualMet;
            break;
        }
        if scaled_norm(&x) > cfg.divergence_stop || err.is_some_and(|e| e > cfg.divergence_stop) {
            traj.termination = Termination::Diverged;
            break;
        }
        if k == cfg.max_iters {
            traj.termination = Termination::BudgetExhausted;
            break;
        }

        match step_from(f, &x, &fx, gamma, k) {
            Ok((x_next, y)) => {
                if k < cfg.keep_vectors {
                    traj.extrapolations.push(y);
                }
                x = x_next;
            }
            Err(EgError::NumericOverflow { iter }) => {
                traj.termination = Termination::Diverged;
                traj.overflow_at = Some(iter);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(traj)
}

/// Euclidean norm that stays finite for finite vectors with entries past 1e154.
pub fn scaled_norm(v: &DVector<f64>) -> f64 {
    let scale = v.amax();
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    scale * (v / scale).norm()
}

impl Trajectory {
    /// Number of recorded iterates (including `x_0`).
    pub fn len(&self) -> usize {
        self.residual_norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residual_norms.is_empty()
    }

    pub fn converged(&self) -> bool {
        self.termination == Termination::ResidualMet
    }

    /// `‖e_k‖ / ‖e_{k−1}‖` for `k ≥ 1`.
    pub fn error_ratios(&self) -> Vec<f64> {
        self.error_norms
            .as_deref()
            .map(|e| e.windows(2).map(|w| w[1] / w[0]).collect())
            .unwrap_or_default()
    }

    pub fn final_error_norm(&self) -> Option<f64> {
        self.error_norms.as_ref().and_then(|e| e.last().copied())
    }

    /// `(‖e_K‖ / ‖e_0‖)^{1/K}` over the recorded run.
    pub fn geometric_mean_ratio(&self) -> Option<f64> {
        let e = self.error_norms.as_deref()?;
        geometric_mean_ratio(e)
    }

    /// Limit of the per-step error ratio, from the tail of the run.
    ///
    /// Uses the last ratio, refined by Aitken's Δ² when the last three
    /// ratios still move.
    pub fn asymptotic_ratio(&self) -> Option<f64> {
        let r = self.error_ratios();
        let n = r.len();
        let last = *r.last()?;
        if n < 3 {
            return Some(last);
        }
        let (r0, r1, r2) = (r[n - 3], r[n - 2], r[n - 1]);
        let d1 = r2 - r1;
        let denom = r2 - 2.0 * r1 + r0;
        if d1.abs() < 1e-13 || denom.abs() < 1e-15 {
            return Some(last);
        }
        let accel = r2 - d1 * d1 / denom;
        // Only trust the extrapolation when it stays near the tail.
        if (accel - r2).abs() <= 1e3 * d1.abs() && accel.is_finite() {
            Some(accel)
        } else {
            Some(last)
        }
    }

    /// Re-evaluates every stored `(x_k, y_{k+1}, x_{k+1})` triple and checks
    /// it is reproduced bit for bit.
    pub fn verify_recorded_steps<F: VectorField + ?Sized>(&self, f: &F) -> bool {
        self.extrapolations
            .iter()
            .enumerate()
            .filter(|(k, _)| k + 1 < self.iterates.len())
            .all(|(k, y)| match eg_step(f, &self.iterates[k], self.gamma) {
                Ok((y2, x2)) => &y2 == y && x2 == self.iterates[k + 1],
                Err(_) => false,
            })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(TRAJECTORY_CSV_HEADER)?;
        let errs = self.error_norms.as_deref();
        for k in 0..self.len() {
            let err = errs.map(|e| fmt_f64(e[k])).unwrap_or_default();
            let ratio = match (errs, k) {
                (Some(e), k) if k > 0 => fmt_f64(e[k] / e[k - 1]),
                _ => String::new(),
            };
            w.write_record([k.to_string(), err, fmt_f64(self.residual_norms[k]), ratio])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub const TRAJECTORY_CSV_HEADER: [&str; 4] = ["iter", "err_norm", "resid_norm", "ratio"];

/// `(e_last / e_0)^{1/(len−1)}`; `None` for fewer than two entries or a
/// zero starting error.
pub fn geometric_mean_ratio(error_norms: &[f64]) -> Option<f64> {
    let (first, last) = (*error_norms.first()?, *error_norms.last()?);
    let steps = error_norms.len() - 1;
    if steps == 0 || first == 0.0 {
        return None;
    }
    Some((last / first).powf(1.0 / steps as f64))
}

/// Result of sampling the one-step bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub samples: usize,
    pub q: f64,
    pub fraction_satisfied: f64,
    /// Largest `‖e_{k+1}‖² / (q‖e_k‖²)` observed.
    pub worst_ratio: f64,
}

/// Samples `x_k` uniformly in the ball of radius `radius` around `x_star`,
/// takes one step and tests `‖e_{k+1}‖² ≤ q(γ)‖e_k‖²`.
#[allow(clippy::too_many_arguments)]
pub fn one_step_bound_check<F: VectorField + ?Sized>(
    f: &F,
    x_star: &DVector<f64>,
    gamma: f64,
    mu: f64,
    lipschitz: f64,
    n_samples: usize,
    radius: f64,
    seed: u64,
) -> Result<BoundReport, EgError> {
    check_solution(f, x_star)?;
    if n_samples == 0 || !(radius > 0.0) {
        return Err(EgError::InvalidConfig("need n_samples >= 1 and radius > 0".into()));
    }
    let q = q_of_gamma(mu, lipschitz, gamma);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut satisfied = 0usize;
    let mut worst = f64::NEG_INFINITY;
    let mut taken = 0usize;
    while taken < n_samples {
        let offset = uniform_in_ball(&mut rng, f.dim(), radius);
        let e0 = offset.norm_squared();
        if e0 == 0.0 {
            continue;
        }
        let x = x_star + offset;
        let (_, x_next) = eg_step(f, &x, gamma)?;
        let e1 = (x_next - x_star).norm_squared();
        let bound = q * e0;
        if e1 <= bound * (1.0 + BOUND_SLACK) {
            satisfied += 1;
        }
        let ratio = if q > 0.0 { e1 / bound } else { f64::INFINITY };
        worst = worst.max(ratio);
        taken += 1;
    }
    Ok(BoundReport {
        samples: n_samples,
        q,
        fraction_satisfied: satisfied as f64 / n_samples as f64,
        worst_ratio: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;
    use crate::linop::LinearOperator;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    fn neg() -> FnField<impl Fn(&DVector<f64>) -> DVector<f64>> {
        FnField::new(1, |x: &DVector<f64>| -x)
    }

    fn rotation() -> LinearOperator {
        LinearOperator::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap()
    }

    #[test]
    fn step_examples() {
        let (y, x) = eg_step(&neg(), &v(&[1.0]), 0.5).unwrap();
        assert_eq!((y[0], x[0]), (1.5, 1.75));

        let id = FnField::new(1, |x: &DVector<f64>| x.clone());
        let (y, x) = eg_step(&id, &v(&[1.0]), 0.5).unwrap();
        assert_eq!((y[0], x[0]), (0.5, 0.75));

        let zero = FnField::new(3, |x: &DVector<f64>| DVector::zeros(x.len()));
        let x0 = v(&[1.0, -2.0, 3.0]);
        let (y, x) = eg_step(&zero, &x0, 0.7).unwrap();
        assert_eq!((&y, &x), (&x0, &x0));
    }

    #[test]
    fn step_rejects_bad_input() {
        assert!(matches!(eg_step(&neg(), &v(&[1.0]), 0.0), Err(EgError::InvalidConfig(_))));
        let blow = FnField::new(1, |x: &DVector<f64>| x.map(|v| if v > 1.0 { f64::INFINITY } else { v }));
        assert_eq!(eg_step(&blow, &v(&[2.0]), 0.5), Err(EgError::NumericOverflow { iter: 0 }));
    }

    #[test]
    fn negative_identity_grows_by_constant_factor() {
        let cfg = SolverConfig::new(0.5, 20);
        let t = run(&neg(), &v(&[1.0]), Some(&v(&[0.0])), &cfg).unwrap();
        assert_eq!(t.len(), 21);
        assert_eq!(t.termination, Termination::BudgetExhausted);
        for r in t.error_ratios() {
            assert!((r - 1.75).abs() < 1e-12);
        }
        assert!(!t.converged());
        assert!(t.verify_recorded_steps(&neg()));
    }

    #[test]
    fn negative_identity_hits_divergence_cutoff() {
        let cfg = SolverConfig::new(0.5, 1000);
        let t = run(&neg(), &v(&[1.0]), Some(&v(&[0.0])), &cfg).unwrap();
        assert_eq!(t.termination, Termination::Diverged);
        assert!(t.final_error_norm().unwrap() > DEFAULT_DIVERGENCE_STOP);
        assert!(t.len() <= cfg.max_iters + 1);
    }

    #[test]
    fn rotation_converges() {
        let cfg = SolverConfig::new(0.5, 500).with_residual_stop(1e-10);
        let rot = rotation();
        let t = run(&rot, &v(&[1.0, 0.0]), Some(&v(&[0.0, 0.0])), &cfg).unwrap();
        assert_eq!(t.termination, Termination::ResidualMet);
        for r in t.error_ratios() {
            assert!((r - 0.8125f64.sqrt()).abs() < 1e-12);
        }
        assert!((0.8125f64.sqrt() - 0.901388).abs() < 1e-6);
        assert!(t.verify_recorded_steps(&rot));
    }

    #[test]
    fn damped_rotation_converges_despite_negative_symmetric_part() {
        let a = LinearOperator::from_rows(&[vec![-0.1, 1.0], vec![-1.0, -0.1]]).unwrap();
        let cfg = SolverConfig::new(0.5, 2000).with_residual_stop(1e-8);
        let t = run(&a, &v(&[0.3, -0.8]), Some(&v(&[0.0, 0.0])), &cfg).unwrap();
        assert!(t.converged());
        let expect = num_complex::Complex64::new(0.8025, -0.55).norm();
        for r in t.error_ratios() {
            assert!((r - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn run_validates_inputs() {
        let cfg = SolverConfig::new(0.5, 10);
        let err = run(&neg(), &v(&[1.0]), Some(&v(&[0.1])), &cfg).unwrap_err();
        assert!(matches!(err, EgError::NotASolution { .. }));
        let err = run(&neg(), &v(&[1.0, 2.0]), None, &cfg).unwrap_err();
        assert_eq!(err, EgError::DimensionMismatch { expected: 1, found: 2 });
        for bad in [
            SolverConfig::new(0.0, 10),
            SolverConfig::new(0.5, 0),
            SolverConfig::new(0.5, 10).with_residual_stop(1.0).with_divergence_stop(0.5),
        ] {
            assert!(matches!(run(&neg(), &v(&[1.0]), None, &bad), Err(EgError::InvalidConfig(_))));
        }
    }

    #[test]
    fn gamma_outside_unit_interval_is_flagged_not_rejected() {
        let t = run(&rotation(), &v(&[1.0, 0.0]), None, &SolverConfig::new(1.5, 5)).unwrap();
        assert!(t.outside_theorem_interval);
        assert!(t.error_norms.is_none());
        assert_eq!(t.len(), 6);
        let t = run(&rotation(), &v(&[1.0, 0.0]), None, &SolverConfig::new(0.5, 5)).unwrap();
        assert!(!t.outside_theorem_interval);
    }

    #[test]
    fn scaled_norm_survives_large_entries() {
        let v = DVector::from_column_slice(&[3e200, 4e200]);
        assert!((scaled_norm(&v) / 5e200 - 1.0).abs() < 1e-15);
        assert_eq!(scaled_norm(&DVector::zeros(3)), 0.0);
    }

    #[test]
    fn overflow_truncates_as_divergence() {
        let f = FnField::new(1, |x: &DVector<f64>| x.map(|v| if v.abs() > 10.0 { f64::NAN } else { -v }));
        let cfg = SolverConfig::new(0.5, 100).with_divergence_stop(f64::MAX);
        let t = run(&f, &v(&[1.0]), Some(&v(&[0.0])), &cfg).unwrap();
        assert_eq!(t.termination, Termination::Diverged);
        assert!(t.overflow_at.is_some());
        assert_eq!(t.error_norms.as_ref().unwrap().len(), t.residual_norms.len());
    }

    #[test]
    fn keeps_only_leading_vectors() {
        let cfg = SolverConfig::new(0.5, 50).with_keep_vectors(10);
        let t = run(&rotation(), &v(&[1.0, 0.0]), None, &cfg).unwrap();
        assert_eq!(t.iterates.len(), 10);
        assert_eq!(t.extrapolations.len(), 10);
        assert_eq!(t.len(), 51);
        assert!(t.verify_recorded_steps(&rotation()));
    }

    #[test]
    fn bound_check_examples() {
        let r = one_step_bound_check(&neg(), &v(&[0.0]), 0.5, 1.0, 1.0, 1000, 1.0, 3).unwrap();
        assert_eq!(r.fraction_satisfied, 1.0);
        assert!((r.worst_ratio - 1.0).abs() < 1e-12);
        assert_eq!(r.q, 3.0625);

        let zero = FnField::new(2, |x: &DVector<f64>| DVector::zeros(x.len()));
        let r = one_step_bound_check(&zero, &v(&[0.0, 0.0]), 0.5, 0.0, 0.0, 200, 1.0, 3).unwrap();
        assert_eq!((r.fraction_satisfied, r.worst_ratio), (1.0, 1.0));
        let r = one_step_bound_check(&zero, &v(&[0.0, 0.0]), 0.5, 1.0, 1.0, 200, 1.0, 3).unwrap();
        assert_eq!(r.fraction_satisfied, 1.0);
        assert!((r.worst_ratio - 1.0 / 3.0625).abs() < 1e-15);
    }

    #[test]
    fn bound_check_on_rotation_is_tight() {
        // Oracle: amplification² / q = 0.8125 / 0.8125 at λ = ±i, γ = 0.5.
        let r = one_step_bound_check(&rotation(), &v(&[0.0, 0.0]), 0.5, 0.0, 1.0, 1000, 2.0, 9).unwrap();
        assert_eq!(r.fraction_satisfied, 1.0);
        assert!((r.worst_ratio - 1.0).abs() < 1e-12, "{}", r.worst_ratio);
    }

    #[test]
    fn bound_check_requires_solution() {
        let err = one_step_bound_check(&neg(), &v(&[1.0]), 0.5, 1.0, 1.0, 10, 1.0, 0).unwrap_err();
        assert!(matches!(err, EgError::NotASolution { .. }));
    }

    #[test]
    fn csv_layout() {
        let t = run(&neg(), &v(&[1.0]), Some(&v(&[0.0])), &SolverConfig::new(0.5, 2)).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "iter,err_norm,resid_norm,ratio");
        assert_eq!(lines[1], "0,1.0000000000000000e0,1.0000000000000000e0,");
        assert_eq!(lines[2], "1,1.7500000000000000e0,1.7500000000000000e0,1.7500000000000000e0");
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn geometric_mean_of_constant_ratio() {
        assert_eq!(geometric_mean_ratio(&[1.0, 2.0, 4.0, 8.0]), Some(2.0));
        assert_eq!(geometric_mean_ratio(&[1.0]), None);
        assert_eq!(geometric_mean_ratio(&[0.0, 1.0]), None);
    }
}
