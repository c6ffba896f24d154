//! Monotonicity class and constants of an operator.
//!
//! For a linear `F(x) = Ax` everything is exact:
//! `⟨A(x − y), x − y⟩ / ‖x − y‖²` ranges over the numerical range of the
//! symmetric part, so the hypomonotonicity modulus is
//! `μ = max(0, −λ_min((A + Aᵀ)/2))` and the Lipschitz constant is `σ_max(A)`.
//! Black-box operators are probed by sampling pairs in a ball.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::VectorField;
use crate::linop::{LinearOperator, LinopError};
use crate::sampling::uniform_in_ball;

/// `λ_min(sym) ≥ −MONOTONE_TOL` counts as monotone.
pub const MONOTONE_TOL: f64 = 1e-12;
/// Smallest singular value below which an operator is treated as singular.
pub const SINGULAR_TOL: f64 = 1e-12;
/// Slack allowed below `−μ` before an empirical quotient is a violation.
pub const EMPIRICAL_TOL: f64 = 1e-9;
/// Pairs closer than this are redrawn.
pub const MIN_PAIR_SEPARATION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ViError {
    #[error("operator is singular (min singular value {min_singular_value:e})")]
    Singular { min_singular_value: f64 },
    #[error("invalid sampling parameters: {0}")]
    InvalidSampling(&'static str),
    #[error(transparent)]
    Linop(#[from] LinopError),
}

/// Certified constants of an operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub monotone: bool,
    #[serde(rename = "mu")]
    pub hypo_modulus: f64,
    pub lipschitz: f64,
    #[serde(rename = "cohypo")]
    pub cohypo_modulus: Option<f64>,
    #[serde(rename = "min_sym_eig")]
    pub min_sym_eigenvalue: f64,
    /// `|λ_min(sym) − min Re λ|`, recorded for operators that are normal.
    #[serde(skip)]
    pub spectral_discrepancy: Option<f64>,
}

impl ClassReport {
    fn from_min_quotient(min_q: f64, lipschitz: f64, cohypo: Option<f64>) -> Self {
        Self {
            monotone: min_q >= -MONOTONE_TOL,
            hypo_modulus: (-min_q).max(0.0),
            lipschitz,
            cohypo_modulus: cohypo,
            min_sym_eigenvalue: min_q,
            spectral_discrepancy: None,
        }
    }
}

/// Exact class of a linear operator.
///
/// The cohypomonotonicity modulus is filled in whenever the operator is
/// invertible. For normal operators the symmetric-part minimum must equal
/// the smallest real part of the spectrum; the gap is kept in
/// `spectral_discrepancy`.
pub fn classify_linear(op: &LinearOperator) -> ClassReport {
    let min_sym = op.min_sym_eigenvalue();
    let cohypo = cohypo_modulus(op).ok();
    let mut report = ClassReport::from_min_quotient(min_sym, op.operator_norm(), cohypo);
    if op.is_normal(1e-10) {
        report.spectral_discrepancy = Some((min_sym - op.min_real_eigenvalue()).abs());
    }
    report
}

/// `max(0, −λ_min(sym(A⁻¹)))`.
pub fn cohypo_modulus(op: &LinearOperator) -> Result<f64, ViError> {
    let min_singular_value = op.min_singular_value();
    if min_singular_value <= SINGULAR_TOL {
        return Err(ViError::Singular { min_singular_value });
    }
    let inv = op
        .inverse()
        .ok_or(ViError::Singular { min_singular_value })?;
    let inv = LinearOperator::from_matrix(inv)?;
    Ok((-inv.min_sym_eigenvalue()).max(0.0))
}

/// Outcome of probing a black-box operator against a claimed modulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCertificate {
    pub samples: usize,
    /// Smallest `⟨F(x) − F(y), x − y⟩ / ‖x − y‖²` seen.
    pub min_quotient: f64,
    pub claimed_mu: f64,
    pub violation_found: bool,
}

/// Constants observed by sampling pairs in a ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledConstants {
    pub samples: usize,
    pub min_quotient: f64,
    /// Largest `‖F(x) − F(y)‖ / ‖x − y‖` seen; a lower bound on `L`.
    pub max_lipschitz_quotient: f64,
}

impl SampledConstants {
    /// Class report built from observed constants. Never certifies `ρ`.
    pub fn to_report(&self) -> ClassReport {
        ClassReport::from_min_quotient(self.min_quotient, self.max_lipschitz_quotient, None)
    }
}

/// Draws `n_pairs` pairs uniformly in the ball of radius `radius` and
/// records the extreme monotonicity and Lipschitz quotients.
pub fn sample_constants<F: VectorField + ?Sized>(
    f: &F,
    n_pairs: usize,
    radius: f64,
    seed: u64,
) -> Result<SampledConstants, ViError> {
    if n_pairs == 0 {
        return Err(ViError::InvalidSampling("n_pairs must be at least 1"));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(ViError::InvalidSampling("radius must be positive and finite"));
    }
    let n = f.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_quotient = f64::INFINITY;
    let mut max_lip: f64 = 0.0;
    for _ in 0..n_pairs {
        let (x, y, d) = loop {
            let x = uniform_in_ball(&mut rng, n, radius);
            let y = uniform_in_ball(&mut rng, n, radius);
            let d: DVector<f64> = &x - &y;
            if d.norm() >= MIN_PAIR_SEPARATION {
                break (x, y, d);
            }
        };
        let df = f.eval(&x) - f.eval(&y);
        let dd = d.norm_squared();
        min_quotient = min_quotient.min(df.dot(&d) / dd);
        max_lip = max_lip.max(df.norm() / dd.sqrt());
    }
    Ok(SampledConstants {
        samples: n_pairs,
        min_quotient,
        max_lipschitz_quotient: max_lip,
    })
}

/// Tests the hypomonotonicity inequality with modulus `claimed_mu` on
/// `n_pairs` sampled pairs. Deterministic per seed.
pub fn certify_empirical<F: VectorField + ?Sized>(
    f: &F,
    claimed_mu: f64,
    n_pairs: usize,
    radius: f64,
    seed: u64,
) -> Result<EmpiricalCertificate, ViError> {
    if !(claimed_mu >= 0.0) {
        return Err(ViError::InvalidSampling("claimed modulus must be non-negative"));
    }
    let sampled = sample_constants(f, n_pairs, radius, seed)?;
    Ok(EmpiricalCertificate {
        samples: sampled.samples,
        min_quotient: sampled.min_quotient,
        claimed_mu,
        violation_found: sampled.min_quotient < -claimed_mu - EMPIRICAL_TOL,
    })
}
