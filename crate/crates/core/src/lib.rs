//! Extragradient dynamics on hypomonotone operators.
//!
//! - [`linop`]: dense real operators, including normal operators built from a
//!   prescribed spectrum.
//! - [`viclass`]: monotone / hypomonotone / cohypomonotone constants, exact for
//!   linear operators and sampled for black-box ones.
//! - [`egsolve`]: the extragradient iteration, trajectories and the one-step
//!   error-bound check.
//! - [`stepan`]: the step-size polynomial `q(γ)`, its sign, root and Rouché
//!   analysis, and exact per-eigenvalue amplification factors.

pub mod csvfmt;
pub mod egsolve;
pub mod field;
pub mod linop;
pub mod sampling;
pub mod stepan;
pub mod viclass;

pub use egsolve::{eg_step, one_step_bound_check, run, BoundReport, EgError, SolverConfig, Termination, Trajectory};
pub use field::{CubicSaddle, FnField, VectorField};
pub use linop::{make_normal_from_spectrum, LinearOperator, LinopError, Spectrum};
pub use stepan::{
    analyze, descartes_sign_changes, eg_amplification, eg_spectral_radius, gamma_sweep, p_coefficients,
    positive_roots, q_of_gamma, rouche_radius, StepAnalysis, StepError, StepPolynomial, SweepRow,
};
pub use viclass::{certify_empirical, classify_linear, cohypo_modulus, ClassReport, EmpiricalCertificate, ViError};
