//! Step-size polynomials of the one-step extragradient error bound and the
//! exact eigenvalue-wise amplification of the extragradient map.
//!
//! For hypomonotone modulus `μ` and Lipschitz constant `L` the bound reads
//! `‖e_{k+1}‖² ≤ q(γ)‖e_k‖²` with
//!
//! ```text
//! q(γ) = 1 + 2μγ + (4μ² − L²)γ² + 2μL²γ³ + L⁴γ⁴
//! P(γ) = q(γ) − 1 = a₁γ + a₂γ² + a₃γ³ + a₄γ⁴
//! ```
//!
//! `P = f + g` with `f(γ) = 2μγ`. This module counts sign changes of `P`'s
//! coefficients, locates its positive roots, finds a circle on which
//! `|g| < |f|`, and tabulates where `q < 1`.
//!
//! On a linear problem `F(x) = Ax` one extragradient step is
//! `x ↦ (I − γA + γ²A²)x`, so on the eigenspace of `λ` the error is scaled
//! by exactly `|1 − γλ + γ²λ²|`.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csvfmt::fmt_f64;
use crate::linop::LinearOperator;

/// Coefficients with magnitude below this are treated as zero when counting
/// sign changes.
pub const SIGN_ZERO_TOL: f64 = 1e-14;
/// Number of grid points used to bracket positive roots of `P`.
pub const ROOT_SCAN_POINTS: usize = 10_000;
/// Target bracket width for root bisection.
pub const ROOT_BRACKET_WIDTH: f64 = 1e-10;
/// `|P|` minima below this that do not change sign are reported as
/// tangential roots.
pub const TANGENTIAL_TOL: f64 = 1e-8;
/// Target width of the Rouché radius bisection.
pub const ROUCHE_TOL: f64 = 1e-10;
/// Points on the circle used to verify `|g| < |f|`.
pub const ROUCHE_SAMPLES: usize = 360;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error("constants must be finite and non-negative (mu = {mu}, L = {lipschitz})")]
    InvalidConstants { mu: f64, lipschitz: f64 },
    #[error("step size {0} must be positive and finite")]
    InvalidGamma(f64),
    #[error("f identically zero; Rouché comparison undefined")]
    RoucheUndefined,
    #[error("Rouché circle of radius {radius:e} failed sampled verification (margin {margin:e})")]
    RoucheVerification { radius: f64, margin: f64 },
}

fn check_constants(mu: f64, lipschitz: f64) -> Result<(), StepError> {
    if mu >= 0.0 && lipschitz >= 0.0 && mu.is_finite() && lipschitz.is_finite() {
        Ok(())
    } else {
        Err(StepError::InvalidConstants { mu, lipschitz })
    }
}

fn check_gamma(gamma: f64) -> Result<(), StepError> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(StepError::InvalidGamma(gamma))
    }
}

/// `q` and `P` for fixed `(μ, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPolynomial {
    pub mu: f64,
    pub lipschitz: f64,
    /// Ascending degree: `[1, 2μ, 4μ² − L², 2μL², L⁴]`.
    pub q_coeffs: [f64; 5],
    /// Ascending degree from `γ¹`: `[a₁, a₂, a₃, a₄]`.
    pub p_coeffs: [f64; 4],
}

impl StepPolynomial {
    pub fn new(mu: f64, lipschitz: f64) -> Result<Self, StepError> {
        check_constants(mu, lipschitz)?;
        let p = raw_p_coefficients(mu, lipschitz);
        Ok(Self {
            mu,
            lipschitz,
            q_coeffs: [1.0, p[0], p[1], p[2], p[3]],
            p_coeffs: p,
        })
    }

    pub fn q(&self, gamma: f64) -> f64 {
        horner(&self.q_coeffs, gamma)
    }

    /// `P(γ) = q(γ) − 1`, evaluated without forming `q`.
    pub fn p(&self, gamma: f64) -> f64 {
        horner(&self.p_coeffs, gamma) * gamma
    }

    /// `f(γ) = 2μγ`.
    pub fn f_term(&self, gamma: Complex64) -> Complex64 {
        gamma * (2.0 * self.mu)
    }

    /// `g(γ) = (4μ² − L²)γ² + 2μL²γ³ + L⁴γ⁴`.
    pub fn g_term(&self, gamma: Complex64) -> Complex64 {
        let [_, a2, a3, a4] = self.p_coeffs;
        ((gamma * a4 + a3) * gamma + a2) * gamma * gamma
    }

    /// `P`'s coefficients in descending degree, `[a₄, a₃, a₂, a₁]`.
    pub fn p_descending(&self) -> [f64; 4] {
        let [a1, a2, a3, a4] = self.p_coeffs;
        [a4, a3, a2, a1]
    }

    pub fn is_zero(&self) -> bool {
        self.p_coeffs.iter().all(|&a| a == 0.0)
    }
}

fn horner(ascending: &[f64], x: f64) -> f64 {
    ascending.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn raw_p_coefficients(mu: f64, l: f64) -> [f64; 4] {
    let l2 = l * l;
    [2.0 * mu, 4.0 * mu * mu - l2, 2.0 * mu * l2, l2 * l2]
}

/// `q(γ)` by Horner's rule on the expanded coefficients.
pub fn q_of_gamma(mu: f64, lipschitz: f64, gamma: f64) -> f64 {
    let [a1, a2, a3, a4] = raw_p_coefficients(mu, lipschitz);
    horner(&[1.0, a1, a2, a3, a4], gamma)
}

/// `q(γ)` in its grouped form
/// `1 + 2γμ(1 + 2γμ) + γ²L²(−1 + L²γ² + 2γμ)`.
pub fn q_of_gamma_grouped(mu: f64, lipschitz: f64, gamma: f64) -> f64 {
    let gm = gamma * mu;
    let gl2 = gamma * gamma * lipschitz * lipschitz;
    1.0 + 2.0 * gm * (1.0 + 2.0 * gm) + gl2 * (-1.0 + gl2 + 2.0 * gm)
}

/// `[a₁, a₂, a₃, a₄]` of `P(γ) = q(γ) − 1`.
pub fn p_coefficients(mu: f64, lipschitz: f64) -> Result<[f64; 4], StepError> {
    check_constants(mu, lipschitz)?;
    Ok(raw_p_coefficients(mu, lipschitz))
}

fn sign_of(c: f64) -> i8 {
    if c.abs() < SIGN_ZERO_TOL {
        0
    } else if c > 0.0 {
        1
    } else {
        -1
    }
}

/// Number of strict sign alternations between consecutive nonzero
/// coefficients (descending degree). Magnitudes below [`SIGN_ZERO_TOL`]
/// count as zero.
pub fn descartes_sign_changes(coeffs: &[f64]) -> usize {
    let signs = coeffs.iter().map(|&c| sign_of(c)).filter(|&s| s != 0);
    let mut changes = 0;
    let mut last = None;
    for s in signs {
        if last.is_some_and(|l| l != s) {
            changes += 1;
        }
        last = Some(s);
    }
    changes
}

/// Literal sign pattern of `coeffs`, e.g. `(+, +, -, +)`.
pub fn sign_pattern(coeffs: &[f64]) -> String {
    let parts: Vec<&str> = coeffs
        .iter()
        .map(|&c| match sign_of(c) {
            1 => "+",
            -1 => "-",
            _ => "0",
        })
        .collect();
    format!("({})", parts.join(", "))
}

/// Largest `r` with `(4μ² + L²)r + 2μL²r² + L⁴r³ ≤ 2μ`.
///
/// By the triangle inequality this makes `|g(γ)| < |f(γ)| = 2μr` on the
/// circle `|γ| = r`. The left side is increasing in `r`, and `2μ/(4μ² + L²)`
/// is an upper bracket, so bisection converges to the unique root; the lower
/// end of the final bracket is returned. The strict inequality is then
/// checked on [`ROUCHE_SAMPLES`] points of the circle.
pub fn rouche_radius(mu: f64, lipschitz: f64) -> Result<f64, StepError> {
    check_constants(mu, lipschitz)?;
    if mu == 0.0 {
        return Err(StepError::RoucheUndefined);
    }
    let l2 = lipschitz * lipschitz;
    let lin = 4.0 * mu * mu + l2;
    let excess = |r: f64| ((l2 * l2 * r + 2.0 * mu * l2) * r + lin) * r - 2.0 * mu;

    let mut lo = 0.0;
    let mut hi = 2.0 * mu / lin;
    while hi - lo > ROUCHE_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let radius = lo;
    let margin = rouche_margin(mu, lipschitz, radius, ROUCHE_SAMPLES);
    if radius > 0.0 && margin > 0.0 {
        Ok(radius)
    } else {
        Err(StepError::RoucheVerification { radius, margin })
    }
}

/// `2μr − max |g|` over `samples` equally spaced points on `|γ| = r`.
/// Positive when the sampled Rouché comparison holds.
pub fn rouche_margin(mu: f64, lipschitz: f64, radius: f64, samples: usize) -> f64 {
    let poly = StepPolynomial {
        mu,
        lipschitz,
        q_coeffs: [0.0; 5],
        p_coeffs: raw_p_coefficients(mu, lipschitz),
    };
    let max_g = (0..samples)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / samples as f64;
            poly.g_term(Complex64::from_polar(radius, theta)).norm()
        })
        .fold(0.0, f64::max);
    2.0 * mu * radius - max_g
}

/// A strict sign change of `P` bracketed by `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositiveRoot {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl PositiveRoot {
    pub fn bracket_width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Roots of `P` on `(0, γ_max]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RootScan {
    pub roots: Vec<PositiveRoot>,
    /// Touching zeros: local minima of `|P|` below [`TANGENTIAL_TOL`]
    /// without a sign change.
    pub tangential: Vec<f64>,
}

fn bisect(poly: &StepPolynomial, mut lo: f64, mut hi: f64) -> PositiveRoot {
    let mut f_lo = poly.p(lo);
    while hi - lo > ROOT_BRACKET_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = poly.p(mid);
        if f_mid == 0.0 {
            return PositiveRoot { value: mid, lo: mid, hi: mid };
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    PositiveRoot { value: 0.5 * (lo + hi), lo, hi }
}

fn golden_min_abs(poly: &StepPolynomial, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let c = b - inv_phi * (b - a);
        let d = a + inv_phi * (b - a);
        if poly.p(c).abs() < poly.p(d).abs() {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Positive roots of `P` in `(0, γ_max]` by a [`ROOT_SCAN_POINTS`]-point
/// grid scan followed by bisection of every sign-change bracket.
pub fn positive_roots(mu: f64, lipschitz: f64, gamma_max: f64) -> Result<RootScan, StepError> {
    check_gamma(gamma_max)?;
    let poly = StepPolynomial::new(mu, lipschitz)?;
    Ok(scan_roots(&poly, gamma_max))
}

fn scan_roots(poly: &StepPolynomial, gamma_max: f64) -> RootScan {
    let mut scan = RootScan::default();
    if poly.is_zero() {
        return scan;
    }
    let n = ROOT_SCAN_POINTS;
    let grid: Vec<f64> = (1..=n).map(|i| gamma_max * i as f64 / n as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&g| poly.p(g)).collect();

    let mut last_nonzero: Option<usize> = None;
    let mut zero_run: Vec<usize> = Vec::new();
    for i in 0..n {
        let v = vals[i];
        if v == 0.0 {
            zero_run.push(i);
            continue;
        }
        if let Some(j) = last_nonzero {
            let flips = (vals[j] > 0.0) != (v > 0.0);
            if !zero_run.is_empty() {
                let z = grid[zero_run[zero_run.len() / 2]];
                if flips {
                    scan.roots.push(PositiveRoot { value: z, lo: z, hi: z });
                } else {
                    scan.tangential.push(z);
                }
            } else if flips {
                scan.roots.push(bisect(poly, grid[j], grid[i]));
            }
        }
        zero_run.clear();
        last_nonzero = Some(i);
    }
    if last_nonzero.is_some() {
        if let Some(&first) = zero_run.first() {
            let z = grid[first];
            scan.roots.push(PositiveRoot { value: z, lo: z, hi: z });
        }
    }

    for i in 1..n - 1 {
        let (a, b, c) = (vals[i - 1], vals[i], vals[i + 1]);
        let same_sign = a != 0.0 && b != 0.0 && c != 0.0 && (a > 0.0) == (b > 0.0) && (b > 0.0) == (c > 0.0);
        if same_sign && b.abs() < TANGENTIAL_TOL && b.abs() <= a.abs() && b.abs() <= c.abs() {
            let g = golden_min_abs(poly, grid[i - 1], grid[i + 1]);
            if poly.p(g).abs() < TANGENTIAL_TOL {
                scan.tangential.push(g);
            }
        }
    }
    scan.tangential.sort_by(f64::total_cmp);
    scan
}

/// Cauchy bound: every positive root of `P` lies in `(0, bound]`.
/// `None` when `P ≡ 0`.
pub fn positive_root_bound(mu: f64, lipschitz: f64) -> Option<f64> {
    let c = raw_p_coefficients(mu, lipschitz);
    let lead = c.iter().rposition(|&a| a != 0.0)?;
    let ratio = c[..lead]
        .iter()
        .map(|a| (a / c[lead]).abs())
        .fold(0.0, f64::max);
    Some(1.0 + ratio)
}

/// Maximal sub-intervals of `(0, γ_max]` on which `q < 1`, delimited by
/// the roots in `scan`.
pub fn contractive_intervals(poly: &StepPolynomial, gamma_max: f64, scan: &RootScan) -> Vec<[f64; 2]> {
    let mut cuts = vec![0.0];
    cuts.extend(scan.roots.iter().map(|r| r.value));
    cuts.push(gamma_max);
    cuts.windows(2)
        .filter(|w| w[1] > w[0])
        .filter(|w| poly.p(0.5 * (w[0] + w[1])) < 0.0)
        .map(|w| [w[0], w[1]])
        .collect()
}

/// Sign, root and Rouché analysis of `P` for one `(μ, L)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepAnalysis {
    pub polynomial: StepPolynomial,
    pub gamma_max: f64,
    /// Literal sign pattern of `[a₄, a₃, a₂, a₁]`.
    pub sign_pattern: String,
    pub sign_changes: usize,
    pub positive_roots: Vec<PositiveRoot>,
    pub tangential_roots: Vec<f64>,
    pub rouche_radius: Option<f64>,
    pub rouche_margin: Option<f64>,
    pub rouche_absent_reason: Option<String>,
    pub contractive_gammas: Vec<[f64; 2]>,
}

pub fn analyze(mu: f64, lipschitz: f64, gamma_max: f64) -> Result<StepAnalysis, StepError> {
    check_gamma(gamma_max)?;
    let poly = StepPolynomial::new(mu, lipschitz)?;
    let desc = poly.p_descending();
    let scan = scan_roots(&poly, gamma_max);
    let (rouche_radius, rouche_margin, rouche_absent_reason) = match rouche_radius(mu, lipschitz) {
        Ok(r) => (Some(r), Some(self::rouche_margin(mu, lipschitz, r, ROUCHE_SAMPLES)), None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    Ok(StepAnalysis {
        polynomial: poly,
        gamma_max,
        sign_pattern: sign_pattern(&desc),
        sign_changes: descartes_sign_changes(&desc),
        contractive_gammas: contractive_intervals(&poly, gamma_max, &scan),
        positive_roots: scan.roots,
        tangential_roots: scan.tangential,
        rouche_radius,
        rouche_margin,
        rouche_absent_reason,
    })
}

/// `|1 − γλ + γ²λ²|`.
pub fn eg_amplification(lambda: Complex64, gamma: f64) -> f64 {
    let gl = lambda * gamma;
    (Complex64::new(1.0, 0.0) - gl + gl * gl).norm()
}

/// Largest [`eg_amplification`] over the spectrum of `op`.
pub fn eg_spectral_radius(op: &LinearOperator, gamma: f64) -> f64 {
    op.eigenvalues()
        .iter()
        .map(|&l| eg_amplification(l, gamma))
        .fold(0.0, f64::max)
}

/// One row of a step-size sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub q: f64,
    #[serde(rename = "P")]
    pub p: f64,
    pub contractive: bool,
    /// Amplification at the witness eigenvalue `λ = −μ`.
    pub amp_witness: f64,
}

pub fn gamma_sweep(mu: f64, lipschitz: f64, grid: &[f64]) -> Result<Vec<SweepRow>, StepError> {
    let poly = StepPolynomial::new(mu, lipschitz)?;
    grid.iter()
        .map(|&gamma| {
            check_gamma(gamma)?;
            let q = poly.q(gamma);
            Ok(SweepRow {
                gamma,
                q,
                p: poly.p(gamma),
                contractive: q < 1.0,
                amp_witness: eg_amplification(Complex64::new(-mu, 0.0), gamma),
            })
        })
        .collect()
}

/// `n` equally spaced step sizes `γ_max·i/n`, `i = 1..=n`.
pub fn uniform_grid(gamma_max: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| gamma_max * i as f64 / n as f64).collect()
}

pub const SWEEP_CSV_HEADER: [&str; 5] = ["gamma", "q", "P", "contractive", "amp_witness"];

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_CSV_HEADER)?;
    for r in rows {
        w.write_record([
            fmt_f64(r.gamma),
            fmt_f64(r.q),
            fmt_f64(r.p),
            r.contractive.to_string(),
            fmt_f64(r.amp_witness),
        ])?;
    }
    w.flush()?;
    Ok(())
}
