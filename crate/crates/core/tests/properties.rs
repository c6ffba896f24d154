//! Property checks against independent oracles.

use eglab_core::egsolve::{run, SolverConfig};
use eglab_core::linop::{block_diagonal_core, multiset_distance, spectra_match};
use eglab_core::sampling::{uniform_in_ball, unit_vector};
use eglab_core::stepan::{self, q_of_gamma, q_of_gamma_grouped, StepPolynomial};
use eglab_core::{
    certify_empirical, classify_linear, eg_amplification, eg_spectral_radius, make_normal_from_spectrum, LinearOperator,
    Spectrum,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
}

/// Characteristic polynomial coefficients `[1, c_{n-1}, …, c_0]` (monic,
/// descending) by Faddeev–LeVerrier.
fn charpoly(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut coeffs = vec![1.0];
    let mut m = DMatrix::<f64>::zeros(n, n);
    let id = DMatrix::<f64>::identity(n, n);
    let mut c = 1.0;
    for k in 1..=n {
        m = a * &m + &id * c;
        c = -(a * &m).trace() / k as f64;
        coeffs.push(c);
    }
    coeffs
}

/// Durand–Kerner iteration followed by Newton polishing.
fn poly_roots(monic_desc: &[f64]) -> Vec<Complex64> {
    let n = monic_desc.len() - 1;
    let eval = |z: Complex64| monic_desc.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    let deriv = |z: Complex64| {
        monic_desc[..n]
            .iter()
            .enumerate()
            .fold(Complex64::new(0.0, 0.0), |acc, (i, &c)| acc * z + c * (n - i) as f64)
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|i| seed.powu(i as u32)).collect();
    for _ in 0..2000 {
        for i in 0..n {
            let denom = (0..n)
                .filter(|&j| j != i)
                .fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
            let step = eval(z[i]) / denom;
            z[i] -= step;
        }
    }
    for zi in &mut z {
        for _ in 0..5 {
            let d = deriv(*zi);
            if d.norm() > 0.0 {
                *zi -= eval(*zi) / d;
            }
        }
    }
    z
}

#[test]
fn eigenvalues_match_characteristic_polynomial_oracle() {
    for n in 1..=4 {
        for seed in 0..25 {
            let a = random_matrix(n, 1000 * n as u64 + seed);
            let op = LinearOperator::from_matrix(a.clone()).unwrap();
            let oracle = poly_roots(&charpoly(&a));
            let d = multiset_distance(op.eigenvalues(), &oracle).unwrap();
            assert!(d <= 1e-9, "n={n} seed={seed} distance={d:e}");
        }
    }
}

#[test]
fn constructed_operators_are_normal_and_round_trip_their_spectrum() {
    for seed in 0..120u64 {
        let n = 1 + (seed as usize % 8);
        let s = Spectrum::random(n, seed).unwrap();
        let op = make_normal_from_spectrum(&s, seed ^ 0xabcd).unwrap();
        assert!(op.normality_residual() <= 1e-10, "seed {seed}: {}", op.normality_residual());
        assert!(spectra_match(op.eigenvalues(), s.eigenvalues(), 1e-9), "seed {seed}");

        // Fresh decomposition of the same entries reproduces the cache.
        let fresh = LinearOperator::from_matrix(op.matrix().clone()).unwrap();
        assert!(spectra_match(fresh.eigenvalues(), op.eigenvalues(), 1e-10));

        // The orthogonal similarity preserves singular values of the core.
        let core = LinearOperator::from_matrix(block_diagonal_core(&s)).unwrap();
        assert!((core.operator_norm() - op.operator_norm()).abs() <= 1e-12 * core.operator_norm().max(1.0));
    }
}

#[test]
fn operator_norm_matches_sampled_maximum() {
    for n in 1..=4 {
        for seed in 0..5u64 {
            let a = random_matrix(n, 77 + seed);
            let op = LinearOperator::from_matrix(a.clone()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best = DVector::zeros(n);
            let mut best_val: f64 = 0.0;
            for _ in 0..10_000 {
                let u = unit_vector(&mut rng, n);
                let v = (&a * &u).norm();
                assert!(v <= op.operator_norm() * (1.0 + 1e-12));
                if v > best_val {
                    best_val = v;
                    best = u;
                }
            }
            // Polish the best sample by power iteration on AᵀA.
            let ata = a.transpose() * &a;
            for _ in 0..5000 {
                let next = &ata * &best;
                best = &next / next.norm();
            }
            let polished = (&a * &best).norm().max(best_val);
            assert!((polished - op.operator_norm()).abs() <= 1e-6, "n={n} seed={seed}");
        }
    }
}

#[test]
fn exact_modulus_lower_bounds_every_sampled_quotient() {
    let mut total = 0;
    for seed in 0..5u64 {
        let op = LinearOperator::from_matrix(random_matrix(2 + seed as usize, seed)).unwrap();
        let report = classify_linear(&op);
        let cert = certify_empirical(&op, report.hypo_modulus, 20_000, 3.0, seed).unwrap();
        assert!(!cert.violation_found, "seed {seed}: {cert:?} vs mu {}", report.hypo_modulus);
        assert!(cert.min_quotient >= report.min_sym_eigenvalue - 1e-9);
        total += cert.samples;
    }
    assert!(total >= 100_000);
}

#[test]
fn rate_equals_spectral_radius_for_single_modulus_normal_operators() {
    // Every eigenvalue shares one amplification: a scaled rotation.
    for (re, im) in [(-0.1, 1.0), (0.2, 0.7), (-0.5, 0.0)] {
        let s = Spectrum::new(vec![Complex64::new(re, im), Complex64::new(re, -im)]).unwrap();
        let op = make_normal_from_spectrum(&s, 5).unwrap();
        let gamma = 0.4;
        let rho = eg_spectral_radius(&op, gamma);
        let x0 = DVector::from_vec(vec![0.3, -1.1]);
        let t = run(&op, &x0, Some(&DVector::zeros(2)), &SolverConfig::new(gamma, 40)).unwrap();
        for r in t.error_ratios() {
            assert!((r - rho).abs() < 1e-12);
        }
    }
}

#[test]
fn monotone_rotations_have_non_increasing_residuals() {
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 2 * (1 + seed as usize % 4);
        let mut eig = Vec::new();
        for _ in 0..n / 2 {
            let re = rng.random_range(0.0..0.5);
            let im = rng.random_range(0.1..1.5);
            eig.push(Complex64::new(re, im));
            eig.push(Complex64::new(re, -im));
        }
        let op = make_normal_from_spectrum(&Spectrum::new(eig).unwrap(), seed).unwrap();
        let gamma = 0.9 / op.operator_norm();
        let x0 = unit_vector(&mut rng, n);
        let t = run(&op, &x0, None, &SolverConfig::new(gamma, 300)).unwrap();
        let tail = &t.residual_norms[1..];
        for w in tail.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12), "seed {seed}");
        }
    }
}

#[test]
fn bound_tightness_identity_on_a_grid() {
    for i in 0..100 {
        let mu = 2.0 * i as f64 / 99.0;
        for j in 0..100 {
            let gamma = 2.0 * j as f64 / 99.0;
            let q = q_of_gamma(mu, mu, gamma);
            let s = (1.0 + gamma * mu + gamma * gamma * mu * mu).powi(2);
            assert!((q - s).abs() <= 1e-12 * s, "mu={mu} gamma={gamma}");
        }
    }
}

#[test]
fn descartes_count_bounds_roots_with_matching_parity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..300 {
        let mu: f64 = rng.random_range(0.0..1.0);
        let l: f64 = rng.random_range(0.05..2.0);
        let poly = StepPolynomial::new(mu, l).unwrap();
        let changes = stepan::descartes_sign_changes(&poly.p_descending());
        let bound = stepan::positive_root_bound(mu, l).unwrap();
        let scan = stepan::positive_roots(mu, l, bound).unwrap();
        let roots = scan.roots.len() + 2 * scan.tangential.len();
        assert!(changes >= roots && (changes - roots) % 2 == 0, "mu={mu} L={l}");
    }
}

#[test]
fn contractive_intervals_have_q_below_one_at_midpoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let mu: f64 = rng.random_range(0.0..0.2);
        let l: f64 = rng.random_range(0.1..2.0);
        let a = stepan::analyze(mu, l, 3.0).unwrap();
        for [lo, hi] in a.contractive_gammas {
            assert!(a.polynomial.q(0.5 * (lo + hi)) < 1.0);
        }
        for r in a.positive_roots {
            assert!(a.polynomial.p(r.lo) * a.polynomial.p(r.hi) <= 0.0);
        }
    }
}

/// The 2×2 block realizing λ (scalar block for real λ).
fn block_for(lambda: Complex64) -> LinearOperator {
    if lambda.im == 0.0 {
        LinearOperator::scalar(2, lambda.re).unwrap()
    } else {
        LinearOperator::from_rows(&[vec![lambda.re, lambda.im], vec![-lambda.im, lambda.re]]).unwrap()
    }
}

#[test]
fn amplification_matches_observed_step_ratio() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for _ in 0..50 {
        let lambda = loop {
            let z = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            if z.norm() <= 2.0 {
                break z;
            }
        };
        let gamma = rng.random_range(0.01..0.99);
        let op = block_for(lambda);
        let x0 = uniform_in_ball(&mut rng, 2, 1.0);
        let t = run(&op, &x0, Some(&DVector::zeros(2)), &SolverConfig::new(gamma, 1)).unwrap();
        let observed = t.error_ratios()[0];
        assert!((observed - eg_amplification(lambda, gamma)).abs() < 1e-9, "{lambda} {gamma}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn q_forms_agree(mu in 0.0f64..3.0, l in 0.0f64..3.0, gamma in 0.0f64..3.0) {
        let a = q_of_gamma(mu, l, gamma);
        let b = q_of_gamma_grouped(mu, l, gamma);
        prop_assert!((a - b).abs() <= 1e-12 * b.abs());
        let p = StepPolynomial::new(mu, l).unwrap().p(gamma);
        prop_assert!((a - 1.0 - p).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn recorded_steps_replay_exactly(seed in 0u64..10_000, gamma in 0.01f64..1.5, n in 1usize..6) {
        let s = Spectrum::random(n, seed).unwrap();
        let op = make_normal_from_spectrum(&s, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x0 = unit_vector(&mut rng, n);
        let t = run(&op, &x0, Some(&DVector::zeros(n)), &SolverConfig::new(gamma, 30)).unwrap();
        prop_assert!(t.verify_recorded_steps(&op));
        prop_assert_eq!(t.error_norms.as_ref().unwrap().len(), t.residual_norms.len());
        prop_assert!(t.len() <= 31);
    }

    #[test]
    fn rouche_circle_separates(mu in 0.001f64..3.0, l in 0.0f64..3.0) {
        let r = stepan::rouche_radius(mu, l).unwrap();
        prop_assert!(stepan::rouche_margin(mu, l, r, stepan::ROUCHE_SAMPLES) > 0.0);
    }

    #[test]
    fn hypomonotone_chain_for_normal_operators(seed in 0u64..5_000) {
        let n = 1 + (seed as usize % 8);
        let s = Spectrum::random(n, seed).unwrap();
        let op = make_normal_from_spectrum(&s, seed + 1).unwrap();
        let lam_min = s.min_real_part();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let d = uniform_in_ball(&mut rng, n, 2.0) - uniform_in_ball(&mut rng, n, 2.0);
            let inner = (op.matrix() * &d).dot(&d);
            prop_assert!(inner >= lam_min * d.norm_squared() - 1e-9);
        }
    }
}
