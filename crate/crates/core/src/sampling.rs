//! Seeded sampling helpers shared by the certifiers and the bound checker.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Uniform point in the closed Euclidean ball of radius `radius` in `ℝⁿ`.
pub fn uniform_in_ball(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> DVector<f64> {
    loop {
        let g = DVector::<f64>::from_fn(n, |_, _| rng.sample(StandardNormal));
        let norm = g.norm();
        if norm > 0.0 {
            let u: f64 = rng.random();
            return g * (radius * u.powf(1.0 / n as f64) / norm);
        }
    }
}

/// Uniform point on the unit sphere in `ℝⁿ`.
pub fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    loop {
        let g = DVector::<f64>::from_fn(n, |_, _| rng.sample(StandardNormal));
        let norm = g.norm();
        if norm > 0.0 {
            return g / norm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn ball_samples_stay_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..6 {
            for _ in 0..500 {
                assert!(uniform_in_ball(&mut rng, n, 2.5).norm() <= 2.5 + 1e-12);
            }
            assert!((unit_vector(&mut rng, n).norm() - 1.0).abs() < 1e-14);
        }
    }
}
