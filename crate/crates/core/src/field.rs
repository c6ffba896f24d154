//! Operators `F: ℝⁿ → ℝⁿ` as seen by the solver and the certifiers.

use nalgebra::DVector;

use crate::linop::LinearOperator;

/// A black-box map on `ℝⁿ`. Callers guarantee `x.len() == self.dim()`.
pub trait VectorField {
    fn dim(&self) -> usize;
    fn eval(&self, x: &DVector<f64>) -> DVector<f64>;
}

impl VectorField for LinearOperator {
    fn dim(&self) -> usize {
        LinearOperator::dim(self)
    }

    fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        self.matrix() * x
    }
}

impl<T: VectorField + ?Sized> VectorField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        (**self).eval(x)
    }
}

impl<T: VectorField + ?Sized> VectorField for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        (**self).eval(x)
    }
}

/// Wraps a closure as a [`VectorField`].
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> VectorField for FnField<F>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.f)(x)
    }
}

/// The planar game field of `f(x, y) = xy − x⁴/4 + y⁴/4`:
/// `F(x, y) = (∂ₓf, −∂ᵧf) = (y − x³, −x − y³)`.
///
/// Its Jacobian has symmetric part `diag(−3x², −3y²)`, so it is
/// hypomonotone on a ball of radius `r` with modulus at most `3r²` and is
/// nowhere monotone away from the origin. `F(0) = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CubicSaddle;

impl VectorField for CubicSaddle {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        let (u, v) = (x[0], x[1]);
        DVector::from_vec(vec![v - u * u * u, -u - v * v * v])
    }
}
