//! Vector-space abstraction for the spatial part of a space-time unknown.
//!
//! The least-squares engine, the time steppers and the Picard iteration are all
//! written once against [`HilbertElement`]; the scalar model problem uses
//! `Complex64` and the periodic Schrödinger problem uses
//! [`FourierField2D`](crate::torus::FourierField2D).

use num_complex::Complex64;

pub trait HilbertElement: Clone + Send + Sync {
    /// Zero element with the same shape as `self`.
    fn zeros_like(&self) -> Self;

    /// `self += alpha * x`
    fn axpy(&mut self, alpha: Complex64, x: &Self);

    fn scale(&mut self, alpha: Complex64);

    /// Inner product, antilinear in `self`.
    fn inner(&self, other: &Self) -> Complex64;

    fn norm_sqr(&self) -> f64 {
        self.inner(self).re
    }

    fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Flat view of the complex coordinates in an orthonormal basis.
    fn components(&self) -> &[Complex64];

    fn components_mut(&mut self) -> &mut [Complex64];

    /// Number of complex degrees of freedom.
    fn dim(&self) -> usize {
        self.components().len()
    }

    fn scaled(&self, alpha: Complex64) -> Self {
        let mut out = self.clone();
        out.scale(alpha);
        out
    }

    fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), other);
        out
    }
}

impl HilbertElement for Complex64 {
    fn zeros_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn axpy(&mut self, alpha: Complex64, x: &Self) {
        *self += alpha * x;
    }

    fn scale(&mut self, alpha: Complex64) {
        *self *= alpha;
    }

    fn inner(&self, other: &Self) -> Complex64 {
        self.conj() * other
    }

    fn norm_sqr(&self) -> f64 {
        Complex64::norm_sqr(self)
    }

    fn components(&self) -> &[Complex64] {
        std::slice::from_ref(self)
    }

    fn components_mut(&mut self) -> &mut [Complex64] {
        std::slice::from_mut(self)
    }
}

/// A self-adjoint, time-dependent bounded operator `t -> B(t)`.
///
/// This is the multiplicative part of the evolution `i u' = B(t) u`: the cosine
/// coefficient of the scalar model, or the interaction-picture potential of the
/// periodic problem. Implementations must be self-adjoint at every fixed `t`;
/// the normal operator of the least-squares system relies on it.
pub trait TimeOperator<E>: Send + Sync {
    fn apply(&self, t: f64, x: &E) -> E;

    /// `true` if the operator vanishes identically; lets solvers skip work.
    fn is_zero(&self) -> bool {
        false
    }
}

/// The zero operator.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroOperator;

impl<E: HilbertElement> TimeOperator<E> for ZeroOperator {
    fn apply(&self, _t: f64, x: &E) -> E {
        x.zeros_like()
    }

    fn is_zero(&self) -> bool {
        true
    }
}

/// Wraps a closure `(t, x) -> B(t) x`.
pub struct FnOperator<F>(pub F);

impl<E, F> TimeOperator<E> for FnOperator<F>
where
    F: Fn(f64, &E) -> E + Send + Sync,
{
    fn apply(&self, t: f64, x: &E) -> E {
        (self.0)(t, x)
    }
}

impl<E, T: TimeOperator<E> + ?Sized> TimeOperator<E> for &T {
    fn apply(&self, t: f64, x: &E) -> E {
        (**self).apply(t, x)
    }

    fn is_zero(&self) -> bool {
        (**self).is_zero()
    }
}

impl<E, T: TimeOperator<E> + ?Sized> TimeOperator<E> for std::sync::Arc<T> {
    fn apply(&self, t: f64, x: &E) -> E {
        (**self).apply(t, x)
    }

    fn is_zero(&self) -> bool {
        (**self).is_zero()
    }
}
