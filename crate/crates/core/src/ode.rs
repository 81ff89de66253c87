//! Scalar model problem `i u'(t) = a cos(omega t) u(t)`, `u(0) = eta0`, on
//! `(-1, 1)`.

use num_complex::Complex64;

use crate::chebyshev::{ChebKind, ChebSeries, ChebTransform};
use crate::error::{Error, Result};
use crate::hilbert::TimeOperator;
use crate::lsq::{LsqProblem, SolveDiagnostics, SpaceTimeCoefficients};

/// Number of uniformly spaced points used by [`sup_error`].
pub const SUP_ERROR_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineOde {
    pub a: f64,
    pub omega: f64,
    pub eta0: Complex64,
}

/// `t -> a cos(omega t)` as a multiplication operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineCoefficient {
    pub a: f64,
    pub omega: f64,
}

impl TimeOperator<Complex64> for CosineCoefficient {
    fn apply(&self, t: f64, x: &Complex64) -> Complex64 {
        x * (self.a * (self.omega * t).cos())
    }

    fn is_zero(&self) -> bool {
        self.a == 0.0
    }
}

impl CosineOde {
    pub fn new(a: f64, omega: f64, eta0: Complex64) -> Self {
        Self { a, omega, eta0 }
    }

    pub fn coefficient(&self) -> CosineCoefficient {
        CosineCoefficient {
            a: self.a,
            omega: self.omega,
        }
    }

    /// `eta0 exp(-i a sin(omega t) / omega)`, and `eta0 exp(-i a t)` for
    /// `omega = 0`.
    pub fn exact_solution(&self, t: f64) -> Complex64 {
        let phase = if self.omega == 0.0 {
            self.a * t
        } else {
            self.a * (self.omega * t).sin() / self.omega
        };
        self.eta0 * Complex64::cis(-phase)
    }

    pub fn build_problem(
        &self,
        k: usize,
        l: usize,
    ) -> Result<LsqProblem<Complex64, CosineCoefficient>> {
        LsqProblem::new(k, l, self.eta0, self.coefficient())
    }

    /// Least-squares minimizer with `K` coefficients and `L` nodes.
    pub fn solve(&self, k: usize, l: usize) -> Result<(ChebSeries, SolveDiagnostics)> {
        let (u, diag) = self.build_problem(k, l)?.pcg_solve()?;
        Ok((to_series(u), diag))
    }
}

pub fn to_series(u: SpaceTimeCoefficients<Complex64>) -> ChebSeries {
    ChebSeries::first_kind(u.into_entries()).expect("coefficients are non-empty")
}

/// `n` equally spaced points covering `[-1, 1]`, endpoints included.
pub fn uniform_samples(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Max of `|u(t) - u*(t)|` over [`SUP_ERROR_SAMPLES`] uniform points.
pub fn sup_error(u: &ChebSeries, ode: &CosineOde) -> f64 {
    assert_eq!(u.kind(), ChebKind::FirstKind);
    uniform_samples(SUP_ERROR_SAMPLES)
        .into_iter()
        .map(|t| (u.eval(t).expect("samples lie in [-1, 1]") - ode.exact_solution(t)).norm())
        .fold(0.0, f64::max)
}

/// First-kind interpolant of `f` at the `k` Gauss-Chebyshev nodes.
pub fn interpolant<F: Fn(f64) -> Complex64>(f: F, k: usize) -> Result<ChebSeries> {
    if k == 0 {
        return Err(Error::InvalidArgument("interpolant needs k >= 1".into()));
    }
    let quad = crate::chebyshev::gauss_cheb(k)?;
    let values: Vec<Complex64> = quad.nodes().iter().map(|&x| f(x)).collect();
    ChebSeries::first_kind(ChebTransform::new(k).uncollocate(&values))
}

/// Affine map between a physical interval `(t0, t1)` and `(-1, 1)`.
///
/// If `i u_t = B(t) u` on `(t0, t1)` then `w(s) = u(t(s))` satisfies
/// `i w_s = (dt/ds) B(t(s)) w` on `(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeRescaling {
    pub t0: f64,
    pub t1: f64,
}

impl TimeRescaling {
    pub fn new(t0: f64, t1: f64) -> Result<Self> {
        if !(t1 > t0) {
            return Err(Error::InvalidArgument(format!(
                "empty interval ({t0}, {t1})"
            )));
        }
        Ok(Self { t0, t1 })
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.t1 - self.t0)
    }

    pub fn to_physical(&self, s: f64) -> f64 {
        0.5 * (self.t0 + self.t1) + self.half_width() * s
    }

    pub fn to_reference(&self, t: f64) -> f64 {
        (t - 0.5 * (self.t0 + self.t1)) / self.half_width()
    }

    /// The operator `s -> (dt/ds) B(t(s))`.
    pub fn rescale<E, B: TimeOperator<E>>(&self, op: B) -> Rescaled<B> {
        Rescaled { map: *self, op }
    }
}

pub struct Rescaled<B> {
    map: TimeRescaling,
    op: B,
}

impl<E: crate::hilbert::HilbertElement, B: TimeOperator<E>> TimeOperator<E> for Rescaled<B> {
    fn apply(&self, s: f64, x: &E) -> E {
        let mut out = self.op.apply(self.map.to_physical(s), x);
        out.scale(Complex64::new(self.map.half_width(), 0.0));
        out
    }

    fn is_zero(&self) -> bool {
        self.op.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn exact_solution_examples() {
        let ode = CosineOde::new(5.0, 20.0, Complex64::new(0.6, 0.8));
        assert_eq!(ode.exact_solution(0.0), ode.eta0);
        for t in uniform_samples(17) {
            assert!((ode.exact_solution(t).norm() - 1.0).abs() < 1e-15);
        }
        let free = CosineOde::new(0.0, 20.0, c(2.0));
        assert_eq!(free.exact_solution(0.4), c(2.0));
        let static_coeff = CosineOde::new(3.0, 0.0, c(1.0));
        assert!((static_coeff.exact_solution(0.5) - Complex64::cis(-1.5)).norm() < 1e-15);
    }

    #[test]
    fn exact_solution_satisfies_the_equation() {
        let ode = CosineOde::new(5.0, 20.0, c(1.0));
        let h = 1e-6;
        for &t in &[-0.8, -0.1, 0.3, 0.95] {
            let du = (ode.exact_solution(t + h) - ode.exact_solution(t - h)) / (2.0 * h);
            let lhs = Complex64::i() * du;
            let rhs = ode.exact_solution(t) * (5.0 * (20.0 * t).cos());
            assert!((lhs - rhs).norm() < 1e-6);
        }
    }

    #[test]
    fn free_problem_gives_constant_minimizer() {
        let eta0 = Complex64::new(0.3, -0.4);
        let ode = CosineOde::new(0.0, 20.0, eta0);
        let (u, _) = ode.solve(12, 12).unwrap();
        assert!((u.coeffs()[0] - eta0).norm() < 1e-13);
        assert!(u.coeffs()[1..].iter().all(|x| x.norm() < 1e-13));
        assert!(sup_error(&u, &ode) < 1e-13);
    }

    #[test]
    fn zero_data_gives_zero_minimizer() {
        let ode = CosineOde::new(5.0, 20.0, c(0.0));
        let (u, _) = ode.solve(16, 16).unwrap();
        assert!(u.coeffs().iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn sup_error_of_zero_series() {
        let ode = CosineOde::new(5.0, 20.0, c(1.0));
        let u = ChebSeries::first_kind(vec![c(0.0)]).unwrap();
        assert!((sup_error(&u, &ode) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn interpolant_of_exact_solution_is_spectrally_accurate() {
        let ode = CosineOde::new(5.0, 20.0, c(1.0));
        let u = interpolant(|t| ode.exact_solution(t), 256).unwrap();
        assert!(sup_error(&u, &ode) <= 1e-12);
    }

    #[test]
    fn uniform_samples_include_endpoints() {
        let s = uniform_samples(SUP_ERROR_SAMPLES);
        assert_eq!(s.len(), 1000);
        assert_eq!(s[0], -1.0);
        assert_eq!(s[999], 1.0);
    }

    #[test]
    fn rescaling_maps_problem_to_reference_interval() {
        // i u' = a cos(omega t) u on (0, 0.5) becomes an equation on (-1, 1).
        let map = TimeRescaling::new(0.0, 0.5).unwrap();
        assert_eq!(map.to_physical(-1.0), 0.0);
        assert_eq!(map.to_reference(0.5), 1.0);
        let ode = CosineOde::new(5.0, 20.0, c(1.0));
        let op = map.rescale(ode.coefficient());
        // initial condition sits at s = -1 here, so solve from the exact value
        // at the reference origin instead.
        let eta_mid = ode.exact_solution(map.to_physical(0.0));
        let (u, _) = LsqProblem::new(48, 48, eta_mid, op).unwrap().pcg_solve().unwrap();
        let u = to_series(u);
        for s in uniform_samples(41) {
            let err = (u.eval(s).unwrap() - ode.exact_solution(map.to_physical(s))).norm();
            assert!(err < 1e-10, "s={s} err={err}");
        }
        assert!(TimeRescaling::new(1.0, 1.0).is_err());
    }
}
