//! The periodic Schrödinger equation on the 2-torus,
//!
//! ```text
//! i u_t = (-Laplacian + V(t)) u  on (-tau, tau),   u(0) = u0,
//! ```
//!
//! restricted to the Fourier box `Gamma_N` and rescaled to `(-1, 1)`:
//! `i u_t = tau (-Laplacian + pi_N V(t tau) pi_N) u`. The least-squares solver
//! works on the interaction-picture unknown `v(t) = e^{-i t tau Laplacian} u(t)`,
//! which obeys `i v_t = tau P(t)^* V(t tau) P(t) v` with a bounded generator.

use std::thread;

use num_complex::Complex64;

use crate::baselines::rk4_step;
use crate::error::{Error, Result};
use crate::hilbert::{HilbertElement, TimeOperator};
use crate::lsq::{LsqProblem, SolveDiagnostics, SpaceTimeCoefficients};
use crate::torus::{FourierField2D, FourierGrid, MovingCosinePotential, PotentialOp, SkewedPotentialOp};

/// Default number of RK4 steps over `(-1, 1)` for the reference solution.
pub const DEFAULT_REFERENCE_STEPS: usize = 1 << 16;

/// Maximum allowed gap between the reference at `steps` and `steps / 2`.
pub const RICHARDSON_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSchrodinger {
    n: usize,
    tau: f64,
    pot: MovingCosinePotential,
    u0: FourierField2D,
}

/// Normalized field with coefficients proportional to `exp(-(k^2 + l^2) / sigma^2)`.
pub fn gaussian_initial_datum(n: usize, sigma: f64) -> Result<FourierField2D> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Gaussian width must be positive, got {sigma}"
        )));
    }
    let mut f = FourierField2D::from_fn(n, |k, l| {
        Complex64::new((-((k * k + l * l) as f64) / (sigma * sigma)).exp(), 0.0)
    })?;
    let norm = f.norm();
    f.scale(Complex64::new(1.0 / norm, 0.0));
    Ok(f)
}

impl PeriodicSchrodinger {
    pub fn new(tau: f64, pot: MovingCosinePotential, u0: FourierField2D) -> Result<Self> {
        let n = u0.n();
        if n < 4 {
            return Err(Error::InvalidArgument(format!("N must be at least 4, got {n}")));
        }
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tau must be finite and non-negative, got {tau}"
            )));
        }
        if u0.norm() == 0.0 {
            return Err(Error::InvalidArgument("initial datum vanishes".into()));
        }
        Ok(Self { n, tau, pot, u0 })
    }

    /// Gaussian initial datum with width `N / 8`.
    pub fn with_gaussian(n: usize, tau: f64, pot: MovingCosinePotential) -> Result<Self> {
        Self::new(tau, pot, gaussian_initial_datum(n, n as f64 / 8.0)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn potential(&self) -> &MovingCosinePotential {
        &self.pot
    }

    pub fn u0(&self) -> &FourierField2D {
        &self.u0
    }

    /// Interaction-picture generator `t -> tau P(t)^* V(t tau) P(t)`.
    pub fn interaction_operator(&self) -> Result<SkewedPotentialOp> {
        SkewedPotentialOp::new(self.n, self.pot, self.tau)
    }

    /// Bounded part `t -> tau V(t tau)` of the Schrödinger-picture generator.
    pub fn potential_operator(&self) -> Result<PotentialOp> {
        PotentialOp::new(self.n, self.pot, self.tau)
    }

    /// Eigenvalues of the free part `tau (-Laplacian)`.
    pub fn free_symbol(&self) -> Result<Vec<f64>> {
        Ok(crate::torus::laplacian_symbol(self.n)?
            .into_iter()
            .map(|l| l * self.tau)
            .collect())
    }

    pub fn build_problem(&self, k: usize) -> Result<LsqProblem<FourierField2D, SkewedPotentialOp>> {
        self.build_problem_with_l(k, k)
    }

    pub fn build_problem_with_l(
        &self,
        k: usize,
        l: usize,
    ) -> Result<LsqProblem<FourierField2D, SkewedPotentialOp>> {
        LsqProblem::new(k, l, self.u0.clone(), self.interaction_operator()?)
    }

    pub fn solve(&self, k: usize) -> Result<InteractionSolution> {
        let (v_coeffs, diagnostics) = self.build_problem(k)?.pcg_solve()?;
        Ok(InteractionSolution {
            v_coeffs,
            diagnostics,
        })
    }
}

/// Least-squares solution in the interaction picture.
#[derive(Debug, Clone)]
pub struct InteractionSolution {
    pub v_coeffs: SpaceTimeCoefficients<FourierField2D>,
    pub diagnostics: SolveDiagnostics,
}

impl InteractionSolution {
    pub fn eval(&self, t: f64) -> Result<FourierField2D> {
        self.v_coeffs.eval(t)
    }
}

/// `u_N(t) = e^{i t tau Laplacian} v(t)`.
pub fn to_schrodinger_picture(
    sol: &InteractionSolution,
    p: &PeriodicSchrodinger,
    t: f64,
) -> Result<FourierField2D> {
    let v = sol.eval(t)?;
    Ok(FourierGrid::cached(p.n)?.free_propagate(&v, t * p.tau))
}

/// RK4 reference for the interaction-picture unknown at given sample times.
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub times: Vec<f64>,
    pub values: Vec<FourierField2D>,
    pub steps: usize,
    /// Max gap to the same integration with half the steps.
    pub richardson_gap: f64,
}

/// Integrates `i y' = H(t) y` from `y(0) = y0` to every sample time with RK4,
/// using steps no longer than `2 / steps`.
pub fn integrate_to_samples<E: HilbertElement, H: TimeOperator<E>>(
    op: &H,
    y0: &E,
    t_samples: &[f64],
    steps: usize,
) -> Result<Vec<E>> {
    if steps == 0 {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    if let Some(&bad) = t_samples.iter().find(|t| !(t.is_finite() && t.abs() <= 1.0)) {
        return Err(Error::Domain(bad));
    }
    let h_max = 2.0 / steps as f64;
    let mut out: Vec<Option<E>> = vec![None; t_samples.len()];

    let mut forward: Vec<usize> = (0..t_samples.len()).filter(|&i| t_samples[i] >= 0.0).collect();
    forward.sort_by(|&a, &b| t_samples[a].total_cmp(&t_samples[b]));
    let mut backward: Vec<usize> = (0..t_samples.len()).filter(|&i| t_samples[i] < 0.0).collect();
    backward.sort_by(|&a, &b| t_samples[b].total_cmp(&t_samples[a]));

    let march = |order: &[usize]| -> Vec<(usize, E)> {
        let mut t = 0.0;
        let mut y = y0.clone();
        let mut got = Vec::with_capacity(order.len());
        for &i in order {
            let target = t_samples[i];
            let span = target - t;
            let n = ((span.abs() / h_max) - 1e-9).ceil().max(0.0) as usize;
            if n > 0 {
                let h = span / n as f64;
                for j in 0..n {
                    y = rk4_step(op, t + j as f64 * h, h, &y);
                }
            }
            t = target;
            got.push((i, y.clone()));
        }
        got
    };

    let (fwd, bwd) = thread::scope(|s| {
        let f = s.spawn(|| march(&forward));
        let b = march(&backward);
        (f.join().expect("forward integration panicked"), b)
    });
    for (i, y) in fwd.into_iter().chain(bwd) {
        out[i] = Some(y);
    }
    Ok(out.into_iter().map(|y| y.expect("every sample visited")).collect())
}

/// Interaction-picture reference at `t_samples`, validated by step halving.
///
/// Fails with [`Error::OracleValidation`] if the runs with `steps` and
/// `steps / 2` differ by more than [`RICHARDSON_TOL`].
pub fn reference_solution(
    p: &PeriodicSchrodinger,
    t_samples: &[f64],
    steps: usize,
) -> Result<ReferenceSolution> {
    if steps < 2 {
        return Err(Error::InvalidArgument(
            "reference needs at least two steps".into(),
        ));
    }
    let op = p.interaction_operator()?;
    let (fine, coarse) = thread::scope(|s| {
        let c = s.spawn(|| integrate_to_samples(&op, &p.u0, t_samples, steps / 2));
        let f = integrate_to_samples(&op, &p.u0, t_samples, steps);
        (f, c.join().expect("coarse integration panicked"))
    });
    let (fine, coarse) = (fine?, coarse?);
    let gap = fine
        .iter()
        .zip(&coarse)
        .map(|(a, b)| a.sub(b).norm())
        .fold(0.0, |acc: f64, x| if x.is_nan() { f64::NAN } else { acc.max(x) });
    if !(gap <= RICHARDSON_TOL) {
        return Err(Error::OracleValidation(format!(
            "step halving changed the reference by {gap:.3e} (tolerance {RICHARDSON_TOL:.0e}) at {steps} steps"
        )));
    }
    Ok(ReferenceSolution {
        times: t_samples.to_vec(),
        values: fine,
        steps,
        richardson_gap: gap,
    })
}

/// `max_t |v(t) - v_ref(t)|` over the sample times.
pub fn c0_error<E: HilbertElement>(
    v: &SpaceTimeCoefficients<E>,
    reference: &[E],
    t_samples: &[f64],
) -> Result<f64> {
    if reference.len() != t_samples.len() {
        return Err(Error::DimensionMismatch {
            expected: t_samples.len(),
            found: reference.len(),
        });
    }
    let mut worst: f64 = 0.0;
    for (r, &t) in reference.iter().zip(t_samples) {
        worst = worst.max(v.eval(t)?.sub(r).norm());
    }
    Ok(worst)
}
