//! Time-stepping references for `i y' = H(t) y`: Crank-Nicolson, classical
//! RK4, and the Picard iteration on the Duhamel formula.
//!
//! Steppers take a uniform grid starting at the time of the initial datum;
//! the grid may run backwards. [`two_sided`] assembles a trajectory on
//! `[-T, T]` from an initial datum at `t = 0`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{HilbertElement, TimeOperator};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SteppingMethod {
    CrankNicolson,
    Rk4,
    Picard,
}

impl SteppingMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SteppingMethod::CrankNicolson => "crank_nicolson",
            SteppingMethod::Rk4 => "rk4",
            SteppingMethod::Picard => "picard",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteppedTrajectory<E> {
    pub times: Vec<f64>,
    pub states: Vec<E>,
    pub method: SteppingMethod,
}

impl<E: HilbertElement> SteppedTrajectory<E> {
    fn new(times: Vec<f64>, states: Vec<E>, method: SteppingMethod) -> Self {
        debug_assert_eq!(times.len(), states.len());
        Self {
            times,
            states,
            method,
        }
    }

    pub fn last(&self) -> &E {
        self.states.last().expect("trajectories are never empty")
    }

    /// Max over grid points of `|y(t_n) - exact(t_n)|`.
    pub fn max_error<F: Fn(f64) -> E>(&self, exact: F) -> f64 {
        self.times
            .iter()
            .zip(&self.states)
            .map(|(&t, y)| y.sub(&exact(t)).norm())
            .fold(0.0, f64::max)
    }
}

/// `steps + 1` equally spaced points from `t0` to `t1`.
pub fn uniform_grid(t0: f64, t1: f64, steps: usize) -> Vec<f64> {
    let steps = steps.max(1);
    (0..=steps)
        .map(|i| {
            if i == steps {
                t1
            } else {
                t0 + (t1 - t0) * i as f64 / steps as f64
            }
        })
        .collect()
}

fn check_grid(grid: &[f64]) -> Result<f64> {
    if grid.len() < 2 {
        return Err(Error::InvalidArgument(
            "time grid needs at least two points".into(),
        ));
    }
    let h = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    if h == 0.0 || !h.is_finite() {
        return Err(Error::InvalidArgument("degenerate time grid".into()));
    }
    for w in grid.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs() {
            return Err(Error::InvalidArgument("time grid is not uniform".into()));
        }
    }
    Ok(h)
}

/// One classical RK4 step for `y' = -i H(t) y`.
pub fn rk4_step<E: HilbertElement, H: TimeOperator<E>>(op: &H, t: f64, h: f64, y: &E) -> E {
    let f = |t: f64, y: &E| op.apply(t, y).scaled(-I);
    let k1 = f(t, y);
    let mut tmp = y.clone();
    tmp.axpy(Complex64::new(0.5 * h, 0.0), &k1);
    let k2 = f(t + 0.5 * h, &tmp);
    let mut tmp = y.clone();
    tmp.axpy(Complex64::new(0.5 * h, 0.0), &k2);
    let k3 = f(t + 0.5 * h, &tmp);
    let mut tmp = y.clone();
    tmp.axpy(Complex64::new(h, 0.0), &k3);
    let k4 = f(t + h, &tmp);
    let mut out = y.clone();
    out.axpy(Complex64::new(h / 6.0, 0.0), &k1);
    out.axpy(Complex64::new(h / 3.0, 0.0), &k2);
    out.axpy(Complex64::new(h / 3.0, 0.0), &k3);
    out.axpy(Complex64::new(h / 6.0, 0.0), &k4);
    out
}

/// Classical RK4 on `y' = -i H(t) y` along `grid`.
pub fn rk4<E: HilbertElement, H: TimeOperator<E>>(
    op: &H,
    y0: E,
    grid: &[f64],
) -> Result<SteppedTrajectory<E>> {
    let h = check_grid(grid)?;
    let mut states = Vec::with_capacity(grid.len());
    states.push(y0);
    for &t in &grid[..grid.len() - 1] {
        let next = rk4_step(op, t, h, states.last().unwrap());
        states.push(next);
    }
    Ok(SteppedTrajectory::new(
        grid.to_vec(),
        states,
        SteppingMethod::Rk4,
    ))
}

/// Where the Crank-Nicolson scheme evaluates the time-dependent operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CnVariant {
    /// `(I + i h/2 H(t_{n+1})) y_{n+1} = (I - i h/2 H(t_n)) y_n`
    #[default]
    EndpointAverage,
    /// Both sides use `H(t_n + h/2)`; every step is a Cayley transform.
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CnOptions {
    pub variant: CnVariant,
    /// Relative residual tolerance of the inner CGNR solve.
    pub inner_tol: f64,
    pub inner_maxit: usize,
}

impl Default for CnOptions {
    fn default() -> Self {
        Self {
            variant: CnVariant::EndpointAverage,
            inner_tol: 1e-13,
            inner_maxit: 500,
        }
    }
}

/// Solves `(I + i beta H) y = b` by CG on the normal equations
/// `(I + beta^2 H^2) y = (I - i beta H) b`, warm-started at `guess`.
fn cgnr_shifted<E: HilbertElement, H: TimeOperator<E>>(
    op: &H,
    t: f64,
    beta: f64,
    b: &E,
    guess: E,
    tol: f64,
    maxit: usize,
) -> Result<E> {
    let m = |y: &E| {
        let mut out = y.clone();
        out.axpy(Complex64::new(0.0, beta), &op.apply(t, y));
        out
    };
    let m_adj = |y: &E| {
        let mut out = y.clone();
        out.axpy(Complex64::new(0.0, -beta), &op.apply(t, y));
        out
    };
    let rhs = m_adj(b);
    let rhs_norm = rhs.norm();
    if rhs_norm == 0.0 {
        return Ok(b.zeros_like());
    }
    let mut x = guess;
    let mut r = rhs.sub(&m_adj(&m(&x)));
    let mut p = r.clone();
    let mut rr = r.norm_sqr();
    for _ in 0..maxit {
        if rr.sqrt() <= tol * rhs_norm {
            return Ok(x);
        }
        let q = m_adj(&m(&p));
        let alpha = rr / p.inner(&q).re;
        x.axpy(Complex64::new(alpha, 0.0), &p);
        r.axpy(Complex64::new(-alpha, 0.0), &q);
        let rr_new = r.norm_sqr();
        p.scale(Complex64::new(rr_new / rr, 0.0));
        p.axpy(Complex64::new(1.0, 0.0), &r);
        rr = rr_new;
    }
    if rr.sqrt() <= tol * rhs_norm {
        Ok(x)
    } else {
        Err(Error::InnerSolve(format!(
            "CGNR reached {maxit} iterations with relative residual {:.3e}",
            rr.sqrt() / rhs_norm
        )))
    }
}

/// Crank-Nicolson along `grid`. Scalar problems are solved by division,
/// others by CGNR.
pub fn crank_nicolson<E: HilbertElement, H: TimeOperator<E>>(
    op: &H,
    y0: E,
    grid: &[f64],
    opts: CnOptions,
) -> Result<SteppedTrajectory<E>> {
    let h = check_grid(grid)?;
    let half = 0.5 * h;
    let scalar = y0.dim() == 1;
    let mut unit = y0.zeros_like();
    if scalar {
        unit.components_mut()[0] = Complex64::new(1.0, 0.0);
    }
    let mut states = Vec::with_capacity(grid.len());
    states.push(y0);
    for &t in &grid[..grid.len() - 1] {
        let (t_explicit, t_implicit) = match opts.variant {
            CnVariant::EndpointAverage => (t, t + h),
            CnVariant::Midpoint => (t + half, t + half),
        };
        let y = states.last().unwrap();
        let mut b = y.clone();
        b.axpy(Complex64::new(0.0, -half), &op.apply(t_explicit, y));
        let next = if scalar {
            let hv = op.apply(t_implicit, &unit).components()[0];
            let denom = Complex64::new(1.0, 0.0) + Complex64::new(0.0, half) * hv;
            b.scaled(1.0 / denom)
        } else {
            let guess = b.clone();
            cgnr_shifted(op, t_implicit, half, &b, guess, opts.inner_tol, opts.inner_maxit)?
        };
        states.push(next);
    }
    Ok(SteppedTrajectory::new(
        grid.to_vec(),
        states,
        SteppingMethod::CrankNicolson,
    ))
}

/// Runs `stepper` forward on `[0, t_max]` and backward on `[0, -t_max]`
/// with `steps / 2` steps each, and merges into one increasing trajectory.
pub fn two_sided<E, S>(y0: E, t_max: f64, steps: usize, stepper: S) -> Result<SteppedTrajectory<E>>
where
    E: HilbertElement,
    S: Fn(E, &[f64]) -> Result<SteppedTrajectory<E>>,
{
    if steps < 2 || steps % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "two-sided integration needs an even step count, got {steps}"
        )));
    }
    let forward = stepper(y0.clone(), &uniform_grid(0.0, t_max, steps / 2))?;
    let backward = stepper(y0, &uniform_grid(0.0, -t_max, steps / 2))?;
    let method = forward.method;
    let mut times: Vec<f64> = backward.times.iter().rev().copied().collect();
    let mut states: Vec<E> = backward.states.into_iter().rev().collect();
    times.extend_from_slice(&forward.times[1..]);
    states.extend(forward.states.into_iter().skip(1));
    Ok(SteppedTrajectory::new(times, states, method))
}

/// Result of [`picard_duhamel`].
#[derive(Debug, Clone)]
pub struct PicardOutcome<E> {
    pub trajectory: SteppedTrajectory<E>,
    /// `max_n |u^{(m+1)}(t_n) - u^{(m)}(t_n)|` for each iteration `m`.
    pub increments: Vec<f64>,
}

/// Quadrature for the Duhamel integral on a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PicardQuadrature {
    /// Composite trapezoid rule, second order.
    Trapezoid,
    /// Trapezoid plus the endpoint term `-(h^2/12) [phi'(t) - phi'(0)]` of the
    /// Euler-Maclaurin expansion, with `phi'` from second-order differences;
    /// fourth order.
    #[default]
    CorrectedTrapezoid,
}

/// Evolution `(i d/dt - H0 - B(t)) u = f`, `u(0) = u0`, with `H0` diagonal in
/// the component basis of `E`.
pub struct DuhamelProblem<'a, E, B, F> {
    /// Eigenvalues of `H0`, one per component.
    pub free_symbol: &'a [f64],
    pub bounded: &'a B,
    pub forcing: F,
    pub u0: E,
    pub quadrature: PicardQuadrature,
}

impl<'a, E, B, F> DuhamelProblem<'a, E, B, F>
where
    E: HilbertElement,
    B: TimeOperator<E>,
    F: Fn(f64) -> E,
{
    fn free_propagate(&self, x: &E, s: f64) -> E {
        let mut out = x.clone();
        for (c, &lam) in out.components_mut().iter_mut().zip(self.free_symbol) {
            if lam != 0.0 {
                *c *= Complex64::cis(-s * lam);
            }
        }
        out
    }

    /// One application of the Duhamel map
    /// `u -> e^{-itH0} u0 - i int_0^t e^{-i(t-s)H0} (f(s) + B(s) u(s)) ds`
    /// with the integral discretized by the composite trapezoid rule.
    fn duhamel_map(&self, grid: &[f64], h: f64, u: &[E]) -> Vec<E> {
        let g: Vec<E> = grid
            .iter()
            .zip(u)
            .map(|(&t, ut)| {
                let mut gt = (self.forcing)(t);
                gt.axpy(Complex64::new(1.0, 0.0), &self.bounded.apply(t, ut));
                gt
            })
            .collect();
        let corrected =
            self.quadrature == PicardQuadrature::CorrectedTrapezoid && grid.len() >= 3;
        // phi_n'(s) at s = t_n is i H0 g_n + g'_n
        let dphi: Vec<E> = if corrected {
            (0..grid.len())
                .map(|n| {
                    let mut d = finite_difference(&g, n, h);
                    for ((dc, gc), &lam) in d
                        .components_mut()
                        .iter_mut()
                        .zip(g[n].components())
                        .zip(self.free_symbol)
                    {
                        *dc += I * lam * gc;
                    }
                    d
                })
                .collect()
        } else {
            Vec::new()
        };
        let corr = Complex64::new(-h * h / 12.0, 0.0);

        let mut out = Vec::with_capacity(grid.len());
        let mut integral = self.u0.zeros_like();
        out.push(self.free_propagate(&self.u0, grid[0]));
        for n in 0..grid.len() - 1 {
            // I_{n+1} = e^{-ihH0} I_n + h/2 (e^{-ihH0} g_n + g_{n+1})
            let mut next = self.free_propagate(&integral, h);
            next.axpy(Complex64::new(0.5 * h, 0.0), &self.free_propagate(&g[n], h));
            next.axpy(Complex64::new(0.5 * h, 0.0), &g[n + 1]);
            integral = next;
            let mut un = self.free_propagate(&self.u0, grid[n + 1]);
            un.axpy(-I, &integral);
            if corrected {
                let mut c = dphi[n + 1].clone();
                c.axpy(
                    Complex64::new(-1.0, 0.0),
                    &self.free_propagate(&dphi[0], grid[n + 1]),
                );
                un.axpy(-I * corr, &c);
            }
            out.push(un);
        }
        out
    }
}

/// Second-order difference quotient of grid samples at index `n`.
fn finite_difference<E: HilbertElement>(g: &[E], n: usize, h: f64) -> E {
    let last = g.len() - 1;
    let (coeffs, idx): ([f64; 3], [usize; 3]) = if n == 0 {
        ([-1.5, 2.0, -0.5], [0, 1, 2])
    } else if n == last {
        ([1.5, -2.0, 0.5], [last, last - 1, last - 2])
    } else {
        ([-0.5, 0.0, 0.5], [n - 1, n, n + 1])
    };
    let mut out = g[n].zeros_like();
    for (c, i) in coeffs.iter().zip(idx) {
        if *c != 0.0 {
            out.axpy(Complex64::new(c / h, 0.0), &g[i]);
        }
    }
    out
}

/// Picard iteration on the Duhamel formula, starting from the constant
/// `u0`. `grid` must start at 0 and be uniform. Fails if the increment grows
/// for three consecutive iterations.
pub fn picard_duhamel<E, B, F>(
    problem: &DuhamelProblem<'_, E, B, F>,
    grid: &[f64],
    iters: usize,
) -> Result<PicardOutcome<E>>
where
    E: HilbertElement,
    B: TimeOperator<E>,
    F: Fn(f64) -> E,
{
    let h = check_grid(grid)?;
    if grid[0] != 0.0 {
        return Err(Error::InvalidArgument(
            "Picard grid must start at t = 0".into(),
        ));
    }
    if iters == 0 {
        return Err(Error::InvalidArgument("need at least one iteration".into()));
    }
    if problem.free_symbol.len() != problem.u0.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.u0.dim(),
            found: problem.free_symbol.len(),
        });
    }
    let mut u: Vec<E> = vec![problem.u0.clone(); grid.len()];
    let mut increments = Vec::with_capacity(iters);
    let mut growth = 0;
    for m in 0..iters {
        let next = problem.duhamel_map(grid, h, &u);
        let inc = next
            .iter()
            .zip(&u)
            .map(|(a, b)| a.sub(b).norm())
            .fold(0.0, f64::max);
        if !inc.is_finite() {
            return Err(Error::Diverged { iterations: m + 1 });
        }
        if let Some(&prev) = increments.last() {
            if inc > prev && inc > 1e-13 {
                growth += 1;
                if growth >= 3 {
                    return Err(Error::Diverged { iterations: m + 1 });
                }
            } else {
                growth = 0;
            }
        }
        increments.push(inc);
        u = next;
    }
    Ok(PicardOutcome {
        trajectory: SteppedTrajectory::new(grid.to_vec(), u, SteppingMethod::Picard),
        increments,
    })
}

/// Right-hand side of the continuity estimate
/// `sup_t |u(t)| <= sqrt(2) (|u0|^2 + T |f|_{L^2}^2)^{1/2}`, with the `L^2`
/// norm of `f` computed by the trapezoid rule on `grid`.
pub fn continuity_bound<E: HilbertElement, F: Fn(f64) -> E>(u0: &E, forcing: F, grid: &[f64]) -> f64 {
    let t_len = (grid[grid.len() - 1] - grid[0]).abs();
    let sq: Vec<f64> = grid.iter().map(|&t| forcing(t).norm_sqr()).collect();
    let f_l2_sq: f64 = grid
        .windows(2)
        .zip(sq.windows(2))
        .map(|(t, f)| 0.5 * (t[1] - t[0]).abs() * (f[0] + f[1]))
        .sum();
    (2.0 * (u0.norm_sqr() + t_len * f_l2_sq)).sqrt()
}
