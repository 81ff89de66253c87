//! The discrete least-squares problem and its solver.
//!
//! For `u = sum_{k<K} u_k T_k` the residual `i u' - B(t) u` is represented in
//! the `U_k` basis as
//!
//! ```text
//! R u = P D u - C Pi^{-1} A Pi P u
//! ```
//!
//! where `P` zero-pads to `L` coefficients, `D` differentiates into the `U`
//! basis, `Pi` collocates at the `L` Gauss-Chebyshev nodes, `A` applies
//! `B(x_l)` node by node and `C` rewrites a `T` series in the `U` basis. Since
//! the `U_k` are orthogonal with norm `pi/2` for the weight `sqrt(1 - t^2)`,
//! the functional is `|J u - eta0|^2 + (pi/2) |R u|^2` with `J u = u(0)`, and
//! its minimizer solves `Q u = eta0 J^T` with
//!
//! ```text
//! Q = (pi/2) R^* R + J^T J.
//! ```
//!
//! `Q` is applied matrix-free. The adjoint of the collocated potential block is
//! `Ct^{-1} Pi^{-1} A Pi Ct` with `Ct = diag(1/2, 1, ..., 1)`, which follows
//! from the discrete orthogonality of the `T_k` at the nodes.
//!
//! Conjugate gradient on `Q` stalls as `K` grows; the potential-free operator
//! `Q0 = (pi/2) D^* D + J^T J = diag((pi/2) k^2) + J^T J` is inverted in closed
//! form and used as preconditioner.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use num_complex::Complex64;

use crate::chebyshev::{
    add_diff_adjoint, add_diff_to_second_kind, clenshaw, first_to_second_kind_vec,
    second_to_first_kind_adjoint, t_at_zero, ChebKind, ChebTransform,
};
use crate::error::{check_len, Error, Result};
use crate::hilbert::{HilbertElement, TimeOperator};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const MINUS_ONE: Complex64 = Complex64::new(-1.0, 0.0);

/// First-kind Chebyshev coefficients in time, each an element of the spatial
/// Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeCoefficients<E> {
    entries: Vec<E>,
}

impl<E: HilbertElement> SpaceTimeCoefficients<E> {
    pub fn new(entries: Vec<E>) -> Result<Self> {
        let Some(first) = entries.first() else {
            return Err(Error::InvalidArgument(
                "space-time coefficients need K >= 1".into(),
            ));
        };
        let dim = first.dim();
        if let Some(bad) = entries.iter().find(|e| e.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self { entries })
    }

    pub fn zeros(k: usize, like: &E) -> Self {
        Self {
            entries: (0..k.max(1)).map(|_| like.zeros_like()).collect(),
        }
    }

    /// Number of Chebyshev coefficients `K`.
    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[E] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [E] {
        &mut self.entries
    }

    pub fn into_entries(self) -> Vec<E> {
        self.entries
    }

    /// Value of the series at time `t` in `[-1, 1]`.
    pub fn eval(&self, t: f64) -> Result<E> {
        if !(t.is_finite() && t.abs() <= 1.0) {
            return Err(Error::Domain(t));
        }
        Ok(clenshaw(ChebKind::FirstKind, &self.entries, t))
    }

    /// `u(0) = sum_k T_k(0) u_k`.
    pub fn value_at_zero(&self) -> E {
        value_at_zero(&self.entries)
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        inner_vec(&self.entries, &other.entries)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(HilbertElement::norm_sqr).sum()
    }

    pub fn axpy(&mut self, alpha: Complex64, x: &Self) {
        axpy_vec(&mut self.entries, alpha, &x.entries);
    }

    pub fn scale(&mut self, alpha: Complex64) {
        for e in &mut self.entries {
            e.scale(alpha);
        }
    }
}

fn value_at_zero<E: HilbertElement>(u: &[E]) -> E {
    let mut acc = u[0].clone();
    for (k, uk) in u.iter().enumerate().skip(2).step_by(2) {
        acc.axpy(Complex64::new(t_at_zero(k), 0.0), uk);
    }
    acc
}

fn inner_vec<E: HilbertElement>(a: &[E], b: &[E]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.inner(y)).sum()
}

fn axpy_vec<E: HilbertElement>(y: &mut [E], alpha: Complex64, x: &[E]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        yi.axpy(alpha, xi);
    }
}

/// Outcome of a PCG solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveDiagnostics {
    pub iterations: usize,
    /// `sqrt(<r, M r> / <r0, M r0>)` at exit, `M` the preconditioner.
    pub final_relative_residual: f64,
    /// Seconds spent in the iteration.
    pub wall_time: f64,
    /// `E_w` of the returned iterate.
    pub energy: f64,
    pub residual_history: Vec<f64>,
}

/// One instance of the discrete least-squares problem.
#[derive(Debug, Clone)]
pub struct LsqProblem<E, B> {
    k: usize,
    l: usize,
    eta0: E,
    skew_op: B,
    cg_tol: f64,
    cg_maxit: usize,
    transform: ChebTransform,
    nodes: Vec<f64>,
}

pub const DEFAULT_CG_TOL: f64 = 1e-12;

impl<E: HilbertElement, B: TimeOperator<E>> LsqProblem<E, B> {
    /// Problem with `K` unknown coefficients and `L` collocation nodes.
    ///
    /// `skew_op` must be self-adjoint for every `t`.
    pub fn new(k: usize, l: usize, eta0: E, skew_op: B) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("K must be at least 1".into()));
        }
        if l < k {
            return Err(Error::InvalidArgument(format!(
                "L = {l} must be at least K = {k}"
            )));
        }
        let transform = ChebTransform::new(l);
        let nodes = (0..l)
            .map(|j| (PI * (2 * j + 1) as f64 / (2 * l) as f64).cos())
            .collect();
        Ok(Self {
            k,
            l,
            eta0,
            skew_op,
            cg_tol: DEFAULT_CG_TOL,
            cg_maxit: 10 * k,
            transform,
            nodes,
        })
    }

    pub fn with_cg_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "CG tolerance must lie in (0, 1), got {tol}"
            )));
        }
        self.cg_tol = tol;
        Ok(self)
    }

    pub fn with_cg_maxit(mut self, maxit: usize) -> Self {
        self.cg_maxit = maxit.max(1);
        self
    }

    pub fn with_transform(mut self, transform: ChebTransform) -> Result<Self> {
        check_len(self.l, transform.len())?;
        self.transform = transform;
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn eta0(&self) -> &E {
        &self.eta0
    }

    pub fn skew_op(&self) -> &B {
        &self.skew_op
    }

    pub fn cg_tol(&self) -> f64 {
        self.cg_tol
    }

    pub fn cg_maxit(&self) -> usize {
        self.cg_maxit
    }

    fn check(&self, u: &SpaceTimeCoefficients<E>) -> Result<()> {
        check_len(self.k, u.k())?;
        check_len(self.eta0.dim(), u.entries[0].dim())
    }

    /// `Pi^{-1} A Pi` on a first-kind series of length `L`.
    fn collocated_potential(&self, coeffs: &[E]) -> Vec<E> {
        let mut vals = self.transform.collocate_slice(coeffs);
        for (v, &x) in vals.iter_mut().zip(&self.nodes) {
            *v = self.skew_op.apply(x, v);
        }
        self.transform.uncollocate_slice(&vals)
    }

    fn residual_vec(&self, u: &[E]) -> Vec<E> {
        let zero = u[0].zeros_like();
        let mut res: Vec<E> = if self.skew_op.is_zero() {
            vec![zero; self.l]
        } else {
            let mut ext = u.to_vec();
            ext.resize(self.l, zero);
            let mut g = first_to_second_kind_vec(&self.collocated_potential(&ext));
            for gi in &mut g {
                gi.scale(MINUS_ONE);
            }
            g
        };
        add_diff_to_second_kind(u, &mut res);
        res
    }

    /// `R^*` applied to a second-kind series of length `L`.
    fn residual_adjoint_vec(&self, g: &[E]) -> Vec<E> {
        let zero = g[0].zeros_like();
        let mut out = vec![zero; self.k];
        add_diff_adjoint(g, &mut out);
        if !self.skew_op.is_zero() {
            let mut h = second_to_first_kind_adjoint(g);
            h[0].scale(Complex64::new(0.5, 0.0));
            let mut back = self.collocated_potential(&h);
            back[0].scale(Complex64::new(2.0, 0.0));
            axpy_vec(&mut out, MINUS_ONE, &back[..self.k]);
        }
        out
    }

    /// `U`-basis coefficients (length `L`) of `i u' - B(t) u` with the
    /// potential term interpolated at the nodes.
    pub fn apply_residual(&self, u: &SpaceTimeCoefficients<E>) -> Result<Vec<E>> {
        self.check(u)?;
        Ok(self.residual_vec(&u.entries))
    }

    /// Adjoint of [`apply_residual`](Self::apply_residual).
    pub fn apply_residual_adjoint(&self, g: &[E]) -> Result<SpaceTimeCoefficients<E>> {
        check_len(self.l, g.len())?;
        Ok(SpaceTimeCoefficients {
            entries: self.residual_adjoint_vec(g),
        })
    }

    fn normal_vec(&self, u: &[E]) -> Vec<E> {
        let r = self.residual_vec(u);
        let mut out = self.residual_adjoint_vec(&r);
        for o in &mut out {
            o.scale(Complex64::new(FRAC_PI_2, 0.0));
        }
        let u0 = value_at_zero(u);
        for (k, o) in out.iter_mut().enumerate() {
            let t0 = t_at_zero(k);
            if t0 != 0.0 {
                o.axpy(Complex64::new(t0, 0.0), &u0);
            }
        }
        out
    }

    /// `Q u`, matrix-free.
    pub fn apply_normal(&self, u: &SpaceTimeCoefficients<E>) -> Result<SpaceTimeCoefficients<E>> {
        self.check(u)?;
        Ok(SpaceTimeCoefficients {
            entries: self.normal_vec(&u.entries),
        })
    }

    /// Right-hand side `eta0 J^T`: entry `k` is `T_k(0) eta0`.
    pub fn rhs(&self) -> SpaceTimeCoefficients<E> {
        SpaceTimeCoefficients {
            entries: (0..self.k)
                .map(|k| self.eta0.scaled(Complex64::new(t_at_zero(k), 0.0)))
                .collect(),
        }
    }

    /// `E_w(u) = |u(0) - eta0|^2 + (pi/2) |R u|^2`.
    pub fn energy(&self, u: &SpaceTimeCoefficients<E>) -> Result<f64> {
        self.check(u)?;
        let r = self.residual_vec(&u.entries);
        let mismatch = u.value_at_zero().sub(&self.eta0).norm_sqr();
        Ok(mismatch + FRAC_PI_2 * r.iter().map(HilbertElement::norm_sqr).sum::<f64>())
    }

    /// Preconditioned conjugate gradient on `Q u = eta0 J^T`.
    pub fn pcg_solve(&self) -> Result<(SpaceTimeCoefficients<E>, SolveDiagnostics)> {
        self.pcg_solve_monitored(|_, _| {})
    }

    /// As [`pcg_solve`](Self::pcg_solve), calling `monitor(iteration, iterate)`
    /// after every update.
    pub fn pcg_solve_monitored<M>(
        &self,
        mut monitor: M,
    ) -> Result<(SpaceTimeCoefficients<E>, SolveDiagnostics)>
    where
        M: FnMut(usize, &SpaceTimeCoefficients<E>),
    {
        let start = Instant::now();
        let b = self.rhs().entries;
        let mut x = SpaceTimeCoefficients::zeros(self.k, &self.eta0);
        let mut r = b;
        let mut z = free_precond_solve_vec(&r);
        let mut rz = inner_vec(&r, &z).re;
        let rz0 = rz;
        let mut history = Vec::new();

        let finish = |x: SpaceTimeCoefficients<E>, iterations, rel, history| {
            let energy = self.energy(&x)?;
            Ok((
                x,
                SolveDiagnostics {
                    iterations,
                    final_relative_residual: rel,
                    wall_time: start.elapsed().as_secs_f64(),
                    energy,
                    residual_history: history,
                },
            ))
        };

        if rz0 <= 0.0 {
            return finish(x, 0, 0.0, history);
        }

        let mut p = z.clone();
        let mut rel = 1.0;
        for it in 1..=self.cg_maxit {
            let q = self.normal_vec(&p);
            let pq = inner_vec(&p, &q).re;
            if pq <= 0.0 {
                break;
            }
            let alpha = Complex64::new(rz / pq, 0.0);
            axpy_vec(&mut x.entries, alpha, &p);
            axpy_vec(&mut r, -alpha, &q);
            z = free_precond_solve_vec(&r);
            let rz_new = inner_vec(&r, &z).re;
            rel = (rz_new.max(0.0) / rz0).sqrt();
            history.push(rel);
            monitor(it, &x);
            if rel <= self.cg_tol {
                return finish(x, it, rel, history);
            }
            let beta = Complex64::new(rz_new / rz, 0.0);
            for (pi, zi) in p.iter_mut().zip(&z) {
                pi.scale(beta);
                pi.axpy(ONE, zi);
            }
            rz = rz_new;
        }

        let (x, diag) = finish(x, history.len(), rel, history)?;
        drop(x);
        Err(Error::NotConverged(diag))
    }
}

/// `Q0 u = (pi/2) diag(k^2) u + J^T J u`.
pub fn apply_free_operator<E: HilbertElement>(
    u: &SpaceTimeCoefficients<E>,
) -> SpaceTimeCoefficients<E> {
    let u0 = u.value_at_zero();
    let entries = u
        .entries
        .iter()
        .enumerate()
        .map(|(k, uk)| {
            let mut out = uk.scaled(Complex64::new(FRAC_PI_2 * (k * k) as f64, 0.0));
            out.axpy(Complex64::new(t_at_zero(k), 0.0), &u0);
            out
        })
        .collect();
    SpaceTimeCoefficients { entries }
}

/// Exact solution of `Q0 u = F`.
///
/// The `T_0` row forces `u(0) = F_0`; the remaining rows give
/// `u_k = 2 (F_k - T_k(0) F_0) / (pi k^2)`, and `u_0` is recovered from
/// `u(0) = sum_k T_k(0) u_k`.
pub fn free_precond_solve<E: HilbertElement>(
    f: &SpaceTimeCoefficients<E>,
) -> SpaceTimeCoefficients<E> {
    SpaceTimeCoefficients {
        entries: free_precond_solve_vec(&f.entries),
    }
}

fn free_precond_solve_vec<E: HilbertElement>(f: &[E]) -> Vec<E> {
    let f0 = &f[0];
    let mut u: Vec<E> = Vec::with_capacity(f.len());
    u.push(f0.clone());
    for (k, fk) in f.iter().enumerate().skip(1) {
        let scale = 2.0 / (PI * (k * k) as f64);
        let mut uk = fk.scaled(Complex64::new(scale, 0.0));
        let t0 = t_at_zero(k);
        if t0 != 0.0 {
            uk.axpy(Complex64::new(-scale * t0, 0.0), f0);
        }
        u.push(uk);
    }
    for k in (2..f.len()).step_by(2) {
        let (head, tail) = u.split_at_mut(k);
        head[0].axpy(Complex64::new(-t_at_zero(k), 0.0), &tail[0]);
    }
    u
}

impl<B: TimeOperator<Complex64>> LsqProblem<Complex64, B> {
    /// Dense `K x K` matrix of `Q` for scalar problems, by applying the
    /// operator to unit vectors. Row-major.
    pub fn normal_matrix(&self) -> Vec<Vec<Complex64>> {
        let k = self.k;
        let mut cols = Vec::with_capacity(k);
        for j in 0..k {
            let mut e = vec![Complex64::new(0.0, 0.0); k];
            e[j] = ONE;
            cols.push(self.normal_vec(&e));
        }
        (0..k).map(|i| (0..k).map(|j| cols[j][i]).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{FnOperator, ZeroOperator};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn random_coeffs(rng: &mut ChaCha8Rng, n: usize) -> SpaceTimeCoefficients<Complex64> {
        SpaceTimeCoefficients::new(
            (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap()
    }

    fn cosine_op(a: f64, omega: f64) -> impl TimeOperator<Complex64> {
        FnOperator(move |t: f64, z: &Complex64| z * (a * (omega * t).cos()))
    }

    #[test]
    fn rejects_bad_truncations() {
        assert!(LsqProblem::new(0, 4, c(1.0), ZeroOperator).is_err());
        assert!(LsqProblem::new(5, 4, c(1.0), ZeroOperator).is_err());
        let p = LsqProblem::new(4, 4, c(1.0), ZeroOperator).unwrap();
        assert!(p.clone().with_cg_tol(0.0).is_err());
        assert!(p.clone().with_cg_tol(1.5).is_err());
        let u = SpaceTimeCoefficients::new(vec![c(1.0); 3]).unwrap();
        assert!(matches!(p.apply_normal(&u), Err(Error::DimensionMismatch { .. })));
        assert!(p.apply_residual(&u).is_err());
        assert!(SpaceTimeCoefficients::<Complex64>::new(vec![]).is_err());
    }

    #[test]
    fn residual_examples() {
        let p = LsqProblem::new(4, 6, c(1.0), ZeroOperator).unwrap();
        let constant = SpaceTimeCoefficients::new(vec![c(2.5), c(0.0), c(0.0), c(0.0)]).unwrap();
        let r = p.apply_residual(&constant).unwrap();
        assert_eq!(r.len(), 6);
        assert!(r.iter().all(|x| x.norm() == 0.0));

        let phi = Complex64::new(0.3, -1.2);
        let linear = SpaceTimeCoefficients::new(vec![c(0.0), phi, c(0.0), c(0.0)]).unwrap();
        let r = p.apply_residual(&linear).unwrap();
        assert!((r[0] - Complex64::i() * phi).norm() < 1e-15);
        assert!(r[1..].iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn free_normal_operator_is_q0() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = LsqProblem::new(9, 9, c(1.0), ZeroOperator).unwrap();
        let u = random_coeffs(&mut rng, 9);
        let a = p.apply_normal(&u).unwrap();
        let b = apply_free_operator(&u);
        for (x, y) in a.entries().iter().zip(b.entries()) {
            assert!((x - y).norm() < 1e-13);
        }
        // the same with the zero operator written out explicitly
        let p = LsqProblem::new(9, 12, c(1.0), FnOperator(|_t: f64, z: &Complex64| z * 0.0))
            .unwrap();
        let a = p.apply_normal(&u).unwrap();
        for (x, y) in a.entries().iter().zip(b.entries()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn residual_adjoint_matches_inner_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (k, l) in [(5usize, 5usize), (6, 11), (33, 40), (64, 64)] {
            let p = LsqProblem::new(k, l, c(1.0), cosine_op(5.0, 20.0)).unwrap();
            let u = random_coeffs(&mut rng, k);
            let g = random_coeffs(&mut rng, l);
            let lhs: Complex64 = p
                .apply_residual(&u)
                .unwrap()
                .iter()
                .zip(g.entries())
                .map(|(a, b)| b.conj() * a)
                .sum();
            let rhs = p.apply_residual_adjoint(g.entries()).unwrap().inner(&u);
            assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()), "K={k} L={l}");
        }
    }

    #[test]
    fn rhs_examples() {
        let p = LsqProblem::new(4, 4, c(1.0), ZeroOperator).unwrap();
        assert_eq!(p.rhs().entries(), &[c(1.0), c(0.0), c(-1.0), c(0.0)]);
        let p = LsqProblem::new(4, 4, c(0.0), ZeroOperator).unwrap();
        assert!(p.rhs().entries().iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn preconditioner_examples() {
        let f = SpaceTimeCoefficients::new(vec![Complex64::new(0.7, -0.2)]).unwrap();
        assert_eq!(free_precond_solve(&f).entries(), f.entries());

        let f = SpaceTimeCoefficients::new(vec![c(1.0), c(0.0), c(0.0)]).unwrap();
        let u = free_precond_solve(&f);
        let expected = [1.0 + 1.0 / (2.0 * PI), 0.0, 1.0 / (2.0 * PI)];
        for (x, e) in u.entries().iter().zip(expected) {
            assert!((x - c(e)).norm() < 1e-15);
        }
        let back = apply_free_operator(&u);
        for (x, y) in back.entries().iter().zip(f.entries()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn free_problem_converges_in_one_iteration() {
        let eta0 = Complex64::new(0.6, 0.8);
        let p = LsqProblem::new(16, 16, eta0, ZeroOperator).unwrap();
        let (u, diag) = p.pcg_solve().unwrap();
        assert_eq!(diag.iterations, 1);
        assert!((u.entries()[0] - eta0).norm() < 1e-14);
        assert!(u.entries()[1..].iter().all(|x| x.norm() < 1e-14));
        assert!(diag.energy < 1e-28);
    }

    #[test]
    fn zero_data_returns_zero_without_iterating() {
        let p = LsqProblem::new(8, 8, c(0.0), cosine_op(5.0, 20.0)).unwrap();
        let (u, diag) = p.pcg_solve().unwrap();
        assert_eq!(diag.iterations, 0);
        assert_eq!(u.norm_sqr(), 0.0);
    }

    #[test]
    fn non_convergence_is_reported() {
        let p = LsqProblem::new(48, 48, c(1.0), cosine_op(5.0, 20.0))
            .unwrap()
            .with_cg_maxit(2);
        match p.pcg_solve() {
            Err(Error::NotConverged(d)) => {
                assert_eq!(d.iterations, 2);
                assert!(d.final_relative_residual > p.cg_tol());
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn energy_examples_and_expansion() {
        let eta0 = Complex64::new(0.0, 1.0);
        let p = LsqProblem::new(10, 10, eta0, cosine_op(5.0, 20.0)).unwrap();
        let zero = SpaceTimeCoefficients::zeros(10, &eta0);
        assert!((p.energy(&zero).unwrap() - 1.0).abs() < 1e-15);

        let free = LsqProblem::new(10, 10, eta0, ZeroOperator).unwrap();
        let mut constant = SpaceTimeCoefficients::zeros(10, &eta0);
        constant.entries_mut()[0] = eta0;
        assert_eq!(free.energy(&constant).unwrap(), 0.0);

        // E(u) = <Qu, u> - 2 Re <rhs, u> + |eta0|^2
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_coeffs(&mut rng, 10);
        let quad = p.apply_normal(&u).unwrap().inner(&u).re;
        let lin = p.rhs().inner(&u).re;
        let expanded = quad - 2.0 * lin + eta0.norm_sqr();
        let e = p.energy(&u).unwrap();
        assert!((e - expanded).abs() < 1e-10 * e.max(1.0));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn coeffs(n: usize) -> impl Strategy<Value = SpaceTimeCoefficients<Complex64>> {
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(|v| {
                SpaceTimeCoefficients::new(
                    v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect(),
                )
                .unwrap()
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn normal_operator_is_hermitian(u in coeffs(24), v in coeffs(24)) {
                let p = LsqProblem::new(24, 30, c(1.0), cosine_op(5.0, 20.0)).unwrap();
                let qu = p.apply_normal(&u).unwrap();
                let qv = p.apply_normal(&v).unwrap();
                let a = qu.inner(&v);
                let b = u.inner(&qv);
                let scale = qu.norm_sqr().sqrt() * v.norm_sqr().sqrt() + 1.0;
                prop_assert!((a - b).norm() < 1e-12 * scale);
            }

            #[test]
            fn normal_operator_is_positive(u in coeffs(24)) {
                let p = LsqProblem::new(24, 24, c(1.0), cosine_op(5.0, 20.0)).unwrap();
                let quu = p.apply_normal(&u).unwrap().inner(&u).re;
                prop_assert!(quu > 1e-12 * u.norm_sqr());
            }

            #[test]
            fn preconditioner_inverts_q0(f in coeffs(64)) {
                let u = free_precond_solve(&f);
                let back = apply_free_operator(&u);
                let mut diff = back.clone();
                diff.axpy(MINUS_ONE, &f);
                prop_assert!(diff.norm_sqr().sqrt() <= 1e-12 * f.norm_sqr().sqrt());
            }
        }
    }
}
