//! Fourier fields on the 2-torus `(R/Z)^2` truncated to the frequency box
//! `[-N/2, N/2)^2`, the free Schrödinger propagator, and multiplication by the
//! moving cosine potential.
//!
//! Coefficients are stored row-major in standard DFT order: index `i` along an
//! axis holds frequency `i` for `i < N/2` and `i - N` otherwise. The Hilbert
//! norm is the `l^2` norm of the coefficients, which is the `L^2(T^2)` norm of
//! the represented function.
//!
//! The potential product is computed on the `N x N` grid `x_a = a / N` and
//! truncated back to the box. Since the potential only carries frequencies of
//! modulus one per axis, this differs from the exact projection only through
//! wrap-around at the highest retained modes.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::hilbert::{HilbertElement, TimeOperator};

#[derive(Debug, Clone, PartialEq)]
pub struct FourierField2D {
    n: usize,
    coeffs: Vec<Complex64>,
}

/// Frequency stored at DFT index `i` for grid size `n`.
pub fn frequency(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// DFT index holding frequency `k`, if `k` lies in `[-n/2, n/2)`.
pub fn index_of(k: i64, n: usize) -> Option<usize> {
    let half = (n / 2) as i64;
    if (-half..half).contains(&k) {
        Some(k.rem_euclid(n as i64) as usize)
    } else {
        None
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "torus grid size must be even and positive, got {n}"
        )));
    }
    Ok(())
}

impl FourierField2D {
    pub fn zeros(n: usize) -> Result<Self> {
        check_size(n)?;
        Ok(Self {
            n,
            coeffs: vec![Complex64::new(0.0, 0.0); n * n],
        })
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        check_size(n)?;
        if coeffs.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: coeffs.len(),
            });
        }
        Ok(Self { n, coeffs })
    }

    /// The single Fourier mode `e^{2 i pi (k x + l y)}`.
    pub fn mode(n: usize, k: i64, l: i64) -> Result<Self> {
        let mut f = Self::zeros(n)?;
        f.set(k, l, Complex64::new(1.0, 0.0))?;
        Ok(f)
    }

    /// Builds a field from a function of the frequency pair.
    pub fn from_fn(n: usize, mut f: impl FnMut(i64, i64) -> Complex64) -> Result<Self> {
        check_size(n)?;
        let mut coeffs = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                coeffs.push(f(frequency(i, n), frequency(j, n)));
            }
        }
        Ok(Self { n, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn get(&self, k: i64, l: i64) -> Option<Complex64> {
        let i = index_of(k, self.n)?;
        let j = index_of(l, self.n)?;
        Some(self.coeffs[i * self.n + j])
    }

    pub fn set(&mut self, k: i64, l: i64, value: Complex64) -> Result<()> {
        match (index_of(k, self.n), index_of(l, self.n)) {
            (Some(i), Some(j)) => {
                self.coeffs[i * self.n + j] = value;
                Ok(())
            }
            _ => Err(Error::InvalidArgument(format!(
                "frequency ({k}, {l}) outside the box of size {}",
                self.n
            ))),
        }
    }

    pub fn norm(&self) -> f64 {
        HilbertElement::norm(self)
    }
}

impl HilbertElement for FourierField2D {
    fn zeros_like(&self) -> Self {
        Self {
            n: self.n,
            coeffs: vec![Complex64::new(0.0, 0.0); self.coeffs.len()],
        }
    }

    fn axpy(&mut self, alpha: Complex64, x: &Self) {
        debug_assert_eq!(self.n, x.n);
        for (a, b) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *a += alpha * b;
        }
    }

    fn scale(&mut self, alpha: Complex64) {
        for a in &mut self.coeffs {
            *a *= alpha;
        }
    }

    fn inner(&self, other: &Self) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm_sqr()).sum()
    }

    fn components(&self) -> &[Complex64] {
        &self.coeffs
    }

    fn components_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }
}

/// `V(t, x, y) = A [cos(2 pi (x - c1 t)) + cos(2 pi (y - c2 t)) + cos(2 pi (x - y))]`.
///
/// The amplitude `A` is 1 for the physical potential; 0 switches the
/// potential off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MovingCosinePotential {
    pub c1: f64,
    pub c2: f64,
    pub amplitude: f64,
}

impl Default for MovingCosinePotential {
    fn default() -> Self {
        Self::new(1.0, 0.5)
    }
}

impl MovingCosinePotential {
    pub fn new(c1: f64, c2: f64) -> Self {
        Self {
            c1,
            c2,
            amplitude: 1.0,
        }
    }

    pub fn zero() -> Self {
        Self {
            c1: 0.0,
            c2: 0.0,
            amplitude: 0.0,
        }
    }

    pub fn eval(&self, t: f64, x: f64, y: f64) -> f64 {
        self.amplitude
            * ((2.0 * PI * (x - self.c1 * t)).cos()
                + (2.0 * PI * (y - self.c2 * t)).cos()
                + (2.0 * PI * (x - y)).cos())
    }

    /// Sup norm over the torus.
    pub fn sup_norm(&self) -> f64 {
        3.0 * self.amplitude.abs()
    }
}

/// FFT plans and symbols for one grid size.
pub struct FourierGrid {
    n: usize,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
    // eigenvalues of -Laplacian in storage order
    symbol: Vec<f64>,
    // cos(2 pi (x_a - y_b)), row-major
    cross_term: Vec<f64>,
}

impl std::fmt::Debug for FourierGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierGrid").field("n", &self.n).finish()
    }
}

thread_local! {
    static GRIDS: RefCell<HashMap<usize, Arc<FourierGrid>>> = RefCell::new(HashMap::new());
}

impl FourierGrid {
    pub fn new(n: usize) -> Result<Self> {
        check_size(n)?;
        let mut planner = FftPlanner::new();
        let symbol = laplacian_symbol(n)?;
        let mut cross_term = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let (x, y) = (a as f64 / n as f64, b as f64 / n as f64);
                cross_term.push((2.0 * PI * (x - y)).cos());
            }
        }
        Ok(Self {
            n,
            fft_fwd: planner.plan_fft_forward(n),
            fft_inv: planner.plan_fft_inverse(n),
            symbol,
            cross_term,
        })
    }

    /// Shared per-thread instance for grid size `n`.
    pub fn cached(n: usize) -> Result<Arc<Self>> {
        check_size(n)?;
        GRIDS.with(|g| {
            let mut map = g.borrow_mut();
            if let Some(grid) = map.get(&n) {
                return Ok(grid.clone());
            }
            let grid = Arc::new(Self::new(n)?);
            map.insert(n, grid.clone());
            Ok(grid)
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Eigenvalues `4 pi^2 (k^2 + l^2)` of `-Laplacian` in storage order.
    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    fn fft2(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        for row in data.chunks_exact_mut(n) {
            fft.process(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                col[i] = data[i * n + j];
            }
            fft.process(&mut col);
            for i in 0..n {
                data[i * n + j] = col[i];
            }
        }
    }

    /// Values on the grid: `u(a/N, b/N) = sum c_{kl} e^{2 i pi (k a + l b) / N}`.
    pub fn grid_values(&self, field: &FourierField2D) -> Vec<Complex64> {
        assert_eq!(field.n, self.n);
        let mut data = field.coeffs.clone();
        self.fft2(&mut data, &self.fft_inv);
        data
    }

    /// Inverse of [`grid_values`](Self::grid_values).
    pub fn field_from_values(&self, values: &[Complex64]) -> FourierField2D {
        assert_eq!(values.len(), self.n * self.n);
        let mut data = values.to_vec();
        self.fft2(&mut data, &self.fft_fwd);
        let scale = 1.0 / (self.n * self.n) as f64;
        for v in &mut data {
            *v *= scale;
        }
        FourierField2D {
            n: self.n,
            coeffs: data,
        }
    }

    /// Multiplies mode `(k, l)` by `e^{-i s 4 pi^2 (k^2 + l^2)}`, i.e. applies
    /// `e^{-i s H0}` with `H0 = -Laplacian`.
    pub fn free_propagate_in_place(&self, field: &mut FourierField2D, s: f64) {
        assert_eq!(field.n, self.n);
        if s == 0.0 {
            return;
        }
        for (c, &lam) in field.coeffs.iter_mut().zip(&self.symbol) {
            *c *= Complex64::cis(-s * lam);
        }
    }

    pub fn free_propagate(&self, field: &FourierField2D, s: f64) -> FourierField2D {
        let mut out = field.clone();
        self.free_propagate_in_place(&mut out, s);
        out
    }

    /// Potential values `V(t, x_a, y_b)` on the grid, row-major.
    pub fn potential_values(&self, pot: &MovingCosinePotential, t: f64) -> Vec<f64> {
        let n = self.n;
        let xs: Vec<f64> = (0..n)
            .map(|a| (2.0 * PI * (a as f64 / n as f64 - pot.c1 * t)).cos())
            .collect();
        let ys: Vec<f64> = (0..n)
            .map(|b| (2.0 * PI * (b as f64 / n as f64 - pot.c2 * t)).cos())
            .collect();
        let mut out = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                out.push(pot.amplitude * (xs[a] + ys[b] + self.cross_term[a * n + b]));
            }
        }
        out
    }

    /// Band-limited product `pi_N (V(t) u)`.
    pub fn apply_potential(
        &self,
        field: &FourierField2D,
        pot: &MovingCosinePotential,
        t: f64,
    ) -> FourierField2D {
        if pot.amplitude == 0.0 {
            return field.zeros_like();
        }
        let mut values = self.grid_values(field);
        for (v, p) in values.iter_mut().zip(self.potential_values(pot, t)) {
            *v *= p;
        }
        self.field_from_values(&values)
    }

    /// Interaction-picture potential `P(t)^* V(t tau) P(t) v` with
    /// `P(t) = e^{i t tau Laplacian}`.
    pub fn skewed_potential(
        &self,
        field: &FourierField2D,
        pot: &MovingCosinePotential,
        t: f64,
        tau: f64,
    ) -> FourierField2D {
        let s = t * tau;
        let moved = self.free_propagate(field, s);
        let mut out = self.apply_potential(&moved, pot, s);
        self.free_propagate_in_place(&mut out, -s);
        out
    }
}

fn grid_for(n: usize) -> Arc<FourierGrid> {
    FourierGrid::cached(n).expect("field sizes are validated on construction")
}

/// See [`FourierGrid::grid_values`].
pub fn grid_values(field: &FourierField2D) -> Vec<Complex64> {
    grid_for(field.n).grid_values(field)
}

/// See [`FourierGrid::field_from_values`].
pub fn field_from_values(n: usize, values: &[Complex64]) -> Result<FourierField2D> {
    check_size(n)?;
    if values.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: values.len(),
        });
    }
    Ok(grid_for(n).field_from_values(values))
}

/// Eigenvalues of `-Laplacian` on each stored mode.
pub fn laplacian_symbol(n: usize) -> Result<Vec<f64>> {
    check_size(n)?;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let (k, l) = (frequency(i, n) as f64, frequency(j, n) as f64);
            out.push(4.0 * PI * PI * (k * k + l * l));
        }
    }
    Ok(out)
}

pub fn free_propagate(field: &FourierField2D, s: f64) -> FourierField2D {
    grid_for(field.n).free_propagate(field, s)
}

pub fn apply_potential(
    field: &FourierField2D,
    pot: &MovingCosinePotential,
    t: f64,
) -> Result<FourierField2D> {
    if field.n < 4 {
        return Err(Error::InvalidArgument(
            "potential multiplication needs N >= 4".into(),
        ));
    }
    Ok(grid_for(field.n).apply_potential(field, pot, t))
}

pub fn skewed_potential(
    field: &FourierField2D,
    pot: &MovingCosinePotential,
    t: f64,
    tau: f64,
) -> Result<FourierField2D> {
    if field.n < 4 {
        return Err(Error::InvalidArgument(
            "potential multiplication needs N >= 4".into(),
        ));
    }
    Ok(grid_for(field.n).skewed_potential(field, pot, t, tau))
}

/// `t -> tau * P(t)^* V(t tau) P(t)`, the generator of the rescaled
/// interaction-picture evolution on `(-1, 1)`.
#[derive(Clone)]
pub struct SkewedPotentialOp {
    grid: Arc<FourierGrid>,
    pot: MovingCosinePotential,
    tau: f64,
}

impl SkewedPotentialOp {
    pub fn new(n: usize, pot: MovingCosinePotential, tau: f64) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidArgument(
                "potential multiplication needs N >= 4".into(),
            ));
        }
        Ok(Self {
            grid: Arc::new(FourierGrid::new(n)?),
            pot,
            tau,
        })
    }

    pub fn grid(&self) -> &FourierGrid {
        &self.grid
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn potential(&self) -> &MovingCosinePotential {
        &self.pot
    }
}

impl TimeOperator<FourierField2D> for SkewedPotentialOp {
    fn apply(&self, t: f64, x: &FourierField2D) -> FourierField2D {
        let mut out = self.grid.skewed_potential(x, &self.pot, t, self.tau);
        out.scale(Complex64::new(self.tau, 0.0));
        out
    }

    fn is_zero(&self) -> bool {
        self.tau == 0.0 || self.pot.amplitude == 0.0
    }
}

/// `t -> tau * V(t tau)` in the Schrödinger picture; the bounded part of the
/// rescaled Hamiltonian.
#[derive(Clone)]
pub struct PotentialOp {
    grid: Arc<FourierGrid>,
    pot: MovingCosinePotential,
    tau: f64,
}

impl PotentialOp {
    pub fn new(n: usize, pot: MovingCosinePotential, tau: f64) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidArgument(
                "potential multiplication needs N >= 4".into(),
            ));
        }
        Ok(Self {
            grid: Arc::new(FourierGrid::new(n)?),
            pot,
            tau,
        })
    }
}

impl TimeOperator<FourierField2D> for PotentialOp {
    fn apply(&self, t: f64, x: &FourierField2D) -> FourierField2D {
        let mut out = self.grid.apply_potential(x, &self.pot, t * self.tau);
        out.scale(Complex64::new(self.tau, 0.0));
        out
    }

    fn is_zero(&self) -> bool {
        self.tau == 0.0 || self.pot.amplitude == 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(rng: &mut ChaCha8Rng, n: usize) -> FourierField2D {
        FourierField2D::from_fn(n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
        .unwrap()
    }

    #[test]
    fn index_map_is_bijective() {
        for n in [2usize, 4, 8, 16] {
            let mut seen = vec![false; n];
            for k in -(n as i64 / 2)..(n as i64 / 2) {
                let i = index_of(k, n).unwrap();
                assert_eq!(frequency(i, n), k);
                assert!(!seen[i]);
                seen[i] = true;
            }
            assert!(index_of(n as i64 / 2, n).is_none());
        }
        assert!(FourierField2D::zeros(5).is_err());
        assert!(FourierField2D::zeros(0).is_err());
    }

    #[test]
    fn grid_values_of_single_modes() {
        let n = 8;
        let g = grid_values(&FourierField2D::mode(n, 0, 0).unwrap());
        assert!(g.iter().all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-14));

        let g = grid_values(&FourierField2D::mode(n, 1, 0).unwrap());
        for a in 0..n {
            for b in 0..n {
                let expected = Complex64::cis(2.0 * PI * a as f64 / n as f64);
                assert!((g[a * n + b] - expected).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn laplacian_symbol_entries() {
        let n = 8;
        let sym = laplacian_symbol(n).unwrap();
        let at = |k: i64, l: i64| sym[index_of(k, n).unwrap() * n + index_of(l, n).unwrap()];
        assert_eq!(at(0, 0), 0.0);
        assert!((at(1, 0) - 4.0 * PI * PI).abs() < 1e-12);
        assert!((at(-2, 3) - 52.0 * PI * PI).abs() < 1e-10);
    }

    #[test]
    fn free_propagation_examples() {
        let n = 8;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = random_field(&mut rng, n);
        assert_eq!(free_propagate(&u, 0.0), u);

        let e10 = FourierField2D::mode(n, 1, 0).unwrap();
        let p = free_propagate(&e10, 1.0);
        let expected = Complex64::cis(-4.0 * PI * PI);
        assert!((p.get(1, 0).unwrap() - expected).norm() < 1e-14);

        let a = free_propagate(&free_propagate(&u, 0.3), -0.1);
        let b = free_propagate(&u, 0.2);
        assert!(a.sub(&b).norm() < 1e-12);
    }

    #[test]
    fn potential_on_constant_field() {
        let n = 8;
        let out = apply_potential(
            &FourierField2D::mode(n, 0, 0).unwrap(),
            &MovingCosinePotential::default(),
            0.0,
        )
        .unwrap();
        for (k, l) in [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)] {
            assert!((out.get(k, l).unwrap() - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        }
        let rest: f64 = out.norm_sqr() - 6.0 * 0.25;
        assert!(rest.abs() < 1e-13);
        assert!(out.get(0, 0).unwrap().norm() < 1e-14);
    }

    #[test]
    fn potential_grid_product_at_origin() {
        let n = 8;
        let pot = MovingCosinePotential::default();
        assert!((pot.eval(0.0, 0.0, 0.0) - 3.0).abs() < 1e-15);
        let grid = FourierGrid::new(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = random_field(&mut rng, n);
        let vu = grid.grid_values(&grid.apply_potential(&u, &pot, 0.0));
        let uu = grid.grid_values(&u);
        assert!((vu[0] - 3.0 * uu[0]).norm() < 1e-12);
    }

    #[test]
    fn static_potential_is_time_independent() {
        let n = 8;
        let pot = MovingCosinePotential::new(0.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let u = random_field(&mut rng, n);
        let a = apply_potential(&u, &pot, 0.0).unwrap();
        let b = apply_potential(&u, &pot, 0.77).unwrap();
        assert!(a.sub(&b).norm() < 1e-14);
    }

    #[test]
    fn skewed_potential_at_time_zero() {
        let n = 8;
        let pot = MovingCosinePotential::default();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let u = random_field(&mut rng, n);
        let a = skewed_potential(&u, &pot, 0.0, 0.5).unwrap();
        let b = apply_potential(&u, &pot, 0.0).unwrap();
        assert!(a.sub(&b).norm() < 1e-14);
    }

    #[test]
    fn skewed_potential_is_bounded_by_sup_norm() {
        let n = 16;
        let pot = MovingCosinePotential::default();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..20 {
            let u = random_field(&mut rng, n);
            let t = rng.gen_range(-1.0..1.0);
            let out = skewed_potential(&u, &pot, t, 0.7).unwrap();
            assert!(out.norm() <= 3.0 * u.norm() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn small_grids_rejected_for_potential() {
        let u = FourierField2D::zeros(2).unwrap();
        assert!(apply_potential(&u, &MovingCosinePotential::default(), 0.0).is_err());
        assert!(SkewedPotentialOp::new(2, MovingCosinePotential::default(), 1.0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn field(n: usize) -> impl Strategy<Value = FourierField2D> {
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
                FourierField2D::from_coeffs(
                    n,
                    v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect(),
                )
                .unwrap()
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn dft_roundtrip(u in field(8)) {
                let back = field_from_values(8, &grid_values(&u)).unwrap();
                prop_assert!(back.sub(&u).norm() < 1e-13);
                // Parseval with the grid cell measure 1/N^2
                let g = grid_values(&u);
                let grid_norm = g.iter().map(|v| v.norm_sqr()).sum::<f64>() / 64.0;
                prop_assert!((grid_norm - u.norm_sqr()).abs() < 1e-12 * (1.0 + u.norm_sqr()));
            }

            #[test]
            fn free_propagation_is_unitary(u in field(8), s in -2.0f64..2.0) {
                let p = free_propagate(&u, s);
                prop_assert!((p.norm() - u.norm()).abs() < 1e-14 * (1.0 + u.norm()));
            }

            #[test]
            fn potential_is_self_adjoint(u in field(8), v in field(8), t in -1.0f64..1.0) {
                let pot = MovingCosinePotential::default();
                let lhs = apply_potential(&u, &pot, t).unwrap().inner(&v);
                let rhs = u.inner(&apply_potential(&v, &pot, t).unwrap());
                prop_assert!((lhs - rhs).norm() < 1e-13 * (1.0 + u.norm() * v.norm()));
            }

            #[test]
            fn skewed_potential_is_self_adjoint(
                u in field(8), v in field(8), t in -1.0f64..1.0, tau in 0.0f64..1.5
            ) {
                let pot = MovingCosinePotential::default();
                let lhs = skewed_potential(&u, &pot, t, tau).unwrap().inner(&v);
                let rhs = u.inner(&skewed_potential(&v, &pot, t, tau).unwrap());
                prop_assert!((lhs - rhs).norm() < 1e-13 * (1.0 + u.norm() * v.norm()));
            }
        }
    }
}
