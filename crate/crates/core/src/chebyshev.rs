//! Chebyshev series on `[-1, 1]`: evaluation, Gauss-Chebyshev quadrature,
//! collocation transforms and the structural operators used to assemble the
//! least-squares system.
//!
//! First-kind series `u(t) = sum u_k T_k(t)` hold the unknown; second-kind
//! series `g(t) = sum g_k U_k(t)` hold residuals, because `T'_{k+1} = (k+1) U_k`
//! and the `U_k` are orthogonal for the weight `sqrt(1 - t^2)`.
//!
//! The slice-level kernels (`*_into`, `collocate_slice`, ...) are generic over
//! [`HilbertElement`] so the same code serves scalar and field-valued series.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{check_len, Error, Result};
use crate::hilbert::HilbertElement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChebKind {
    FirstKind,
    SecondKind,
}

/// Coefficients of a Chebyshev series in the `T_k` or `U_k` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    kind: ChebKind,
    coeffs: Vec<Complex64>,
}

impl ChebSeries {
    pub fn new(kind: ChebKind, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "a Chebyshev series needs at least one coefficient".into(),
            ));
        }
        Ok(Self { kind, coeffs })
    }

    pub fn first_kind(coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new(ChebKind::FirstKind, coeffs)
    }

    pub fn second_kind(coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new(ChebKind::SecondKind, coeffs)
    }

    /// Convenience constructor from real coefficients.
    pub fn from_real(kind: ChebKind, coeffs: &[f64]) -> Result<Self> {
        Self::new(kind, coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn kind(&self) -> ChebKind {
        self.kind
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn eval(&self, t: f64) -> Result<Complex64> {
        cheb_eval(self, t)
    }
}

fn check_domain(t: f64) -> Result<()> {
    if t.is_finite() && t.abs() <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(t))
    }
}

/// Evaluates a series at `t` by Clenshaw summation.
pub fn cheb_eval(series: &ChebSeries, t: f64) -> Result<Complex64> {
    check_domain(t)?;
    Ok(clenshaw(series.kind, &series.coeffs, t))
}

/// Clenshaw summation for a (possibly Hilbert-valued) series. `t` is not
/// range-checked.
pub fn clenshaw<E: HilbertElement>(kind: ChebKind, coeffs: &[E], t: f64) -> E {
    let Some(first) = coeffs.first() else {
        panic!("clenshaw called with an empty series");
    };
    let two_t = Complex64::new(2.0 * t, 0.0);
    let minus_one = Complex64::new(-1.0, 0.0);
    let mut b1 = first.zeros_like();
    let mut b2 = first.zeros_like();
    for c in coeffs.iter().skip(1).rev() {
        // b_k = c_k + 2 t b_{k+1} - b_{k+2}
        let mut bk = c.clone();
        bk.axpy(two_t, &b1);
        bk.axpy(minus_one, &b2);
        b2 = b1;
        b1 = bk;
    }
    let mut out = first.clone();
    let lead = match kind {
        ChebKind::FirstKind => Complex64::new(t, 0.0),
        ChebKind::SecondKind => two_t,
    };
    out.axpy(lead, &b1);
    out.axpy(minus_one, &b2);
    out
}

/// `T_k(0) = cos(k pi / 2)`, exactly.
pub fn t_at_zero(k: usize) -> f64 {
    match k % 4 {
        0 => 1.0,
        2 => -1.0,
        _ => 0.0,
    }
}

/// The row vector `(T_0(0), ..., T_{K-1}(0))` mapping coefficients to `u(0)`.
pub fn eval_at_zero_row(k: usize) -> Vec<f64> {
    (0..k).map(t_at_zero).collect()
}

/// Zero-pads a series to length `l`.
pub fn extend(series: &ChebSeries, l: usize) -> Result<ChebSeries> {
    if l < series.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot extend a series of length {} to length {l}",
            series.len()
        )));
    }
    let mut coeffs = series.coeffs.clone();
    coeffs.resize(l, Complex64::new(0.0, 0.0));
    ChebSeries::new(series.kind, coeffs)
}

/// Gauss-Chebyshev rule for the weight `(1 - t^2)^{-1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl ChebQuadrature {
    /// Number of nodes.
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes `x_l = cos(pi (2l + 1) / (2L))`, decreasing.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sum_l mu_l f(x_l)`
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss-Chebyshev quadrature with `l` nodes; exact on polynomials of degree
/// at most `2l - 1`.
pub fn gauss_cheb(l: usize) -> Result<ChebQuadrature> {
    if l == 0 {
        return Err(Error::InvalidArgument(
            "quadrature needs at least one node".into(),
        ));
    }
    let nodes = (0..l).map(|j| node_angle(j, l).cos()).collect();
    let weights = vec![PI / l as f64; l];
    Ok(ChebQuadrature { nodes, weights })
}

fn node_angle(j: usize, l: usize) -> f64 {
    PI * (2 * j + 1) as f64 / (2 * l) as f64
}

/// Values at the quadrature nodes of a first-kind series of the same length.
pub fn collocate(series: &ChebSeries, quad: &ChebQuadrature) -> Result<Vec<Complex64>> {
    if series.kind != ChebKind::FirstKind {
        return Err(Error::InvalidArgument(
            "collocation expects a first-kind series".into(),
        ));
    }
    check_len(quad.order(), series.len())?;
    Ok(ChebTransform::new(quad.order()).collocate(&series.coeffs))
}

/// Inverse of [`collocate`].
pub fn uncollocate(values: &[Complex64], quad: &ChebQuadrature) -> Result<ChebSeries> {
    check_len(quad.order(), values.len())?;
    ChebSeries::first_kind(ChebTransform::new(quad.order()).uncollocate(values))
}

/// Coefficients of `i u'` in the `U_k` basis, same length as `u`.
pub fn diff_to_second_kind(series: &ChebSeries) -> Result<ChebSeries> {
    if series.kind != ChebKind::FirstKind {
        return Err(Error::InvalidArgument(
            "differentiation expects a first-kind series".into(),
        ));
    }
    ChebSeries::second_kind(diff_to_second_kind_vec(&series.coeffs))
}

/// Re-expands a first-kind series in the `U_k` basis without changing its
/// values.
pub fn first_to_second_kind(series: &ChebSeries) -> Result<ChebSeries> {
    if series.kind != ChebKind::FirstKind {
        return Err(Error::InvalidArgument(
            "basis change expects a first-kind series".into(),
        ));
    }
    ChebSeries::second_kind(first_to_second_kind_vec(&series.coeffs))
}

pub fn diff_to_second_kind_vec<E: HilbertElement>(u: &[E]) -> Vec<E> {
    let mut out: Vec<E> = u.iter().map(|x| x.zeros_like()).collect();
    add_diff_to_second_kind(u, &mut out);
    out
}

/// `out[k] += i (k+1) u[k+1]`; `out` may be longer than `u`.
pub fn add_diff_to_second_kind<E: HilbertElement>(u: &[E], out: &mut [E]) {
    for k in 0..u.len().saturating_sub(1) {
        out[k].axpy(Complex64::new(0.0, (k + 1) as f64), &u[k + 1]);
    }
}

/// Adjoint of the differentiation matrix: `out[k] += -i k g[k-1]` for
/// `1 <= k < out.len()`.
pub fn add_diff_adjoint<E: HilbertElement>(g: &[E], out: &mut [E]) {
    for k in 1..out.len() {
        if let Some(gk) = g.get(k - 1) {
            out[k].axpy(Complex64::new(0.0, -(k as f64)), gk);
        }
    }
}

pub fn first_to_second_kind_vec<E: HilbertElement>(u: &[E]) -> Vec<E> {
    let l = u.len();
    let half = Complex64::new(0.5, 0.0);
    let mhalf = Complex64::new(-0.5, 0.0);
    (0..l)
        .map(|j| {
            let mut out = u[j].clone();
            if j > 0 {
                out.scale(half);
            }
            if j + 2 < l {
                out.axpy(mhalf, &u[j + 2]);
            }
            out
        })
        .collect()
}

/// Transpose of [`first_to_second_kind_vec`].
pub fn second_to_first_kind_adjoint<E: HilbertElement>(g: &[E]) -> Vec<E> {
    let half = Complex64::new(0.5, 0.0);
    let mhalf = Complex64::new(-0.5, 0.0);
    (0..g.len())
        .map(|k| {
            let mut out = g[k].clone();
            if k > 0 {
                out.scale(half);
            }
            if k >= 2 {
                out.axpy(mhalf, &g[k - 2]);
            }
            out
        })
        .collect()
}

/// How [`ChebTransform`] maps between coefficients and node values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformMethod {
    /// O(L^2) matrix-vector products with a tabulated cosine matrix.
    Dense,
    /// O(L log L) via complex FFTs of length 2L.
    Fast,
    /// Fast above a size threshold, dense below.
    Auto,
}

const FAST_THRESHOLD: usize = 48;

/// Cached collocation and inverse-collocation at `L` Gauss-Chebyshev nodes.
///
/// `collocate` evaluates `sum_k u_k T_k(x_l)`, a DCT-III; `uncollocate` is the
/// matching DCT-II `u_k = (c_k / L) sum_l v_l T_k(x_l)` with `c_0 = 1`,
/// `c_k = 2`, exact by discrete orthogonality of the cosines.
#[derive(Clone)]
pub struct ChebTransform {
    l: usize,
    method: TransformMethod,
    // table[l * L + k] = T_k(x_l)
    table: Vec<f64>,
    fft_fwd: Option<Arc<dyn Fft<f64>>>,
    fft_inv: Option<Arc<dyn Fft<f64>>>,
    // e^{i pi k / (2L)}, k < 2L
    twiddle: Vec<Complex64>,
}

impl std::fmt::Debug for ChebTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChebTransform")
            .field("l", &self.l)
            .field("method", &self.method)
            .finish()
    }
}

impl ChebTransform {
    pub fn new(l: usize) -> Self {
        Self::with_method(l, TransformMethod::Auto)
    }

    pub fn with_method(l: usize, method: TransformMethod) -> Self {
        assert!(l > 0, "transform size must be positive");
        let method = match method {
            TransformMethod::Auto if l >= FAST_THRESHOLD => TransformMethod::Fast,
            TransformMethod::Auto => TransformMethod::Dense,
            m => m,
        };
        let mut table = Vec::new();
        let mut fft_fwd = None;
        let mut fft_inv = None;
        let mut twiddle = Vec::new();
        match method {
            TransformMethod::Fast => {
                let mut planner = FftPlanner::new();
                fft_fwd = Some(planner.plan_fft_forward(2 * l));
                fft_inv = Some(planner.plan_fft_inverse(2 * l));
                twiddle = (0..2 * l)
                    .map(|k| Complex64::from_polar(1.0, PI * k as f64 / (2 * l) as f64))
                    .collect();
            }
            _ => {
                table = Vec::with_capacity(l * l);
                for j in 0..l {
                    let theta = node_angle(j, l);
                    table.extend((0..l).map(|k| (k as f64 * theta).cos()));
                }
            }
        }
        Self {
            l,
            method,
            table,
            fft_fwd,
            fft_inv,
            twiddle,
        }
    }

    pub fn len(&self) -> usize {
        self.l
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn method(&self) -> TransformMethod {
        self.method
    }

    /// Scalar collocation. `coeffs.len()` must be at most `L`; missing
    /// coefficients are taken as zero.
    pub fn collocate(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        self.collocate_slice(coeffs)
    }

    pub fn uncollocate(&self, values: &[Complex64]) -> Vec<Complex64> {
        self.uncollocate_slice(values)
    }

    pub fn collocate_slice<E: HilbertElement>(&self, coeffs: &[E]) -> Vec<E> {
        assert!(coeffs.len() <= self.l && !coeffs.is_empty());
        match self.method {
            TransformMethod::Fast => self.fast_columns(coeffs, self.l, Self::dct3),
            _ => {
                let l = self.l;
                (0..l)
                    .map(|j| {
                        let row = &self.table[j * l..(j + 1) * l];
                        let mut acc = coeffs[0].zeros_like();
                        for (c, &w) in coeffs.iter().zip(row) {
                            acc.axpy(Complex64::new(w, 0.0), c);
                        }
                        acc
                    })
                    .collect()
            }
        }
    }

    pub fn uncollocate_slice<E: HilbertElement>(&self, values: &[E]) -> Vec<E> {
        assert_eq!(values.len(), self.l);
        match self.method {
            TransformMethod::Fast => self.fast_columns(values, self.l, Self::dct2),
            _ => {
                let l = self.l;
                let inv_l = 1.0 / l as f64;
                let mut out: Vec<E> = (0..l).map(|_| values[0].zeros_like()).collect();
                for (j, v) in values.iter().enumerate() {
                    let row = &self.table[j * l..(j + 1) * l];
                    for (k, o) in out.iter_mut().enumerate() {
                        let ck = if k == 0 { inv_l } else { 2.0 * inv_l };
                        o.axpy(Complex64::new(ck * row[k], 0.0), v);
                    }
                }
                out
            }
        }
    }

    /// Applies a length-L scalar transform to every spatial component.
    fn fast_columns<E: HilbertElement>(
        &self,
        input: &[E],
        out_len: usize,
        kernel: fn(&Self, &mut [Complex64], &mut Vec<Complex64>, &mut Vec<Complex64>),
    ) -> Vec<E> {
        let dim = input[0].dim();
        let mut out: Vec<E> = (0..out_len).map(|_| input[0].zeros_like()).collect();
        let mut column = vec![Complex64::new(0.0, 0.0); self.l];
        let mut buf_a = Vec::new();
        let mut buf_b = Vec::new();
        for c in 0..dim {
            column.fill(Complex64::new(0.0, 0.0));
            for (dst, src) in column.iter_mut().zip(input) {
                *dst = src.components()[c];
            }
            kernel(self, &mut column, &mut buf_a, &mut buf_b);
            for (o, v) in out.iter_mut().zip(&column) {
                o.components_mut()[c] = *v;
            }
        }
        out
    }

    // v_l = sum_k u_k cos(k theta_l)
    //     = 1/2 [ sum_k u_k w^k e^{2 pi i k l / 2L} + sum_k u_k w^{-k} e^{-2 pi i k l / 2L} ]
    // with w = e^{i pi / 2L}.
    fn dct3(&self, col: &mut [Complex64], a: &mut Vec<Complex64>, b: &mut Vec<Complex64>) {
        let l = self.l;
        let n = 2 * l;
        a.clear();
        a.resize(n, Complex64::new(0.0, 0.0));
        b.clear();
        b.resize(n, Complex64::new(0.0, 0.0));
        for k in 0..l {
            a[k] = col[k] * self.twiddle[k];
            b[k] = col[k] * self.twiddle[k].conj();
        }
        self.fft_inv.as_ref().unwrap().process(a);
        self.fft_fwd.as_ref().unwrap().process(b);
        for j in 0..l {
            col[j] = 0.5 * (a[j] + b[j]);
        }
    }

    // u_k = c_k / (2L) [ w^k sum_l v_l e^{2 pi i k l / 2L} + w^{-k} sum_l v_l e^{-2 pi i k l / 2L} ]
    fn dct2(&self, col: &mut [Complex64], a: &mut Vec<Complex64>, b: &mut Vec<Complex64>) {
        let l = self.l;
        let n = 2 * l;
        a.clear();
        a.resize(n, Complex64::new(0.0, 0.0));
        a[..l].copy_from_slice(col);
        b.clear();
        b.extend_from_slice(a);
        self.fft_inv.as_ref().unwrap().process(a);
        self.fft_fwd.as_ref().unwrap().process(b);
        let inv = 1.0 / (2 * l) as f64;
        for k in 0..l {
            let ck = if k == 0 { inv } else { 2.0 * inv };
            col[k] = ck * (self.twiddle[k] * a[k] + self.twiddle[k].conj() * b[k]);
        }
    }
}
