use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// Sup error of the scalar problem against its closed form, Chebyshev
    /// versus the steppers.
    OdeConvergence,
    /// Chebyshev only, one curve per collocation rule.
    OdeAliasing,
    PdeConvergence,
    PdeTiming,
    PdeErrorVsTime,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::OdeConvergence => "ode_convergence",
            Experiment::OdeAliasing => "ode_aliasing",
            Experiment::PdeConvergence => "pde_convergence",
            Experiment::PdeTiming => "pde_timing",
            Experiment::PdeErrorVsTime => "pde_error_vs_time",
        }
    }

    pub fn is_pde(&self) -> bool {
        matches!(
            self,
            Experiment::PdeConvergence | Experiment::PdeTiming | Experiment::PdeErrorVsTime
        )
    }
}

/// Number of collocation nodes as a function of `K`: `K`, `K+m` or `mK`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CollocationRule {
    Same,
    Plus(usize),
    Times(usize),
}

impl CollocationRule {
    pub fn nodes(&self, k: usize) -> usize {
        match *self {
            CollocationRule::Same => k,
            CollocationRule::Plus(m) => k + m,
            CollocationRule::Times(m) => k * m,
        }
    }
}

impl fmt::Display for CollocationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CollocationRule::Same => write!(f, "K"),
            CollocationRule::Plus(m) => write!(f, "K+{m}"),
            CollocationRule::Times(m) => write!(f, "{m}K"),
        }
    }
}

impl FromStr for CollocationRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || format!("collocation rule {s:?} is not one of K, K+m, mK");
        if s == "K" {
            Ok(CollocationRule::Same)
        } else if let Some(m) = s.strip_prefix("K+") {
            m.parse().map(CollocationRule::Plus).map_err(|_| bad())
        } else if let Some(m) = s.strip_suffix('K') {
            match m.parse() {
                Ok(0) | Err(_) => Err(bad()),
                Ok(m) => Ok(CollocationRule::Times(m)),
            }
        } else {
            Err(bad())
        }
    }
}

impl TryFrom<String> for CollocationRule {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

impl From<CollocationRule> for String {
    fn from(r: CollocationRule) -> String {
        r.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Chebyshev,
    CrankNicolson,
    Rk4,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Chebyshev => "chebyshev",
            Method::CrankNicolson => "crank_nicolson",
            Method::Rk4 => "rk4",
        }
    }
}

/// Values replaced when running with `--paper-scale`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleOverrides {
    pub n: Option<usize>,
    pub k_values: Option<Vec<usize>>,
    pub step_values: Option<Vec<usize>>,
    pub tau_values: Option<Vec<f64>>,
    pub samples: Option<usize>,
}

/// Grid size used by `--paper-scale` when the config has no overrides.
pub const PAPER_SCALE_N: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub k_values: Vec<usize>,
    #[serde(default = "default_rules")]
    pub collocation: Vec<CollocationRule>,
    #[serde(default)]
    pub step_values: Vec<usize>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,

    // scalar problem
    #[serde(default = "default_a")]
    pub a: f64,
    #[serde(default = "default_omega")]
    pub omega: f64,
    /// Real and imaginary part of the initial value.
    #[serde(default = "default_eta0")]
    pub eta0: [f64; 2],

    // torus problem
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_tau")]
    pub tau_values: Vec<f64>,
    #[serde(default = "default_c1")]
    pub c1: f64,
    #[serde(default = "default_c2")]
    pub c2: f64,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    /// Width of the Gaussian initial datum in Fourier space; `N/8` if absent.
    #[serde(default)]
    pub sigma: Option<f64>,
    /// Uniform sample times on `[-1, 1]` for the C0 error.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_reference_steps")]
    pub reference_steps: usize,

    #[serde(default = "default_cg_tol")]
    pub cg_tol: f64,
    #[serde(default = "default_cg_maxit")]
    pub cg_maxit: usize,
    #[serde(default = "default_repeats")]
    pub timing_repeats: usize,

    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub paper_scale: Option<ScaleOverrides>,
}

fn default_rules() -> Vec<CollocationRule> {
    vec![CollocationRule::Same]
}
fn default_methods() -> Vec<Method> {
    vec![Method::Chebyshev, Method::CrankNicolson, Method::Rk4]
}
fn default_a() -> f64 {
    5.0
}
fn default_omega() -> f64 {
    20.0
}
fn default_eta0() -> [f64; 2] {
    [1.0, 0.0]
}
fn default_n() -> usize {
    16
}
fn default_tau() -> Vec<f64> {
    vec![0.5]
}
fn default_c1() -> f64 {
    1.0
}
fn default_c2() -> f64 {
    0.5
}
fn default_amplitude() -> f64 {
    1.0
}
fn default_samples() -> usize {
    129
}
fn default_reference_steps() -> usize {
    stlsq_core::pde::DEFAULT_REFERENCE_STEPS
}
fn default_cg_tol() -> f64 {
    stlsq_core::lsq::DEFAULT_CG_TOL
}
fn default_cg_maxit() -> usize {
    10_000
}
fn default_repeats() -> usize {
    3
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Applies the `paper_scale` block, or sets `N = 64` if there is none.
    pub fn into_paper_scale(mut self) -> Result<Self> {
        match self.paper_scale.take() {
            Some(o) => {
                if let Some(n) = o.n {
                    self.n = n;
                }
                if let Some(k) = o.k_values {
                    self.k_values = k;
                }
                if let Some(s) = o.step_values {
                    self.step_values = s;
                }
                if let Some(t) = o.tau_values {
                    self.tau_values = t;
                }
                if let Some(s) = o.samples {
                    self.samples = s;
                }
            }
            None => self.n = PAPER_SCALE_N,
        }
        self.validate()?;
        Ok(self)
    }

    pub fn uses(&self, method: Method) -> bool {
        self.methods.contains(&method)
            && (method == Method::Chebyshev || self.experiment != Experiment::OdeAliasing)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(CliError::Config(msg));
        if self.methods.is_empty() {
            return fail("methods is empty".into());
        }
        if self.uses(Method::Chebyshev) {
            if self.k_values.is_empty() {
                return fail("k_values is empty".into());
            }
            if self.k_values.contains(&0) {
                return fail("k_values must be positive".into());
            }
            if self.collocation.is_empty() {
                return fail("collocation is empty".into());
            }
        }
        let stepping = self.uses(Method::CrankNicolson) || self.uses(Method::Rk4);
        if stepping {
            if self.step_values.is_empty() {
                return fail("step_values is empty".into());
            }
            if let Some(s) = self.step_values.iter().find(|&&s| s < 2 || s % 2 != 0) {
                return fail(format!("step count {s} must be even and at least 2"));
            }
        }
        if !(self.cg_tol > 0.0) || self.cg_maxit == 0 {
            return fail("cg_tol and cg_maxit must be positive".into());
        }
        if self.timing_repeats == 0 {
            return fail("timing_repeats must be at least 1".into());
        }
        if self.experiment.is_pde() {
            if self.n < 4 || self.n % 2 != 0 {
                return fail(format!("N = {} must be even and at least 4", self.n));
            }
            if self.tau_values.is_empty() {
                return fail("tau_values is empty".into());
            }
            if self.tau_values.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                return fail("tau values must be finite and non-negative".into());
            }
            if self.samples < 2 {
                return fail("samples must be at least 2".into());
            }
            if stepping {
                let intervals = self.samples - 1;
                if let Some(s) = self.step_values.iter().find(|&&s| s % intervals != 0) {
                    return fail(format!(
                        "step count {s} is not a multiple of samples - 1 = {intervals}"
                    ));
                }
            }
        }
        Ok(())
    }
}
