//! Problem instances shared by the benchmarks.

use stlsq_core::ode::{CosineCoefficient, CosineOde};
use stlsq_core::pde::PeriodicSchrodinger;
use stlsq_core::torus::SkewedPotentialOp;
use stlsq_core::{Complex64, FourierField2D, LsqProblem, MovingCosinePotential};

pub fn scalar_problem(k: usize) -> LsqProblem<Complex64, CosineCoefficient> {
    CosineOde::new(5.0, 20.0, Complex64::new(1.0, 0.0))
        .build_problem(k, k)
        .expect("valid sizes")
}

pub fn torus_problem(n: usize, tau: f64) -> PeriodicSchrodinger {
    PeriodicSchrodinger::with_gaussian(n, tau, MovingCosinePotential::default())
        .expect("valid sizes")
}

pub fn torus_lsq(n: usize, k: usize) -> LsqProblem<FourierField2D, SkewedPotentialOp> {
    torus_problem(n, 0.5).build_problem(k).expect("valid sizes")
}

/// Deterministic dense test data.
pub fn wave(len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|i| {
            let x = i as f64;
            Complex64::new((0.37 * x).sin(), (0.11 * x * x).cos())
        })
        .collect()
}
