//! Global space-time least-squares solvers for linear Schrödinger-type
//! evolution equations `i u' = B(t) u`, discretized with Chebyshev
//! polynomials in time.
//!
//! The unknown is expanded as `u(t) = sum_{k<K} u_k T_k(t)` on `(-1, 1)` and
//! chosen to minimize
//!
//! ```text
//! E_w(u) = |u(0) - eta0|^2 + int_{-1}^{1} sqrt(1 - t^2) |i u'(t) - B(t) u(t)|^2 dt
//! ```
//!
//! with the potential term collocated at Gauss-Chebyshev nodes. The resulting
//! Hermitian system is solved by conjugate gradient preconditioned with the
//! explicitly invertible potential-free operator.
//!
//! Modules:
//! - [`chebyshev`]: series, quadrature, collocation and basis changes.
//! - [`torus`]: Fourier fields on the 2-torus and the cosine potential.
//! - [`lsq`]: the least-squares operator, preconditioner and PCG.
//! - [`ode`]: the scalar model `i u' = a cos(omega t) u`.
//! - [`pde`]: the periodic 2-D Schrödinger equation in the interaction picture.
//! - [`baselines`]: Crank-Nicolson, RK4 and the Picard/Duhamel iteration.

pub mod baselines;
pub mod chebyshev;
pub mod error;
pub mod hilbert;
pub mod lsq;
pub mod ode;
pub mod pde;
pub mod torus;

pub use chebyshev::{ChebKind, ChebQuadrature, ChebSeries, ChebTransform};
pub use error::{Error, Result};
pub use hilbert::{FnOperator, HilbertElement, TimeOperator, ZeroOperator};
pub use lsq::{LsqProblem, SolveDiagnostics, SpaceTimeCoefficients};
pub use num_complex::Complex64;
pub use torus::{FourierField2D, MovingCosinePotential};
