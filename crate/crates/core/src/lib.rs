//! Two-point boundary value problems driven by the conformable fractional
//! derivative of order `alpha` in (1, 2):
//!
//! ```text
//! T u(t) + f(t, u(t)) = 0,  a < t < b,    u(a) = u(b) = 0,
//! ```
//!
//! where `T g(t) = (t - a)^(2 - alpha) g''(t)` for twice differentiable `g`.
//!
//! The crate provides:
//!
//! * [`quad`]: Gauss rules for the integrable endpoint weight
//!   `(s - a)^(alpha - 2)`, the currency of every integral here;
//! * [`calculus`]: the conformable derivative/integral operators, their
//!   inversion identity, and the extremum sign property;
//! * [`linear`]: the Green kernel of the linear problem and the
//!   quadrature-based Dirichlet solver;
//! * [`nonlinear`]: verification of lower/upper solution pairs and the
//!   bracketed fixed-point solver for the nonlinear problem;
//! * [`spectral`]: a principal-eigenvalue estimator, the Lyapunov-type
//!   necessary-condition certifier, and the classical Borg-ratio evaluator.
//!
//! All operations are pure functions of their inputs; every value is
//! immutable after construction and safe to share across threads.

pub mod calculus;
pub mod domain;
pub mod error;
pub mod grid;
pub mod linear;
pub mod nonlinear;
pub mod quad;
pub mod spectral;

pub use domain::{Interval, Order};
pub use error::{Error, Result};
pub use grid::GridFunction;
