//! Executable infrastructure for moment problems in countably many variables.
//!
//! The toolkit treats the polynomial algebra `R[x1, x2, ...]` as the symmetric
//! algebra of a vector space with countable basis and makes the objects that
//! appear in its moment theory computable:
//!
//! * [`poly`] — exact sparse polynomials with rational coefficients and
//!   point evaluation at finitely supported characters;
//! * [`fractions`] — the localization at denominators `(1 + x_i^2)^m`,
//!   whose bounded generators compactify the problem coordinatewise;
//! * [`gaussian`] — Gaussian covariance specifications with analytic tails,
//!   exact Wick moments, seeded sampling and the trace-class
//!   sigma-additivity classifier;
//! * [`measures`] — cylinder sets over box bases, marginal families,
//!   compatibility / additivity checking and Chebyshev continuity bounds;
//! * [`moments`] — moment functionals, Carleman diagnostics, exact moment
//!   matrices with rational PSD certification and Gauss quadrature witnesses.
//!
//! All structural checks run in exact rational arithmetic; floating point
//! enters only where irrational quantities (Gaussian tail probabilities,
//! quadrature nodes) force it, and every Monte-Carlo estimate carries an
//! explicit seed and a standard-error bar.

pub mod error;
pub mod fractions;
pub mod gaussian;
mod linalg;
pub mod measures;
pub mod moments;
pub mod poly;
pub mod rat;

pub use error::{Error, Result};
pub use poly::{Character, Monomial, Poly, VarIndex};
