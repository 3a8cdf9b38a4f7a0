//! Difference calculus on quantum lattices and time scales.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: series summation, central differences, bisection.
//! * [`expr`]: the function-definition language, overrides and dual numbers.
//! * [`quantum`]: h-, q- and Hahn operators with their integrals.
//! * [`symcalc`]: alpha,beta-, q- and Hahn-symmetric calculi, mean value
//!   witnesses and integral inequalities.
//! * [`timescale`]: time scales, jump operators, delta/nabla/diamond calculus.
//! * [`variational`]: functionals, Euler-Lagrange residuals, first variation,
//!   convexity sampling and Leitmann equivalence checks.

pub mod error;
pub mod expr;
pub mod numerics;
pub mod quantum;
pub mod symcalc;
pub mod timescale;
pub mod variational;

pub use error::{Error, ParseError, Result};
pub use expr::{Env, ExprFunc, RealFn, Var};
pub use numerics::{SeriesPolicy, SeriesResult};
pub use quantum::QOmegaParams;
pub use symcalc::AlphaBetaParams;
pub use timescale::TimeScale;
