//! Explicit non-radial solutions of the Robin–Poisson problem on a ball.
//!
//! The crate has four parts:
//!
//! * [`counterexample`]: the closed-form family
//!   `φ(x) = (|x − x₀|² + R² − |x₀|²)^(−βR)`, its nonlinearity `f`, exact
//!   residuals and the scans that classify where `f ∘ φ ≥ 0`.
//! * [`oracle`]: finite-difference Laplacian and normal-derivative stencils
//!   that only ever look at samples of a field, used to audit the closed form.
//! * [`bvp1d`]: a shooting solver for `−u'' = f(u)` on `(−R, R)` with Robin
//!   conditions at both ends, plus evenness/positivity/monotonicity checks.
//! * [`cli`]: the `robin-symmetry` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x <= y)` is the NaN-rejecting form.

pub mod bvp1d;
pub mod cli;
pub mod counterexample;
pub mod oracle;

mod numfmt;

pub use bvp1d::{Bvp1dError, Bvp1dProblem, Bvp1dSolution, SymmetryReport1d};
pub use counterexample::{
    BallGeometry, ConstraintClass, CounterexampleModel, ModelError, RobinParameter, SymmetryDiagnostics,
};
pub use oracle::{OracleError, ResidualReport, StencilConfig};
