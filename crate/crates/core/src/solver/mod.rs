//! Direct and iterative solvers.

mod direct;
mod iterative;

pub use direct::{direct_solve, EnvelopeCholesky, MatVecTriplets};
pub use iterative::{lanczos_condition, pcg, stationary_solve, SolveOptions, SolveReport};
