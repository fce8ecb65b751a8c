//! Exact computation of special cubic Hodge free energies from the
//! Dubrovin-Zhang loop equation, with rational-case Virasoro checks.

pub mod algebra;
pub mod bell;
pub mod phi;
pub mod ptensor;
pub mod loop_solver;
pub mod hodge;
pub mod virasoro;

pub use algebra::{AlgebraError, JetMono, JetPoly, Rational, SigmaMono, SigmaPoly, ThetaPoly, TriangularSystem};
