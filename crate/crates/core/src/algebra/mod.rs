//! Exact ring kernel: rationals, `σ`-polynomials, jet polynomials, `Θ`-polynomials
//! and triangular solving.

pub mod format;
mod jet;
mod rational;
mod sigma;
mod theta;
mod triangular;

pub use jet::{JetMono, JetPoly};
pub use rational::{binomial, binomial_rational, double_factorial, factorial, Rational};
pub use sigma::{SigmaMono, SigmaPoly};
pub use theta::ThetaPoly;
pub use triangular::TriangularSystem;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("negative exponent on z{0}")]
    NegativeExponent(usize),
    #[error("derivative reaches z{index}, beyond the jet cutoff {cutoff}")]
    CutoffOverflow { index: usize, cutoff: usize },
    #[error("division is not exact in row {row}")]
    NonExactDivision { row: usize },
    #[error("pivot in row {row} is not a single term")]
    NonMonomialPivot { row: usize },
    #[error("invalid system: {0}")]
    InvalidSystem(String),
}
