//! Coefficient sequences and evaluation of F(z) = Σ ωₙ zⁿ/n!.

mod function;
pub mod rng;
mod sequence;

pub use function::{truncation_order, Evaluation, TaylorFunction};
pub use sequence::{CNum, CoefficientSequence, Ratio, SequenceSpec};
