//! Numerical laboratory for entire functions of exponential type given by their Taylor
//! coefficients: evaluation, zero counting, self-correlation and interpolation, Hadamard
//! quantities and two explicit constructions.

pub mod constructions;
pub mod correlation;
pub mod error;
pub mod hadamard;
pub mod mp;
pub mod table;
pub mod taylor;
pub mod zeros;

pub use error::{Error, Result};
pub use mp::{MpComplex, PrecisionContext};
pub use taylor::{CoefficientSequence, SequenceSpec, TaylorFunction};
