//! Shared fixtures for the criterion benches.

use efetlab_core::{CoefficientSequence, MpComplex, PrecisionContext, TaylorFunction};

pub fn function(seq: CoefficientSequence, bits: u32) -> TaylorFunction {
    TaylorFunction::new(seq, PrecisionContext::new(bits).expect("valid precision"))
}

pub fn point(bits: u32, re: f64, im: f64) -> MpComplex {
    MpComplex::from_f64(bits, re, im)
}
