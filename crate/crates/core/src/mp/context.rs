use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Working precision for one computation.
///
/// All tolerances downstream are derived from `precision_bits`; the guard bits are
/// added to every intermediate so that the declared precision survives rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecisionContext {
    pub precision_bits: u32,
    pub guard_bits: u32,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext {
            precision_bits: Self::DEFAULT_BITS,
            guard_bits: Self::DEFAULT_GUARD,
        }
    }
}

impl PrecisionContext {
    pub const MIN_BITS: u32 = 64;
    pub const DEFAULT_BITS: u32 = 128;
    pub const DEFAULT_GUARD: u32 = 32;

    pub fn new(precision_bits: u32) -> Result<Self> {
        Self::with_guard(precision_bits, Self::DEFAULT_GUARD)
    }

    pub fn with_guard(precision_bits: u32, guard_bits: u32) -> Result<Self> {
        if precision_bits < Self::MIN_BITS {
            return Err(Error::domain(format!(
                "precision_bits must be at least {}, got {precision_bits}",
                Self::MIN_BITS
            )));
        }
        Ok(PrecisionContext {
            precision_bits,
            guard_bits,
        })
    }

    /// Bits carried by every intermediate value.
    pub fn working_bits(&self) -> u32 {
        self.precision_bits + self.guard_bits
    }

    /// 2^(-precision_bits/2).
    pub fn tol(&self) -> f64 {
        (-(self.precision_bits as f64) / 2.0).exp2()
    }

    /// `tol()` as an extended-precision value (it underflows f64 only for absurd precisions).
    pub fn tol_float(&self) -> Float {
        let e = -(self.precision_bits as i32) / 2;
        Float::with_val(self.working_bits(), Float::i_exp(1, e))
    }

    /// 2^(-precision_bits): unit roundoff at the declared precision.
    pub fn epsilon(&self) -> f64 {
        (-(self.precision_bits as f64)).exp2()
    }

    /// Same context with `factor` times the precision (used by refinement oracles).
    pub fn scaled(&self, factor: u32) -> Self {
        PrecisionContext {
            precision_bits: self.precision_bits * factor,
            guard_bits: self.guard_bits,
        }
    }

    pub fn float(&self, v: f64) -> Float {
        Float::with_val(self.working_bits(), v)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.working_bits(), rug::float::Constant::Pi)
    }
}

/// Smallest precision (rounded up to a multiple of 64) at which a Taylor series of
/// exponential type one can be summed on |z| = r with useful relative accuracy where
/// |F| is as small as e^{-r}.
pub fn precision_for_radius(r: f64, floor_bits: u32) -> u32 {
    let need = 2.0 * r * std::f64::consts::LOG2_E + 64.0;
    let bits = (need.ceil() as u32).max(floor_bits).max(PrecisionContext::MIN_BITS);
    bits.div_ceil(64) * 64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tol_decreases_with_precision() {
        let mut last = f64::INFINITY;
        for bits in (64..=1024).step_by(64) {
            let t = PrecisionContext::new(bits).unwrap().tol();
            assert!(t < last);
            last = t;
        }
    }

    #[test]
    fn rejects_low_precision() {
        assert!(PrecisionContext::new(53).is_err());
        assert_eq!(PrecisionContext::default().precision_bits, 128);
    }

    #[test]
    fn tol_float_matches_f64() {
        let ctx = PrecisionContext::new(128).unwrap();
        assert_eq!(ctx.tol_float().to_f64(), ctx.tol());
    }

    #[test]
    fn radius_precision_rounds_up() {
        assert_eq!(precision_for_radius(128.0, 128), 448);
        assert_eq!(precision_for_radius(1.0, 128), 128);
    }
}
