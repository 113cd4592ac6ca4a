//! Principal branch of log Γ for complex arguments.
//!
//! The argument is shifted upward with Γ(s+1) = sΓ(s) until its real part clears a
//! precision-dependent threshold, then the Stirling series is summed until its terms
//! drop below the target accuracy.

use std::sync::OnceLock;

use rug::{Float, Integer, Rational};

use super::{MpComplex, PrecisionContext};
use crate::error::{Error, Result};

const MAX_TERMS: usize = 80;

fn bernoulli_even() -> &'static [Rational] {
    static TABLE: OnceLock<Vec<Rational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n_max = 2 * MAX_TERMS;
        // B_m from sum_{j=0}^{m} C(m+1, j) B_j = 0.
        let mut b: Vec<Rational> = Vec::with_capacity(n_max + 1);
        b.push(Rational::from(1));
        for m in 1..=n_max {
            let mut acc = Rational::new();
            let mut binom = Integer::from(1);
            for (j, bj) in b.iter().enumerate() {
                if j > 0 {
                    binom *= m + 2 - j;
                    binom /= j;
                }
                if bj.cmp0() != std::cmp::Ordering::Equal {
                    acc += Rational::from(&binom) * bj;
                }
            }
            b.push(-acc / Rational::from(m + 1));
        }
        (0..=MAX_TERMS).map(|k| b[2 * k].clone()).collect()
    })
}

/// Real part threshold above which the Stirling series is used directly.
pub fn stirling_threshold(ctx: &PrecisionContext) -> f64 {
    (0.3 * ctx.precision_bits as f64).max(32.0)
}

/// log Γ(s) on the principal branch.
pub fn log_gamma(s: &MpComplex, ctx: &PrecisionContext) -> Result<MpComplex> {
    let prec = ctx.working_bits() + 16;
    let s = s.clone().with_prec(prec);
    if !s.is_finite() {
        return Err(Error::domain("log_gamma of a non-finite argument"));
    }
    if s.im.is_zero() && s.re <= 0 && s.re.is_integer() {
        return Err(Error::domain(format!("log_gamma pole at s = {}", s.re.to_f64())));
    }

    let threshold = stirling_threshold(ctx);
    let re = s.re.to_f64();
    let shift = if re < threshold {
        (threshold - re).ceil() as u64
    } else {
        0
    };

    let mut shifted = s.clone();
    let mut correction: Option<MpComplex> = None;
    if shift > 0 {
        // log Γ(s) = log Γ(s + m) - Σ_{k<m} log(s + k); the sum of principal logs is
        // recovered from one log of the product plus a 2πi multiple fixed in f64.
        let mut prod = MpComplex::one(prec);
        let mut arg_sum = 0.0f64;
        let (re0, im0) = (s.re.to_f64(), s.im.to_f64());
        let mut scratch = [Float::new(prec), Float::new(prec)];
        for k in 0..shift {
            let term = MpComplex::from_parts(Float::with_val(prec, &s.re + k), s.im.clone());
            prod.mul_assign_scratch(&term, &mut scratch);
            arg_sum += im0.atan2(re0 + k as f64);
        }
        let mut log_prod = prod.ln();
        let two_pi = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
        let turns = ((arg_sum - log_prod.im.to_f64()) / (2.0 * std::f64::consts::PI)).round();
        if turns != 0.0 {
            log_prod.im += Float::with_val(prec, &two_pi * turns);
        }
        correction = Some(log_prod);
        shifted.re += shift;
    }

    let mut out = stirling(&shifted, ctx, prec)?;
    if let Some(c) = correction {
        out -= &c;
    }
    Ok(out.with_prec(ctx.working_bits()))
}

fn stirling(z: &MpComplex, ctx: &PrecisionContext, prec: u32) -> Result<MpComplex> {
    let half = Float::with_val(prec, 0.5);
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    let ln_2pi_half = Float::with_val(prec, (pi * 2u32).ln()) / 2u32;

    let log_z = z.ln();
    let mut z_minus_half = z.clone();
    z_minus_half.re -= &half;
    let mut acc = &z_minus_half * &log_z;
    acc -= z;
    acc.re += &ln_2pi_half;

    let target = (-(ctx.precision_bits as f64) - 10.0).exp2();
    let scale = acc.abs_f64().max(1.0);
    let inv_z = z.recip();
    let inv_z2 = &inv_z * &inv_z;
    let mut pow = inv_z.clone();
    let bern = bernoulli_even();
    let mut last = f64::INFINITY;
    for k in 1..=MAX_TERMS {
        let coeff = Float::with_val(prec, &bern[k]) / ((2 * k) as u32 * (2 * k - 1) as u32);
        let term = pow.scale(&coeff);
        let mag = term.abs_f64();
        acc += &term;
        if mag <= target * scale {
            return Ok(acc);
        }
        if mag > last {
            break;
        }
        last = mag;
        pow = &pow * &inv_z2;
    }
    Err(Error::Precision {
        bits: ctx.precision_bits,
        detail: "Stirling series terms did not reach the target accuracy".into(),
    })
}
