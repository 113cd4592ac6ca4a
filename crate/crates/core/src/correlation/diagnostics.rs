use std::ops::RangeInclusive;

use num_complex::Complex64;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp::{MpComplex, PrecisionContext};
use crate::taylor::{CoefficientSequence, Ratio};

/// Π_h(s) = ∏_{1≤ℓ≤⌊h/2⌋} (s + ℓ − ½)/(s − ℓ + ½).
pub fn pi_h_product(s: Complex64, h: u32) -> Result<Complex64> {
    let mut p = Complex64::new(1.0, 0.0);
    for l in 1..=h / 2 {
        let c = l as f64 - 0.5;
        let den = s - c;
        if den == Complex64::new(0.0, 0.0) {
            return Err(Error::domain(format!("Π_{h} has a pole at s = {c}")));
        }
        p *= (s + c) / den;
    }
    Ok(p)
}

/// k(φ) = cos φ + φ sin φ on |φ| ≤ π/2.
pub fn k_phi(phi: f64) -> Result<f64> {
    if !(phi.abs() <= std::f64::consts::FRAC_PI_2 * (1.0 + 4.0 * f64::EPSILON)) {
        return Err(Error::domain(format!("k(φ) needs |φ| ≤ π/2, got {phi}")));
    }
    Ok(phi.cos() + phi * phi.sin())
}

/// max over t ∈ [−π, π] of 2cos(t/2) + t sin φ on a uniform grid of the given step.
pub fn k_phi_grid_max(phi: f64, step: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let n = (2.0 * pi / step).ceil() as usize;
    (0..=n)
        .map(|k| {
            let t = (-pi + k as f64 * step).min(pi);
            2.0 * (t / 2.0).cos() + t * phi.sin()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The three unit-shift maxima of a sampled interpolant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioDiagnostics {
    /// max ||g(s)| − 1|
    pub d1: f64,
    /// max |g(s+1)/g(s) − 1|
    pub d2: f64,
    /// max |g(s)²/(g(s−1)g(s+1)) − 1|
    pub d3: f64,
}

/// Samples g at unit steps over [lo, hi], plus one step on each side.
pub fn ratio_diagnostics<G>(g: G, lo: f64, hi: f64) -> Result<RatioDiagnostics>
where
    G: Fn(f64) -> Result<Complex64>,
{
    if !(lo <= hi) {
        return Err(Error::domain(format!("empty interval [{lo}, {hi}]")));
    }
    let count = (hi - lo).floor() as usize + 1;
    let mut vals = Vec::with_capacity(count + 2);
    for k in 0..count + 2 {
        let s = lo - 1.0 + k as f64;
        let v = g(s)?;
        if v == Complex64::new(0.0, 0.0) || !v.is_finite() {
            return Err(Error::Evaluation {
                node: k,
                detail: format!("interpolant is {v} at s = {s}"),
            });
        }
        vals.push(v);
    }
    let mut d = RatioDiagnostics {
        d1: 0.0,
        d2: 0.0,
        d3: 0.0,
    };
    for k in 1..=count {
        let (prev, cur, next) = (vals[k - 1], vals[k], vals[k + 1]);
        d.d1 = d.d1.max((cur.norm() - 1.0).abs());
        d.d2 = d.d2.max((next / cur - 1.0).norm());
        d.d3 = d.d3.max((cur * cur / (prev * next) - 1.0).norm());
    }
    Ok(d)
}

/// max over n of |g_d(n+1)/g_d(n) − e^{−2πi(2βd)}| with g_d(n) = ωₙω̄_{n+d}, for the
/// quadratic phase ωₙ = e^{2πi(βn² + γn + δ)}.
pub fn quadratic_ratio_check(
    beta: Ratio,
    gamma: Ratio,
    delta: Ratio,
    d: u64,
    n_range: RangeInclusive<u64>,
    ctx: &PrecisionContext,
) -> Result<f64> {
    if d == 0 {
        return Err(Error::domain("quadratic ratio check needs d ≥ 1"));
    }
    let seq = CoefficientSequence::quadratic_phase(beta, gamma, delta)?;
    let prec = ctx.working_bits();
    let g = |n: u64| -> Result<MpComplex> { Ok(&seq.value(n, prec)? * &seq.value(n + d, prec)?.conj()) };
    // −2β d taken mod 1 exactly before scaling by 2π
    let den = beta.den as i128;
    let num = (-2 * beta.num as i128 * d as i128).rem_euclid(den);
    let angle = Float::with_val(prec, rug::float::Constant::Pi) * 2u32 * Float::with_val(prec, num) / Float::with_val(prec, den);
    let target = MpComplex::cis(&angle);
    let mut worst = 0.0f64;
    for n in n_range {
        let ratio = &g(n + 1)? / &g(n)?;
        worst = worst.max((&ratio - &target).abs_f64());
    }
    Ok(worst)
}
