use rug::ops::Pow;
use rug::Float;

use super::PrecisionContext;

/// Modified Bessel function I_h(x) = Σ_m (x/2)^{2m+h} / (m! (m+h)!), summed until the
/// geometric tail bound falls below 2^-precision_bits relative to the partial sum.
pub fn bessel_i(h: u32, x: &Float, ctx: &PrecisionContext) -> Float {
    let prec = ctx.working_bits();
    let half_x = Float::with_val(prec, x) / 2u32;
    let q = Float::with_val(prec, half_x.square_ref());

    // (x/2)^h / h!
    let mut term = Float::with_val(prec, (&half_x).pow(h));
    for k in 2..=h {
        term /= k;
    }
    if term.is_zero() {
        return term;
    }
    let mut sum = term.clone();
    let target = ctx.epsilon() / 16.0;
    let q_f = q.to_f64();
    let mut m: u64 = 0;
    loop {
        m += 1;
        term *= &q;
        term /= m * (m + h as u64);
        sum += &term;
        let ratio = q_f / ((m + 1) * (m + 1 + h as u64)) as f64;
        if ratio < 0.5 {
            let tail = term.to_f64() * ratio / (1.0 - ratio);
            if tail <= target * sum.to_f64() {
                return sum;
            }
        }
    }
}

pub fn bessel_i_f64(h: u32, x: f64, ctx: &PrecisionContext) -> f64 {
    bessel_i(h, &ctx.float(x), ctx).to_f64()
}
