use rug::Float;

use crate::error::{Error, Result};
use crate::mp::{circle_quadrature_until, segment_quadrature_with_tol, CircleEstimate, MpComplex, PrecisionContext};

const LN2: f64 = std::f64::consts::LN_2;

/// φ(s) = ∫₀^∞ (cos√u + 2) e^{−su} du, continued to s ≠ 0.
///
/// The cosine part is 2∫₀^∞ t cos t e^{−st²} dt taken along the ray arg t = −arg(s)/2,
/// on which the Gaussian factor is e^{−|s|x²}.
pub fn phi_borel(s: &MpComplex, ctx: &PrecisionContext) -> Result<MpComplex> {
    let prec = ctx.working_bits();
    let s = s.clone().with_prec(prec);
    if s.is_zero() {
        return Err(Error::domain("φ(s) needs s ≠ 0"));
    }
    let modulus = s.abs_f64();
    let psi = Float::with_val(prec, s.arg()) / -2i32;
    let dir = MpComplex::cis(&psi);
    let sin_psi = psi.to_f64().sin().abs();
    let abs_s = s.abs();

    // x e^{x|sin ψ| − |s|x²} peaks at x*; cut where it has fallen by 2^{−(p+24)}
    let x_peak = (sin_psi + (sin_psi * sin_psi + 8.0 * modulus).sqrt()) / (4.0 * modulus);
    let ln_peak = x_peak.ln() + x_peak * sin_psi - modulus * x_peak * x_peak;
    let drop = (ctx.precision_bits as f64 + 24.0) * LN2 - ln_peak.min(0.0);
    let cut = (sin_psi + 1.0 + ((sin_psi + 1.0).powi(2) + 4.0 * modulus * (drop + ln_peak.max(0.0))).sqrt())
        / (2.0 * modulus);
    let tol = ctx.tol() * ln_peak.exp().max(1.0);

    let zero = MpComplex::zero(prec);
    let end = MpComplex::from_f64(prec, cut, 0.0);
    let integral = segment_quadrature_with_tol(
        |x| {
            let t = &dir * x;
            let gauss = Float::with_val(prec, &abs_s * Float::with_val(prec, x.re.square_ref()));
            let g = Float::with_val(prec, (-gauss).exp());
            Ok((&t.cos() * x).scale(&g))
        },
        &zero,
        &end,
        tol,
        ctx,
    )?;
    // dt = e^{iψ} dx and t = e^{iψ}x give the factor e^{2iψ}
    let cosine = (&(&dir * &dir) * &integral).scale_f64(2.0);
    let two = MpComplex::from_f64(prec, 2.0, 0.0);
    Ok(&(&two / &s) + &cosine)
}

/// The contour radius min(1/√|z|, 1).
pub fn default_rho(z: f64) -> f64 {
    if z <= 0.0 {
        1.0
    } else {
        (1.0 / z.sqrt()).min(1.0)
    }
}

/// G(z) = (1/2πi)∮_{|s|=ρ} e^{z(e^s − 1)} φ(s) ds at ρ = min(1/√|z|, 1).
pub fn g_factor_contour(z: &MpComplex, ctx: &PrecisionContext) -> Result<MpComplex> {
    if z.is_zero() {
        return Ok(MpComplex::from_f64(ctx.working_bits(), 3.0, 0.0));
    }
    Ok(g_factor_contour_at(z, default_rho(z.abs_f64()), ctx)?.value)
}

/// G(z) on the circle of the given radius.
pub fn g_factor_contour_at(z: &MpComplex, rho: f64, ctx: &PrecisionContext) -> Result<CircleEstimate> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::domain(format!("contour radius must be positive, got {rho}")));
    }
    let prec = ctx.working_bits();
    let z = z.clone().with_prec(prec);
    let one = MpComplex::one(prec);
    // |e^{z(e^s−1)}| ≤ e^{|z|(e^ρ−1)} and |φ| is at most of order e^{1/(4ρ)}/ρ on the circle
    let ln_scale = z.abs_f64() * (rho.exp() - 1.0) + 1.0 / (4.0 * rho) - rho.ln().min(0.0) + 2.0;
    let noise = (ln_scale - (ctx.working_bits() as f64 - 8.0) * LN2).exp();
    let rel = ctx.tol();
    let center = MpComplex::zero(prec);
    let radius = ctx.float(rho);
    circle_quadrature_until(
        |s| {
            let e = &(&s.exp() - &one) * &z;
            Ok(&e.exp() * &phi_borel(s, ctx)?)
        },
        &center,
        &radius,
        ctx,
        |new, old| (new - old).abs_f64() <= (rel * new.abs_f64()).max(noise),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_choice() {
        assert_eq!(default_rho(0.0), 1.0);
        assert_eq!(default_rho(0.25), 1.0);
        assert_eq!(default_rho(16.0), 0.25);
    }

    #[test]
    fn phi_at_one() {
        // 2 + Σ (−1)ⁿ n!/(2n)!
        let ctx = PrecisionContext::new(128).unwrap();
        let mut term = 1.0;
        let mut sum = 3.0;
        for n in 1..40 {
            term *= -(n as f64) / ((2 * n) * (2 * n - 1)) as f64;
            sum += term;
        }
        let v = phi_borel(&MpComplex::from_f64(160, 1.0, 0.0), &ctx).unwrap().to_c64();
        assert!((v.re - sum).abs() < 1e-14 && v.im.abs() < 1e-30);
    }
}
