//! Self-correlation transforms and their analytic interpolation.

mod diagnostics;
mod interp;
mod transform;

pub use diagnostics::{k_phi, k_phi_grid_max, pi_h_product, quadratic_ratio_check, ratio_diagnostics, RatioDiagnostics};
pub use interp::{interp_g, interp_table, InterpValue, Interpolator, SemiDisk};
pub use transform::{corr_contour, corr_series, corr_sharp, SharpSeries};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::{bessel_i_f64, MpComplex, PrecisionContext};
    use crate::taylor::{CoefficientSequence, Ratio, TaylorFunction};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn func(seq: CoefficientSequence, bits: u32) -> TaylorFunction {
        TaylorFunction::new(seq, PrecisionContext::new(bits).unwrap())
    }

    fn c(re: f64, im: f64) -> MpComplex {
        MpComplex::from_f64(128, re, im)
    }

    #[test]
    fn bessel_values() {
        let f = func(CoefficientSequence::ones(), 128);
        let ctx = PrecisionContext::new(128).unwrap();
        let v = corr_series(&f, 0, &c(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(v.value.to_c64().re, 2.2795853023360673, epsilon = 1e-14);
        let v = corr_sharp(&f, 0, &c(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(v.value.to_c64().re, bessel_i_f64(0, 2.0, &ctx), epsilon = 1e-14);
        // Σ 4ⁿ/(n!(n+1)!) = I₁(4)/2
        let v = corr_series(&f, 1, &c(2.0, 0.0)).unwrap();
        assert_abs_diff_eq!(v.value.to_c64().re, bessel_i_f64(1, 4.0, &ctx) / 2.0, epsilon = 1e-12);
        // Σ 4ⁿ/(n!(n+2)!) = I₂(4)/4
        let v = corr_sharp(&f, 2, &c(4.0, 0.0)).unwrap();
        assert_abs_diff_eq!(v.value.to_c64().re, bessel_i_f64(2, 4.0, &ctx) / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn origin_keeps_first_term() {
        let f = func(CoefficientSequence::random_unimodular(3), 128);
        let v = corr_series(&f, 5, &c(0.0, 0.0)).unwrap().value.to_c64();
        let w0 = f.seq().value_c64(0).unwrap();
        let w5 = f.seq().value_c64(5).unwrap();
        let expect = w0 * w5.conj() / 120.0;
        assert!((v - expect).norm() < 1e-15);
    }

    #[test]
    fn sharp_is_series_at_square() {
        let f = func(CoefficientSequence::quadratic_beta(1, 5), 128);
        for z in [0.5, 1.3, 3.0] {
            let z = c(z, 0.0);
            let a = corr_series(&f, 3, &z).unwrap().value;
            let b = corr_sharp(&f, 3, &(&z * &z)).unwrap().value;
            assert!((&a - &b).abs_f64() < 1e-30 * a.abs_f64().max(1.0));
        }
    }

    #[test]
    fn contour_matches_series() {
        let cases = [
            (CoefficientSequence::ones(), 1, c(2.0, 0.0)),
            (CoefficientSequence::random_unimodular(1), 3, c(1.0, 1.0)),
        ];
        for (seq, h, z) in cases {
            let f = func(seq, 128);
            let a = corr_series(&f, h, &z).unwrap();
            let b = corr_contour(&f, h, &z).unwrap();
            let tol = 10.0 * f.ctx().tol() * a.value.abs_f64().max(1.0);
            assert!((&a.value - &b.value).abs_f64() < tol, "h = {h}");
        }
    }

    #[test]
    fn contour_rejects_origin() {
        let f = func(CoefficientSequence::ones(), 128);
        assert!(matches!(corr_contour(&f, 3, &c(0.0, 0.0)), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn semi_disk_membership() {
        let d = SemiDisk::new(5, 40.0);
        assert_eq!(d.kappa, 2.5);
        assert!(d.contains(Complex64::new(0.0, 0.0)));
        assert!(d.contains(Complex64::new(-2.4, 0.0)));
        assert!(!d.contains(Complex64::new(-2.6, 0.0)));
        assert!(!d.contains(Complex64::new(35.0, 0.0)));
        for n in 0..100 {
            if n as f64 + d.kappa < d.radius() {
                assert!(d.contains(Complex64::new(n as f64, 0.0)));
            }
        }
    }

    #[test]
    fn interp_reproduces_ones() {
        let f = func(CoefficientSequence::ones(), 256);
        let g = interp_g(&f, 0, &MpComplex::from_f64(256, 5.0, 0.0), 40.0).unwrap();
        assert!((g.to_c64() - 1.0).norm() < 1e-10);
    }

    #[test]
    fn interp_quadratic_fifth() {
        let f = func(CoefficientSequence::quadratic_beta(1, 5), 256);
        let g = interp_g(&f, 1, &MpComplex::from_f64(256, 3.0, 0.0), 40.0).unwrap().to_c64();
        let expect = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (9.0 - 16.0) / 5.0);
        assert!((g - expect).norm() < 1e-12);
        assert_abs_diff_eq!(g.re, -0.80902, epsilon = 1e-5);
        assert_abs_diff_eq!(g.im, -0.58779, epsilon = 1e-5);
    }

    #[test]
    fn interp_guards() {
        let f = func(CoefficientSequence::ones(), 128);
        let at = |l: f64| interp_g(&f, 2, &MpComplex::from_f64(128, l, 0.0), 40.0);
        assert!(matches!(at(-3.0), Err(crate::Error::Domain(_))));
        assert!(matches!(at(-2.0), Err(crate::Error::Domain(_))));
        // λ = 0 loses over a hundred bits to cancellation at R = 40
        assert!(matches!(
            interp_g(&f, 0, &MpComplex::from_f64(128, 0.0, 0.0), 40.0),
            Err(crate::Error::Precision { .. })
        ));
        assert!(Interpolator::new(&f, 0, 1.2).is_err());
    }

    #[test]
    fn pi_product() {
        assert_eq!(pi_h_product(Complex64::new(3.0, 1.0), 0).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(pi_h_product(Complex64::new(3.0, 1.0), 1).unwrap(), Complex64::new(1.0, 0.0));
        for t in [-5.0, -0.3, 0.0, 0.7, 12.0] {
            let p = pi_h_product(Complex64::new(0.0, t), 8).unwrap();
            assert_abs_diff_eq!(p.norm(), 1.0, epsilon = 1e-14);
        }
        assert!(pi_h_product(Complex64::new(0.5, 0.0), 2).is_err());
    }

    #[test]
    fn k_values() {
        assert_eq!(k_phi(0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(k_phi(std::f64::consts::FRAC_PI_2).unwrap(), 1.5707963, epsilon = 1e-7);
        assert!(k_phi(2.0).is_err());
        assert_abs_diff_eq!(k_phi_grid_max(0.7, 1e-4), 2.0 * k_phi(0.7).unwrap(), epsilon = 1e-6);
    }

    #[test]
    fn diagnostics_examples() {
        let d = ratio_diagnostics(|_| Ok(Complex64::new(1.0, 0.0)), 0.0, 10.0).unwrap();
        assert_eq!((d.d1, d.d2, d.d3), (0.0, 0.0, 0.0));
        let d = ratio_diagnostics(|s| Ok(Complex64::from_polar(1.0, s / 10.0)), 0.0, 10.0).unwrap();
        assert!(d.d1 < 1e-15);
        assert_abs_diff_eq!(d.d2, 0.09996, epsilon = 1e-5);
        assert!(d.d3 < 1e-14);
        assert!(ratio_diagnostics(|s| Ok(Complex64::new(s, 0.0)), 0.0, 3.0).is_err());
    }

    #[test]
    fn quadratic_ratio() {
        let ctx = PrecisionContext::new(128).unwrap();
        let z = Ratio::ZERO;
        let tol = ctx.tol();
        assert_eq!(quadratic_ratio_check(z, z, z, 2, 0..=50, &ctx).unwrap(), 0.0);
        let q = Ratio::new(1, 4).unwrap();
        assert!(quadratic_ratio_check(q, Ratio::new(1, 3).unwrap(), z, 1, 0..=50, &ctx).unwrap() < 10.0 * tol);
        let h = Ratio::new(1, 2).unwrap();
        assert!(quadratic_ratio_check(h, Ratio::new(2, 7).unwrap(), z, 3, 0..=50, &ctx).unwrap() < 10.0 * tol);
        assert!(quadratic_ratio_check(q, z, z, 0, 0..=5, &ctx).is_err());
    }
}
