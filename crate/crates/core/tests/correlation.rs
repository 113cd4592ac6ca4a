use efetlab_core::correlation::{
    corr_contour, corr_series, interp_table, pi_h_product, ratio_diagnostics, Interpolator, SemiDisk,
};
use efetlab_core::{CoefficientSequence, MpComplex, PrecisionContext, TaylorFunction};
use num_complex::Complex64;
use proptest::prelude::*;
use rug::Float;

fn func(seq: CoefficientSequence, bits: u32) -> TaylorFunction {
    TaylorFunction::new(seq, PrecisionContext::new(bits).unwrap())
}

/// g_h(λ) for ω ≡ 1 and real λ by termwise integration:
/// Γ(λ+1)Γ(λ+h+1) Σ ρ^{m−λ} sinc((m−λ)π)/(m!(m+h)!).
fn ones_oracle(h: u32, lambda: f64, r: f64, prec: u32) -> f64 {
    let kappa = (h / 2) as f64 + 0.5;
    let rho = Float::with_val(prec, r - kappa).square();
    let lam = Float::with_val(prec, lambda);
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    let mut sum = Float::new(prec);
    let mut fact_m = Float::with_val(prec, 1);
    let mut fact_mh = Float::with_val(prec, 1);
    for k in 1..=h {
        fact_mh *= k;
    }
    for m in 0..400u32 {
        if m > 0 {
            fact_m *= m;
            fact_mh *= m + h;
        }
        let x = Float::with_val(prec, m) - &lam;
        let px = Float::with_val(prec, &x * &pi);
        let sinc = Float::with_val(prec, px.sin_ref()) / &px;
        let pow = Float::with_val(prec, (&rho).pow(&x));
        sum += pow * sinc / &fact_m / &fact_mh;
    }
    let g1 = Float::with_val(prec, &lam + 1u32).gamma();
    let g2 = Float::with_val(prec, &lam + (h + 1)).gamma();
    (sum * g1 * g2).to_f64()
}

use rug::ops::Pow;

#[test]
fn interpolation_matches_termwise_oracle() {
    for (h, lambda, r) in [(0u32, 2.5, 12.0), (1, 3.25, 12.0), (4, 1.7, 15.0)] {
        let f = func(CoefficientSequence::ones(), 128);
        let interp = Interpolator::new(&f, h as usize, r).unwrap();
        let g = interp.eval_c64(Complex64::new(lambda, 0.0)).unwrap();
        let expect = ones_oracle(h, lambda, r, 256);
        assert!((g.re - expect).abs() < 1e-12 * expect.abs(), "h={h} λ={lambda}: {g} vs {expect}");
        assert!(g.im.abs() < 1e-12 * expect.abs());
    }
}

#[test]
fn interpolation_reproduces_integers() {
    for seq in [CoefficientSequence::quadratic_beta(1, 5), CoefficientSequence::random_unimodular(7)] {
        let f = func(seq, 256);
        let table = interp_table(&f, &[0, 1, 5], 25, 40.0).unwrap();
        let worst = table
            .column("abs_deviation")
            .unwrap()
            .iter()
            .map(|s| s.parse::<f64>().unwrap())
            .fold(0.0, f64::max);
        assert!(worst < 1e-12, "{}: {worst}", f.seq().kind_name());
        assert_eq!(table.rows.len(), 3 * 26);
    }
}

#[test]
fn interpolation_improves_with_precision() {
    let dev = |bits: u32| {
        let f = func(CoefficientSequence::random_unimodular(7), bits);
        let interp = Interpolator::new(&f, 2, 30.0).unwrap();
        let g = interp.eval_c64(Complex64::new(9.0, 0.0)).unwrap();
        let w = f.seq().value_c64(9).unwrap() * f.seq().value_c64(11).unwrap().conj();
        (g - w).norm()
    };
    assert!(dev(256) <= dev(128).max(1e-30));
    assert!(dev(256) < 1e-14);
}

#[test]
fn quadratic_interpolant_is_log_linear() {
    let f = func(CoefficientSequence::quadratic_beta(1, 5), 128);
    let interp = Interpolator::new(&f, 1, 40.0).unwrap();
    let d = ratio_diagnostics(|s| interp.eval_c64(Complex64::new(s, 0.0)), 5.0, 15.0).unwrap();
    assert!(d.d3 < 1e-3, "{d:?}");
    assert!(d.d1 < 1e-10);
}

#[test]
fn contour_and_series_agree_across_catalogue() {
    let points = [(0.7, 0.0), (-1.5, 2.0), (0.0, -3.2), (3.0, 3.9)];
    for (name, seq) in CoefficientSequence::catalogue() {
        let f = func(seq, 128);
        for h in [0usize, 3, 10] {
            for (re, im) in points {
                let z = MpComplex::from_f64(128, re, im);
                let a = corr_series(&f, h, &z).unwrap();
                let b = corr_contour(&f, h, &z).unwrap();
                let diff = (&a.value - &b.value).abs_f64();
                assert!(
                    diff <= 10.0 * (a.error_bound + b.error_bound),
                    "{name} h={h} z={re}+{im}i: diff {diff:e}, bounds {:e} {:e}",
                    a.error_bound,
                    b.error_bound
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn correlation_envelope(r in 1.0f64..30.0, theta in -3.2f64..3.2, h in 0usize..=6) {
        let f = func(CoefficientSequence::ones(), 128);
        let z = MpComplex::from_c64(128, Complex64::from_polar(r, theta));
        let v = corr_series(&f, h, &z).unwrap().value.abs_f64();
        let bound = (-(h as f64) * r.ln() + 2.0 * r * theta.cos().abs() + 0.01 * 30.0).exp();
        prop_assert!(v <= bound, "|F_h| = {v}, bound {bound}");
    }

    #[test]
    fn pi_product_on_arc(r in 10.0f64..200.0, frac in 0.0f64..=0.5, phi in -1.5708f64..1.5708) {
        let h = (frac * r).floor() as u32;
        let d = SemiDisk::new(h, r);
        let s = Complex64::from_polar(d.radius(), phi);
        let p = pi_h_product(s, h).unwrap().norm();
        prop_assert!(p <= (2.0 * (h as f64).powi(2) / d.radius()).exp());
    }

    #[test]
    fn pi_product_unimodular_on_axis(t in -50.0f64..50.0, h in 0u32..20) {
        let p = pi_h_product(Complex64::new(0.0, t), h).unwrap();
        prop_assert!((p.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn integers_lie_in_semi_disk(h in 0u32..20, r in 5.0f64..100.0) {
        let d = SemiDisk::new(h, r);
        let mut n = 0.0;
        while n + d.kappa < d.radius() {
            prop_assert!(d.contains(Complex64::new(n, 0.0)));
            n += 1.0;
        }
    }
}
