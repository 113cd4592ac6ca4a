//! Genus-one factorization data over a disk and the angular quantities built from it.

mod angular;
mod data;
mod model;

pub use angular::{
    g_r_eval, g_r_profile, harmonic_measure_slit, killing_term, profile_table, s_theta, theta_star, v_r_boundary_scan,
    v_r_eval, ProfilePoint,
};
pub use data::{
    a_r_estimate, factorization_residual, h_r_eval, log_abs_pi_r, pi_r_eval, residual_grid, HadamardData, PowerSum,
    DEFAULT_DELTA, DEFAULT_J_MAX,
};
pub use model::{claim1_envelope, power_sums, ZeroFamily, ZeroModel, ZeroTail};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::PrecisionContext;
    use crate::taylor::{CoefficientSequence, TaylorFunction};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cosine_data(r: f64, a: f64) -> HadamardData {
        HadamardData::new(ZeroModel::from_family(ZeroFamily::cosine(), r).unwrap(), c(a, 0.0), DEFAULT_J_MAX).unwrap()
    }

    #[test]
    fn empty_tail() {
        let model = ZeroModel::unmodeled(vec![], 0.0, 10.0).unwrap();
        let sums = power_sums(&model, 10).unwrap();
        assert!(sums.iter().all(|(v, e)| *v == c(0.0, 0.0) && *e == 0.0));
        let data = HadamardData::new(model.clone(), c(1.0, 0.0), 10).unwrap();
        assert_eq!(h_r_eval(c(2.0, 1.0), &data).unwrap().0, c(0.0, 0.0));
        assert_eq!(pi_r_eval(c(3.0, -1.0), &model), c(1.0, 0.0));
        assert_abs_diff_eq!(s_theta(3.0, 0.4, &data).unwrap(), 3.0 * 0.4f64.cos(), epsilon = 1e-15);
        assert_eq!(theta_star(2.0, &data).unwrap(), 0.0);
        for r in [0.5, 1.0, 4.0] {
            assert_eq!(g_r_eval(r, &data).unwrap().0, 0.0);
        }
        assert!(power_sums(&model, 1).is_err());
    }

    #[test]
    fn cosine_power_sum() {
        let model = ZeroModel::from_family(ZeroFamily::cosine(), 10.0).unwrap();
        let sums = power_sums(&model, 5).unwrap();
        // independent direct summation to 10⁷ terms agrees to about 2·10⁻⁸
        assert_abs_diff_eq!(sums[0].0.re, 0.06694445748275106, epsilon = 1e-7);
        assert_eq!(sums[1].0, c(0.0, 0.0));
        assert_eq!(model.inside.len(), 6);
        assert!(sums[0].1 < 1e-14);
    }

    #[test]
    fn h_r_domain() {
        let data = cosine_data(10.0, 0.0);
        assert!(h_r_eval(c(5.1, 0.0), &data).is_err());
    }

    #[test]
    fn pi_r_at_origin() {
        let model = ZeroModel::from_family(ZeroFamily::cosine(), 30.0).unwrap();
        assert_eq!(pi_r_eval(c(0.0, 0.0), &model), c(1.0, 0.0));
        let bound = model.inside.len() as f64 * (3.0f64 * 10.0).ln();
        let m10 = ZeroModel::from_family(ZeroFamily::cosine(), 10.0).unwrap();
        assert!(log_abs_pi_r(c(0.0, 5.0), &m10) <= m10.inside.len() as f64 * 30f64.ln());
        assert!(bound > 0.0);
    }

    #[test]
    fn a_r_examples() {
        let ctx = PrecisionContext::new(128).unwrap();
        let ones = TaylorFunction::new(CoefficientSequence::ones(), ctx);
        let none = ZeroModel::unmodeled(vec![], 1.0, 10.0).unwrap();
        assert_eq!(a_r_estimate(&ones, &none).unwrap(), c(1.0, 0.0));
        let cosf = TaylorFunction::new(CoefficientSequence::cosine_oracle(), ctx);
        let cm = ZeroModel::from_family(ZeroFamily::cosine(), 20.0).unwrap();
        assert!(a_r_estimate(&cosf, &cm).unwrap().norm() < 1e-15);
        let expm1 = TaylorFunction::new(CoefficientSequence::expm1_oracle(), ctx);
        assert!(matches!(a_r_estimate(&expm1, &none), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn rotation_makes_a_positive() {
        let data = HadamardData::new(
            ZeroModel::from_family(ZeroFamily::power(0.5, 1.0).unwrap(), 100.0).unwrap(),
            Complex64::from_polar(2.0, 0.7),
            12,
        )
        .unwrap();
        let rot = data.rotated();
        assert_abs_diff_eq!(rot.a_r.re, 2.0, epsilon = 1e-15);
        assert_eq!(rot.a_r.im, 0.0);
        // max over the circle is rotation invariant
        let r = 7.0;
        let direct = (0..3600)
            .map(|k| {
                let z = Complex64::from_polar(r, k as f64 * std::f64::consts::PI / 1800.0);
                (data.a_r * z + h_r_eval(z, &data).unwrap().0).re
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let g = g_r_eval(r, &data).unwrap().0 + r;
        assert!((g - direct).abs() < 1e-5 && g >= direct - 1e-12);
    }

    #[test]
    fn theta_star_needs_positive_a() {
        let data = cosine_data(20.0, 0.0);
        assert!(matches!(theta_star(3.0, &data), Err(crate::Error::Domain(_))));
        assert!(theta_star(19.0, &cosine_data(20.0, 1.0)).is_err());
    }

    #[test]
    fn harmonic_measure_examples() {
        assert_eq!(harmonic_measure_slit(c(0.3, 0.0)).unwrap(), 0.0);
        assert_abs_diff_eq!(harmonic_measure_slit(c(-0.25, 0.0)).unwrap(), 0.59033, epsilon = 1e-5);
        assert_abs_diff_eq!(
            harmonic_measure_slit(c(-0.25, 0.0)).unwrap(),
            4.0 / std::f64::consts::PI * 0.5f64.atan(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(harmonic_measure_slit(c(0.0, 1.0)).unwrap(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(harmonic_measure_slit(c(0.0, -1.0)).unwrap(), 1.0, epsilon = 1e-10);
        assert!(harmonic_measure_slit(c(1.0, 0.0)).is_err());
        assert!(harmonic_measure_slit(c(1.5, 0.0)).is_err());
    }

    #[test]
    fn v_r_without_zeros_is_negative() {
        let model = ZeroModel::unmodeled(vec![], 1.0, 20.0).unwrap();
        for k in 0..36 {
            let z = Complex64::from_polar(1.0 + k as f64, -3.1 + 0.17 * k as f64);
            assert!(v_r_eval(z, 0.5, 0.45, &model).unwrap() < 0.0);
        }
        assert!(v_r_eval(c(1.0, 1.0), 0.5, 0.6, &model).is_err());
        let with_zero = ZeroModel::unmodeled(vec![c(2.0, 0.0)], 1.0, 20.0).unwrap();
        assert_eq!(v_r_eval(c(2.0, 0.0), 0.5, 0.3, &with_zero).unwrap(), f64::NEG_INFINITY);
    }
}
