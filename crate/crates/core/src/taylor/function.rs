use std::sync::Arc;

use parking_lot::RwLock;
use rayon::prelude::*;
use rug::Float;

use super::sequence::CoefficientSequence;
use crate::error::{Error, Result};
use crate::mp::{MpComplex, PrecisionContext};

const LN2: f64 = std::f64::consts::LN_2;

/// ln of C·r^{m}/m! · 1/(1 − r/(m+1)), the tail Σ_{n≥m} C rⁿ/n! bound, for m + 1 > r.
fn ln_tail(ln_c: f64, r: f64, m: usize) -> f64 {
    if r == 0.0 {
        return f64::NEG_INFINITY;
    }
    let ln_fact: f64 = (2..=m).map(|k| (k as f64).ln()).sum();
    let q = r / (m as f64 + 1.0);
    ln_c + m as f64 * r.ln() - ln_fact - (1.0 - q).ln()
}

/// Smallest N with N + 2 > 2r and C·r^{N+1}/(N+1)!·(1 − r/(N+2))^{-1} ≤ 2^{−bits−8}.
///
/// The bound dominates |F(z) − Σ_{n≤N} ωₙzⁿ/n!| uniformly on |z| ≤ r when |ωₙ| ≤ C.
pub fn truncation_order(r: f64, precision_bits: u32, c_high: f64) -> usize {
    assert!(r >= 0.0 && r.is_finite(), "truncation radius must be finite and non-negative");
    if r == 0.0 {
        return 0;
    }
    let target = -(precision_bits as f64 + 8.0) * LN2;
    let ln_c = c_high.max(f64::MIN_POSITIVE).ln();
    let ln_r = r.ln();
    let mut n = (2.0 * r - 2.0).floor().max(0.0) as usize;
    while (n + 2) as f64 <= 2.0 * r {
        n += 1;
    }
    // ln((N+1)!) accumulated incrementally
    let mut ln_fact: f64 = (2..=n + 1).map(|k| (k as f64).ln()).sum();
    loop {
        let m = (n + 1) as f64;
        let bound = ln_c + m * ln_r - ln_fact - (1.0 - r / (m + 1.0)).ln();
        if bound <= target {
            return n;
        }
        n += 1;
        ln_fact += ((n + 1) as f64).ln();
    }
}

/// A value together with an a-posteriori bound on its absolute error.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: MpComplex,
    pub error_bound: f64,
    /// Highest power kept in the partial sum.
    pub order: usize,
}

struct CoefCache {
    /// ωₙ/n!
    scaled: Vec<MpComplex>,
    inv_fact: Float,
}

/// F(z) = Σ ωₙ zⁿ/n! evaluated at a fixed working precision.
///
/// The scaled coefficients ωₙ/n! are computed on demand and shared between threads.
pub struct TaylorFunction {
    seq: Arc<CoefficientSequence>,
    ctx: PrecisionContext,
    cache: RwLock<CoefCache>,
}

impl Clone for TaylorFunction {
    fn clone(&self) -> Self {
        let c = self.cache.read();
        TaylorFunction {
            seq: self.seq.clone(),
            ctx: self.ctx,
            cache: RwLock::new(CoefCache {
                scaled: c.scaled.clone(),
                inv_fact: c.inv_fact.clone(),
            }),
        }
    }
}

impl std::fmt::Debug for TaylorFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TaylorFunction")
            .field("seq", &self.seq.spec())
            .field("ctx", &self.ctx)
            .finish()
    }
}

impl TaylorFunction {
    pub fn new(seq: CoefficientSequence, ctx: PrecisionContext) -> Self {
        Self::from_shared(Arc::new(seq), ctx)
    }

    fn from_shared(seq: Arc<CoefficientSequence>, ctx: PrecisionContext) -> Self {
        let prec = ctx.working_bits();
        TaylorFunction {
            seq,
            ctx,
            cache: RwLock::new(CoefCache {
                scaled: Vec::new(),
                inv_fact: Float::with_val(prec, 1),
            }),
        }
    }

    /// Same sequence at another precision (coefficients are recomputed lazily).
    pub fn with_precision(&self, precision_bits: u32) -> Result<Self> {
        if precision_bits == self.ctx.precision_bits {
            return Ok(self.clone());
        }
        let ctx = PrecisionContext::with_guard(precision_bits, self.ctx.guard_bits)?;
        Ok(Self::from_shared(self.seq.clone(), ctx))
    }

    pub fn seq(&self) -> &CoefficientSequence {
        &self.seq
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn prec(&self) -> u32 {
        self.ctx.working_bits()
    }

    fn ensure(&self, upto: usize) -> Result<()> {
        if self.cache.read().scaled.len() > upto {
            return Ok(());
        }
        let prec = self.prec();
        let mut c = self.cache.write();
        while c.scaled.len() <= upto {
            let n = c.scaled.len();
            if n > 0 {
                c.inv_fact /= n as u32;
            }
            let w = self.seq.value(n as u64, prec)?;
            let a = w.scale(&c.inv_fact);
            c.scaled.push(a);
        }
        Ok(())
    }

    /// Runs `f` on the scaled coefficients ω₀/0!, …, ω_N/N!.
    pub fn with_scaled<T>(&self, n: usize, f: impl FnOnce(&[MpComplex]) -> T) -> Result<T> {
        let n = self.clamp_order(n);
        self.ensure(n)?;
        let c = self.cache.read();
        Ok(f(&c.scaled[..=n]))
    }

    /// ωₙ/n! at the working precision.
    pub fn scaled_coefficient(&self, n: usize) -> Result<MpComplex> {
        if let Some(len) = self.seq.len() {
            if n >= len {
                return Ok(MpComplex::zero(self.prec()));
            }
        }
        self.ensure(n)?;
        Ok(self.cache.read().scaled[n].clone())
    }

    fn clamp_order(&self, n: usize) -> usize {
        match self.seq.len() {
            Some(len) => n.min(len - 1),
            None => n,
        }
    }

    /// Sup-norm truncation order for the closed disk of radius r.
    pub fn order_for_radius(&self, r: f64) -> usize {
        let n = truncation_order(r * self.seq.rate, self.ctx.precision_bits, self.seq.c_high);
        self.clamp_order(n)
    }

    fn is_complete(&self, n: usize) -> bool {
        self.seq.len().is_some_and(|len| n + 1 >= len)
    }

    /// ln of the bound on |F| over |z| ≤ r used for rounding estimates.
    fn ln_majorant(&self, r: f64) -> f64 {
        self.seq.c_high.max(f64::MIN_POSITIVE).ln() + r * self.seq.rate
    }

    fn rounding(&self, r: f64, n: usize) -> f64 {
        let ln = ((4 * n + 8) as f64).ln() - self.ctx.working_bits() as f64 * LN2 + self.ln_majorant(r);
        ln.exp()
    }

    fn tail_f(&self, r: f64, n: usize) -> f64 {
        if self.is_complete(n) {
            return 0.0;
        }
        ln_tail(self.seq.c_high.ln(), r * self.seq.rate, n + 1).exp()
    }

    fn tail_df(&self, r: f64, n: usize) -> f64 {
        if self.is_complete(n) {
            return 0.0;
        }
        let ln_c = (self.seq.c_high * self.seq.rate).ln();
        ln_tail(ln_c, r * self.seq.rate, n).exp()
    }

    fn point(&self, z: &MpComplex) -> MpComplex {
        z.clone().with_prec(self.prec())
    }

    fn horner(&self, z: &MpComplex, n: usize, conj: bool) -> Result<MpComplex> {
        let prec = self.prec();
        self.with_scaled(n, |a| {
            let mut scratch = [Float::new(prec), Float::new(prec)];
            let coef = |c: &MpComplex| if conj { c.conj() } else { c.clone() };
            let mut p = coef(&a[a.len() - 1]);
            for c in a.iter().rev().skip(1) {
                p.mul_add_assign(z, &coef(c), &mut scratch);
            }
            p
        })
    }

    /// F(z) to the truncation order of the disk |w| ≤ |z|.
    pub fn eval(&self, z: &MpComplex) -> Result<Evaluation> {
        let z = self.point(z);
        let r = z.abs_f64();
        let n = self.order_for_radius(r);
        let value = self.horner(&z, n, false)?;
        Ok(Evaluation {
            value,
            error_bound: self.tail_f(r, n) + self.rounding(r, n),
            order: n,
        })
    }

    /// F*(z) = conj(F(conj z)), by conjugated coefficients.
    pub fn eval_star(&self, z: &MpComplex) -> Result<Evaluation> {
        let z = self.point(z);
        let r = z.abs_f64();
        let n = self.order_for_radius(r);
        let value = self.horner(&z, n, true)?;
        Ok(Evaluation {
            value,
            error_bound: self.tail_f(r, n) + self.rounding(r, n),
            order: n,
        })
    }

    /// F(z) and F'(z) with the truncation order of the disk of radius `radius` ≥ |z|.
    pub fn eval_pair_on(&self, z: &MpComplex, radius: f64) -> Result<(Evaluation, Evaluation)> {
        let z = self.point(z);
        let r = radius.max(z.abs_f64());
        let n = self.clamp_order(self.order_for_radius(r).max(1));
        let prec = self.prec();
        let (p, d) = self.with_scaled(n, |a| {
            let mut scratch = [Float::new(prec), Float::new(prec)];
            let mut p = a[a.len() - 1].clone();
            let mut d = MpComplex::zero(prec);
            for c in a.iter().rev().skip(1) {
                d.mul_add_assign(&z, &p, &mut scratch);
                p.mul_add_assign(&z, c, &mut scratch);
            }
            (p, d)
        })?;
        let round = self.rounding(r, n);
        Ok((
            Evaluation {
                value: p,
                error_bound: self.tail_f(r, n) + round,
                order: n,
            },
            Evaluation {
                value: d,
                error_bound: self.tail_df(r, n) + round * (n as f64 + 1.0) * self.seq.rate,
                order: n,
            },
        ))
    }

    pub fn eval_with_derivative(&self, z: &MpComplex) -> Result<(Evaluation, Evaluation)> {
        self.eval_pair_on(z, 0.0)
    }

    /// F(z), failing when the error bound swamps the value.
    pub fn eval_relative(&self, z: &MpComplex) -> Result<Evaluation> {
        let e = self.eval(z)?;
        if e.value.abs_f64() <= e.error_bound {
            return Err(Error::Precision {
                bits: self.ctx.precision_bits,
                detail: format!("|F(z)| = {:e} does not exceed its error bound {:e}", e.value.abs_f64(), e.error_bound),
            });
        }
        Ok(e)
    }

    fn log_derivative_from(&self, z: &MpComplex, f: Evaluation, d: Evaluation) -> Result<MpComplex> {
        let modulus = f.value.abs_f64();
        let bound = 16.0 * f.error_bound;
        if modulus <= bound {
            let zc = z.to_c64();
            return Err(Error::ProximityToZero {
                re: zc.re,
                im: zc.im,
                modulus,
                bound,
            });
        }
        Ok(&d.value / &f.value)
    }

    /// F'(z)/F(z).
    pub fn eval_log_derivative(&self, z: &MpComplex) -> Result<MpComplex> {
        let (f, d) = self.eval_with_derivative(z)?;
        self.log_derivative_from(z, f, d)
    }

    /// F'(z)/F(z) with one truncation order shared by the whole disk of radius `radius`.
    pub fn eval_log_derivative_on(&self, z: &MpComplex, radius: f64) -> Result<MpComplex> {
        let (f, d) = self.eval_pair_on(z, radius)?;
        self.log_derivative_from(z, f, d)
    }

    fn ln_abs_at(&self, r: f64, theta: f64) -> Result<f64> {
        let prec = self.prec();
        let t = Float::with_val(prec, theta);
        let z = MpComplex::cis(&t).scale_f64(r);
        let v = self.eval(&z)?.value;
        Ok(Float::with_val(prec, v.norm_sqr().ln()).to_f64() / 2.0)
    }

    /// ln M_F(r) estimated on a 512-point grid refined by golden-section search, with the
    /// maximising angle.
    pub fn log_max_modulus(&self, r: f64) -> Result<(f64, f64)> {
        if r < 0.0 {
            return Err(Error::domain("max_modulus radius must be non-negative"));
        }
        if r == 0.0 {
            let v = self.scaled_coefficient(0)?;
            return Ok((v.abs_f64().ln(), 0.0));
        }
        const GRID: usize = 512;
        let step = std::f64::consts::TAU / GRID as f64;
        let vals: Vec<f64> = (0..GRID)
            .into_par_iter()
            .map(|k| self.ln_abs_at(r, k as f64 * step))
            .collect::<Result<_>>()?;
        let (kbest, &vbest) = vals
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |acc, (k, v)| if *v > *acc.1 { (k, v) } else { acc });
        let (mut lo, mut hi) = ((kbest as f64 - 1.0) * step, (kbest as f64 + 1.0) * step);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let mut f1 = self.ln_abs_at(r, x1)?;
        let mut f2 = self.ln_abs_at(r, x2)?;
        for _ in 0..40 {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = self.ln_abs_at(r, x2)?;
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = self.ln_abs_at(r, x1)?;
            }
        }
        let (best, theta) = [(vbest, kbest as f64 * step), (f1, x1), (f2, x2)]
            .into_iter()
            .fold((f64::NEG_INFINITY, 0.0), |a, b| if b.0 > a.0 { b } else { a });
        Ok((best, theta))
    }

    /// M_F(r) = max_{|z|=r} |F(z)|, a grid estimate from below.
    pub fn max_modulus(&self, r: f64) -> Result<f64> {
        Ok(self.log_max_modulus(r)?.0.exp())
    }

    /// ½·ln Σ |ωₙ|² r^{2n}/(n!)², a lower bound for ln M_F(r).
    pub fn parseval_lower(&self, r: f64) -> Result<f64> {
        if r < 0.0 {
            return Err(Error::domain("parseval_lower radius must be non-negative"));
        }
        let ln_r = r.ln();
        let ln_c2 = 2.0 * self.seq.c_high.ln();
        let ln_rate = self.seq.rate.ln();
        let limit = self.seq.len();
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0f64;
        let mut ln_fact = 0.0f64;
        let mut n = 0usize;
        loop {
            if limit.is_some_and(|l| n >= l) {
                break;
            }
            if n > 0 {
                ln_fact += (n as f64).ln();
            }
            let w = self.seq.value_c64(n as u64)?.norm();
            if w > 0.0 {
                let lift = if n == 0 { 0.0 } else { n as f64 * ln_r };
                let t = 2.0 * (w.ln() + lift - ln_fact);
                if t > max {
                    sum = sum * (max - t).exp() + 1.0;
                    max = t;
                } else {
                    sum += (t - max).exp();
                }
            }
            if r == 0.0 {
                break;
            }
            let envelope = ln_c2 + 2.0 * (n as f64 * (ln_r + ln_rate) - ln_fact);
            if n as f64 > 2.0 * r * self.seq.rate + 2.0 && envelope < max - 60.0 {
                break;
            }
            n += 1;
        }
        Ok(0.5 * (max + sum.ln()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rug::Rational;

    fn ctx(bits: u32) -> PrecisionContext {
        PrecisionContext::new(bits).unwrap()
    }

    fn scan_oracle(r: Rational, bits: u32) -> usize {
        // exact rational scan of the same bound
        let target = Rational::from((1, rug::Integer::from(1) << (bits + 8)));
        let mut n = 0usize;
        loop {
            let m = n + 1;
            if Rational::from(n + 2) > Rational::from(&r * 2u32) {
                let mut term = Rational::from(1);
                for k in 1..=m {
                    term *= &r;
                    term /= k as u32;
                }
                let q = Rational::from(1) - Rational::from(&r / (m as u32 + 1));
                if term / q <= target {
                    return n;
                }
            }
            n += 1;
        }
    }

    #[test]
    fn truncation_examples() {
        assert_eq!(truncation_order(0.0, 128, 1.0), 0);
        let n = truncation_order(1.0, 53, 1.0);
        assert_eq!(n, scan_oracle(Rational::from(1), 53));
        assert_eq!(n, 19);
        assert_eq!(truncation_order(10.0, 128, 1.0), scan_oracle(Rational::from(10), 128));
    }

    #[test]
    fn truncation_monotone() {
        let mut last = 0;
        for k in 0..200 {
            let n = truncation_order(k as f64 * 0.5, 128, 1.0);
            assert!(n >= last);
            last = n;
        }
        let mut last = 0;
        for bits in (64..600).step_by(16) {
            let n = truncation_order(12.0, bits, 1.0);
            assert!(n >= last);
            last = n;
        }
    }

    #[test]
    fn exp_at_one() {
        let f = TaylorFunction::new(CoefficientSequence::ones(), ctx(128));
        let e = f.eval(&MpComplex::one(160)).unwrap();
        assert!((e.value.re.to_f64() - std::f64::consts::E).abs() < 1e-15);
        assert!(e.error_bound < 1e-38);
        let zero = f.eval(&MpComplex::zero(160)).unwrap();
        assert_eq!(zero.value, MpComplex::one(160));
    }

    #[test]
    fn cosine_zero_within_bound() {
        let c = ctx(128);
        let f = TaylorFunction::new(CoefficientSequence::cosine_oracle(), c);
        let half_pi = MpComplex::from_real(c.pi() / 2u32);
        let e = f.eval(&half_pi).unwrap();
        assert!(e.value.abs_f64() <= e.error_bound);
        assert!(matches!(f.eval_log_derivative(&half_pi), Err(Error::ProximityToZero { .. })));
        assert!(matches!(f.eval_relative(&half_pi), Err(Error::Precision { .. })));
        let t = f.eval_log_derivative(&MpComplex::one(160)).unwrap();
        assert!((t.re.to_f64() + 1f64.tan()).abs() < 1e-15);
    }

    #[test]
    fn exp_log_derivative_is_one() {
        let f = TaylorFunction::new(CoefficientSequence::ones(), ctx(128));
        for (x, y) in [(0.0, 0.0), (3.0, -4.0), (-20.0, 7.0)] {
            let v = f.eval_log_derivative(&MpComplex::from_f64(160, x, y)).unwrap();
            assert!((v.to_c64() - Complex64::new(1.0, 0.0)).norm() < 1e-30);
        }
    }

    #[test]
    fn max_modulus_examples() {
        let f = TaylorFunction::new(CoefficientSequence::ones(), ctx(128));
        let m = f.max_modulus(5.0).unwrap();
        assert!((m / 5f64.exp() - 1.0).abs() < 1e-6);
        let q = TaylorFunction::new(CoefficientSequence::quadratic_beta(1, 2), ctx(128));
        let m = q.max_modulus(5.0).unwrap();
        assert!((m / 5f64.exp() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn parseval_examples() {
        let c = ctx(128);
        let f = TaylorFunction::new(CoefficientSequence::ones(), c);
        assert_eq!(f.parseval_lower(0.0).unwrap(), 0.0);
        let i0 = crate::mp::bessel_i_f64(0, 20.0, &c);
        assert!((f.parseval_lower(10.0).unwrap() - 0.5 * i0.ln()).abs() < 1e-12);
    }

    #[test]
    fn explicit_polynomial() {
        // 1 + z: coefficients ω₀ = 1, ω₁ = 1
        let p = CoefficientSequence::explicit(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
        let f = TaylorFunction::new(p, ctx(128));
        let e = f.eval(&MpComplex::from_f64(160, 3.0, 0.0)).unwrap();
        assert_eq!(e.value.re.to_f64(), 4.0);
        assert_eq!(e.order, 1);
    }
}
