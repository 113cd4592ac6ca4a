use rug::Float;

use crate::error::{Error, Result};
use crate::mp::{circle_quadrature_adaptive, MpComplex, PrecisionContext};
use crate::taylor::{Evaluation, TaylorFunction};

const LN2: f64 = std::f64::consts::LN_2;

/// Coefficients bₙ = ωₙ ω̄_{n+h}/(n!(n+h)!) of F_h^♯ up to a fixed order.
#[derive(Debug, Clone)]
pub struct SharpSeries {
    pub h: usize,
    coeffs: Vec<MpComplex>,
    /// ln of Σ |bₙ|-majorant terms at the design radius, for rounding estimates.
    ln_majorant: f64,
    tail: f64,
    ctx: PrecisionContext,
}

/// ln of C²ρ^{2n+h} r^n/(n!(n+h)!).
fn ln_major_term(ln_c2: f64, ln_rate: f64, ln_r: f64, n: usize, h: usize, ln_fact: &[f64]) -> f64 {
    let lr = if n == 0 { 0.0 } else { n as f64 * ln_r };
    ln_c2 + (2 * n + h) as f64 * ln_rate + lr - ln_fact[n] - ln_fact[n + h]
}

fn ln_factorials(upto: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(upto + 1);
    let mut acc = 0.0;
    v.push(0.0);
    for k in 1..=upto {
        acc += (k as f64).ln();
        v.push(acc);
    }
    v
}

impl SharpSeries {
    /// Series truncated for |w| ≤ r with tail below 2^{-p-8} times the majorant sum.
    pub fn new(f: &TaylorFunction, h: usize, r: f64) -> Result<Self> {
        let ctx = *f.ctx();
        let seq = f.seq();
        let ln_c2 = 2.0 * seq.c_high.max(f64::MIN_POSITIVE).ln();
        let ln_rate = seq.rate.ln();
        let ln_r = if r > 0.0 { r.ln() } else { f64::NEG_INFINITY };
        let target = -(ctx.precision_bits as f64 + 8.0) * LN2;
        let cap = seq.len().map(|l| l.saturating_sub(h));
        let mut ln_fact = ln_factorials(64 + h);
        let mut n = 0usize;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        let (order, tail) = loop {
            if cap == Some(n) {
                break (n, 0.0);
            }
            while ln_fact.len() <= n + h + 1 {
                let k = ln_fact.len();
                ln_fact.push(ln_fact[k - 1] + (k as f64).ln());
            }
            let t = ln_major_term(ln_c2, ln_rate, ln_r, n, h, &ln_fact);
            if t > max {
                sum = sum * (max - t).exp() + 1.0;
                max = t;
            } else {
                sum += (t - max).exp();
            }
            if r == 0.0 {
                break (n + 1, 0.0);
            }
            // next term and the geometric ratio that bounds everything after it
            let q = (r * seq.rate * seq.rate) / ((n + 2) as f64 * (n + h + 2) as f64);
            if q < 0.5 {
                let next = ln_major_term(ln_c2, ln_rate, ln_r, n + 1, h, &ln_fact) - (1.0 - q).ln();
                let ln_total = max + sum.ln();
                if next - ln_total <= target {
                    break (n + 1, next.exp());
                }
            }
            n += 1;
        };
        let ln_majorant = max + sum.ln();
        let prec = f.prec();
        let coeffs = if order == 0 {
            Vec::new()
        } else {
            f.with_scaled(order - 1 + h, |a| {
                (0..order)
                    .map(|k| {
                        if k + h < a.len() {
                            &a[k] * &a[k + h].conj()
                        } else {
                            MpComplex::zero(prec)
                        }
                    })
                    .collect()
            })?
        };
        Ok(SharpSeries {
            h,
            coeffs,
            ln_majorant,
            tail,
            ctx,
        })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficient(&self, n: usize) -> Option<&MpComplex> {
        self.coeffs.get(n)
    }

    /// Absolute error bound for points inside the design radius.
    pub fn error_bound(&self) -> f64 {
        let n = self.coeffs.len() as f64;
        let round = ((4.0 * n + 8.0).ln() - self.ctx.working_bits() as f64 * LN2 + self.ln_majorant).exp();
        self.tail + round
    }

    pub fn ln_majorant(&self) -> f64 {
        self.ln_majorant
    }

    pub fn eval(&self, w: &MpComplex) -> MpComplex {
        let prec = self.ctx.working_bits();
        let w = w.clone().with_prec(prec);
        let Some(top) = self.coeffs.last() else {
            return MpComplex::zero(prec);
        };
        let mut scratch = [Float::new(prec), Float::new(prec)];
        let mut p = top.clone();
        for c in self.coeffs.iter().rev().skip(1) {
            p.mul_add_assign(&w, c, &mut scratch);
        }
        p
    }
}

/// F_h^♯(w) = Σ ωₙ ω̄_{n+h} wⁿ/(n!(n+h)!).
pub fn corr_sharp(f: &TaylorFunction, h: usize, w: &MpComplex) -> Result<Evaluation> {
    let s = SharpSeries::new(f, h, w.abs_f64())?;
    Ok(Evaluation {
        value: s.eval(w),
        error_bound: s.error_bound(),
        order: s.order(),
    })
}

/// F_h(z) = Σ ωₙ ω̄_{n+h} z^{2n}/(n!(n+h)!), evaluated as F_h^♯(z²).
pub fn corr_series(f: &TaylorFunction, h: usize, z: &MpComplex) -> Result<Evaluation> {
    let z = z.clone().with_prec(f.prec());
    corr_sharp(f, h, &(&z * &z))
}

/// F_h(z) as the unit-circle integral (1/2πi)∮ F(sz) F*(s̄z) (s/z)^h ds/s.
pub fn corr_contour(f: &TaylorFunction, h: usize, z: &MpComplex) -> Result<Evaluation> {
    let ctx = *f.ctx();
    let prec = f.prec();
    let z = z.clone().with_prec(prec);
    if z.is_zero() {
        if h > 0 {
            return Err(Error::domain("corr_contour needs z ≠ 0 when h > 0"));
        }
        let a0 = f.scaled_coefficient(0)?;
        return Ok(Evaluation {
            value: &a0 * &a0.conj(),
            error_bound: 0.0,
            order: 0,
        });
    }
    let r = z.abs_f64();
    let z_inv_h = z.recip().powi(h as i64);
    let seq = f.seq();
    let ln_scale = 2.0 * (seq.c_high.ln() + seq.rate * r) - h as f64 * r.ln();
    let tol = (ln_scale - ctx.precision_bits as f64 * LN2).exp() * 16.0;
    let center = MpComplex::zero(prec);
    let one = Float::with_val(prec, 1);
    let est = circle_quadrature_adaptive(
        |s| {
            let a = f.eval(&(s * &z))?;
            let b = f.eval_star(&(&s.conj() * &z))?;
            let sh = s.powi(h as i64);
            let v = &(&(&a.value * &b.value) * &sh) * &z_inv_h;
            Ok(&v / s)
        },
        &center,
        &one,
        tol,
        &ctx,
    )
    .map_err(|e| match e {
        Error::Convergence { what, last_estimate, gap } => Error::Convergence {
            what: format!("corr_contour: {what}"),
            last_estimate,
            gap,
        },
        other => other,
    })?;
    // each factor is bounded by C e^{ρ r}; evaluation errors enter linearly
    let probe = f.eval(&z)?;
    let major = (seq.c_high.ln() + seq.rate * r).exp();
    let eval_bound = 2.0 * probe.error_bound * major * (-(h as f64) * r.ln()).exp();
    Ok(Evaluation {
        value: est.value,
        error_bound: est.gap + eval_bound,
        order: est.nodes,
    })
}
