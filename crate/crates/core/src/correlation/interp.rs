use std::sync::Arc;

use num_complex::Complex64;
use parking_lot::Mutex;
use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use super::transform::SharpSeries;
use crate::error::{Error, Result};
use crate::mp::{gauss_legendre, log_gamma, MpComplex, PrecisionContext};
use crate::table::{fmt_f64, Table};
use crate::taylor::TaylorFunction;

const START_PANELS: usize = 8;
const MAX_PANELS: usize = 1 << 10;
/// Reliable bits of the vertical-segment integral below which interpolation gives up.
const MIN_RELIABLE_BITS: f64 = 53.0;

/// The shifted semi-disk Ω_h = {Re λ > −κ, |λ + κ| < R − κ} with κ = ⌊h/2⌋ + ½.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiDisk {
    pub h: u32,
    pub kappa: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

impl SemiDisk {
    pub fn new(h: u32, r: f64) -> Self {
        SemiDisk {
            h,
            kappa: (h / 2) as f64 + 0.5,
            r,
        }
    }

    /// R_h = R − κ.
    pub fn radius(&self) -> f64 {
        self.r - self.kappa
    }

    pub fn contains(&self, lambda: Complex64) -> bool {
        lambda.re > -self.kappa && (lambda + self.kappa).norm() < self.radius()
    }
}

struct Level {
    t: Vec<Float>,
    weights: Vec<Float>,
    samples: Vec<MpComplex>,
}

/// Evaluates g_h(λ) for many λ with one set of F_h^♯ samples on the vertical segment.
pub struct Interpolator {
    h: usize,
    disk: SemiDisk,
    ctx: PrecisionContext,
    ln_rho: Float,
    sharp: SharpSeries,
    levels: Mutex<Vec<Arc<Level>>>,
}

/// g_h(λ) with the diagnostics of the segment integral behind it.
#[derive(Debug, Clone)]
pub struct InterpValue {
    pub value: MpComplex,
    /// Estimated relative error of the segment integral.
    pub relative_error: f64,
    /// Bits lost to cancellation in the segment integral.
    pub cancellation_bits: f64,
    pub nodes: usize,
}

impl Interpolator {
    pub fn new(f: &TaylorFunction, h: usize, r: f64) -> Result<Self> {
        let disk = SemiDisk::new(h as u32, r);
        if !(disk.radius() > 1.0) {
            return Err(Error::domain(format!("interpolation needs R − κ > 1, got R = {r}, h = {h}")));
        }
        if h as f64 > r {
            return Err(Error::domain(format!("interpolation needs h ≤ R, got h = {h}, R = {r}")));
        }
        let ctx = *f.ctx();
        let rho = disk.radius() * disk.radius();
        let ln_rho = Float::with_val(ctx.working_bits(), disk.radius()).ln() * 2u32;
        let sharp = SharpSeries::new(f, h, rho)?;
        Ok(Interpolator {
            h,
            disk,
            ctx,
            ln_rho,
            sharp,
            levels: Mutex::new(Vec::new()),
        })
    }

    pub fn disk(&self) -> SemiDisk {
        self.disk
    }

    fn level(&self, k: usize) -> Arc<Level> {
        for i in 0..=k {
            if self.levels.lock().len() > i {
                continue;
            }
            // built outside the lock: rayon may run another evaluation on this thread meanwhile
            let level = Arc::new(self.build_level(i));
            let mut levels = self.levels.lock();
            if levels.len() == i {
                levels.push(level);
            }
        }
        self.levels.lock()[k].clone()
    }

    fn build_level(&self, k: usize) -> Level {
        let prec = self.ctx.working_bits();
        let panels = START_PANELS << k;
        let rule = gauss_legendre(((self.ctx.precision_bits / 8) as usize).max(16), prec);
        let pi = Float::with_val(prec, rug::float::Constant::Pi);
        let width = Float::with_val(prec, &pi * 2u32) / panels as u32;
        let half = Float::with_val(prec, &width / 2u32);
        let mut t = Vec::with_capacity(panels * rule.len());
        let mut weights = Vec::with_capacity(panels * rule.len());
        for p in 0..panels {
            let mid = Float::with_val(prec, &width * p as u32) - &pi + &half;
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                t.push(Float::with_val(prec, &half * x) + &mid);
                weights.push(Float::with_val(prec, &half * w));
            }
        }
        let rho = Float::with_val(prec, self.ln_rho.exp_ref());
        let samples = t
            .par_iter()
            .map(|ti| self.sharp.eval(&MpComplex::cis(ti).scale(&rho)))
            .collect();
        Level { t, weights, samples }
    }

    /// (1/2π)∫_{−π}^{π} F_h^♯(ρe^{it}) e^{−iλt} dt with ρ = (R−κ)², plus the sample sup.
    fn segment(&self, level: &Level, lambda: &MpComplex) -> (MpComplex, f64) {
        let prec = self.ctx.working_bits();
        let minus_i_lambda = MpComplex::from_parts(lambda.im.clone(), Float::with_val(prec, -&lambda.re));
        let terms: Vec<MpComplex> = (0..level.t.len())
            .into_par_iter()
            .map(|j| {
                let e = minus_i_lambda.scale(&level.t[j]).exp();
                (&level.samples[j] * &e).scale(&level.weights[j])
            })
            .collect();
        let mut acc = MpComplex::zero(prec);
        let mut sup = 0.0f64;
        for (v, s) in terms.iter().zip(&level.samples) {
            acc += v;
            sup = sup.max(s.abs_f64());
        }
        let two_pi = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
        (acc.scale(&two_pi.recip()), sup)
    }

    pub fn eval_detailed(&self, lambda: &MpComplex) -> Result<InterpValue> {
        let prec = self.ctx.working_bits();
        let lambda = lambda.clone().with_prec(prec);
        let h = self.h as f64;
        if lambda.re.to_f64() <= -(h + 1.0) {
            return Err(Error::domain(format!(
                "interpolation needs Re λ > −(h+1), got {}",
                lambda.re.to_f64()
            )));
        }
        let one = MpComplex::one(prec);
        let lg1 = log_gamma(&(&lambda + &one), &self.ctx)?;
        let lg2 = log_gamma(&(&lambda + &MpComplex::from_f64(prec, h + 1.0, 0.0)), &self.ctx)?;

        let mut k = 0;
        let mut prev = self.segment(&self.level(0), &lambda).0;
        let (integral, gap, sup, nodes) = loop {
            k += 1;
            let level = self.level(k);
            let (next, sup) = self.segment(&level, &lambda);
            let gap = (&next - &prev).abs_f64();
            let tol = sup * (-((prec as f64) - 16.0) * std::f64::consts::LN_2).exp();
            if gap <= tol {
                break (next, gap, sup, level.t.len());
            }
            if START_PANELS << k >= MAX_PANELS {
                return Err(Error::convergence(
                    format!("interpolation integral at λ = {:?}", lambda.to_c64()),
                    format!("{:?}", next.to_c64()),
                    gap,
                ));
            }
            prev = next;
        };
        let magnitude = integral.abs_f64();
        let sup = sup.max(f64::MIN_POSITIVE);
        let cancellation_bits = if magnitude > 0.0 {
            (sup / magnitude).log2().max(0.0)
        } else {
            f64::INFINITY
        };
        let noise = ((nodes as f64).log2() + 4.0).max(0.0);
        let reliable = prec as f64 - cancellation_bits - noise;
        if !(reliable >= MIN_RELIABLE_BITS) {
            return Err(Error::Precision {
                bits: self.ctx.precision_bits,
                detail: format!(
                    "interpolation integral at λ = {:?} lost {cancellation_bits:.0} bits to cancellation; increase precision",
                    lambda.to_c64()
                ),
            });
        }
        let ln_rho = MpComplex::from_real(self.ln_rho.clone());
        let ln_g = &(&(&lg1 + &lg2) - &(&lambda * &ln_rho)) + &integral.ln();
        let value = ln_g.exp().with_prec(self.ctx.precision_bits);
        Ok(InterpValue {
            value,
            relative_error: gap / magnitude + (-(reliable) * std::f64::consts::LN_2).exp(),
            cancellation_bits,
            nodes,
        })
    }

    pub fn eval(&self, lambda: &MpComplex) -> Result<MpComplex> {
        Ok(self.eval_detailed(lambda)?.value)
    }

    pub fn eval_c64(&self, lambda: Complex64) -> Result<Complex64> {
        Ok(self.eval(&MpComplex::from_c64(self.ctx.working_bits(), lambda))?.to_c64())
    }
}

/// The analytic interpolation g_h(λ) of n ↦ ωₙω̄_{n+h} over the semi-disk of radius R.
pub fn interp_g(f: &TaylorFunction, h: usize, lambda: &MpComplex, r: f64) -> Result<MpComplex> {
    Interpolator::new(f, h, r)?.eval(lambda)
}

/// Deviations |g_h(n) − ωₙω̄_{n+h}| for n = 0..=n_max and every h in `hs`.
pub fn interp_table(f: &TaylorFunction, hs: &[usize], n_max: usize, r: f64) -> Result<Table> {
    let mut table = Table::new("interp", &["h", "n", "abs_deviation", "precision_bits", "R"]);
    let prec = f.prec();
    for &h in hs {
        let interp = Interpolator::new(f, h, r)?;
        let devs: Vec<Result<f64>> = (0..=n_max)
            .into_par_iter()
            .map(|n| {
                let g = interp.eval(&MpComplex::from_f64(prec, n as f64, 0.0))?;
                let a = f.seq().value(n as u64, prec)?;
                let b = f.seq().value((n + h) as u64, prec)?;
                Ok((&g - &(&a * &b.conj())).abs_f64())
            })
            .collect();
        for (n, d) in devs.into_iter().enumerate() {
            table.push(vec![
                h.to_string(),
                n.to_string(),
                fmt_f64(d?),
                f.ctx().precision_bits.to_string(),
                fmt_f64(r),
            ]);
        }
    }
    Ok(table)
}
