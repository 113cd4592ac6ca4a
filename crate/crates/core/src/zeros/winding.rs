use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp::{circle_quadrature_until, precision_for_radius, MpComplex};
use crate::taylor::TaylorFunction;

const MAX_NUDGES: usize = 8;
/// Contour clearance below which the trapezoid rule would need more than the node cap,
/// relative to the radius.
const CLEARANCE: f64 = 1.0 / 4096.0;
/// Nudge step relative to the radius.
const NUDGE: f64 = 1.0 / 1024.0;

/// Outcome of one argument-principle count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Winding {
    pub count: u64,
    /// Radius actually used (differs from the request after a nudge).
    pub radius: f64,
    pub nudged: bool,
    /// Distance of the final quadrature value from `count`.
    pub residual: f64,
    pub nodes: usize,
    pub truncation_n: usize,
    pub precision_bits: u32,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct WindingOptions {
    /// Further node doublings after acceptance; the rounded count must not change.
    pub extra_doublings: u32,
    /// Overrides the radius-dependent precision choice.
    pub precision_bits: Option<u32>,
}

/// Number of zeros of F in |z| ≤ r by the argument principle.
pub fn winding_count(f: &TaylorFunction, r: f64) -> Result<Winding> {
    winding_count_with(f, r, WindingOptions::default())
}

/// Precision used for contours of radius `r` starting from the function's own precision.
pub fn contour_precision(f: &TaylorFunction, r: f64) -> u32 {
    precision_for_radius(r * f.seq().rate, f.ctx().precision_bits)
}

pub fn winding_count_with(f: &TaylorFunction, r: f64, opts: WindingOptions) -> Result<Winding> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::domain(format!("winding radius must be positive, got {r}")));
    }
    let bits = opts.precision_bits.unwrap_or_else(|| contour_precision(f, r));
    let g = f.with_precision(bits)?;
    let eps = r * NUDGE;
    let mut last_err = None;
    for attempt in 0..=MAX_NUDGES {
        // 0, +ε, −ε, +2ε, −2ε, ...
        let k = attempt.div_ceil(2) as f64;
        let sign = if attempt % 2 == 1 { 1.0 } else { -1.0 };
        let radius = r + sign * k * eps;
        match winding_at(&g, radius, opts.extra_doublings) {
            Ok(mut w) => {
                w.nudged = attempt > 0;
                return Ok(w);
            }
            Err(e @ Error::ProximityToZero { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    let detail = last_err.map(|e| e.to_string()).unwrap_or_default();
    Err(Error::convergence(
        format!("winding count at R = {r} after {MAX_NUDGES} nudges"),
        detail,
        f64::NAN,
    ))
}

fn nearest(v: &MpComplex) -> (f64, f64) {
    let c = v.to_c64();
    let k = c.re.round();
    (k, ((c.re - k).powi(2) + c.im.powi(2)).sqrt())
}

fn winding_at(g: &TaylorFunction, radius: f64, extra: u32) -> Result<Winding> {
    let ctx = *g.ctx();
    let prec = g.prec();
    let center = MpComplex::zero(prec);
    let rad = ctx.float(radius);
    let mut settled = 0u32;
    let mut candidate = f64::NAN;
    let clearance = radius * CLEARANCE;
    let est = circle_quadrature_until(
        |z| {
            let (fz, dz) = g.eval_pair_on(z, radius)?;
            let modulus = fz.value.abs_f64();
            let bound = (16.0 * fz.error_bound).max(clearance * dz.value.abs_f64());
            if modulus <= bound {
                let c = z.to_c64();
                return Err(Error::ProximityToZero {
                    re: c.re,
                    im: c.im,
                    modulus,
                    bound,
                });
            }
            Ok(&dz.value / &fz.value)
        },
        &center,
        &rad,
        &ctx,
        |new, old| {
            let (kn, dn) = nearest(new);
            let (ko, d_old) = nearest(old);
            let stable = kn == ko && dn < 0.25 && d_old < 0.25;
            if !stable {
                settled = 0;
                return false;
            }
            if settled == 0 {
                candidate = kn;
            } else if kn != candidate {
                settled = 0;
                return false;
            }
            settled += 1;
            settled > extra
        },
    );
    let est = match est {
        Ok(e) => e,
        Err(Error::Convergence { what, last_estimate, gap }) => {
            return Err(Error::Convergence {
                what: format!("{what} (R = {radius})"),
                last_estimate,
                gap,
            })
        }
        Err(e) => return Err(e),
    };
    let (k, residual) = nearest(&est.value);
    if k < 0.0 {
        return Err(Error::Consistency(format!("negative winding {k} at R = {radius}")));
    }
    Ok(Winding {
        count: k as u64,
        radius,
        nudged: false,
        residual,
        nodes: est.nodes,
        truncation_n: g.order_for_radius(radius),
        precision_bits: ctx.precision_bits,
    })
}
