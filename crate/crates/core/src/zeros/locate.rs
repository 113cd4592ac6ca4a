use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::winding::{contour_precision, winding_count_with, Winding, WindingOptions};
use crate::error::{Error, Result};
use crate::mp::MpComplex;
use crate::table::{fmt_f64, Table};
use crate::taylor::TaylorFunction;

const NEWTON_ITERS: usize = 50;
const MAX_EDGE_DEPTH: u32 = 40;
const MAX_SPLIT_RETRIES: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zero {
    pub location: Complex64,
    pub multiplicity: u32,
    /// |F(location)|.
    pub residual: f64,
}

/// Zeros of F in a closed disk, with multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub zeros: Vec<Zero>,
    pub region_radius: f64,
    pub winding_total: u64,
}

impl ZeroSet {
    pub fn total_multiplicity(&self) -> u64 {
        self.zeros.iter().map(|z| z.multiplicity as u64).sum()
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new("zeros", &["re", "im", "modulus", "multiplicity", "residual"]);
        for z in &self.zeros {
            t.push(vec![
                fmt_f64(z.location.re),
                fmt_f64(z.location.im),
                fmt_f64(z.location.norm()),
                z.multiplicity.to_string(),
                fmt_f64(z.residual),
            ]);
        }
        t
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LocateOptions {
    /// Cell-resolution floor; defaults to R·10⁻⁶.
    pub delta: Option<f64>,
    pub precision_bits: Option<u32>,
}

impl Default for LocateOptions {
    fn default() -> Self {
        LocateOptions {
            delta: None,
            precision_bits: None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

impl Cell {
    fn diameter(&self) -> f64 {
        (self.x1 - self.x0).hypot(self.y1 - self.y0)
    }

    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.x0 - slack && z.re <= self.x1 + slack && z.im >= self.y0 - slack && z.im <= self.y1 + slack
    }

    /// Four children split at a slightly off-centre point; `shift` moves the split further.
    fn split(&self, shift: usize) -> [Cell; 4] {
        let t = 0.5 + 0.013_7 * (1 + shift) as f64 * if shift % 2 == 0 { 1.0 } else { -1.0 };
        let xm = self.x0 + t * (self.x1 - self.x0);
        let ym = self.y0 + (1.0 - t) * (self.y1 - self.y0);
        [
            Cell { x0: self.x0, y0: self.y0, x1: xm, y1: ym },
            Cell { x0: xm, y0: self.y0, x1: self.x1, y1: ym },
            Cell { x0: self.x0, y0: ym, x1: xm, y1: self.y1 },
            Cell { x0: xm, y0: ym, x1: self.x1, y1: self.y1 },
        ]
    }
}

struct Locator<'a> {
    f: &'a TaylorFunction,
    radius: f64,
    delta: f64,
    prec: u32,
}

impl Locator<'_> {
    fn point(&self, z: Complex64) -> MpComplex {
        MpComplex::from_c64(self.prec, z)
    }

    fn value(&self, z: Complex64) -> Result<MpComplex> {
        let e = self.f.eval(&self.point(z))?;
        if e.value.abs_f64() <= 16.0 * e.error_bound {
            return Err(Error::ProximityToZero {
                re: z.re,
                im: z.im,
                modulus: e.value.abs_f64(),
                bound: 16.0 * e.error_bound,
            });
        }
        Ok(e.value)
    }

    /// Change of arg F along the straight segment a → b, tracked adaptively.
    fn arg_change(&self, a: Complex64, b: Complex64, fa: &MpComplex, fb: &MpComplex, depth: u32) -> Result<f64> {
        let whole = (fb / fa).arg().to_f64();
        let m = 0.5 * (a + b);
        let fm = self.value(m)?;
        let left = (&fm / fa).arg().to_f64();
        let right = (fb / &fm).arg().to_f64();
        if whole.abs() < std::f64::consts::FRAC_PI_4 && (left + right - whole).abs() < 1e-9 {
            return Ok(whole);
        }
        if depth >= MAX_EDGE_DEPTH {
            return Err(Error::convergence(
                "arg tracking along a cell edge",
                format!("{a} -> {b}"),
                (left + right - whole).abs(),
            ));
        }
        Ok(self.arg_change(a, m, fa, &fm, depth + 1)? + self.arg_change(m, b, &fm, fb, depth + 1)?)
    }

    fn cell_winding(&self, c: &Cell) -> Result<u64> {
        let corners = [
            Complex64::new(c.x0, c.y0),
            Complex64::new(c.x1, c.y0),
            Complex64::new(c.x1, c.y1),
            Complex64::new(c.x0, c.y1),
        ];
        let rate = self.f.seq().rate;
        let mut total = 0.0;
        let vals: Vec<MpComplex> = corners.iter().map(|z| self.value(*z)).collect::<Result<_>>()?;
        for i in 0..4 {
            let (a, b) = (corners[i], corners[(i + 1) % 4]);
            let len = (b - a).norm();
            // e^{αz} turns by about |α|·len along an edge
            let pieces = ((len * rate * 2.0).ceil() as usize).clamp(1, 4096);
            let mut prev = vals[i].clone();
            let mut za = a;
            for k in 1..=pieces {
                let zb = if k == pieces { b } else { a + (b - a) * (k as f64 / pieces as f64) };
                let fb = if k == pieces { vals[(i + 1) % 4].clone() } else { self.value(zb)? };
                total += self.arg_change(za, zb, &prev, &fb, 0)?;
                prev = fb;
                za = zb;
            }
        }
        let w = total / std::f64::consts::TAU;
        let k = w.round();
        if (w - k).abs() > 0.05 || k < 0.0 {
            return Err(Error::Consistency(format!("cell winding {w} is not a non-negative integer")));
        }
        Ok(k as u64)
    }

    /// Newton (multiplicity-corrected) from `z0`; `None` when it leaves the cell or stalls.
    fn newton(&self, cell: &Cell, z0: Complex64, m: u32) -> Result<Option<(Complex64, f64)>> {
        let mut z = self.point(z0);
        let tol = self.delta * self.f.ctx().tol();
        let slack = 0.1 * cell.diameter();
        for _ in 0..NEWTON_ITERS {
            let (fz, dz) = self.f.eval_with_derivative(&z)?;
            if fz.value.is_zero() || fz.value.abs_f64() <= fz.error_bound {
                let zc = z.to_c64();
                return Ok(cell.contains(zc, slack).then(|| (zc, fz.value.abs_f64())));
            }
            if dz.value.is_zero() {
                return Ok(None);
            }
            let step = (&fz.value / &dz.value).scale_f64(m as f64);
            z = &z - &step;
            let zc = z.to_c64();
            if !zc.is_finite() || !cell.contains(zc, slack) {
                return Ok(None);
            }
            if step.abs_f64() < tol {
                let res = self.f.eval(&z)?.value.abs_f64();
                return Ok(Some((zc, res)));
            }
        }
        Ok(None)
    }

    /// Zeros inside `cell`, known to have winding `w` > 0.
    fn resolve(&self, cell: Cell, w: u64) -> Result<Vec<Zero>> {
        let small = cell.diameter() <= self.delta;
        if w == 1 || small {
            if let Some((z, residual)) = self.newton(&cell, cell.center(), w as u32)? {
                if cell.contains(z, if small { 2.0 * self.delta } else { 0.0 }) {
                    return Ok(vec![Zero {
                        location: z,
                        multiplicity: w as u32,
                        residual,
                    }]);
                }
            }
            if small {
                let c = cell.center();
                let residual = self.f.eval(&self.point(c))?.value.abs_f64();
                return Ok(vec![Zero {
                    location: c,
                    multiplicity: w as u32,
                    residual,
                }]);
            }
        }
        let mut last = None;
        for shift in 0..MAX_SPLIT_RETRIES {
            let kids = cell.split(shift);
            let windings: Result<Vec<u64>> = kids.par_iter().map(|k| self.cell_winding(k)).collect();
            match windings {
                Ok(ws) if ws.iter().sum::<u64>() == w => {
                    let parts: Vec<Vec<Zero>> = kids
                        .par_iter()
                        .zip(ws.par_iter())
                        .filter(|(_, &wk)| wk > 0)
                        .map(|(k, &wk)| self.resolve(*k, wk))
                        .collect::<Result<_>>()?;
                    return Ok(parts.into_iter().flatten().collect());
                }
                Ok(ws) => {
                    last = Some(Error::Consistency(format!(
                        "child windings {ws:?} do not add up to {w}"
                    )))
                }
                Err(e @ (Error::ProximityToZero { .. } | Error::Consistency(_) | Error::Convergence { .. })) => {
                    last = Some(e)
                }
                Err(e) => return Err(e),
            }
        }
        Err(last.unwrap_or_else(|| Error::Consistency("cell subdivision failed".into())))
    }
}

fn merge(mut zeros: Vec<Zero>, within: f64) -> Vec<Zero> {
    let mut out: Vec<Zero> = Vec::with_capacity(zeros.len());
    zeros.sort_by(|a, b| a.location.re.total_cmp(&b.location.re).then(a.location.im.total_cmp(&b.location.im)));
    for z in zeros {
        if let Some(prev) = out.iter_mut().find(|p| (p.location - z.location).norm() <= within) {
            let (m0, m1) = (prev.multiplicity as f64, z.multiplicity as f64);
            prev.location = (prev.location * m0 + z.location * m1) / (m0 + m1);
            prev.multiplicity += z.multiplicity;
            prev.residual = prev.residual.max(z.residual);
        } else {
            out.push(z);
        }
    }
    out
}

/// Zeros of F in |z| ≤ r by quadtree subdivision of the bounding square, Newton refinement
/// and a final check against the circle winding count.
pub fn locate_zeros(f: &TaylorFunction, r: f64) -> Result<ZeroSet> {
    locate_zeros_with(f, r, LocateOptions::default())
}

pub fn locate_zeros_with(f: &TaylorFunction, r: f64, opts: LocateOptions) -> Result<ZeroSet> {
    let bits = opts.precision_bits.unwrap_or_else(|| contour_precision(f, r));
    let global: Winding = winding_count_with(
        f,
        r,
        WindingOptions {
            extra_doublings: 0,
            precision_bits: Some(bits),
        },
    )?;
    let radius = global.radius;
    let g = f.with_precision(bits)?;
    let loc = Locator {
        f: &g,
        radius,
        delta: opts.delta.unwrap_or(r * 1e-6),
        prec: g.prec(),
    };
    let zeros = if global.count == 0 {
        Vec::new()
    } else {
        // square slightly larger than the disk, offset so that its edges avoid symmetric zeros
        let half = radius * 1.0123 + 0.0311;
        let mut found = None;
        let mut last = None;
        for shift in 0..MAX_SPLIT_RETRIES {
            let o = 0.0071 * shift as f64;
            let root = Cell {
                x0: -half + o,
                y0: -half - o,
                x1: half + 1.7 * o,
                y1: half + 0.3 * o,
            };
            match loc.cell_winding(&root).and_then(|w| loc.resolve(root, w)) {
                Ok(z) => {
                    found = Some(z);
                    break;
                }
                Err(e) if e.is_numeric_failure() => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        let raw = match found {
            Some(z) => z,
            None => return Err(last.unwrap()),
        };
        merge(raw, 4.0 * loc.delta)
            .into_iter()
            .filter(|z| z.location.norm() <= loc.radius)
            .collect()
    };
    let set = ZeroSet {
        zeros,
        region_radius: radius,
        winding_total: global.count,
    };
    if set.total_multiplicity() != global.count {
        return Err(Error::Consistency(format!(
            "located multiplicity {} differs from winding count {} at R = {radius}",
            set.total_multiplicity(),
            global.count
        )));
    }
    Ok(set)
}
