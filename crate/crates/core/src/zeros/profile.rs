use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::winding::{winding_count_with, Winding, WindingOptions};
use crate::error::{Error, Result};
use crate::table::{fmt_f64, Table};
use crate::taylor::TaylorFunction;

pub const COUNT_HEADER: [&str; 6] = ["R", "n_F", "ratio_n_over_R", "winding_residual", "truncation_N", "precision_bits"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountSample {
    #[serde(rename = "R")]
    pub r: f64,
    pub count: u64,
    pub winding: Winding,
}

/// Sampled map R ↦ n_F(R).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingFunction {
    pub samples: Vec<CountSample>,
}

impl CountingFunction {
    /// Builds a profile from plain (R, count) pairs.
    pub fn from_counts(pairs: &[(f64, u64)]) -> Self {
        CountingFunction {
            samples: pairs
                .iter()
                .map(|&(r, count)| CountSample {
                    r,
                    count,
                    winding: Winding {
                        count,
                        radius: r,
                        nudged: false,
                        residual: 0.0,
                        nodes: 0,
                        truncation_n: 0,
                        precision_bits: 0,
                    },
                })
                .collect(),
        }
    }

    pub fn counts(&self) -> Vec<u64> {
        self.samples.iter().map(|s| s.count).collect()
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new("count", &COUNT_HEADER);
        for s in &self.samples {
            t.push(count_row(s.r, &s.winding));
        }
        t
    }
}

pub fn count_row(r: f64, w: &Winding) -> Vec<String> {
    vec![
        fmt_f64(r),
        w.count.to_string(),
        fmt_f64(w.count as f64 / r),
        fmt_f64(w.residual),
        w.truncation_n.to_string(),
        w.precision_bits.to_string(),
    ]
}

/// Winding counts at each radius (evaluated in parallel, reported in input order).
pub fn counting_profile(f: &TaylorFunction, radii: &[f64]) -> Result<CountingFunction> {
    counting_profile_with(f, radii, WindingOptions::default())
}

pub fn counting_profile_with(f: &TaylorFunction, radii: &[f64], opts: WindingOptions) -> Result<CountingFunction> {
    if radii.is_empty() {
        return Err(Error::domain("counting profile needs at least one radius"));
    }
    if radii.iter().any(|r| !(*r > 0.0)) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("radii must be positive and strictly increasing"));
    }
    let windings: Vec<Winding> = radii
        .par_iter()
        .map(|&r| winding_count_with(f, r, opts))
        .collect::<Result<_>>()?;
    let samples: Vec<CountSample> = radii
        .iter()
        .zip(windings)
        .map(|(&r, w)| CountSample { r, count: w.count, winding: w })
        .collect();
    if let Some(w) = samples.windows(2).find(|w| w[1].count < w[0].count) {
        return Err(Error::Consistency(format!(
            "n_F decreases from {} at R = {} to {} at R = {}",
            w[0].count, w[0].r, w[1].count, w[1].r
        )));
    }
    Ok(CountingFunction { samples })
}

/// Least-squares power law n_F(R) ≈ prefactor·R^exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    /// (R, n_F(R)/R) for every sample.
    pub ratios: Vec<(f64, f64)>,
    pub min_ratio: f64,
}

pub fn fit_growth(profile: &CountingFunction) -> Result<GrowthFit> {
    let positive: Vec<(f64, f64)> = profile
        .samples
        .iter()
        .filter(|s| s.count > 0)
        .map(|s| (s.r.ln(), (s.count as f64).ln()))
        .collect();
    if positive.is_empty() {
        return Err(Error::DegenerateProfile);
    }
    if positive.len() < 3 {
        return Err(Error::domain(format!(
            "growth fit needs at least 3 samples with zeros, got {}",
            positive.len()
        )));
    }
    let n = positive.len() as f64;
    let mx = positive.iter().map(|p| p.0).sum::<f64>() / n;
    let my = positive.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = positive.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = positive.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = positive.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("growth fit needs distinct radii"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    let ratios: Vec<(f64, f64)> = profile.samples.iter().map(|s| (s.r, s.count as f64 / s.r)).collect();
    let min_ratio = ratios.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    Ok(GrowthFit {
        exponent: slope,
        prefactor: intercept.exp(),
        r_squared,
        ratios,
        min_ratio,
    })
}
