use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// x, h and the sets J = Λ∩[1, c₁R], K = Λ∩[x, x + c₁R] with |(J+h)∩K| ≥ c₂R.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityWitness {
    #[serde(rename = "R")]
    pub r: i64,
    pub d: f64,
    pub c1: f64,
    pub c2: f64,
    pub x: i64,
    pub h: i64,
    pub overlap: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<i64>>,
    pub j_len: usize,
    pub k_len: usize,
}

/// Sets longer than this are omitted from serialized witnesses.
pub const MAX_LISTED: usize = 10_000;

pub fn c1_for(d: f64) -> f64 {
    (d / 8.0).min(0.25)
}

pub fn c2_for(d: f64) -> f64 {
    d * d * c1_for(d) / 10.0
}

/// Smallest R accepted by [`combi_find`]: c₂R ≥ 1.
pub fn r_min(d: f64) -> i64 {
    (10.0 / (d * d * c1_for(d))).ceil() as i64
}

fn members(membership: &dyn Fn(i64) -> bool, lo: i64, hi: i64) -> Vec<i64> {
    (lo.max(1)..=hi).filter(|&n| membership(n)).collect()
}

/// A witness found by scanning segments of length c₁R and then every shift in the
/// window (x − c₁R, x + c₁R).
pub fn combi_find(membership: &dyn Fn(i64) -> bool, d: f64, r: i64) -> Result<DensityWitness> {
    if !(d > 0.0 && d <= 1.0) {
        return Err(Error::domain(format!("density must lie in (0, 1], got {d}")));
    }
    let rmin = r_min(d);
    if r < rmin {
        return Err(Error::domain(format!("R = {r} is below R_min = {rmin} for d = {d}")));
    }
    let c1 = c1_for(d);
    let c2 = c2_for(d);
    let rf = r as f64;
    let len = c1 * rf;
    let j_set = members(membership, 1, len.floor() as i64);

    let segments = (rf / len).floor() as i64;
    let need = d / 2.0 * c1 * rf;
    let mut best: Option<(i64, Vec<i64>)> = None;
    for s in 2..segments - 2 {
        let x = (s as f64 * len).floor() as i64 + 1;
        let k = members(membership, x, (x as f64 + len).floor() as i64);
        if k.len() as f64 >= need && best.as_ref().is_none_or(|(_, b)| k.len() > b.len()) {
            best = Some((x, k));
        }
    }
    let Some((x, k_set)) = best else {
        return Err(Error::WitnessNotFound(format!(
            "no segment of length {len:.1} in [0, {r}] holds {need:.1} members"
        )));
    };

    let k_lookup: BTreeSet<i64> = k_set.iter().copied().collect();
    let lo = ((x as f64 - len).floor() as i64 + 1).max(len.ceil() as i64);
    let hi = ((x as f64 + len).ceil() as i64 - 1).min(((1.0 - c1) * rf).floor() as i64);
    let mut best_h = (lo, 0usize);
    for h in lo..=hi {
        let count = j_set.iter().filter(|&&j| k_lookup.contains(&(j + h))).count();
        if count > best_h.1 {
            best_h = (h, count);
        }
    }
    let (h, overlap) = best_h;
    if (overlap as f64) < c2 * rf {
        return Err(Error::WitnessNotFound(format!(
            "best shift h = {h} overlaps in {overlap} < c2·R = {:.2}",
            c2 * rf
        )));
    }
    let list = |v: Vec<i64>| (v.len() <= MAX_LISTED).then_some(v);
    Ok(DensityWitness {
        r,
        d,
        c1,
        c2,
        x,
        h,
        overlap,
        j_len: j_set.len(),
        k_len: k_set.len(),
        j: list(j_set),
        k: list(k_set),
    })
}

/// Recomputes J, K and the overlap from the membership predicate alone and checks
/// every inequality of the witness. Returns the list of violated conditions.
pub fn recheck_witness(w: &DensityWitness, membership: &dyn Fn(i64) -> bool) -> Vec<String> {
    let mut bad = Vec::new();
    let rf = w.r as f64;
    let len = w.c1 * rf;
    let xf = w.x as f64;
    let hf = w.h as f64;
    if !(2.0 * len < xf && xf < (1.0 - 2.0 * w.c1) * rf) {
        bad.push(format!("x = {} outside (2c1R, (1−2c1)R)", w.x));
    }
    if !(len <= hf && hf <= (1.0 - w.c1) * rf) {
        bad.push(format!("h = {} outside [c1R, (1−c1)R]", w.h));
    }
    let mut j_count = 0usize;
    let mut k_count = 0usize;
    let mut overlap = 0usize;
    for n in 1..=w.r + w.h {
        let nf = n as f64;
        if nf <= len && membership(n) {
            j_count += 1;
        }
        let in_k = nf >= xf && nf <= xf + len && membership(n);
        if in_k {
            k_count += 1;
            let back = n - w.h;
            if back >= 1 && (back as f64) <= len && membership(back) {
                overlap += 1;
            }
        }
    }
    if (k_count as f64) < w.d / 2.0 * len {
        bad.push(format!("|K| = {k_count} < (d/2)c1R"));
    }
    if (overlap as f64) < w.c2 * rf {
        bad.push(format!("|(J+h)∩K| = {overlap} < c2R = {}", w.c2 * rf));
    }
    if overlap != w.overlap || j_count != w.j_len || k_count != w.k_len {
        bad.push(format!(
            "recount ({j_count}, {k_count}, {overlap}) differs from witness ({}, {}, {})",
            w.j_len, w.k_len, w.overlap
        ));
    }
    bad
}
