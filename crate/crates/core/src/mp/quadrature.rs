use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use parking_lot::Mutex;
use rayon::prelude::*;
use rug::Float;

use super::{MpComplex, PrecisionContext};
use crate::error::{Error, Result};

pub const MIN_CIRCLE_NODES: usize = 8;
pub const START_CIRCLE_NODES: usize = 64;
pub const MAX_CIRCLE_NODES: usize = 1 << 18;
const PARALLEL_THRESHOLD: usize = 128;
const MAX_SEGMENT_DEPTH: u32 = 48;
const MAX_SEGMENT_PANELS: usize = 1 << 16;

fn check_finite(v: &MpComplex, node: usize) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Evaluation {
            node,
            detail: format!("integrand returned {v:?}"),
        })
    }
}

/// Samples `f(z_k)·(z_k − c)` at z_k = c + r·e^{iθ_k}, θ_k = 2π(k + offset)/n.
fn circle_samples<F>(
    f: &F,
    center: &MpComplex,
    radius: &Float,
    n: usize,
    offset: f64,
    stride: usize,
    ctx: &PrecisionContext,
) -> Result<Vec<MpComplex>>
where
    F: Fn(&MpComplex) -> Result<MpComplex> + Sync,
{
    let prec = ctx.working_bits();
    let two_pi = ctx.pi() * 2u32;
    let node = |k: usize| -> Result<MpComplex> {
        let theta = Float::with_val(prec, &two_pi * (k as f64 + offset)) / n as f64;
        let w = MpComplex::cis(&theta).scale(radius);
        let z = center + &w;
        let v = f(&z)?;
        check_finite(&v, k * stride)?;
        Ok(&v * &w)
    };
    if n >= PARALLEL_THRESHOLD {
        (0..n).into_par_iter().map(node).collect()
    } else {
        (0..n).map(node).collect()
    }
}

fn ordered_sum(samples: Vec<MpComplex>, prec: u32) -> MpComplex {
    let mut acc = MpComplex::zero(prec);
    for s in &samples {
        acc += s;
    }
    acc
}

/// (1/2πi)∮ f(z) dz over the circle |z − center| = radius, counterclockwise, by the
/// n-point trapezoid rule. The integrand may fail; its error is passed through.
pub fn try_circle_quadrature<F>(
    f: F,
    center: &MpComplex,
    radius: &Float,
    nodes: usize,
    ctx: &PrecisionContext,
) -> Result<MpComplex>
where
    F: Fn(&MpComplex) -> Result<MpComplex> + Sync,
{
    if nodes < MIN_CIRCLE_NODES {
        return Err(Error::domain(format!("circle quadrature needs at least {MIN_CIRCLE_NODES} nodes")));
    }
    if *radius <= 0 {
        return Err(Error::domain("circle quadrature radius must be positive"));
    }
    let samples = circle_samples(&f, center, radius, nodes, 0.0, 1, ctx)?;
    let sum = ordered_sum(samples, ctx.working_bits());
    Ok(sum.scale_f64(1.0 / nodes as f64))
}

pub fn circle_quadrature<F>(
    f: F,
    center: &MpComplex,
    radius: &Float,
    nodes: usize,
    ctx: &PrecisionContext,
) -> Result<MpComplex>
where
    F: Fn(&MpComplex) -> MpComplex + Sync,
{
    try_circle_quadrature(|z| Ok(f(z)), center, radius, nodes, ctx)
}

/// Result of a node-doubling circle quadrature.
#[derive(Debug, Clone)]
pub struct CircleEstimate {
    pub value: MpComplex,
    pub nodes: usize,
    /// |T_n − T_{n/2}| at the accepted step.
    pub gap: f64,
}

/// Doubles the node count from 64, reusing earlier samples, until `accept(new, old)`
/// holds or the cap of 2^18 nodes is reached.
pub fn circle_quadrature_until<F, A>(
    f: F,
    center: &MpComplex,
    radius: &Float,
    ctx: &PrecisionContext,
    mut accept: A,
) -> Result<CircleEstimate>
where
    F: Fn(&MpComplex) -> Result<MpComplex> + Sync,
    A: FnMut(&MpComplex, &MpComplex) -> bool,
{
    if *radius <= 0 {
        return Err(Error::domain("circle quadrature radius must be positive"));
    }
    let prec = ctx.working_bits();
    let mut n = START_CIRCLE_NODES;
    let mut sum = ordered_sum(circle_samples(&f, center, radius, n, 0.0, 1, ctx)?, prec);
    let mut estimate = sum.scale_f64(1.0 / n as f64);
    loop {
        // New nodes sit at the midpoints of the current ones.
        let mids = ordered_sum(circle_samples(&f, center, radius, n, 0.5, 2, ctx)?, prec);
        sum += &mids;
        n *= 2;
        let next = sum.scale_f64(1.0 / n as f64);
        let gap = (&next - &estimate).abs_f64();
        if accept(&next, &estimate) {
            return Ok(CircleEstimate {
                value: next,
                nodes: n,
                gap,
            });
        }
        if n >= MAX_CIRCLE_NODES {
            return Err(Error::convergence(
                format!("circle quadrature at {n} nodes"),
                format!("{next:?}"),
                gap,
            ));
        }
        estimate = next;
    }
}

/// Node-doubling trapezoid rule stopped when successive estimates differ by less than `tol`.
pub fn circle_quadrature_adaptive<F>(
    f: F,
    center: &MpComplex,
    radius: &Float,
    tol: f64,
    ctx: &PrecisionContext,
) -> Result<CircleEstimate>
where
    F: Fn(&MpComplex) -> Result<MpComplex> + Sync,
{
    circle_quadrature_until(f, center, radius, ctx, |a, b| (a - b).abs_f64() < tol)
}

/// Gauss–Legendre nodes and weights on [−1, 1].
#[derive(Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

impl GaussLegendre {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn legendre_with_derivative(n: usize, x: &Float) -> (Float, Float) {
    let prec = x.prec();
    let mut p0 = Float::with_val(prec, 1);
    let mut p1 = x.clone();
    for k in 2..=n {
        // k P_k = (2k − 1) x P_{k−1} − (k − 1) P_{k−2}
        let t = Float::with_val(prec, x * &p1) * (2 * k - 1) as u32;
        let p2 = (t - Float::with_val(prec, &p0 * (k - 1) as u32)) / k as u32;
        p0 = p1;
        p1 = p2;
    }
    // P_n'(x) = n (x P_n − P_{n−1}) / (x² − 1)
    let num = Float::with_val(prec, x * &p1) - &p0;
    let den = Float::with_val(prec, x * x) - 1u32;
    let dp = num * n as u32 / den;
    (p1, dp)
}

fn build_gauss_legendre(n: usize, prec: u32) -> GaussLegendre {
    let mut nodes = vec![Float::new(prec); n];
    let mut weights = vec![Float::new(prec); n];
    let eps = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 4));
    for i in 0..n.div_ceil(2) {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = Float::with_val(prec, guess);
        let mut dp = Float::new(prec);
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, &x);
            let dx = Float::with_val(prec, &p / &d);
            x -= &dx;
            dp = d;
            if dx.abs() < eps {
                let (_, d) = legendre_with_derivative(n, &x);
                dp = d;
                break;
            }
        }
        let one_minus = Float::with_val(prec, 1u32) - Float::with_val(prec, &x * &x);
        let w = Float::with_val(prec, 2u32) / (one_minus * Float::with_val(prec, &dp * &dp));
        nodes[i] = x.clone();
        nodes[n - 1 - i] = -x;
        weights[i] = w.clone();
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = Float::new(prec);
    }
    GaussLegendre { nodes, weights }
}

/// Cached n-point Gauss–Legendre rule at `prec` bits.
pub fn gauss_legendre(n: usize, prec: u32) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(rule) = cache.lock().get(&(n, prec)) {
        return rule.clone();
    }
    let rule = Arc::new(build_gauss_legendre(n, prec));
    cache.lock().entry((n, prec)).or_insert(rule).clone()
}

/// Rule size used by the segment integrator at a given precision.
pub fn default_rule_size(ctx: &PrecisionContext) -> usize {
    (ctx.precision_bits as usize / 6).max(20)
}

struct Segment<'a, F> {
    f: &'a F,
    rule: Arc<GaussLegendre>,
    prec: u32,
    evaluations: usize,
}

impl<F> Segment<'_, F>
where
    F: Fn(&MpComplex) -> Result<MpComplex>,
{
    fn panel(&mut self, a: &MpComplex, b: &MpComplex) -> Result<MpComplex> {
        let half = (b - a).scale_f64(0.5);
        let mid = (a + b).scale_f64(0.5);
        let mut acc = MpComplex::zero(self.prec);
        for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let z = &mid + &half.scale(x);
            let v = (self.f)(&z)?;
            check_finite(&v, self.evaluations)?;
            self.evaluations += 1;
            acc += &v.scale(w);
        }
        Ok(&acc * &half)
    }
}

/// ∫_a^b f along the straight segment, by Gauss–Legendre panels bisected until each
/// panel agrees with the sum of its halves within its share of `tol`.
pub fn segment_quadrature_with_tol<F>(
    f: F,
    a: &MpComplex,
    b: &MpComplex,
    tol: f64,
    ctx: &PrecisionContext,
) -> Result<MpComplex>
where
    F: Fn(&MpComplex) -> Result<MpComplex>,
{
    if a == b {
        return Err(Error::domain("segment quadrature needs distinct endpoints"));
    }
    let prec = ctx.working_bits();
    let mut seg = Segment {
        f: &f,
        rule: gauss_legendre(default_rule_size(ctx), prec),
        prec,
        evaluations: 0,
    };
    let a = a.clone().with_prec(prec);
    let b = b.clone().with_prec(prec);
    let whole = seg.panel(&a, &b)?;

    let mut total = MpComplex::zero(prec);
    let mut total_gap = 0.0f64;
    let mut stack = vec![(a, b, whole, 0u32)];
    let mut panels = 0usize;
    while let Some((lo, hi, coarse, depth)) = stack.pop() {
        let mid = (&lo + &hi).scale_f64(0.5);
        let left = seg.panel(&lo, &mid)?;
        let right = seg.panel(&mid, &hi)?;
        let fine = &left + &right;
        let gap = (&fine - &coarse).abs_f64();
        let share = tol * 0.5f64.powi(depth as i32);
        if gap <= share || gap <= (fine.abs_f64() * ctx.epsilon()) {
            total += &fine;
            total_gap += gap;
            panels += 1;
            continue;
        }
        if depth >= MAX_SEGMENT_DEPTH || panels + stack.len() >= MAX_SEGMENT_PANELS {
            total += &fine;
            return Err(Error::convergence("segment quadrature", format!("{total:?}"), gap.max(total_gap)));
        }
        stack.push((mid.clone(), hi, right, depth + 1));
        stack.push((lo, mid, left, depth + 1));
    }
    Ok(total)
}

pub fn segment_quadrature<F>(f: F, a: &MpComplex, b: &MpComplex, ctx: &PrecisionContext) -> Result<MpComplex>
where
    F: Fn(&MpComplex) -> Result<MpComplex>,
{
    segment_quadrature_with_tol(f, a, b, ctx.tol(), ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(128).unwrap()
    }

    fn unit(ctx: &PrecisionContext) -> (MpComplex, Float) {
        (MpComplex::zero(ctx.working_bits()), ctx.float(1.0))
    }

    #[test]
    fn residue_of_reciprocal() {
        let c = ctx();
        let (o, r) = unit(&c);
        let v = circle_quadrature(|z| z.recip(), &o, &r, 16, &c).unwrap();
        assert!((v.to_c64() - num_complex::Complex64::new(1.0, 0.0)).norm() < c.tol());
    }

    #[test]
    fn powers_integrate_to_zero() {
        let c = ctx();
        let (o, r) = unit(&c);
        for k in 0..=8 {
            let v = circle_quadrature(|z| z.powi(k), &o, &r, 64, &c).unwrap();
            assert!(v.abs_f64() < c.tol(), "k = {k}");
        }
    }

    #[test]
    fn off_centre_pole() {
        let c = ctx();
        let (o, r) = unit(&c);
        let p = MpComplex::from_f64(c.working_bits(), 0.3, 0.0);
        let v = circle_quadrature(|z| (z - &p).recip(), &o, &r, 64, &c).unwrap();
        assert!((v.re.to_f64() - 1.0).abs() < c.tol() && v.im.to_f64().abs() < c.tol());
    }

    #[test]
    fn adaptive_doubling_reuses_nodes() {
        let c = ctx();
        let (o, r) = unit(&c);
        let p = MpComplex::from_f64(c.working_bits(), 0.9, 0.0);
        let est = circle_quadrature_adaptive(|z| Ok((z - &p).recip()), &o, &r, c.tol(), &c).unwrap();
        assert!((est.value.re.to_f64() - 1.0).abs() < 1e-15);
        assert!(est.nodes >= 128);
        let fixed = circle_quadrature(|z| (z - &p).recip(), &o, &r, est.nodes, &c).unwrap();
        assert!((&fixed - &est.value).abs_f64() < 1e-30);
    }

    #[test]
    fn non_finite_sample_reports_node() {
        let c = ctx();
        let (o, r) = unit(&c);
        // node 0 lands on z = 1
        let one = MpComplex::one(c.working_bits());
        let err = circle_quadrature(|z| (z - &one).recip(), &o, &r, 16, &c).unwrap_err();
        assert!(matches!(err, Error::Evaluation { node: 0, .. }), "{err}");
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        let g = gauss_legendre(21, 192);
        let s: Float = g.weights.iter().fold(Float::new(192), |a, w| a + w);
        assert!((s.to_f64() - 2.0).abs() < 1e-40);
        // exact for x^40
        let m: Float = g
            .nodes
            .iter()
            .zip(&g.weights)
            .fold(Float::new(192), |a, (x, w)| a + Float::with_val(192, x.pow(40u32)) * w);
        assert!((m.to_f64() - 2.0 / 41.0).abs() < 1e-40);
    }

    #[test]
    fn segment_examples() {
        let c = ctx();
        let p = c.working_bits();
        let zero = MpComplex::zero(p);
        let v = segment_quadrature(|z| Ok(z.clone()), &zero, &MpComplex::one(p), &c).unwrap();
        assert!((v.re.to_f64() - 0.5).abs() < 1e-30);

        let forty = MpComplex::from_f64(p, 40.0, 0.0);
        let v = segment_quadrature(|z| Ok((-z.clone()).exp()), &zero, &forty, &c).unwrap();
        let exact = 1.0 - (-40f64).exp();
        assert!((v.re.to_f64() - exact).abs() < 2f64.powi(-50));
        assert!((v.re.to_f64() - 1.0).abs() < 1e-17);

        let top = MpComplex::from_parts(Float::new(p), c.pi());
        let v = segment_quadrature(|z| Ok(z.exp()), &zero, &top, &c).unwrap();
        assert!((v.re.to_f64() + 2.0).abs() < 1e-30 && v.im.to_f64().abs() < 1e-30);
    }

    #[test]
    fn segment_reports_non_convergence() {
        let c = ctx();
        let p = c.working_bits();
        // integrable singularity at the left end point is hopeless at this tolerance
        let a = MpComplex::zero(p);
        let b = MpComplex::one(p);
        let r = segment_quadrature_with_tol(|z| Ok(z.ln()), &a, &b, 1e-300, &c);
        assert!(matches!(r, Err(Error::Convergence { .. })));
    }

    #[test]
    fn segment_rejects_degenerate() {
        let c = ctx();
        let a = MpComplex::one(c.working_bits());
        assert!(segment_quadrature(|z| Ok(z.clone()), &a, &a, &c).is_err());
    }
}
