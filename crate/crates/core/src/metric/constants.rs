//! Sampling estimators for the reversibility and uniformity constants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::FinslerMetric;
use crate::linalg::{dot, norm, MAX_DIM};

const SEED: u64 = 0x5eed_f125;
const DIRECTIONS: usize = 20_000;
const PAIRS: usize = 20_000;
const REFINE_STARTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReversibilityEstimate {
    /// Largest sampled ratio after local refinement; a lower bound for `r_F`.
    pub value: f64,
    /// Spread between the refined local maxima and the best raw sample.
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformityEstimate {
    pub lambda: f64,
    pub big_lambda: f64,
    /// Improvement achieved by local refinement over the raw sample extrema.
    pub gap: f64,
}

/// `count` unit vectors in `R^n`, deterministic for a given seed.
///
/// In the plane the directions are equally spaced angles; otherwise they are
/// normalised Gaussian samples.
pub fn sphere_directions(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    if n == 2 {
        return (0..count)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let l = norm(&v);
        if l > 1e-8 {
            out.push(v.into_iter().map(|c| c / l).collect());
        }
    }
    out
}

/// Projected gradient ascent of `f` on a product of unit spheres.
///
/// `blocks` lists the sphere dimensions; the gradient is taken by central
/// differences and projected onto the tangent space of each factor.
fn sphere_ascent(f: &dyn Fn(&[f64]) -> f64, blocks: &[usize], start: &[f64]) -> (Vec<f64>, f64) {
    let total: usize = blocks.iter().sum();
    let mut p = start.to_vec();
    let mut val = f(&p);
    let mut step = 0.1;
    let mut grad = vec![0.0; total];
    let mut trial = vec![0.0; total];
    for _ in 0..500 {
        let eps = 1e-6;
        for i in 0..total {
            let keep = p[i];
            p[i] = keep + eps;
            let up = f(&p);
            p[i] = keep - eps;
            let down = f(&p);
            p[i] = keep;
            grad[i] = (up - down) / (2.0 * eps);
        }
        let mut off = 0;
        for &b in blocks {
            let s = dot(&grad[off..off + b], &p[off..off + b]);
            for i in off..off + b {
                grad[i] -= s * p[i];
            }
            off += b;
        }
        let gn = norm(&grad);
        if gn < 1e-11 {
            break;
        }
        let mut improved = false;
        while step > 1e-14 {
            for i in 0..total {
                trial[i] = p[i] + step * grad[i] / gn;
            }
            let mut off = 0;
            for &b in blocks {
                let l = norm(&trial[off..off + b]);
                for v in &mut trial[off..off + b] {
                    *v /= l;
                }
                off += b;
            }
            let tv = f(&trial);
            if tv > val {
                p.copy_from_slice(&trial);
                val = tv;
                improved = true;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (p, val)
}

fn top_k(values: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

/// Estimates `r_F = sup F(x,y)/F(x,−y)` over the given base points.
///
/// Every point is swept with at least `10^4` directions; the best five are
/// refined by ascent on the sphere.
pub fn estimate_reversibility<M: FinslerMetric + ?Sized>(
    metric: &M,
    sample_points: &[Vec<f64>],
) -> ReversibilityEstimate {
    let n = metric.dim();
    let dirs = sphere_directions(n, DIRECTIONS, SEED);
    let mut best = 1.0_f64;
    let mut best_raw = 1.0_f64;
    for x in sample_points {
        let ratio = |y: &[f64]| {
            let mut neg = [0.0; MAX_DIM];
            for i in 0..n {
                neg[i] = -y[i];
            }
            metric.eval(x, y) / metric.eval(x, &neg[..n])
        };
        let values: Vec<f64> = dirs.iter().map(|d| ratio(d)).collect();
        for i in top_k(&values, REFINE_STARTS) {
            best_raw = best_raw.max(values[i]);
            let (_, v) = sphere_ascent(&ratio, &[n], &dirs[i]);
            if v.is_finite() {
                best = best.max(v);
            }
        }
    }
    ReversibilityEstimate {
        value: best,
        gap: best - best_raw,
    }
}

/// Estimates the uniformity constants `λ ≤ g_v(y,y)/F²(y) ≤ Λ`.
pub fn estimate_uniformity<M: FinslerMetric + ?Sized>(
    metric: &M,
    sample_points: &[Vec<f64>],
) -> UniformityEstimate {
    let n = metric.dim();
    let vs = sphere_directions(n, PAIRS, SEED ^ 1);
    let ys = sphere_directions(n, PAIRS, SEED ^ 2);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut lo_raw = f64::INFINITY;
    let mut hi_raw = f64::NEG_INFINITY;
    for x in sample_points {
        let quotient = |p: &[f64]| {
            let (v, y) = p.split_at(n);
            let mut g = [0.0; MAX_DIM * MAX_DIM];
            metric.hessian(x, v, &mut g[..n * n]);
            let mut gyy = 0.0;
            for i in 0..n {
                for j in 0..n {
                    gyy += g[i * n + j] * y[i] * y[j];
                }
            }
            let f = metric.eval(x, y);
            gyy / (f * f)
        };
        // The n = 2 directions are an ordered sweep; pair each v with a
        // shifted y so that the pairs cover the torus.
        let pair = |k: usize| -> Vec<f64> {
            let j = if n == 2 { (k * 7919) % PAIRS } else { k };
            let mut p = vs[k].clone();
            p.extend_from_slice(&ys[j]);
            p
        };
        let values: Vec<f64> = (0..PAIRS).map(|k| quotient(&pair(k))).collect();
        let neg: Vec<f64> = values.iter().map(|v| -v).collect();
        for k in top_k(&values, REFINE_STARTS) {
            hi_raw = hi_raw.max(values[k]);
            let (_, v) = sphere_ascent(&quotient, &[n, n], &pair(k));
            hi = hi.max(v);
        }
        let neg_quotient = |p: &[f64]| -quotient(p);
        for k in top_k(&neg, REFINE_STARTS) {
            lo_raw = lo_raw.min(values[k]);
            let (_, v) = sphere_ascent(&neg_quotient, &[n, n], &pair(k));
            lo = lo.min(-v);
        }
    }
    UniformityEstimate {
        lambda: lo,
        big_lambda: hi,
        gap: (hi - hi_raw).max(lo_raw - lo),
    }
}
