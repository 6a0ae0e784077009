#![allow(dead_code)]

use std::sync::Arc;

use finsler_core::zoo::{CustomNormSpec, EuclideanSpec, RandersSpec};
use finsler_core::{build_metric, FinslerMetric, MetricCertificate, MetricSpec};

pub type Metric = Arc<dyn FinslerMetric>;

pub fn euclid(n: usize) -> (Metric, MetricCertificate) {
    build_metric(&MetricSpec::Euclidean(EuclideanSpec { n })).unwrap()
}

pub fn drift(n: usize, b1: f64) -> Vec<f64> {
    let mut b = vec![0.0; n];
    b[0] = b1;
    b
}

pub fn randers(n: usize, b1: f64) -> (Metric, MetricCertificate) {
    build_metric(&MetricSpec::Randers(RandersSpec { n, b: drift(n, b1) })).unwrap()
}

fn norm(y: &[f64]) -> f64 {
    y.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// The Randers norm `|y| + b·y` handed over as callbacks, so that every
/// duality computation goes through the generic Newton solvers.
pub fn randers_custom(n: usize, b1: f64) -> (Metric, MetricCertificate) {
    let b = drift(n, b1);
    let bf = b.clone();
    let spec = CustomNormSpec {
        n,
        label: "randers_custom".into(),
        norm: Arc::new(move |y| norm(y) + y.iter().zip(&bf).map(|(a, c)| a * c).sum::<f64>()),
        grad: Some(Arc::new(move |y, out| {
            let l = norm(y);
            for i in 0..y.len() {
                out[i] = y[i] / l + b[i];
            }
        })),
        hessian: None,
    };
    build_metric(&MetricSpec::Custom(spec)).unwrap()
}

/// Euclidean norm as callbacks.
pub fn euclid_custom(n: usize) -> (Metric, MetricCertificate) {
    let spec = CustomNormSpec {
        n,
        label: "l2_custom".into(),
        norm: Arc::new(norm),
        grad: Some(Arc::new(|y, out| {
            let l = norm(y);
            for i in 0..y.len() {
                out[i] = y[i] / l;
            }
        })),
        hessian: None,
    };
    build_metric(&MetricSpec::Custom(spec)).unwrap()
}

/// Dense sweep oracle for `F*(α) = sup α(y)/F(y)` in the plane.
pub fn planar_dual_by_sweep(f: impl Fn(&[f64]) -> f64, alpha: &[f64], samples: usize) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for k in 0..samples {
        let t = std::f64::consts::TAU * k as f64 / samples as f64;
        let y = [t.cos(), t.sin()];
        best = best.max((alpha[0] * y[0] + alpha[1] * y[1]) / f(&y));
    }
    best
}

pub fn radius(x: &[f64]) -> f64 {
    norm(x)
}

/// Composite Simpson rule on `[a, b]` with `m` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for k in 1..m {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}
