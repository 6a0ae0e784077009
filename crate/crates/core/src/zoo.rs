//! Concrete Minkowski norms with known constants.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{JetFn, ScalarField};
use crate::grid::Grid;
use crate::linalg::{dot, min_eigenvalue, norm, MAX_DIM};
use crate::metric::{
    estimate_reversibility, estimate_uniformity, Certified, FinslerMetric, MetricCertificate,
};

/// Relative tolerance attached to sampled constants.
const ESTIMATE_TOL: f64 = 1e-6;
const SCREEN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Euclidean {
    n: usize,
}

impl Euclidean {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl FinslerMetric for Euclidean {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, _x: &[f64], y: &[f64]) -> f64 {
        norm(y)
    }

    fn eval_grad(&self, _x: &[f64], y: &[f64], out: &mut [f64]) {
        let l = norm(y);
        for i in 0..y.len() {
            out[i] = y[i] / l;
        }
    }

    fn hessian(&self, _x: &[f64], y: &[f64], out: &mut [f64]) {
        let n = y.len();
        out[..n * n].fill(0.0);
        for i in 0..n {
            out[i * n + i] = 1.0;
        }
    }

    fn legendre_inverse_closed(&self, _x: &[f64], alpha: &[f64], out: &mut [f64]) -> bool {
        out[..alpha.len()].copy_from_slice(alpha);
        true
    }

    fn name(&self) -> &str {
        "euclidean"
    }
}

/// `F(y) = |y| + b·y` with a constant drift `|b| < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Randers {
    b: Vec<f64>,
}

impl Randers {
    pub fn new(b: Vec<f64>) -> Result<Self> {
        let nb = norm(&b);
        if !(nb < 1.0) || b.is_empty() || b.len() > MAX_DIM {
            return Err(Error::InvalidSpec(format!("randers drift norm {nb} must be < 1")));
        }
        Ok(Self { b })
    }

    pub fn drift(&self) -> &[f64] {
        &self.b
    }

    /// `(1 + |b|)/(1 − |b|)`.
    pub fn reversibility(&self) -> f64 {
        let nb = norm(&self.b);
        (1.0 + nb) / (1.0 - nb)
    }

    /// Closed-form dual norm.
    pub fn dual(&self, alpha: &[f64]) -> f64 {
        let b2 = dot(&self.b, &self.b);
        let ba = dot(&self.b, alpha);
        let a2 = dot(alpha, alpha);
        (((1.0 - b2) * a2 + ba * ba).sqrt() - ba) / (1.0 - b2)
    }
}

impl FinslerMetric for Randers {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn eval(&self, _x: &[f64], y: &[f64]) -> f64 {
        norm(y) + dot(&self.b, y)
    }

    fn eval_grad(&self, _x: &[f64], y: &[f64], out: &mut [f64]) {
        let l = norm(y);
        for i in 0..y.len() {
            out[i] = y[i] / l + self.b[i];
        }
    }

    /// `g = ∇F ∇Fᵀ + F (I/|y| − y yᵀ/|y|³)`.
    fn hessian(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        let n = y.len();
        let l = norm(y);
        let f = self.eval(x, y);
        let mut g = [0.0; MAX_DIM];
        self.eval_grad(x, y, &mut g);
        for i in 0..n {
            for j in 0..n {
                let delta = if i == j { 1.0 } else { 0.0 };
                out[i * n + j] = g[i] * g[j] + f * (delta / l - y[i] * y[j] / (l * l * l));
            }
        }
    }

    /// `J* = ½∇(F*²)` from the closed-form dual norm.
    fn legendre_inverse_closed(&self, _x: &[f64], alpha: &[f64], out: &mut [f64]) -> bool {
        let n = alpha.len();
        let b2 = dot(&self.b, &self.b);
        let ba = dot(&self.b, alpha);
        let a2 = dot(alpha, alpha);
        if a2 == 0.0 {
            out[..n].fill(0.0);
            return true;
        }
        let s = ((1.0 - b2) * a2 + ba * ba).sqrt();
        let dual = (s - ba) / (1.0 - b2);
        for i in 0..n {
            let ds = ((1.0 - b2) * alpha[i] + ba * self.b[i]) / s;
            out[i] = dual * (ds - self.b[i]) / (1.0 - b2);
        }
        true
    }

    fn name(&self) -> &str {
        "randers"
    }
}

pub type NormFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type NormGradFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// A Minkowski norm given by callbacks.
#[derive(Clone)]
pub struct CustomNorm {
    n: usize,
    label: String,
    f: NormFn,
    grad: Option<NormGradFn>,
    hess: Option<NormGradFn>,
}

impl fmt::Debug for CustomNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomNorm")
            .field("n", &self.n)
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

impl FinslerMetric for CustomNorm {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, _x: &[f64], y: &[f64]) -> f64 {
        if y.iter().all(|v| *v == 0.0) {
            return 0.0;
        }
        (self.f)(y)
    }

    fn eval_grad(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        match &self.grad {
            Some(g) => g(y, out),
            None => crate::metric::fd_gradient(self, x, y, out),
        }
    }

    fn hessian(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        match &self.hess {
            Some(h) => h(y, out),
            None => crate::metric::fd_hessian(self, x, y, out),
        }
    }

    fn name(&self) -> &str {
        &self.label
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EuclideanSpec {
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandersSpec {
    pub n: usize,
    pub b: Vec<f64>,
}

/// Callbacks for a custom norm. `grad` is `∂F/∂y`; `hessian` is the
/// fundamental tensor `g_ij` (row-major).
#[derive(Clone)]
pub struct CustomNormSpec {
    pub n: usize,
    pub label: String,
    pub norm: NormFn,
    pub grad: Option<NormGradFn>,
    pub hessian: Option<NormGradFn>,
}

impl fmt::Debug for CustomNormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomNormSpec")
            .field("n", &self.n)
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum MetricSpec {
    Euclidean(EuclideanSpec),
    Randers(RandersSpec),
    Custom(CustomNormSpec),
}

fn check_dim(n: usize) -> Result<()> {
    if !(2..=MAX_DIM).contains(&n) {
        return Err(Error::InvalidSpec(format!("dimension {n} outside 2..={MAX_DIM}")));
    }
    Ok(())
}

fn flat_certificate(r: Certified<f64>, lo: Certified<f64>, hi: Certified<f64>) -> MetricCertificate {
    MetricCertificate {
        reversibility: r,
        uniformity_lo: lo,
        uniformity_hi: hi,
        curvature_bound: Some(Certified::declared(0.0)),
        vanishing_mean_covariation: Some(Certified::declared(true)),
        ricci_lower: Some(Certified::declared(0.0)),
    }
}

/// Rejects norms whose fundamental tensor is not positive definite on a
/// deterministic sample of directions.
fn convexity_screen(m: &CustomNorm) -> Result<()> {
    let n = m.n;
    let x = vec![0.0; n];
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0_4e_c5);
    let mut hess = vec![0.0; n * n];
    for k in 0..SCREEN_SAMPLES {
        let y: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let f = m.eval(&x, &y);
        if !(f > 0.0) || !f.is_finite() {
            return Err(Error::InvalidSpec(format!("norm not positive at sample {k}")));
        }
        let scaled: Vec<f64> = y.iter().map(|v| 2.5 * v).collect();
        let f2 = m.eval(&x, &scaled);
        if (f2 - 2.5 * f).abs() > 1e-9 * (1.0 + f2.abs()) {
            return Err(Error::InvalidSpec(format!("norm not 1-homogeneous at sample {k}")));
        }
        m.hessian(&x, &y, &mut hess);
        let trace: f64 = (0..n).map(|i| hess[i * n + i]).sum();
        let lo = min_eigenvalue(&hess, n);
        if !(lo > 1e-8 * trace.abs().max(1e-300)) {
            return Err(Error::InvalidSpec(format!(
                "fundamental tensor not positive definite at sample {k} (min eigenvalue {lo:.3e})"
            )));
        }
    }
    Ok(())
}

/// Builds a metric and its certificate. All zoo metrics carry density 1.
pub fn build_metric(spec: &MetricSpec) -> Result<(Arc<dyn FinslerMetric>, MetricCertificate)> {
    let origin_only = |n: usize| vec![vec![0.0; n]];
    match spec {
        MetricSpec::Euclidean(s) => {
            check_dim(s.n)?;
            let cert = flat_certificate(
                Certified::declared(1.0),
                Certified::declared(1.0),
                Certified::declared(1.0),
            );
            Ok((Arc::new(Euclidean::new(s.n)), cert))
        }
        MetricSpec::Randers(s) => {
            check_dim(s.n)?;
            if s.b.len() != s.n {
                return Err(Error::InvalidSpec(format!(
                    "drift has {} components, expected {}",
                    s.b.len(),
                    s.n
                )));
            }
            let m = Randers::new(s.b.clone())?;
            let u = estimate_uniformity(&m, &origin_only(s.n));
            let tol = ESTIMATE_TOL.max(u.gap);
            let cert = flat_certificate(
                Certified::declared(m.reversibility()),
                Certified::estimated(u.lambda, tol),
                Certified::estimated(u.big_lambda, tol),
            );
            Ok((Arc::new(m), cert))
        }
        MetricSpec::Custom(s) => {
            check_dim(s.n)?;
            let m = CustomNorm {
                n: s.n,
                label: s.label.clone(),
                f: s.norm.clone(),
                grad: s.grad.clone(),
                hess: s.hessian.clone(),
            };
            convexity_screen(&m)?;
            let pts = origin_only(s.n);
            let r = estimate_reversibility(&m, &pts);
            let u = estimate_uniformity(&m, &pts);
            let cert = MetricCertificate {
                reversibility: Certified::estimated(r.value, ESTIMATE_TOL.max(r.gap)),
                uniformity_lo: Certified::estimated(u.lambda, ESTIMATE_TOL.max(u.gap)),
                uniformity_hi: Certified::estimated(u.big_lambda, ESTIMATE_TOL.max(u.gap)),
                curvature_bound: None,
                vanishing_mean_covariation: None,
                ricci_lower: None,
            };
            Ok((Arc::new(m), cert))
        }
    }
}

/// Which of the two distance functions of a non-reversible metric to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `r(x) = d_F(x0, x) = F(x − x0)`.
    #[default]
    Forward,
    /// `r(x) = d_F(x, x0) = F(x0 − x)`.
    Backward,
}

/// Closed-form jet of the distance from (or to) `x0`.
pub fn distance_jet(metric: Arc<dyn FinslerMetric>, x0: Vec<f64>, direction: Direction) -> JetFn {
    Arc::new(move |x: &[f64], dr: &mut [f64]| {
        let n = x.len();
        let mut y = [0.0; MAX_DIM];
        let sign = match direction {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        };
        for i in 0..n {
            y[i] = sign * (x[i] - x0[i]);
        }
        let r = metric.eval(x, &y[..n]);
        if r == 0.0 {
            dr[..n].fill(0.0);
            return 0.0;
        }
        metric.eval_grad(x, &y[..n], dr);
        for d in &mut dr[..n] {
            *d *= sign;
        }
        r
    })
}

/// `r(x) = F(x − x0)` sampled on the grid, with its closed-form jet attached.
pub fn minkowski_distance_field(
    metric: &Arc<dyn FinslerMetric>,
    x0: &[f64],
    grid: &Arc<Grid>,
) -> Result<ScalarField> {
    distance_field(metric, x0, grid, Direction::Forward)
}

pub fn distance_field(
    metric: &Arc<dyn FinslerMetric>,
    x0: &[f64],
    grid: &Arc<Grid>,
    direction: Direction,
) -> Result<ScalarField> {
    if !metric.is_minkowski() {
        return Err(Error::NotMinkowski);
    }
    if x0.len() != metric.dim() || grid.dim() != metric.dim() {
        return Err(Error::DimensionMismatch {
            expected: metric.dim(),
            got: if x0.len() != metric.dim() { x0.len() } else { grid.dim() },
        });
    }
    let jet = distance_jet(metric.clone(), x0.to_vec(), direction);
    Ok(ScalarField::from_jet(grid.clone(), jet, vec![x0.to_vec()]))
}
