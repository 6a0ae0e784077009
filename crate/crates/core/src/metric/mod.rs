//! Finsler structures and their convex-duality calculus.
//!
//! A metric is a family of norms `F(x, ·)` on the tangent spaces of a chart.
//! The trait only asks for `F`; first derivatives and the fundamental tensor
//! `g_ij = [½F²]_{y^i y^j}` fall back to finite differences when a metric does
//! not provide them in closed form.

mod certificate;
mod constants;
mod duality;

pub use certificate::{Certified, MetricCertificate, Provenance};
pub use constants::{
    estimate_reversibility, estimate_uniformity, sphere_directions, ReversibilityEstimate,
    UniformityEstimate,
};
pub use duality::{
    dual_norm, legendre, legendre_into, legendre_inverse, legendre_inverse_into,
    polar_transform, polar_transform_slice, PolarMetric, LEGENDRE_TOL,
};

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{norm, MAX_DIM};

/// A (possibly non-reversible) Finsler structure on an open subset of `R^n`.
///
/// Implementations must be positively 1-homogeneous and strongly convex in `y`.
/// `eval` at `y = 0` returns 0; derivatives are never requested there.
pub trait FinslerMetric: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64], y: &[f64]) -> f64;

    /// `∂F/∂y` at `(x, y)`, `y ≠ 0`.
    fn eval_grad(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        fd_gradient(self, x, y, out);
    }

    /// Fundamental tensor `g_ij(x, y)`, row-major, `y ≠ 0`.
    fn hessian(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        fd_hessian(self, x, y, out);
    }

    /// Closed-form inverse Legendre map `J*(x, α)`, when one is known. Writes
    /// `out` and returns `true`; the default defers to the Newton solver.
    fn legendre_inverse_closed(&self, _x: &[f64], _alpha: &[f64], _out: &mut [f64]) -> bool {
        false
    }

    /// Density `σ_F(x)` of the reference measure.
    fn density(&self, _x: &[f64]) -> f64 {
        1.0
    }

    /// Whether `F(x, y)` is independent of `x`.
    fn is_minkowski(&self) -> bool {
        true
    }

    /// Short label used in reports, e.g. `euclidean` or `randers`.
    fn name(&self) -> &str;
}

/// Central differences of `F` with step `1e-6·|y|`.
pub fn fd_gradient<M: FinslerMetric + ?Sized>(m: &M, x: &[f64], y: &[f64], out: &mut [f64]) {
    let n = y.len();
    let step = 1e-6 * norm(y);
    if step == 0.0 {
        out[..n].fill(0.0);
        return;
    }
    let mut probe = [0.0; MAX_DIM];
    probe[..n].copy_from_slice(y);
    for i in 0..n {
        probe[i] = y[i] + step;
        let up = m.eval(x, &probe[..n]);
        probe[i] = y[i] - step;
        let down = m.eval(x, &probe[..n]);
        probe[i] = y[i];
        out[i] = (up - down) / (2.0 * step);
    }
}

/// Second differences of `½F²` with step `1e-4·|y|`.
pub fn fd_hessian<M: FinslerMetric + ?Sized>(m: &M, x: &[f64], y: &[f64], out: &mut [f64]) {
    let n = y.len();
    let step = 1e-4 * norm(y);
    let half_sq = |p: &[f64]| {
        let f = m.eval(x, p);
        0.5 * f * f
    };
    let mut p = [0.0; MAX_DIM];
    p[..n].copy_from_slice(y);
    let center = half_sq(&p[..n]);
    for i in 0..n {
        p[i] = y[i] + step;
        let up = half_sq(&p[..n]);
        p[i] = y[i] - step;
        let down = half_sq(&p[..n]);
        p[i] = y[i];
        out[i * n + i] = (up - 2.0 * center + down) / (step * step);
        for j in 0..i {
            let mut corner = |si: f64, sj: f64| {
                p[i] = y[i] + si * step;
                p[j] = y[j] + sj * step;
                let v = half_sq(&p[..n]);
                p[i] = y[i];
                p[j] = y[j];
                v
            };
            let v = (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0)
                + corner(-1.0, -1.0))
                / (4.0 * step * step);
            out[i * n + j] = v;
            out[j * n + i] = v;
        }
    }
}

/// A tangent vector `y ∈ T_xM`.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    pub base_point: Vec<f64>,
    pub components: Vec<f64>,
}

/// A cotangent vector `α ∈ T*_xM`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoVector {
    pub base_point: Vec<f64>,
    pub components: Vec<f64>,
}

fn check_coords(base: &[f64], comps: &[f64]) -> Result<()> {
    if base.len() != comps.len() {
        return Err(Error::DimensionMismatch {
            expected: base.len(),
            got: comps.len(),
        });
    }
    if comps.len() > MAX_DIM || comps.is_empty() {
        return Err(Error::InvalidSpec(format!(
            "dimension {} outside 1..={MAX_DIM}",
            comps.len()
        )));
    }
    if base.iter().chain(comps).any(|v| !v.is_finite()) {
        return Err(Error::InvalidSpec("non-finite coordinate".into()));
    }
    Ok(())
}

impl Vector {
    pub fn new(base_point: Vec<f64>, components: Vec<f64>) -> Result<Self> {
        check_coords(&base_point, &components)?;
        Ok(Self {
            base_point,
            components,
        })
    }

    /// A vector based at the origin.
    pub fn at_origin(components: Vec<f64>) -> Self {
        let base_point = vec![0.0; components.len()];
        Self {
            base_point,
            components,
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }
}

impl CoVector {
    pub fn new(base_point: Vec<f64>, components: Vec<f64>) -> Result<Self> {
        check_coords(&base_point, &components)?;
        Ok(Self {
            base_point,
            components,
        })
    }

    pub fn at_origin(components: Vec<f64>) -> Self {
        let base_point = vec![0.0; components.len()];
        Self {
            base_point,
            components,
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// The pairing `α(y)`.
    pub fn apply(&self, y: &Vector) -> f64 {
        crate::linalg::dot(&self.components, &y.components)
    }
}

pub(crate) fn ensure_dim<M: FinslerMetric + ?Sized>(m: &M, got: usize) -> Result<()> {
    if m.dim() != got {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got,
        });
    }
    Ok(())
}
