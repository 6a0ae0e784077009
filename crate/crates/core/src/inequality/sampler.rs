use std::sync::Arc;

use crate::calculus::{dual_norms, resolved_differential};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::DomainMask;
use crate::linalg::MAX_DIM;
use crate::metric::{dual_norm, FinslerMetric};
use crate::quadrature::{integrate_refined, Measure, Refinement};

/// Integrand inputs at one point: `u`, `F*(Du)` and two weight quantities
/// (`ρ, F*(Dρ)` for weight functions, `F(X), f_X` for vector-field pairs).
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Sample {
    pub u: f64,
    pub gu: f64,
    pub a: f64,
    pub b: f64,
}

pub(crate) type PointSampler = Arc<dyn Fn(&[f64]) -> Sample + Send + Sync>;

pub(crate) struct Sampler<'m> {
    mask: &'m DomainMask,
    measure: Measure,
    u: Vec<f64>,
    gu: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
    point: Option<PointSampler>,
    refinement: Refinement,
}

pub(crate) fn point_dual(metric: &dyn FinslerMetric, x: &[f64], d: &[f64]) -> f64 {
    dual_norm(metric, x, d).unwrap_or(f64::NAN)
}

fn merge_points(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = a.to_vec();
    for p in b {
        if !out.contains(p) {
            out.push(p.clone());
        }
    }
    out
}

impl<'m> Sampler<'m> {
    fn check_grid(u: &ScalarField, mask: &DomainMask) -> Result<()> {
        if u.grid() != mask.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    fn u_parts(metric: &Arc<dyn FinslerMetric>, u: &ScalarField, mask: &DomainMask) -> Result<Vec<f64>> {
        let du = resolved_differential(u, mask)?;
        dual_norms(metric.as_ref(), &du, mask)
    }

    /// Sampler for a weight function `ρ`: `a = ρ`, `b = F*(Dρ)`.
    pub fn for_weight(
        metric: &Arc<dyn FinslerMetric>,
        rho: &ScalarField,
        u: &ScalarField,
        mask: &'m DomainMask,
    ) -> Result<Self> {
        Self::check_grid(u, mask)?;
        Self::check_grid(rho, mask)?;
        let gu = Self::u_parts(metric, u, mask)?;
        let drho = resolved_differential(rho, mask)?;
        let b = dual_norms(metric.as_ref(), &drho, mask)?;
        let (point, refinement) = match (u.jet(), rho.jet()) {
            (Some(uj), Some(rj)) => {
                let (uf, rf) = (uj.eval.clone(), rj.eval.clone());
                let m = metric.clone();
                let f: PointSampler = Arc::new(move |x: &[f64]| {
                    let n = x.len();
                    let mut d = [0.0; MAX_DIM];
                    let u = uf(x, &mut d[..n]);
                    let gu = point_dual(m.as_ref(), x, &d[..n]);
                    let a = rf(x, &mut d[..n]);
                    let b = point_dual(m.as_ref(), x, &d[..n]);
                    Sample { u, gu, a, b }
                });
                let pts = merge_points(&uj.singular_points, &rj.singular_points);
                (Some(f), Refinement::around(pts))
            }
            _ => (None, Refinement::none()),
        };
        Ok(Self {
            mask,
            measure: Measure::of_metric(metric),
            u: u.values().to_vec(),
            gu,
            a: rho.values().to_vec(),
            b,
            point,
            refinement,
        })
    }

    /// Sampler from precomputed weight columns and an optional point rule for
    /// them.
    pub fn for_columns(
        metric: &Arc<dyn FinslerMetric>,
        u: &ScalarField,
        mask: &'m DomainMask,
        a: Vec<f64>,
        b: Vec<f64>,
        weight_point: Option<(Arc<dyn Fn(&[f64]) -> (f64, f64) + Send + Sync>, Vec<Vec<f64>>)>,
    ) -> Result<Self> {
        Self::check_grid(u, mask)?;
        let gu = Self::u_parts(metric, u, mask)?;
        let (point, refinement) = match (u.jet(), weight_point) {
            (Some(uj), Some((wf, wpts))) => {
                let uf = uj.eval.clone();
                let m = metric.clone();
                let f: PointSampler = Arc::new(move |x: &[f64]| {
                    let n = x.len();
                    let mut d = [0.0; MAX_DIM];
                    let u = uf(x, &mut d[..n]);
                    let gu = point_dual(m.as_ref(), x, &d[..n]);
                    let (a, b) = wf(x);
                    Sample { u, gu, a, b }
                });
                (Some(f), Refinement::around(merge_points(&uj.singular_points, &wpts)))
            }
            _ => (None, Refinement::none()),
        };
        Ok(Self {
            mask,
            measure: Measure::of_metric(metric),
            u: u.values().to_vec(),
            gu,
            a,
            b,
            point,
            refinement,
        })
    }

    pub fn mask(&self) -> &DomainMask {
        self.mask
    }

    pub fn sample(&self, i: usize) -> Sample {
        Sample {
            u: self.u[i],
            gu: self.gu[i],
            a: self.a[i],
            b: self.b[i],
        }
    }

    /// `∫ f(sample) dm` over the mask, refining near singular points.
    pub fn integral(&self, f: impl Fn(&Sample) -> f64) -> Result<f64> {
        let cell = |i: usize| f(&self.sample(i));
        match &self.point {
            Some(p) => {
                let pv = |x: &[f64]| f(&p(x));
                integrate_refined(self.mask, &self.measure, cell, Some(&pv), &self.refinement)
            }
            None => integrate_refined(self.mask, &self.measure, cell, None, &self.refinement),
        }
    }
}

/// `u²·w` with the convention `0·∞ = 0`.
pub(crate) fn sq_times(u: f64, w: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u * u * w
    }
}

/// `|u|^p·w` with the convention `0·∞ = 0` for `p > 0`.
pub(crate) fn pow_times(u: f64, p: f64, w: f64) -> f64 {
    if u == 0.0 && p > 0.0 {
        0.0
    } else {
        u.abs().powf(p) * w
    }
}
