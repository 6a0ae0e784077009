//! Midpoint quadrature over masked grids.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::DomainMask;
use crate::linalg::{pairwise_sum, MAX_DIM};
use crate::metric::FinslerMetric;

/// A measure `σ(x) dx` on the chart.
#[derive(Clone)]
pub struct Measure {
    density: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    constant: Option<f64>,
    tag: String,
}

impl fmt::Debug for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Measure").field("tag", &self.tag).finish()
    }
}

impl Measure {
    pub fn lebesgue() -> Self {
        Self {
            density: Arc::new(|_| 1.0),
            constant: Some(1.0),
            tag: "lebesgue".into(),
        }
    }

    pub fn new(tag: impl Into<String>, density: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            density: Arc::new(density),
            constant: None,
            tag: tag.into(),
        }
    }

    /// The measure `σ_F dx` of a metric. Minkowski metrics have a constant
    /// density, evaluated once at the origin.
    pub fn of_metric(metric: &Arc<dyn FinslerMetric>) -> Self {
        if metric.is_minkowski() {
            let origin = vec![0.0; metric.dim()];
            let c = metric.density(&origin);
            return Self {
                density: Arc::new(move |_| c),
                constant: Some(c),
                tag: format!("{}-density", metric.name()),
            };
        }
        let m = metric.clone();
        Self::new(format!("{}-density", metric.name()), move |x| m.density(x))
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        match self.constant {
            Some(c) => c,
            None => (self.density)(x),
        }
    }
}

/// Cells near which integrands are sampled on a finer sub-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub points: Vec<Vec<f64>>,
    /// Radius, in units of the grid spacing, of the refined neighbourhood.
    pub radius_cells: f64,
    /// Sub-cells per axis.
    pub subdivisions: usize,
}

impl Refinement {
    pub fn around(points: Vec<Vec<f64>>) -> Self {
        Self {
            points,
            radius_cells: 3.0,
            subdivisions: 8,
        }
    }

    pub fn none() -> Self {
        Self::around(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `∫_mask f dm` by the midpoint rule.
pub fn integrate(f: &ScalarField, mask: &DomainMask, measure: &Measure) -> Result<f64> {
    if f.grid() != mask.grid() {
        return Err(Error::GridMismatch);
    }
    let v = f.values();
    integrate_cells(mask, measure, |i| v[i])
}

/// Midpoint rule for an integrand given per cell.
pub fn integrate_cells(
    mask: &DomainMask,
    measure: &Measure,
    cell_value: impl Fn(usize) -> f64,
) -> Result<f64> {
    integrate_refined(mask, measure, cell_value, None, &Refinement::none())
}

/// Midpoint rule where cells within the refinement radius of a declared point
/// are split into `subdivisions^n` sub-cells and `point_value` is evaluated at
/// the sub-cell centres. Without `point_value` this is the plain midpoint rule.
pub fn integrate_refined(
    mask: &DomainMask,
    measure: &Measure,
    cell_value: impl Fn(usize) -> f64,
    point_value: Option<&dyn Fn(&[f64]) -> f64>,
    refinement: &Refinement,
) -> Result<f64> {
    if mask.count() == 0 {
        return Err(Error::EmptyMask);
    }
    let grid = mask.grid();
    let n = grid.dim();
    let vol = grid.cell_volume();
    let h = grid.h();
    let reach = refinement.radius_cells * h;
    let mut x = [0.0; MAX_DIM];
    let terms: Vec<f64> = mask
        .cells()
        .iter()
        .map(|&i| {
            grid.center(i, &mut x[..n]);
            if let Some(pv) = point_value {
                let near = refinement.points.iter().any(|p| {
                    p.iter()
                        .zip(&x[..n])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                        <= reach
                });
                if near {
                    return sub_cell_average(&x[..n], grid.spacing(), refinement.subdivisions, |p| {
                        pv(p) * measure.density(p)
                    }) * vol;
                }
            }
            cell_value(i) * measure.density(&x[..n]) * vol
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

fn sub_cell_average(center: &[f64], spacing: &[f64], k: usize, f: impl Fn(&[f64]) -> f64) -> f64 {
    let n = center.len();
    let total = k.pow(n as u32);
    let mut p = [0.0; MAX_DIM];
    let terms: Vec<f64> = (0..total)
        .map(|mut t| {
            for a in (0..n).rev() {
                let j = t % k;
                t /= k;
                p[a] = center[a] + spacing[a] * ((j as f64 + 0.5) / k as f64 - 0.5);
            }
            f(&p[..n])
        })
        .collect();
    pairwise_sum(&terms) / total as f64
}
