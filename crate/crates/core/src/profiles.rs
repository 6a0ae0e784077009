//! Radial profiles of the distance function: test functions and weights.

use std::sync::Arc;

use crate::error::Result;
use crate::field::ScalarField;
use crate::grid::Grid;
use crate::metric::FinslerMetric;
use crate::zoo::{distance_field, Direction};

fn origin(metric: &Arc<dyn FinslerMetric>) -> Vec<f64> {
    vec![0.0; metric.dim()]
}

/// `(1 − r/radius)₊^k` with `r` the forward distance from the origin.
pub fn radial_cutoff(
    metric: &Arc<dyn FinslerMetric>,
    grid: &Arc<Grid>,
    radius: f64,
    k: f64,
) -> Result<ScalarField> {
    let r = distance_field(metric, &origin(metric), grid, Direction::Forward)?;
    Ok(r.compose(
        move |t| {
            let s = 1.0 - t / radius;
            if s > 0.0 { s.powf(k) } else { 0.0 }
        },
        move |t| {
            let s = 1.0 - t / radius;
            if s > 0.0 { -k / radius * s.powf(k - 1.0) } else { 0.0 }
        },
    ))
}

/// A smooth bump in the distance, supported in `inner < r < outer`.
pub fn shell_bump(
    metric: &Arc<dyn FinslerMetric>,
    grid: &Arc<Grid>,
    inner: f64,
    outer: f64,
) -> Result<ScalarField> {
    let r = distance_field(metric, &origin(metric), grid, Direction::Forward)?;
    let mid = 0.5 * (inner + outer);
    let half = 0.5 * (outer - inner);
    Ok(r.compose(
        move |t| {
            let s = (t - mid) / half;
            if s.abs() < 1.0 { (-1.0 / (1.0 - s * s)).exp() } else { 0.0 }
        },
        move |t| {
            let s = (t - mid) / half;
            if s.abs() < 1.0 {
                let q = 1.0 - s * s;
                (-1.0 / q).exp() * (-2.0 * s / (q * q)) / half
            } else {
                0.0
            }
        },
    ))
}

/// `r^p` for the distance in the given direction.
pub fn distance_power(
    metric: &Arc<dyn FinslerMetric>,
    grid: &Arc<Grid>,
    p: f64,
    direction: Direction,
) -> Result<ScalarField> {
    let r = distance_field(metric, &origin(metric), grid, direction)?;
    Ok(r.compose(move |t| t.powf(p), move |t| p * t.powf(p - 1.0)))
}

/// `1/r` for the distance in the given direction.
pub fn inverse_distance(
    metric: &Arc<dyn FinslerMetric>,
    grid: &Arc<Grid>,
    direction: Direction,
) -> Result<ScalarField> {
    let r = distance_field(metric, &origin(metric), grid, direction)?;
    Ok(r.compose(|t| 1.0 / t, |t| -1.0 / (t * t)))
}

/// `r^{2−n}`, harmonic off the origin when taken in the backward direction.
pub fn fundamental_weight(
    metric: &Arc<dyn FinslerMetric>,
    grid: &Arc<Grid>,
    direction: Direction,
) -> Result<ScalarField> {
    let n = metric.dim() as f64;
    if metric.dim() == 2 {
        return log_distance(metric, grid, -1.0, direction);
    }
    distance_power(metric, grid, 2.0 - n, direction)
}

/// `sign·log r`; with `sign = −1` this is the planar fundamental solution.
pub fn log_distance(
    metric: &Arc<dyn FinslerMetric>,
    grid: &Arc<Grid>,
    sign: f64,
    direction: Direction,
) -> Result<ScalarField> {
    let r = distance_field(metric, &origin(metric), grid, direction)?;
    Ok(r.compose(move |t| sign * t.ln(), move |t| sign / t))
}
