//! Differential, gradient and weak-form operators on masked grids.

use std::sync::Arc;

use serde::Serialize;

use crate::battery::TestFunctionBattery;
use crate::error::{Error, Result};
use crate::field::{CoVectorField, ScalarField, VectorField};
use crate::grid::DomainMask;
use crate::linalg::{dot, pairwise_sum, MAX_DIM};
use crate::metric::{dual_norm, legendre_inverse_into, FinslerMetric};
use crate::quadrature::Measure;

/// `max(1e−8, 10·h²·scale)`.
pub fn weak_tolerance(h: f64, scale: f64) -> f64 {
    (10.0 * h * h * scale).max(1e-8)
}

/// `Du` by finite differences: central where both axis neighbours are in the
/// mask, second-order one-sided into the mask otherwise, and central through
/// the collar as a last resort.
pub fn differential(u: &ScalarField, mask: &DomainMask) -> Result<CoVectorField> {
    if u.grid() != mask.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = mask.grid();
    let n = grid.dim();
    let v = u.values();
    let mut out = CoVectorField::zeros(grid.clone());
    for &idx in mask.cells() {
        for a in 0..n {
            let h = grid.spacing()[a];
            let m1 = grid.neighbor(idx, a, -1);
            let p1 = grid.neighbor(idx, a, 1);
            let m2 = grid.neighbor(idx, a, -2);
            let p2 = grid.neighbor(idx, a, 2);
            let inside = |j: Option<usize>| j.filter(|&j| mask.contains(j));
            let d = match (inside(m1), inside(p1)) {
                (Some(m), Some(p)) => (v[p] - v[m]) / (2.0 * h),
                _ => match (inside(p1), inside(p2), inside(m1), inside(m2)) {
                    (Some(p), Some(pp), _, _) => (-3.0 * v[idx] + 4.0 * v[p] - v[pp]) / (2.0 * h),
                    (_, _, Some(m), Some(mm)) => (3.0 * v[idx] - 4.0 * v[m] + v[mm]) / (2.0 * h),
                    _ => match (m1, p1) {
                        (Some(m), Some(p)) => (v[p] - v[m]) / (2.0 * h),
                        _ => return Err(Error::MaskTooThin { cell: idx }),
                    },
                },
            };
            out.at_mut(idx)[a] = d;
        }
    }
    Ok(out)
}

/// `Du` from the field's closed-form jet when it has one, else
/// [`differential`].
pub fn resolved_differential(u: &ScalarField, mask: &DomainMask) -> Result<CoVectorField> {
    let Some(jet) = u.jet() else {
        return differential(u, mask);
    };
    if u.grid() != mask.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = mask.grid();
    let n = grid.dim();
    let mut out = CoVectorField::zeros(grid.clone());
    let mut x = [0.0; MAX_DIM];
    for &idx in mask.cells() {
        grid.center(idx, &mut x[..n]);
        (jet.eval)(&x[..n], out.at_mut(idx));
    }
    Ok(out)
}

/// `∇u = J*(Du)` cell by cell on the mask.
pub fn gradient(metric: &dyn FinslerMetric, du: &CoVectorField, mask: &DomainMask) -> Result<VectorField> {
    if du.grid() != mask.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = mask.grid();
    let n = grid.dim();
    let mut out = VectorField::zeros(grid.clone());
    let mut x = [0.0; MAX_DIM];
    for &idx in mask.cells() {
        grid.center(idx, &mut x[..n]);
        legendre_inverse_into(metric, &x[..n], du.at(idx), out.at_mut(idx)).map_err(|e| {
            Error::CellNonConvergence {
                cell: idx,
                source: Box::new(e),
            }
        })?;
    }
    Ok(out)
}

/// `∇u = J*(Du)` on the listed cells only; other cells hold zero.
pub fn gradient_on(metric: &dyn FinslerMetric, du: &CoVectorField, cells: &[usize]) -> Result<VectorField> {
    let grid = du.grid();
    let n = grid.dim();
    let mut out = VectorField::zeros(grid.clone());
    let mut x = [0.0; MAX_DIM];
    for &idx in cells {
        grid.center(idx, &mut x[..n]);
        legendre_inverse_into(metric, &x[..n], du.at(idx), out.at_mut(idx)).map_err(|e| {
            Error::CellNonConvergence {
                cell: idx,
                source: Box::new(e),
            }
        })?;
    }
    Ok(out)
}

/// Sorted union of the support cells of all battery members.
pub fn battery_cells(battery: &TestFunctionBattery) -> Vec<usize> {
    let mut cells: Vec<usize> = battery.members().iter().flat_map(|b| b.cells().iter().copied()).collect();
    cells.sort_unstable();
    cells.dedup();
    cells
}

/// `F*(Du)` per cell on the mask (zero elsewhere).
pub fn dual_norms(metric: &dyn FinslerMetric, du: &CoVectorField, mask: &DomainMask) -> Result<Vec<f64>> {
    let grid = mask.grid();
    let n = grid.dim();
    let mut out = vec![0.0; grid.len()];
    let mut x = [0.0; MAX_DIM];
    for &idx in mask.cells() {
        grid.center(idx, &mut x[..n]);
        out[idx] = dual_norm(metric, &x[..n], du.at(idx)).map_err(|e| Error::CellNonConvergence {
            cell: idx,
            source: Box::new(e),
        })?;
    }
    Ok(out)
}

/// `F(X)` per cell on the mask.
pub fn vector_norms(metric: &dyn FinslerMetric, x_field: &VectorField, mask: &DomainMask) -> Vec<f64> {
    let grid = mask.grid();
    let n = grid.dim();
    let mut out = vec![0.0; grid.len()];
    let mut x = [0.0; MAX_DIM];
    for &idx in mask.cells() {
        grid.center(idx, &mut x[..n]);
        out[idx] = metric.eval(&x[..n], x_field.at(idx));
    }
    out
}

fn ensure_supported(phi: &ScalarField, mask: &DomainMask) -> Result<()> {
    for (idx, &v) in phi.values().iter().enumerate() {
        if v != 0.0 && !mask.is_interior(idx) {
            return Err(Error::UnsupportedPhi(format!("nonzero value at cell {idx}")));
        }
    }
    Ok(())
}

/// `∫ Dφ(X) dm`, the right-hand side of `∫ φ div X dm = −∫ Dφ(X) dm`.
pub fn weak_pairing(
    metric: &Arc<dyn FinslerMetric>,
    x_field: &VectorField,
    phi: &ScalarField,
    mask: &DomainMask,
) -> Result<f64> {
    if x_field.grid() != mask.grid() {
        return Err(Error::GridMismatch);
    }
    ensure_supported(phi, mask)?;
    let dphi = resolved_differential(phi, mask)?;
    let measure = Measure::of_metric(metric);
    let grid = mask.grid();
    let n = grid.dim();
    let vol = grid.cell_volume();
    let mut x = [0.0; MAX_DIM];
    let terms: Vec<f64> = mask
        .cells()
        .iter()
        .map(|&i| {
            grid.center(i, &mut x[..n]);
            dot(dphi.at(i), x_field.at(i)) * measure.density(&x[..n]) * vol
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Integrals of one battery member over its support cells.
struct MemberIntegrals {
    pairing: f64,
    sobolev: f64,
    /// `∫ F*(Dφ) F(X) dm`, an upper bound for `|pairing|`.
    magnitude: f64,
}

fn member_integrals(
    metric: &dyn FinslerMetric,
    measure: &Measure,
    battery: &TestFunctionBattery,
    member: usize,
    x_field: Option<&VectorField>,
) -> Result<MemberIntegrals> {
    let grid = battery.grid();
    let n = grid.dim();
    let vol = grid.cell_volume();
    let bump = battery.member(member);
    let mut x = [0.0; MAX_DIM];
    let mut d = [0.0; MAX_DIM];
    let cells = bump.cells();
    let mut pair = Vec::with_capacity(cells.len());
    let mut l2 = Vec::with_capacity(cells.len());
    let mut grad2 = Vec::with_capacity(cells.len());
    let mut mag = Vec::with_capacity(cells.len());
    for &i in cells {
        grid.center(i, &mut x[..n]);
        let v = bump.eval(&x[..n], &mut d[..n]);
        let w = measure.density(&x[..n]) * vol;
        let fd = dual_norm(metric, &x[..n], &d[..n]).map_err(|e| Error::CellNonConvergence {
            cell: i,
            source: Box::new(e),
        })?;
        l2.push(v * v * w);
        grad2.push(fd * fd * w);
        if let Some(xf) = x_field {
            pair.push(dot(&d[..n], xf.at(i)) * w);
            mag.push(fd * metric.eval(&x[..n], xf.at(i)) * w);
        }
    }
    Ok(MemberIntegrals {
        pairing: pairwise_sum(&pair),
        sobolev: pairwise_sum(&l2).sqrt() + pairwise_sum(&grad2).sqrt(),
        magnitude: pairwise_sum(&mag),
    })
}

/// `‖φ‖_W = ‖φ‖₂ + ‖F*(Dφ)‖₂`.
pub fn sobolev_norm(metric: &Arc<dyn FinslerMetric>, phi: &ScalarField, mask: &DomainMask) -> Result<f64> {
    let dphi = resolved_differential(phi, mask)?;
    let fd = dual_norms(metric.as_ref(), &dphi, mask)?;
    let measure = Measure::of_metric(metric);
    let grid = mask.grid();
    let n = grid.dim();
    let vol = grid.cell_volume();
    let v = phi.values();
    let mut x = [0.0; MAX_DIM];
    let mut a = Vec::with_capacity(mask.count());
    let mut b = Vec::with_capacity(mask.count());
    for &i in mask.cells() {
        grid.center(i, &mut x[..n]);
        let w = measure.density(&x[..n]) * vol;
        a.push(v[i] * v[i] * w);
        b.push(fd[i] * fd[i] * w);
    }
    Ok(pairwise_sum(&a).sqrt() + pairwise_sum(&b).sqrt())
}

/// Battery pairings `∫ Dφ(X) dm` against a vector field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatteryPairings {
    /// `∫ Dφ(X) dm` per member.
    pub pairings: Vec<f64>,
    /// `‖φ‖_W` per member.
    pub sobolev_norms: Vec<f64>,
    /// `∫ F*(Dφ)F(X) dm / ‖φ‖_W` per member, the natural scale of the pairing.
    pub scales: Vec<f64>,
}

pub fn battery_pairings(
    metric: &Arc<dyn FinslerMetric>,
    battery: &TestFunctionBattery,
    x_field: &VectorField,
) -> Result<BatteryPairings> {
    if battery.grid() != x_field.grid() {
        return Err(Error::GridMismatch);
    }
    let measure = Measure::of_metric(metric);
    let mut out = BatteryPairings {
        pairings: Vec::with_capacity(battery.len()),
        sobolev_norms: Vec::with_capacity(battery.len()),
        scales: Vec::with_capacity(battery.len()),
    };
    for k in 0..battery.len() {
        let m = member_integrals(metric.as_ref(), &measure, battery, k, Some(x_field))?;
        out.pairings.push(m.pairing);
        out.sobolev_norms.push(m.sobolev);
        out.scales.push(m.magnitude / m.sobolev);
    }
    Ok(out)
}

/// `∫ φ f dm` for every battery member.
pub fn battery_moments(
    metric: &Arc<dyn FinslerMetric>,
    battery: &TestFunctionBattery,
    f: &ScalarField,
) -> Result<Vec<f64>> {
    if battery.grid() != f.grid() {
        return Err(Error::GridMismatch);
    }
    let measure = Measure::of_metric(metric);
    let grid = battery.grid();
    let n = grid.dim();
    let vol = grid.cell_volume();
    let mut x = [0.0; MAX_DIM];
    let mut d = [0.0; MAX_DIM];
    Ok(battery
        .members()
        .iter()
        .map(|b| {
            let terms: Vec<f64> = b
                .cells()
                .iter()
                .map(|&i| {
                    grid.center(i, &mut x[..n]);
                    b.eval(&x[..n], &mut d[..n]) * f.values()[i] * measure.density(&x[..n]) * vol
                })
                .collect();
            pairwise_sum(&terms)
        })
        .collect())
}

/// Outcome of a battery test of `−σ Δρ ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Superharmonicity {
    pub holds: bool,
    /// `min_φ σ m_φ / ‖φ‖_W`.
    pub margin: f64,
    /// `σ m_φ / ‖φ‖_W` per member.
    pub margins: Vec<f64>,
    pub tolerance: f64,
}

/// Battery test of `−sign·Δρ ≥ 0`: `sign = 1` tests superharmonicity and
/// `sign = −1` subharmonicity. With `tol = None` the tolerance is
/// [`weak_tolerance`] at the largest member scale.
pub fn signed_harmonicity(
    metric: &Arc<dyn FinslerMetric>,
    rho: &ScalarField,
    battery: &TestFunctionBattery,
    mask: &DomainMask,
    sign: f64,
    tol: Option<f64>,
) -> Result<Superharmonicity> {
    let drho = resolved_differential(rho, mask)?;
    let grad = gradient_on(metric.as_ref(), &drho, &battery_cells(battery))?;
    let p = battery_pairings(metric, battery, &grad)?;
    let margins: Vec<f64> = p
        .pairings
        .iter()
        .zip(&p.sobolev_norms)
        .map(|(m, w)| sign * m / w)
        .collect();
    let scale = p.scales.iter().cloned().fold(0.0, f64::max);
    let tolerance = tol.unwrap_or_else(|| weak_tolerance(mask.grid().h(), scale));
    let margin = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(Superharmonicity {
        holds: margin >= -tolerance,
        margin,
        margins,
        tolerance,
    })
}

/// Tests `∫ Dφ(∇ρ) dm ≥ −tol·‖φ‖_W` over the battery.
pub fn is_superharmonic(
    metric: &Arc<dyn FinslerMetric>,
    rho: &ScalarField,
    battery: &TestFunctionBattery,
    mask: &DomainMask,
    tol: Option<f64>,
) -> Result<Superharmonicity> {
    signed_harmonicity(metric, rho, battery, mask, 1.0, tol)
}

/// `max_φ |∫ φ f dm + ∫ Dφ(∇u) dm| / ‖φ‖_W`, the weak residual of `Δu = f`.
pub fn weak_laplacian_residual(
    metric: &Arc<dyn FinslerMetric>,
    u: &ScalarField,
    f: &ScalarField,
    battery: &TestFunctionBattery,
    mask: &DomainMask,
) -> Result<f64> {
    let du = resolved_differential(u, mask)?;
    let grad = gradient_on(metric.as_ref(), &du, &battery_cells(battery))?;
    let p = battery_pairings(metric, battery, &grad)?;
    let moments = battery_moments(metric, battery, f)?;
    Ok(p.pairings
        .iter()
        .zip(&moments)
        .zip(&p.sobolev_norms)
        .map(|((a, b), w)| (a + b).abs() / w)
        .fold(0.0, f64::max))
}
