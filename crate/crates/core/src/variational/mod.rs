//! Best-constant minimisation, the sharpness probe, condenser capacities and
//! the Poincaré estimator.

mod energy;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::calculus::{dual_norms, resolved_differential};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::{build_domain, DomainDescriptor, DomainMask, Grid};
use crate::inequality::sampler::{sq_times, Sampler};
use crate::linalg::pairwise_sum;
use crate::metric::FinslerMetric;
use crate::quadrature::{integrate_cells, Measure};

use energy::{dot_free, minimize_energy, DiscreteEnergy};

/// `∫ F*²(Du) dm / ∫ (u²/ρ²) F*²(Dρ) dm` by (refined) quadrature.
pub fn rayleigh_quotient(
    metric: &Arc<dyn FinslerMetric>,
    u: &ScalarField,
    rho: &ScalarField,
    mask: &DomainMask,
) -> Result<f64> {
    let s = Sampler::for_weight(metric, rho, u, mask)?;
    let num = s.integral(|p| p.gu * p.gu)?;
    let den = s.integral(|p| sq_times(p.u, p.b * p.b / (p.a * p.a)))?;
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::ZeroDenominator);
    }
    Ok(num / den)
}

/// Discrete Dirichlet energy `Σ ½[F*²(D⁺u) + F*²(D⁻u)]·|cell|` of a grid field,
/// the functional minimised by [`minimize_rayleigh`] and [`capacity_estimate`].
pub fn dirichlet_energy(metric: &Arc<dyn FinslerMetric>, u: &ScalarField) -> Result<f64> {
    let grid = u.grid();
    let measure = Measure::of_metric(metric);
    let support: Vec<bool> = u.values().iter().map(|v| *v != 0.0).collect();
    DiscreteEnergy::new(metric.as_ref(), grid, &measure, &support).eval(u.values(), None)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// Steepest descent.
    SteepestDescent,
    /// Polak–Ribière conjugate directions.
    #[default]
    ConjugateGradient,
}

#[derive(Debug, Clone)]
pub struct RayleighResult {
    pub estimate: f64,
    /// Minimiser normalised to unit weighted `L²` norm.
    pub field: ScalarField,
    /// Quotient after each accepted step, starting with the initial field.
    pub trace: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

fn is_stalled(trace: &[f64]) -> bool {
    let k = trace.len();
    if k <= 10 {
        return false;
    }
    let (old, new) = (trace[k - 11], trace[k - 1]);
    (old - new) <= 1e-8 * new.abs()
}

/// Smallest root and eigenvector of the 2×2 pencil `A v = λ M v`.
fn ritz_pair(a: [[f64; 2]; 2], m: [[f64; 2]; 2]) -> Option<(f64, [f64; 2])> {
    let qa = m[0][0] * m[1][1] - m[0][1] * m[0][1];
    let qb = -(a[0][0] * m[1][1] + a[1][1] * m[0][0] - 2.0 * a[0][1] * m[0][1]);
    let qc = a[0][0] * a[1][1] - a[0][1] * a[0][1];
    if !(qa > 1e-14 * m[0][0] * m[1][1]) {
        return None;
    }
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
    let q = -0.5 * (qb + qb.signum() * disc.sqrt());
    let (r1, r2) = (q / qa, if q != 0.0 { qc / q } else { q / qa });
    let lam = r1.min(r2);
    let v1 = [-(a[0][1] - lam * m[0][1]), a[0][0] - lam * m[0][0]];
    let v2 = [a[1][1] - lam * m[1][1], -(a[0][1] - lam * m[0][1])];
    let n1 = v1[0].hypot(v1[1]);
    let n2 = v2[0].hypot(v2[1]);
    let v = if n1 >= n2 { v1 } else { v2 };
    if v[0] == 0.0 && v[1] == 0.0 {
        return None;
    }
    Some((lam, v))
}

/// Minimises the discrete Rayleigh quotient
/// `E(u) / Σ u² F*²(Dρ)/ρ² |cell|` over fields supported in the interior of
/// `mask`, starting from `init`.
///
/// Each step searches the plane spanned by the iterate and the descent
/// direction (a Rayleigh–Ritz step, exact for quadratic energies) and falls
/// back to halving the step along the direction. Steps are accepted only when
/// the quotient does not increase, so `trace` is non-increasing. Exhausting
/// `max_iters` returns the best field with `converged = false`.
pub fn minimize_rayleigh(
    metric: &Arc<dyn FinslerMetric>,
    rho: &ScalarField,
    mask: &DomainMask,
    init: &ScalarField,
    max_iters: usize,
    step_rule: StepRule,
) -> Result<RayleighResult> {
    let grid = mask.grid().clone();
    if rho.grid() != &grid || init.grid() != &grid {
        return Err(Error::GridMismatch);
    }
    let drho = resolved_differential(rho, mask)?;
    let b = dual_norms(metric.as_ref(), &drho, mask)?;
    let vol = grid.cell_volume();
    let mut weight = vec![0.0; grid.len()];
    let mut support = vec![false; grid.len()];
    for i in mask.interior_cells() {
        let r = rho.values()[i];
        let w = b[i] * b[i] / (r * r);
        if w.is_finite() {
            weight[i] = w * vol;
            support[i] = true;
        }
    }
    let free: Vec<usize> = (0..grid.len()).filter(|&i| support[i]).collect();
    let measure = Measure::of_metric(metric);
    let energy = DiscreteEnergy::new(metric.as_ref(), &grid, &measure, &support);
    for &i in &free {
        weight[i] *= measure.density(&grid.center_vec(i));
    }

    let len = grid.len();
    let mut u = vec![0.0; len];
    for &i in &free {
        u[i] = init.values()[i];
    }
    let wnorm = |u: &[f64]| -> f64 {
        let t: Vec<f64> = free.iter().map(|&i| weight[i] * u[i] * u[i]).collect();
        pairwise_sum(&t)
    };
    let wpair = |u: &[f64], v: &[f64]| -> f64 {
        let t: Vec<f64> = free.iter().map(|&i| weight[i] * u[i] * v[i]).collect();
        pairwise_sum(&t)
    };
    let w0 = wnorm(&u);
    if !(w0 > 0.0) || !w0.is_finite() {
        return Err(Error::ZeroDenominator);
    }
    let s = 1.0 / w0.sqrt();
    u.iter_mut().for_each(|v| *v *= s);

    let mut ge = vec![0.0; len];
    let mut eu = energy.eval(&u, Some(&mut ge))?;
    let mut q = eu;
    let mut trace = vec![q];
    let mut d = vec![0.0; len];
    let mut p = vec![0.0; len];
    let mut g = vec![0.0; len];
    let mut g_prev = vec![0.0; len];
    let mut trial = vec![0.0; len];
    let mut g_trial = vec![0.0; len];
    let mut have_prev = false;
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..max_iters {
        iterations = it + 1;
        // ∇Q = (∇E − Q ∇W)/W with W(u) = 1
        for &i in &free {
            g[i] = ge[i] - q * 2.0 * weight[i] * u[i];
        }
        let gg = dot_free(&g, &g, &free);
        if gg == 0.0 {
            converged = true;
            break;
        }
        let beta = match (step_rule, have_prev) {
            (StepRule::ConjugateGradient, true) => {
                let num = gg - dot_free(&g, &g_prev, &free);
                (num / dot_free(&g_prev, &g_prev, &free)).max(0.0)
            }
            _ => 0.0,
        };
        for &i in &free {
            p[i] = -g[i] + beta * p[i];
        }
        if dot_free(&p, &g, &free) >= 0.0 {
            for &i in &free {
                p[i] = -g[i];
            }
        }
        g_prev.copy_from_slice(&g);
        have_prev = true;
        // search direction: p without its component along u, unit weighted norm
        let c = wpair(&u, &p);
        for &i in &free {
            d[i] = p[i] - c * u[i];
        }
        let wd = wnorm(&d);
        if !(wd > 0.0) {
            converged = true;
            break;
        }
        let sd = 1.0 / wd.sqrt();
        for &i in &free {
            d[i] *= sd;
        }
        let ed = energy.eval(&d, None)?;
        // polarisation ½⟨∇E(u), d⟩, exact for quadratic energies
        let bud = 0.5 * dot_free(&ge, &d, &free);
        let a_mat = [[eu, bud], [bud, ed]];
        let m_mat = [[1.0, 0.0], [0.0, 1.0]];
        let mut accepted = None;
        if let Some((_, v)) = ritz_pair(a_mat, m_mat) {
            let (a0, b0) = if v[0] < 0.0 { (-v[0], -v[1]) } else { (v[0], v[1]) };
            if a0 > 0.0 {
                let mut t = b0 / a0;
                for _ in 0..40 {
                    for &i in &free {
                        trial[i] = u[i] + t * d[i];
                    }
                    let wt = wnorm(&trial);
                    let et = energy.eval(&trial, Some(&mut g_trial))?;
                    let qt = et / wt;
                    if qt <= q {
                        let st = 1.0 / wt.sqrt();
                        for &i in &free {
                            trial[i] *= st;
                        }
                        for g in g_trial.iter_mut() {
                            *g *= st;
                        }
                        accepted = Some((qt, et / wt));
                        break;
                    }
                    t *= 0.5;
                }
            }
        }
        match accepted {
            Some((qt, et)) => {
                std::mem::swap(&mut u, &mut trial);
                std::mem::swap(&mut ge, &mut g_trial);
                eu = et;
                q = qt;
                trace.push(q);
                if is_stalled(&trace) {
                    converged = true;
                    break;
                }
            }
            None => {
                // no decrease representable in floating point
                converged = true;
                break;
            }
        }
    }
    let field = ScalarField::from_values(grid, u)?;
    Ok(RayleighResult {
        estimate: q,
        field,
        trace,
        converged,
        iterations,
    })
}

fn smoothstep(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        (0.0, 0.0)
    } else if t >= 1.0 {
        (1.0, 0.0)
    } else {
        let v = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
        let d = 30.0 * t * t * (1.0 - t) * (1.0 - t);
        (v, d)
    }
}

fn outer_radius(mask: &DomainMask) -> Result<(Vec<f64>, f64)> {
    let grid = mask.grid();
    let n = grid.dim();
    let origin = vec![0.0; n];
    match mask.descriptor() {
        DomainDescriptor::Ball { center, radius } | DomainDescriptor::PuncturedBall { center, radius, .. } => {
            Ok((center.clone().unwrap_or(origin), *radius))
        }
        DomainDescriptor::Box | DomainDescriptor::PuncturedBox { .. } => {
            let c = mask.puncture().map(|p| p.to_vec()).unwrap_or(origin);
            let r = (0..n)
                .map(|a| (c[a] - grid.lower()[a]).min(grid.upper()[a] - c[a]))
                .fold(f64::INFINITY, f64::min);
            Ok((c, r))
        }
        other => Err(Error::DomainMismatch(format!(
            "sharpness probe needs a ball or box, got {}",
            other.label()
        ))),
    }
}

/// Cutoff `η_w`: zero for `|x − c| ≤ w`, one on `[2w, R/2]` (smooth in
/// `log |x − c|`), then smoothly down to zero at `R − 2h`.
fn collar_cutoff(grid: &Arc<Grid>, c: Vec<f64>, w: f64, outer: f64) -> ScalarField {
    let h = grid.h();
    let (o0, o1) = (0.5 * outer, outer - 2.0 * h);
    let jet = Arc::new(move |x: &[f64], d: &mut [f64]| {
        let r = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if r <= w || r >= o1 {
            d.iter_mut().for_each(|v| *v = 0.0);
            return 0.0;
        }
        let (si, dsi) = smoothstep((r / w).log2());
        let dsi = dsi / (r * std::f64::consts::LN_2);
        let (so, dso) = smoothstep((r - o0) / (o1 - o0));
        let (eo, deo) = (1.0 - so, -dso / (o1 - o0));
        let dr = si * deo + dsi * eo;
        for (k, v) in d.iter_mut().enumerate() {
            *v = dr * (x[k] - c[k]) / r;
        }
        si * eo
    });
    ScalarField::from_jet(grid.clone(), jet, vec![])
}

/// Rayleigh quotients of `ρ^{1/2}·η_w` for each collar width `w`; evidence
/// only, no limit is asserted.
pub fn sharpness_probe(
    metric: &Arc<dyn FinslerMetric>,
    rho: &ScalarField,
    mask: &DomainMask,
    collar_widths: &[f64],
) -> Result<Vec<f64>> {
    let (c, outer) = outer_radius(mask)?;
    for &w in collar_widths {
        if !(w > 0.0) || 2.0 * w >= 0.5 * outer {
            return Err(Error::DomainMismatch(format!("collar width {w} does not fit radius {outer}")));
        }
    }
    let sqrt_rho = rho.compose(|t| t.sqrt(), |t| 0.5 / t.sqrt());
    let run = |w: f64| -> Result<f64> {
        let eta = collar_cutoff(mask.grid(), c.clone(), w, outer);
        let u = sqrt_rho.product(&eta)?;
        rayleigh_quotient(metric, &u, rho, mask)
    };
    std::thread::scope(|s| {
        let handles: Vec<_> = collar_widths.iter().map(|&w| s.spawn(move || run(w))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sharpness worker panicked"))
            .collect()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrendHint {
    ParabolicTrend,
    HyperbolicTrend,
}

#[derive(Debug, Clone, Serialize)]
pub struct CondenserEstimate {
    pub outer_radius: f64,
    pub h: f64,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CapacityResult {
    /// Value at the largest outer radius.
    pub estimate: f64,
    pub per_radius: Vec<CondenserEstimate>,
    /// Estimates non-increasing in the outer radius.
    pub monotone: bool,
    /// Heuristic: which of `c + a/R` and `a/log R` fits the sequence better.
    pub hint: TrendHint,
}

/// Options for [`capacity_estimate`]: the grid spacing per outer radius (a
/// single value applies to all) and solver limits.
#[derive(Debug, Clone)]
pub struct CapacityOptions {
    pub spacing: Vec<f64>,
    pub max_iters: usize,
    pub rel_tol: f64,
}

impl CapacityOptions {
    pub fn with_spacing(spacing: Vec<f64>) -> Self {
        Self {
            spacing,
            max_iters: 20_000,
            rel_tol: 1e-11,
        }
    }
}

/// Condenser capacity of `K` relative to the Euclidean ball of radius `R`:
/// the discrete energy minimised over `u = 1` on the cells of `K`, `u = 0` on
/// cells outside the ball, then clamped to `[0, 1]`.
pub fn condenser_capacity(
    metric: &Arc<dyn FinslerMetric>,
    k: &DomainDescriptor,
    outer_radius: f64,
    h: f64,
    max_iters: usize,
    rel_tol: f64,
) -> Result<(CondenserEstimate, ScalarField)> {
    let n = metric.dim();
    let grid = Arc::new(Grid::cube_with_spacing(n, outer_radius + 2.0 * h, h)?);
    let k_mask = build_domain(k, &grid, None).map_err(|e| match e {
        Error::DegenerateDomain => Error::DegenerateK,
        e => e,
    })?;
    let len = grid.len();
    let radius_of = |i: usize| grid.center_vec(i).iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut u = vec![0.0; len];
    let mut support = vec![false; len];
    let mut a_k: f64 = 0.0;
    for &i in k_mask.cells() {
        let r = radius_of(i);
        if r >= outer_radius {
            return Err(Error::DegenerateK);
        }
        a_k = a_k.max(r);
        u[i] = 1.0;
        support[i] = true;
    }
    let mut free = Vec::new();
    for i in 0..len {
        if k_mask.contains(i) {
            continue;
        }
        let r = radius_of(i);
        if r < outer_radius {
            free.push(i);
            support[i] = true;
            u[i] = ((outer_radius - r) / (outer_radius - a_k)).clamp(0.0, 1.0);
        }
    }
    if free.is_empty() {
        return Err(Error::DegenerateK);
    }
    let measure = Measure::of_metric(metric);
    let energy = DiscreteEnergy::new(metric.as_ref(), &grid, &measure, &support);
    let out = minimize_energy(&energy, &mut u, &free, max_iters, rel_tol)?;
    for &i in &free {
        u[i] = u[i].clamp(0.0, 1.0);
    }
    let value = energy.eval(&u, None)?;
    let field = ScalarField::from_values(grid.clone(), u)?;
    Ok((
        CondenserEstimate {
            outer_radius,
            h,
            value,
            iterations: out.iterations,
            converged: out.converged,
        },
        field,
    ))
}

fn fit_residual(xs: &[f64], ys: &[f64], with_intercept: bool) -> f64 {
    let k = xs.len() as f64;
    let (a, c) = if with_intercept {
        let mx = xs.iter().sum::<f64>() / k;
        let my = ys.iter().sum::<f64>() / k;
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let a = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        (a, my - a * mx)
    } else {
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        (sxy / sxx, 0.0)
    };
    xs.iter()
        .zip(ys)
        .map(|(x, y)| ((a * x + c - y) / y).powi(2))
        .sum::<f64>()
}

fn trend_hint(per: &[CondenserEstimate]) -> TrendHint {
    let ys: Vec<f64> = per.iter().map(|e| e.value).collect();
    let inv: Vec<f64> = per.iter().map(|e| 1.0 / e.outer_radius).collect();
    let inv_log: Vec<f64> = per.iter().map(|e| 1.0 / e.outer_radius.ln()).collect();
    if per.len() < 3 {
        // two points: extrapolate `c + a/R` and test whether `c` stays positive
        if per.len() == 2 {
            let a = (ys[0] - ys[1]) / (inv[0] - inv[1]);
            let c = ys[1] - a * inv[1];
            if c > 0.25 * ys[1] {
                return TrendHint::HyperbolicTrend;
            }
        }
        return TrendHint::ParabolicTrend;
    }
    let hyper = fit_residual(&inv, &ys, true);
    let para = fit_residual(&inv_log, &ys, false);
    if hyper <= para {
        TrendHint::HyperbolicTrend
    } else {
        TrendHint::ParabolicTrend
    }
}

/// Condenser capacities of `K` for each outer radius; the estimates for
/// different radii are computed concurrently.
pub fn capacity_estimate(
    metric: &Arc<dyn FinslerMetric>,
    k: &DomainDescriptor,
    outer_radii: &[f64],
    options: &CapacityOptions,
) -> Result<CapacityResult> {
    if outer_radii.is_empty() {
        return Err(Error::DegenerateK);
    }
    let spacing: Vec<f64> = match options.spacing.len() {
        1 => vec![options.spacing[0]; outer_radii.len()],
        l if l == outer_radii.len() => options.spacing.clone(),
        l => {
            return Err(Error::InvalidGrid(format!(
                "{l} spacings for {} outer radii",
                outer_radii.len()
            )))
        }
    };
    let per_radius: Vec<CondenserEstimate> = std::thread::scope(|s| {
        let handles: Vec<_> = outer_radii
            .iter()
            .zip(&spacing)
            .map(|(&r, &h)| {
                s.spawn(move || {
                    condenser_capacity(metric, k, r, h, options.max_iters, options.rel_tol).map(|p| p.0)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("capacity worker panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut order: Vec<usize> = (0..per_radius.len()).collect();
    order.sort_by(|&a, &b| per_radius[a].outer_radius.total_cmp(&per_radius[b].outer_radius));
    let sorted: Vec<CondenserEstimate> = order.iter().map(|&i| per_radius[i].clone()).collect();
    let monotone = sorted.windows(2).all(|w| w[1].value <= w[0].value);
    let hint = trend_hint(&sorted);
    Ok(CapacityResult {
        estimate: sorted.last().map(|e| e.value).unwrap_or(f64::NAN),
        per_radius: sorted,
        monotone,
        hint,
    })
}

/// `max_u ‖u − ū‖₂ / ‖F*(Du)‖₂` over the members, `ū` the mean over the mask.
/// A lower bound for the optimal Poincaré constant of the domain.
pub fn poincare_constant_probe(
    metric: &Arc<dyn FinslerMetric>,
    ball_mask: &DomainMask,
    battery: &[ScalarField],
) -> Result<f64> {
    if battery.is_empty() {
        return Err(Error::UnsupportedPhi("empty battery".into()));
    }
    let measure = Measure::of_metric(metric);
    let volume = integrate_cells(ball_mask, &measure, |_| 1.0)?;
    let mut best = f64::NEG_INFINITY;
    for (k, u) in battery.iter().enumerate() {
        if u.grid() != ball_mask.grid() {
            return Err(Error::GridMismatch);
        }
        let v = u.values();
        let mean = integrate_cells(ball_mask, &measure, |i| v[i])? / volume;
        let spread = integrate_cells(ball_mask, &measure, |i| (v[i] - mean) * (v[i] - mean))?;
        let du = resolved_differential(u, ball_mask)?;
        let g = dual_norms(metric.as_ref(), &du, ball_mask)?;
        let energy = integrate_cells(ball_mask, &measure, |i| g[i] * g[i])?;
        if !(energy > 0.0) {
            return Err(Error::ConstantField { member: k });
        }
        best = best.max((spread / energy).sqrt());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_is_c1() {
        assert_eq!(smoothstep(-1.0), (0.0, 0.0));
        assert_eq!(smoothstep(2.0), (1.0, 0.0));
        let (v, d) = smoothstep(0.5);
        assert!((v - 0.5).abs() < 1e-15);
        assert!((d - 1.875).abs() < 1e-15);
        let eps = 1e-6;
        let fd = (smoothstep(0.3 + eps).0 - smoothstep(0.3 - eps).0) / (2.0 * eps);
        assert!((fd - smoothstep(0.3).1).abs() < 1e-8);
    }

    #[test]
    fn ritz_pair_diagonal() {
        let (lam, v) = ritz_pair([[3.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!((lam - 1.0).abs() < 1e-14);
        assert!(v[0].abs() < 1e-14 && v[1] != 0.0);
        assert!(ritz_pair([[1.0, 0.0], [0.0, 1.0]], [[1.0, 1.0], [1.0, 1.0]]).is_none());
    }

    #[test]
    fn ritz_pair_generalised() {
        let a = [[2.0, 1.0], [1.0, 3.0]];
        let m = [[2.0, 0.5], [0.5, 1.0]];
        let (lam, v) = ritz_pair(a, m).unwrap();
        for row in 0..2 {
            let r = (a[row][0] - lam * m[row][0]) * v[0] + (a[row][1] - lam * m[row][1]) * v[1];
            assert!(r.abs() < 1e-12);
        }
        // the other root of det(A − λM) = 0 is larger
        let qa = 2.0 * 1.0 - 0.25;
        let qc = 6.0 - 1.0;
        assert!(qc / qa / lam >= lam);
    }

    #[test]
    fn stall_needs_a_flat_tail() {
        assert!(!is_stalled(&[1.0; 10]));
        assert!(is_stalled(&[1.0; 11]));
        let falling: Vec<f64> = (0..20).map(|k| 1.0 / (1.0 + k as f64)).collect();
        assert!(!is_stalled(&falling));
    }

    fn estimates(values: &[(f64, f64)]) -> Vec<CondenserEstimate> {
        values
            .iter()
            .map(|&(outer_radius, value)| CondenserEstimate {
                outer_radius,
                h: 0.1,
                value,
                iterations: 1,
                converged: true,
            })
            .collect()
    }

    #[test]
    fn trend_hints() {
        let hyper = estimates(&[(2.0, 4.0 + 1.0 / 2.0), (4.0, 4.0 + 1.0 / 4.0), (8.0, 4.0 + 1.0 / 8.0)]);
        assert_eq!(trend_hint(&hyper), TrendHint::HyperbolicTrend);
        let para = estimates(&[(2.0, 3.0 / 2f64.ln()), (4.0, 3.0 / 4f64.ln()), (8.0, 3.0 / 8f64.ln())]);
        assert_eq!(trend_hint(&para), TrendHint::ParabolicTrend);
        assert_eq!(trend_hint(&hyper[..2]), TrendHint::HyperbolicTrend);
        assert_eq!(trend_hint(&para[..1]), TrendHint::ParabolicTrend);
    }
}
