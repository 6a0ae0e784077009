//! The discrete Dirichlet energy `∫ F*²(Du) dm` and a nonlinear conjugate
//! gradient minimiser for it.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::{dot, pairwise_sum, MAX_DIM};
use crate::metric::{legendre_inverse_into, FinslerMetric};
use crate::quadrature::Measure;

/// `E(u) = Σ_i ½ [F*²(D⁺u_i) + F*²(D⁻u_i)] σ_i |cell|` over the active cells,
/// with one-sided differences `D±` and `u = 0` beyond the grid.
pub(crate) struct DiscreteEnergy<'a> {
    metric: &'a dyn FinslerMetric,
    grid: &'a Grid,
    measure: &'a Measure,
    active: Vec<usize>,
}

impl<'a> DiscreteEnergy<'a> {
    /// `support` flags cells where `u` may be nonzero; the active set is the
    /// support together with its axis neighbours.
    pub fn new(metric: &'a dyn FinslerMetric, grid: &'a Grid, measure: &'a Measure, support: &[bool]) -> Self {
        let n = grid.dim();
        let mut active = vec![false; grid.len()];
        for i in 0..grid.len() {
            if support[i] {
                active[i] = true;
                for a in 0..n {
                    for o in [-1isize, 1] {
                        if let Some(j) = grid.neighbor(i, a, o) {
                            active[j] = true;
                        }
                    }
                }
            }
        }
        let active = (0..grid.len()).filter(|&i| active[i]).collect();
        Self {
            metric,
            grid,
            measure,
            active,
        }
    }

    /// Energy, and its gradient when `grad` is given (overwritten).
    pub fn eval(&self, u: &[f64], mut grad: Option<&mut [f64]>) -> Result<f64> {
        let grid = self.grid;
        let n = grid.dim();
        let vol = grid.cell_volume();
        if let Some(g) = grad.as_deref_mut() {
            g.fill(0.0);
        }
        let mut x = [0.0; MAX_DIM];
        let mut xp = [0.0; MAX_DIM];
        let mut xm = [0.0; MAX_DIM];
        let mut yp = [0.0; MAX_DIM];
        let mut ym = [0.0; MAX_DIM];
        let mut terms = Vec::with_capacity(self.active.len());
        for &i in &self.active {
            grid.center(i, &mut x[..n]);
            for a in 0..n {
                let h = grid.spacing()[a];
                let up = grid.neighbor(i, a, 1).map_or(0.0, |j| u[j]);
                let dn = grid.neighbor(i, a, -1).map_or(0.0, |j| u[j]);
                xp[a] = (up - u[i]) / h;
                xm[a] = (u[i] - dn) / h;
            }
            let w = self.measure.density(&x[..n]) * vol;
            legendre_inverse_into(self.metric, &x[..n], &xp[..n], &mut yp[..n]).map_err(|e| cell_err(i, e))?;
            legendre_inverse_into(self.metric, &x[..n], &xm[..n], &mut ym[..n]).map_err(|e| cell_err(i, e))?;
            // α(J*(α)) = F*²(α)
            terms.push(0.5 * (dot(&xp[..n], &yp[..n]) + dot(&xm[..n], &ym[..n])) * w);
            if let Some(g) = grad.as_deref_mut() {
                for a in 0..n {
                    let h = grid.spacing()[a];
                    let cp = yp[a] * w / h;
                    let cm = ym[a] * w / h;
                    g[i] += cm - cp;
                    if let Some(j) = grid.neighbor(i, a, 1) {
                        g[j] += cp;
                    }
                    if let Some(j) = grid.neighbor(i, a, -1) {
                        g[j] -= cm;
                    }
                }
            }
        }
        Ok(pairwise_sum(&terms))
    }
}

fn cell_err(cell: usize, e: Error) -> Error {
    Error::CellNonConvergence {
        cell,
        source: Box::new(e),
    }
}

pub(crate) fn dot_free(a: &[f64], b: &[f64], free: &[usize]) -> f64 {
    let terms: Vec<f64> = free.iter().map(|&i| a[i] * b[i]).collect();
    pairwise_sum(&terms)
}

pub(crate) struct CgOutcome {
    pub iterations: usize,
    pub converged: bool,
}

/// Minimises `E` over the free cells (other entries of `u` stay fixed) by
/// Polak–Ribière conjugate gradients with a secant line search on the
/// directional derivative, which is exact for quadratic energies. Each step
/// is accepted only if it does not increase the energy.
pub(crate) fn minimize_energy(
    energy: &DiscreteEnergy<'_>,
    u: &mut [f64],
    free: &[usize],
    max_iters: usize,
    rel_tol: f64,
) -> Result<CgOutcome> {
    let len = u.len();
    let mut g = vec![0.0; len];
    let mut e = energy.eval(u, Some(&mut g))?;
    let mask_grad = |g: &mut [f64]| {
        let mut keep = vec![0.0; free.len()];
        for (k, &i) in free.iter().enumerate() {
            keep[k] = g[i];
        }
        g.fill(0.0);
        for (k, &i) in free.iter().enumerate() {
            g[i] = keep[k];
        }
    };
    mask_grad(&mut g);
    let g0 = dot_free(&g, &g, free).sqrt();
    if g0 == 0.0 {
        return Ok(CgOutcome {
            iterations: 0,
            converged: true,
        });
    }
    let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
    let mut g_prev = g.clone();
    let mut trial = vec![0.0; len];
    let mut g_trial = vec![0.0; len];
    let mut step = 1.0 / g0;
    for it in 0..max_iters {
        let slope0 = dot_free(&g, &d, free);
        if slope0 >= 0.0 {
            d.iter_mut().zip(&g).for_each(|(di, gi)| *di = -gi);
            continue;
        }
        for &i in free {
            trial[i] = u[i] + step * d[i];
        }
        copy_fixed(u, &mut trial, free);
        energy.eval(&trial, Some(&mut g_trial))?;
        mask_grad(&mut g_trial);
        let slope1 = dot_free(&g_trial, &d, free);
        let mut t = if slope1 > slope0 {
            step * (-slope0) / (slope1 - slope0)
        } else {
            2.0 * step
        };
        let mut accepted = false;
        for _ in 0..40 {
            for &i in free {
                trial[i] = u[i] + t * d[i];
            }
            let et = energy.eval(&trial, Some(&mut g_trial))?;
            if et <= e {
                let change = (e - et).abs() / e.abs().max(f64::MIN_POSITIVE);
                for &i in free {
                    u[i] = trial[i];
                }
                e = et;
                g_prev.copy_from_slice(&g);
                g.copy_from_slice(&g_trial);
                mask_grad(&mut g);
                accepted = true;
                step = t;
                let gn = dot_free(&g, &g, free).sqrt();
                if change < rel_tol || gn <= 1e-14 * g0 {
                    return Ok(CgOutcome {
                                    iterations: it + 1,
                        converged: true,
                    });
                }
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return Ok(CgOutcome {
                    iterations: it + 1,
                converged: false,
            });
        }
        let num = dot_free(&g, &g, free) - dot_free(&g, &g_prev, free);
        let den = dot_free(&g_prev, &g_prev, free);
        let beta = (num / den).max(0.0);
        for &i in free {
            d[i] = -g[i] + beta * d[i];
        }
    }
    Ok(CgOutcome {
        iterations: max_iters,
        converged: false,
    })
}

fn copy_fixed(src: &[f64], dst: &mut [f64], free: &[usize]) {
    let mut is_free = vec![false; src.len()];
    for &i in free {
        is_free[i] = true;
    }
    for i in 0..src.len() {
        if !is_free[i] {
            dst[i] = src[i];
        }
    }
}
