//! Polar transform `F*` and the Legendre transforms `J`, `J* = J⁻¹`.

use super::{ensure_dim, CoVector, FinslerMetric, Vector};
use crate::error::{Error, Result};
use crate::linalg::{cholesky_solve, dot, lu_solve, norm, MAX_DIM};

/// Residual tolerance (in normalised covector components) of the Legendre solve.
pub const LEGENDRE_TOL: f64 = 1e-10;
/// Residual accepted when the line search stalls at the round-off floor of
/// finite-difference derivatives.
const STALL_TOL: f64 = 1e-8;
const MAX_ITERS: usize = 200;
const MAX_HALVINGS: usize = 50;

/// `J(x, y) = ∂/∂y (½F²)`, written into `out`.
pub fn legendre_into<M: FinslerMetric + ?Sized>(m: &M, x: &[f64], y: &[f64], out: &mut [f64]) {
    let n = y.len();
    let f = m.eval(x, y);
    if f == 0.0 {
        out[..n].fill(0.0);
        return;
    }
    m.eval_grad(x, y, out);
    for v in &mut out[..n] {
        *v *= f;
    }
}

pub fn legendre<M: FinslerMetric + ?Sized>(m: &M, y: &Vector) -> Result<CoVector> {
    ensure_dim(m, y.dim())?;
    let mut out = vec![0.0; y.dim()];
    legendre_into(m, &y.base_point, &y.components, &mut out);
    Ok(CoVector {
        base_point: y.base_point.clone(),
        components: out,
    })
}

/// Solves `J(x, y) = α` for `y`, writing it into `out`; returns the number of
/// Newton iterations.
///
/// The system is normalised to `|α| = 1` (both `J` and `J*` are positively
/// homogeneous of degree one) and solved by damped Newton on the strictly
/// concave objective `α(y) − ½F²(y)` with the fundamental tensor as Jacobian.
pub fn legendre_inverse_into<M: FinslerMetric + ?Sized>(
    m: &M,
    x: &[f64],
    alpha: &[f64],
    out: &mut [f64],
) -> Result<usize> {
    let n = alpha.len();
    if m.legendre_inverse_closed(x, alpha, out) {
        return Ok(0);
    }
    let scale = norm(alpha);
    if scale == 0.0 {
        out[..n].fill(0.0);
        return Ok(0);
    }
    if !scale.is_finite() {
        return Err(Error::NonConvergence {
            operation: "legendre_inverse",
            residual: f64::INFINITY,
        });
    }
    let mut a = [0.0; MAX_DIM];
    for i in 0..n {
        a[i] = alpha[i] / scale;
    }
    let a = &a[..n];

    let mut y = [0.0; MAX_DIM];
    y[..n].copy_from_slice(a);
    let mut jy = [0.0; MAX_DIM];
    let mut res = [0.0; MAX_DIM];
    let mut hess = [0.0; MAX_DIM * MAX_DIM];
    let mut step = [0.0; MAX_DIM];
    let mut trial = [0.0; MAX_DIM];

    let objective = |y: &[f64]| {
        let f = m.eval(x, y);
        0.5 * f * f - dot(a, y)
    };
    let residual = |y: &[f64], jy: &mut [f64], res: &mut [f64]| {
        legendre_into(m, x, y, jy);
        for i in 0..n {
            res[i] = jy[i] - a[i];
        }
        norm(&res[..n])
    };

    let mut rn = residual(&y[..n], &mut jy, &mut res);
    let mut obj = objective(&y[..n]);
    for iter in 0..MAX_ITERS {
        if rn <= LEGENDRE_TOL {
            for i in 0..n {
                out[i] = y[i] * scale;
            }
            return Ok(iter);
        }
        m.hessian(x, &y[..n], &mut hess[..n * n]);
        let neg: [f64; MAX_DIM] = std::array::from_fn(|i| if i < n { -res[i] } else { 0.0 });
        if !cholesky_solve(&hess, n, &neg[..n], &mut step) {
            return Err(Error::NonConvergence {
                operation: "legendre_inverse",
                residual: rn,
            });
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            for i in 0..n {
                trial[i] = y[i] + t * step[i];
            }
            let trial_obj = objective(&trial[..n]);
            let mut trial_j = [0.0; MAX_DIM];
            let mut trial_res = [0.0; MAX_DIM];
            let trial_rn = residual(&trial[..n], &mut trial_j, &mut trial_res);
            if trial_obj.is_finite() && (trial_obj < obj || trial_rn < rn) {
                y[..n].copy_from_slice(&trial[..n]);
                res = trial_res;
                rn = trial_rn;
                obj = trial_obj;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            if rn <= STALL_TOL {
                for i in 0..n {
                    out[i] = y[i] * scale;
                }
                return Ok(iter);
            }
            return Err(Error::NonConvergence {
                operation: "legendre_inverse",
                residual: rn,
            });
        }
    }
    if rn <= STALL_TOL {
        for i in 0..n {
            out[i] = y[i] * scale;
        }
        return Ok(MAX_ITERS);
    }
    Err(Error::NonConvergence {
        operation: "legendre_inverse",
        residual: rn,
    })
}

/// `J*(x, α)`, the unique maximiser of `y ↦ α(y) − ½F²(x, y)`.
pub fn legendre_inverse<M: FinslerMetric + ?Sized>(m: &M, alpha: &CoVector) -> Result<Vector> {
    ensure_dim(m, alpha.dim())?;
    let mut out = vec![0.0; alpha.dim()];
    legendre_inverse_into(m, &alpha.base_point, &alpha.components, &mut out)?;
    Ok(Vector {
        base_point: alpha.base_point.clone(),
        components: out,
    })
}

/// `F*(x, α)` evaluated as `F(x, J*(x, α))`.
///
/// This is the route used on grids; [`polar_transform`] computes the same
/// quantity from its defining supremum.
pub fn dual_norm<M: FinslerMetric + ?Sized>(m: &M, x: &[f64], alpha: &[f64]) -> Result<f64> {
    let mut y = [0.0; MAX_DIM];
    legendre_inverse_into(m, x, alpha, &mut y)?;
    Ok(m.eval(x, &y[..alpha.len()]))
}

/// `F*(x, α) = sup { α(y) : F(x, y) = 1 }`.
///
/// Stationary points of `α(y)` on the indicatrix solve
/// `μ ∂F/∂y = α, F(y) = 1`; this system is solved by damped Newton from
/// several starting directions projected onto the indicatrix, and the largest
/// value among converged maximisers (`μ > 0`) is returned.
pub fn polar_transform<M: FinslerMetric + ?Sized>(m: &M, alpha: &CoVector) -> Result<f64> {
    ensure_dim(m, alpha.dim())?;
    polar_transform_slice(m, &alpha.base_point, &alpha.components)
}

pub fn polar_transform_slice<M: FinslerMetric + ?Sized>(
    m: &M,
    x: &[f64],
    alpha: &[f64],
) -> Result<f64> {
    let n = alpha.len();
    let scale = norm(alpha);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let a: Vec<f64> = alpha.iter().map(|v| v / scale).collect();

    let mut starts: Vec<Vec<f64>> = vec![a.clone()];
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            starts.push(e);
        }
    }

    let mut best: Option<f64> = None;
    let mut best_residual = f64::INFINITY;
    for d in starts {
        match indicatrix_newton(m, x, &a, &d) {
            Ok(value) => best = Some(best.map_or(value, |b: f64| b.max(value))),
            Err(r) => best_residual = best_residual.min(r),
        }
    }
    best.map(|v| v * scale).ok_or(Error::NonConvergence {
        operation: "polar_transform",
        residual: best_residual,
    })
}

/// Newton on `G(y, μ) = (μ∇F(y) − α, F(y) − 1)`. Returns `α(y)` for a
/// maximiser, or the final residual on failure.
fn indicatrix_newton<M: FinslerMetric + ?Sized>(
    m: &M,
    x: &[f64],
    a: &[f64],
    start: &[f64],
) -> std::result::Result<f64, f64> {
    let n = a.len();
    let dim = n + 1;
    let f0 = m.eval(x, start);
    if !(f0 > 0.0) {
        return Err(f64::INFINITY);
    }
    let mut y: Vec<f64> = start.iter().map(|v| v / f0).collect();
    let mut mu = dot(a, &y).max(1e-3);

    let eval_g = |y: &[f64], mu: f64, g: &mut [f64], grad: &mut [f64]| -> f64 {
        m.eval_grad(x, y, grad);
        for i in 0..n {
            g[i] = mu * grad[i] - a[i];
        }
        g[n] = m.eval(x, y) - 1.0;
        norm(&g[..dim])
    };

    let mut g = [0.0; MAX_DIM + 1];
    let mut grad = [0.0; MAX_DIM];
    let mut gn = eval_g(&y, mu, &mut g, &mut grad);
    let mut hess = [0.0; MAX_DIM * MAX_DIM];
    let mut jac = [0.0; (MAX_DIM + 1) * (MAX_DIM + 1)];
    let mut delta = [0.0; MAX_DIM + 1];

    for _ in 0..MAX_ITERS {
        if gn <= 1e-12 {
            break;
        }
        let f = m.eval(x, &y);
        m.hessian(x, &y, &mut hess[..n * n]);
        jac[..dim * dim].fill(0.0);
        for i in 0..n {
            for j in 0..n {
                // ∇²F = (g − ∇F ∇Fᵀ) / F
                jac[i * dim + j] = mu * (hess[i * n + j] - grad[i] * grad[j]) / f;
            }
            jac[i * dim + n] = grad[i];
            jac[n * dim + i] = grad[i];
        }
        let neg: Vec<f64> = g[..dim].iter().map(|v| -v).collect();
        if !lu_solve(&jac, dim, &neg, &mut delta) {
            return Err(gn);
        }
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..MAX_HALVINGS {
            let ty: Vec<f64> = (0..n).map(|i| y[i] + t * delta[i]).collect();
            let tmu = mu + t * delta[n];
            let mut tg = [0.0; MAX_DIM + 1];
            let mut tgrad = [0.0; MAX_DIM];
            let tgn = eval_g(&ty, tmu, &mut tg, &mut tgrad);
            if tgn.is_finite() && tgn < gn {
                y = ty;
                mu = tmu;
                g = tg;
                grad = tgrad;
                gn = tgn;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    let tol = if gn <= 1e-12 { true } else { gn <= STALL_TOL };
    if tol && mu > 0.0 {
        Ok(dot(a, &y))
    } else {
        Err(gn)
    }
}

/// The polar transform viewed as a Finsler structure on the cotangent bundle.
///
/// Evaluation goes through [`dual_norm`]; a failed solve yields `NaN`.
#[derive(Debug)]
pub struct PolarMetric<'a, M: FinslerMetric + ?Sized> {
    inner: &'a M,
}

impl<'a, M: FinslerMetric + ?Sized> PolarMetric<'a, M> {
    pub fn new(inner: &'a M) -> Self {
        Self { inner }
    }
}

impl<M: FinslerMetric + ?Sized> FinslerMetric for PolarMetric<'_, M> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, x: &[f64], alpha: &[f64]) -> f64 {
        dual_norm(self.inner, x, alpha).unwrap_or(f64::NAN)
    }

    /// `∂F*/∂α = J*(α) / F*(α)`.
    fn eval_grad(&self, x: &[f64], alpha: &[f64], out: &mut [f64]) {
        let n = alpha.len();
        if legendre_inverse_into(self.inner, x, alpha, out).is_err() {
            out[..n].fill(f64::NAN);
            return;
        }
        let f = self.inner.eval(x, &out[..n]);
        for v in &mut out[..n] {
            *v /= f;
        }
    }

    fn density(&self, x: &[f64]) -> f64 {
        self.inner.density(x)
    }

    fn is_minkowski(&self) -> bool {
        self.inner.is_minkowski()
    }

    fn name(&self) -> &str {
        "polar"
    }
}
