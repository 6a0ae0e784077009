//! Both sides of the weighted Hardy-type inequalities on concrete instances.
//!
//! Every checker evaluates the raw integrals, attaches the constant
//! symbolically and records its hypotheses. When a hypothesis fails the
//! checker returns [`Error::HypothesisViolated`] carrying the full report, so
//! that a violated premise is never mistaken for a verdict on the inequality.

pub(crate) mod sampler;

use std::sync::Arc;

use crate::battery::TestFunctionBattery;
use crate::calculus::{battery_moments, battery_pairings, gradient, resolved_differential, signed_harmonicity, weak_tolerance};
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::DomainMask;
use crate::linalg::MAX_DIM;
use crate::metric::{legendre_inverse_into, FinslerMetric, MetricCertificate};
use crate::report::{ConstantSide, InequalityReport, TheoremId};
use crate::zoo::{distance_field, Direction};

use sampler::{pow_times, sq_times, Sampler};

/// Regularisation levels `ρ_α = ρ + α` recorded by the weighted Hardy check.
pub const REGULARIZATION_LEVELS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Parameters of the weight a [`WeightPair`] was built from.
#[derive(Debug, Clone)]
pub struct PairOrigin {
    pub rho: ScalarField,
    pub theta: f64,
    pub alpha: f64,
}

/// A vector field `X` and a nonnegative function `f_X`.
#[derive(Debug, Clone)]
pub struct WeightPair {
    pub x: VectorField,
    pub f_x: ScalarField,
    pub origin: Option<PairOrigin>,
}

impl WeightPair {
    pub fn new(x: VectorField, f_x: ScalarField) -> Result<Self> {
        if x.grid() != f_x.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { x, f_x, origin: None })
    }

    /// `X = (1−θ) ∇ρ_α / ρ_α^{1−θ}`, `f_X = (1−θ)² F*²(Dρ_α) / ρ_α^{2−θ}` with
    /// `ρ_α = ρ + α`, on the cells of `mask`.
    pub fn from_weight(
        metric: &Arc<dyn FinslerMetric>,
        rho: &ScalarField,
        theta: f64,
        alpha: f64,
        mask: &DomainMask,
    ) -> Result<Self> {
        let drho = resolved_differential(rho, mask)?;
        let grad = gradient(metric.as_ref(), &drho, mask)?;
        let grid = mask.grid();
        let n = grid.dim();
        let mut x_field = VectorField::zeros(grid.clone());
        let mut f = vec![0.0; grid.len()];
        let mut x = [0.0; MAX_DIM];
        let c = 1.0 - theta;
        for &i in mask.cells() {
            grid.center(i, &mut x[..n]);
            let ra = rho.values()[i] + alpha;
            let g = grad.at(i);
            let fg = metric.eval(&x[..n], g);
            let s = c / ra.powf(1.0 - theta);
            for (xi, gi) in x_field.at_mut(i).iter_mut().zip(g) {
                *xi = s * gi;
            }
            f[i] = c * c * fg * fg / ra.powf(2.0 - theta);
        }
        Ok(Self {
            x: x_field,
            f_x: ScalarField::from_values(grid.clone(), f)?,
            origin: Some(PairOrigin {
                rho: rho.clone(),
                theta,
                alpha,
            }),
        })
    }

    /// Pointwise `(F(X), f_X)` from the weight's jet, when available.
    fn point_rule(
        &self,
        metric: &Arc<dyn FinslerMetric>,
    ) -> Option<(Arc<dyn Fn(&[f64]) -> (f64, f64) + Send + Sync>, Vec<Vec<f64>>)> {
        let o = self.origin.as_ref()?;
        let jet = o.rho.jet()?;
        let f = jet.eval.clone();
        let m = metric.clone();
        let (theta, alpha) = (o.theta, o.alpha);
        let rule = Arc::new(move |x: &[f64]| {
            let n = x.len();
            let mut d = [0.0; MAX_DIM];
            let mut g = [0.0; MAX_DIM];
            let ra = f(x, &mut d[..n]) + alpha;
            if legendre_inverse_into(m.as_ref(), x, &d[..n], &mut g[..n]).is_err() {
                return (f64::NAN, f64::NAN);
            }
            let c = 1.0 - theta;
            let fg = m.eval(x, &g[..n]);
            let mut cx = [0.0; MAX_DIM];
            for i in 0..n {
                cx[i] = c * g[i];
            }
            let fx = m.eval(x, &cx[..n]) / ra.powf(1.0 - theta);
            (fx, c * c * fg * fg / ra.powf(2.0 - theta))
        });
        Some((rule, jet.singular_points.clone()))
    }

    fn sampler<'m>(
        &self,
        metric: &Arc<dyn FinslerMetric>,
        u: &ScalarField,
        mask: &'m DomainMask,
    ) -> Result<Sampler<'m>> {
        if self.x.grid() != mask.grid() || self.f_x.grid() != mask.grid() {
            return Err(Error::GridMismatch);
        }
        let grid = mask.grid();
        let n = grid.dim();
        let mut fx = vec![0.0; grid.len()];
        let mut x = [0.0; MAX_DIM];
        for &i in mask.cells() {
            grid.center(i, &mut x[..n]);
            fx[i] = metric.eval(&x[..n], self.x.at(i));
        }
        Sampler::for_columns(metric, u, mask, fx, self.f_x.values().to_vec(), self.point_rule(metric))
    }
}

fn violated(hypothesis: &str, report: InequalityReport) -> Error {
    Error::HypothesisViolated {
        hypothesis: hypothesis.to_string(),
        report: Box::new(report),
    }
}

/// Returns the report, or the hypothesis error when any recorded hypothesis
/// fails.
fn finish(report: InequalityReport) -> Result<InequalityReport> {
    if let Some((name, _)) = report.hypotheses.iter().find(|(_, v)| !**v) {
        let name = name.clone();
        return Err(violated(&name, report));
    }
    Ok(report)
}

/// Records a battery test of `−sign·Δρ ≥ 0` under `name`.
fn record_harmonicity(
    report: &mut InequalityReport,
    name: &str,
    sign: f64,
    metric: &Arc<dyn FinslerMetric>,
    rho: &ScalarField,
    battery: &TestFunctionBattery,
    mask: &DomainMask,
) -> Result<()> {
    if sign == 0.0 {
        report.set_hypothesis(name, true);
        return Ok(());
    }
    let s = signed_harmonicity(metric, rho, battery, mask, sign, None)?;
    report.set_hypothesis(name, s.holds);
    report.set_meta(&format!("{name}_margin"), s.margin);
    report.set_meta(&format!("{name}_tolerance"), s.tolerance);
    Ok(())
}

fn record_nonnegative(report: &mut InequalityReport, name: &str, field: &ScalarField, mask: &DomainMask) {
    let ok = mask.cells().iter().all(|&i| field.values()[i] >= 0.0);
    report.set_hypothesis(name, ok);
}

fn r_f(cert: &MetricCertificate) -> Result<f64> {
    let r = cert.reversibility();
    if !r.is_finite() {
        return Err(Error::InfiniteReversibility);
    }
    Ok(r)
}

/// `∫ (u²/ρ²) F*²(Dρ) dm ≤ 4 ∫ F²(∇u) dm` for weakly superharmonic `ρ ≥ 0`.
pub fn check_hardy_core(
    metric: &Arc<dyn FinslerMetric>,
    rho: &ScalarField,
    u: &ScalarField,
    mask: &DomainMask,
    battery: &TestFunctionBattery,
) -> Result<InequalityReport> {
    let s = Sampler::for_weight(metric, rho, u, mask)?;
    let lhs = s.integral(|p| sq_times(p.u, p.b * p.b / (p.a * p.a)))?;
    let rhs = s.integral(|p| p.gu * p.gu)?;
    let mut report = InequalityReport::new(
        TheoremId::HardyCore,
        metric.name(),
        metric.dim(),
        mask.grid().h(),
        lhs,
        rhs,
        4.0,
        ConstantSide::Rhs,
    );
    record_nonnegative(&mut report, "rho_nonnegative", rho, mask);
    report.set_hypothesis("integrable", lhs.is_finite() && rhs.is_finite());
    record_harmonicity(&mut report, "superharmonic", 1.0, metric, rho, battery, mask)?;
    finish(report)
}

/// `(1−θ)²/4 ∫ ρ^θ (u²/ρ²) F*²(Dρ) dm ≤ ∫ ρ^θ F²(∇u) dm` under
/// `−(1−θ)Δρ ≥ 0`; for `θ > 1` the constant carries `1/r_F²`.
///
/// The regularised left sides with `ρ + α`, `α ∈ REGULARIZATION_LEVELS`, are
/// recorded in the metadata as `lhs_reg_<α>`.
#[allow(clippy::too_many_arguments)]
pub fn check_weighted_hardy(
    metric: &Arc<dyn FinslerMetric>,
    cert: &MetricCertificate,
    rho: &ScalarField,
    u: &ScalarField,
    theta: f64,
    mask: &DomainMask,
    battery: &TestFunctionBattery,
) -> Result<InequalityReport> {
    if !theta.is_finite() {
        return Err(Error::BadExponent(format!("theta = {theta}")));
    }
    let c = (1.0 - theta) * (1.0 - theta) / 4.0;
    let constant = if theta > 1.0 {
        let r = r_f(cert)?;
        c / (r * r)
    } else {
        c
    };
    let s = Sampler::for_weight(metric, rho, u, mask)?;
    let lhs = s.integral(|p| sq_times(p.u, p.a.powf(theta) * p.b * p.b / (p.a * p.a)))?;
    let rhs = s.integral(|p| p.a.powf(theta) * p.gu * p.gu)?;
    let mut report = InequalityReport::new(
        TheoremId::WeightedHardy,
        metric.name(),
        metric.dim(),
        mask.grid().h(),
        lhs,
        rhs,
        constant,
        ConstantSide::Lhs,
    )
    .with_param("theta", theta);
    let mut previous = f64::NEG_INFINITY;
    let mut monotone = true;
    for alpha in REGULARIZATION_LEVELS {
        let la = s.integral(|p| {
            let ra = p.a + alpha;
            sq_times(p.u, ra.powf(theta) * p.b * p.b / (ra * ra))
        })?;
        report.set_meta(&format!("lhs_reg_{alpha:e}"), la);
        monotone &= la >= previous;
        previous = la;
    }
    monotone &= lhs >= previous;
    // For θ < 2 the regularised sides increase towards the unregularised one.
    if theta < 2.0 {
        report.set_meta("reg_trend_monotone", if monotone { 1.0 } else { 0.0 });
    }
    let w1 = s.integral(|p| p.b * p.b * p.a.powf(theta - 2.0))?;
    let w2 = s.integral(|p| p.a.powf(theta))?;
    record_nonnegative(&mut report, "rho_nonnegative", rho, mask);
    report.set_hypothesis(
        "integrable",
        w1.is_finite() && w2.is_finite() && lhs.is_finite() && rhs.is_finite(),
    );
    record_harmonicity(&mut report, "signed_superharmonic", 1.0 - theta, metric, rho, battery, mask)?;
    finish(report)
}

/// `(1+q)²/(4 r_F²) ∫ ρ^q F*²(Dρ) u² dm ≤ ∫ ρ^{2+q} F²(∇u) dm` for weakly
/// subharmonic `ρ ≥ 0` and `q > −1`.
#[allow(clippy::too_many_arguments)]
pub fn check_caccioppoli(
    metric: &Arc<dyn FinslerMetric>,
    cert: &MetricCertificate,
    rho: &ScalarField,
    u: &ScalarField,
    q: f64,
    mask: &DomainMask,
    battery: &TestFunctionBattery,
) -> Result<InequalityReport> {
    if !(q > -1.0) || !q.is_finite() {
        return Err(Error::BadExponent(format!("q = {q} must exceed -1")));
    }
    let r = r_f(cert)?;
    let constant = (1.0 + q) * (1.0 + q) / (4.0 * r * r);
    let s = Sampler::for_weight(metric, rho, u, mask)?;
    let lhs = s.integral(|p| sq_times(p.u, p.a.powf(q) * p.b * p.b))?;
    let rhs = s.integral(|p| p.a.powf(2.0 + q) * p.gu * p.gu)?;
    let mut report = InequalityReport::new(
        TheoremId::Caccioppoli,
        metric.name(),
        metric.dim(),
        mask.grid().h(),
        lhs,
        rhs,
        constant,
        ConstantSide::Lhs,
    )
    .with_param("q", q);
    let w1 = s.integral(|p| p.a.powf(q) * p.b * p.b)?;
    let w2 = s.integral(|p| p.a.powf(2.0 + q))?;
    record_nonnegative(&mut report, "rho_nonnegative", rho, mask);
    report.set_hypothesis("integrable", w1.is_finite() && w2.is_finite());
    record_harmonicity(&mut report, "subharmonic", -1.0, metric, rho, battery, mask)?;
    finish(report)
}

fn base_point(metric: &Arc<dyn FinslerMetric>, mask: &DomainMask) -> Vec<f64> {
    mask.puncture()
        .map(|p| p.to_vec())
        .unwrap_or_else(|| vec![0.0; metric.dim()])
}

/// `(n−2)²(1−α)²/(4 r_F²) ∫ r^{α(2−n)} u²/r² dm ≤ ∫ r^{α(2−n)} F²(∇u) dm`
/// with `r` the forward distance from the mask's puncture (or the origin).
/// `α = 0` is reported as `DIST_HARDY_BASIC`.
pub fn check_distance_hardy(
    metric: &Arc<dyn FinslerMetric>,
    cert: &MetricCertificate,
    alpha: f64,
    u: &ScalarField,
    mask: &DomainMask,
) -> Result<InequalityReport> {
    let n = metric.dim();
    if n < 3 {
        return Err(Error::DomainMismatch(format!("dimension {n} < 3")));
    }
    if !(alpha < 1.0) {
        return Err(Error::BadExponent(format!("alpha = {alpha} must be < 1")));
    }
    if !cert.declares_flat_hypotheses() {
        return Err(Error::CurvatureUnverified(
            "certificate must declare flag curvature <= 0 and S = 0".into(),
        ));
    }
    let r = r_f(cert)?;
    let nf = n as f64;
    let constant = (nf - 2.0).powi(2) * (1.0 - alpha).powi(2) / (4.0 * r * r);
    let dist = distance_field(metric, &base_point(metric, mask), mask.grid(), Direction::Forward)?;
    let s = Sampler::for_weight(metric, &dist, u, mask)?;
    let e = alpha * (2.0 - nf);
    let lhs = s.integral(|p| sq_times(p.u, p.a.powf(e) / (p.a * p.a)))?;
    let rhs = s.integral(|p| p.a.powf(e) * p.gu * p.gu)?;
    let id = if alpha == 0.0 {
        TheoremId::DistHardyBasic
    } else {
        TheoremId::DistHardy
    };
    let mut report = InequalityReport::new(id, metric.name(), n, mask.grid().h(), lhs, rhs, constant, ConstantSide::Lhs)
        .with_param("alpha", alpha);
    report.set_hypothesis("integrable", lhs.is_finite() && rhs.is_finite());
    report.set_hypothesis("flat_certificate", true);
    finish(report)
}

/// `(1−α)²/(4 r_F²) ∫ |log r|^α u²/(r log r)² dm ≤ ∫ |log r|^α F²(∇u) dm` on
/// `{r < 1}` for `α < 1` and on `{r > 1}` for `α > 1`. Cells with
/// `|log r| < 10h` are left out.
pub fn check_log_hardy(
    metric: &Arc<dyn FinslerMetric>,
    cert: &MetricCertificate,
    alpha: f64,
    u: &ScalarField,
    mask: &DomainMask,
) -> Result<InequalityReport> {
    let n = metric.dim();
    if n < 2 {
        return Err(Error::DomainMismatch(format!("dimension {n} < 2")));
    }
    if alpha == 1.0 || !alpha.is_finite() {
        return Err(Error::BadExponent(format!("alpha = {alpha}")));
    }
    let r = r_f(cert)?;
    let constant = (1.0 - alpha).powi(2) / (4.0 * r * r);
    let dist = distance_field(metric, &base_point(metric, mask), mask.grid(), Direction::Forward)?;
    let inside = |t: f64| if alpha < 1.0 { t < 1.0 } else { t > 1.0 };
    if let Some(&bad) = mask.cells().iter().find(|&&i| !inside(dist.values()[i])) {
        return Err(Error::DomainMismatch(format!(
            "cell {bad} lies outside {{r {} 1}}",
            if alpha < 1.0 { "<" } else { ">" }
        )));
    }
    let h = mask.grid().h();
    let flags: Vec<bool> = (0..mask.grid().len())
        .map(|i| mask.contains(i) && dist.values()[i].ln().abs() >= 10.0 * h)
        .collect();
    let trimmed = DomainMask::from_flags(mask.grid().clone(), mask.descriptor().clone(), flags)?;
    let s = Sampler::for_weight(metric, &dist, u, &trimmed)?;
    let lhs = s.integral(|p| {
        let l = p.a.ln();
        sq_times(p.u, l.abs().powf(alpha) / (p.a * l).powi(2))
    })?;
    let rhs = s.integral(|p| p.a.ln().abs().powf(alpha) * p.gu * p.gu)?;
    let mut report = InequalityReport::new(
        TheoremId::LogHardy,
        metric.name(),
        n,
        h,
        lhs,
        rhs,
        constant,
        ConstantSide::Lhs,
    )
    .with_param("alpha", alpha);
    if let Some(t) = mask.truncation_radius() {
        report.set_meta("truncation_radius", t);
    }
    let dropped = mask
        .cells()
        .iter()
        .filter(|&&i| !trimmed.contains(i) && u.values()[i] != 0.0)
        .count();
    report.set_meta("u_nonzero_cells_dropped", dropped as f64);
    report.set_hypothesis("integrable", lhs.is_finite() && rhs.is_finite());
    finish(report)
}

/// Records `f_X ≤ −div X` (weakly) and the integrability of `F²(X)/f_X`.
fn record_pair_hypotheses(
    report: &mut InequalityReport,
    metric: &Arc<dyn FinslerMetric>,
    pair: &WeightPair,
    s: &Sampler<'_>,
    battery: &TestFunctionBattery,
) -> Result<()> {
    let p = battery_pairings(metric, battery, &pair.x)?;
    let moments = battery_moments(metric, battery, &pair.f_x)?;
    let margins: Vec<f64> = p
        .pairings
        .iter()
        .zip(&moments)
        .zip(&p.sobolev_norms)
        .map(|((a, b), w)| (a - b) / w)
        .collect();
    let margin = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = p.scales.iter().cloned().fold(0.0, f64::max);
    let tol = weak_tolerance(s.mask().grid().h(), scale);
    report.set_hypothesis("divergence_bound", margin >= -tol);
    report.set_meta("divergence_bound_margin", margin);
    report.set_meta("divergence_bound_tolerance", tol);
    let nonneg = s.mask().cells().iter().all(|&i| pair.f_x.values()[i] >= 0.0);
    report.set_hypothesis("f_x_nonnegative", nonneg);
    let w = s.integral(|q| if q.a == 0.0 { 0.0 } else { q.a * q.a / q.b })?;
    report.set_hypothesis("integrable", w.is_finite());
    Ok(())
}

/// `∫ u² f_X dm ≤ 4 ∫ (F²(X)/f_X) F²(∇u) dm`.
pub fn check_lemma_core(
    metric: &Arc<dyn FinslerMetric>,
    pair: &WeightPair,
    u: &ScalarField,
    mask: &DomainMask,
    battery: &TestFunctionBattery,
) -> Result<InequalityReport> {
    let s = pair.sampler(metric, u, mask)?;
    let lhs = s.integral(|p| sq_times(p.u, p.b))?;
    let rhs = s.integral(|p| if p.gu == 0.0 { 0.0 } else { p.a * p.a / p.b * p.gu * p.gu })?;
    let mut report = InequalityReport::new(
        TheoremId::LemmaCore,
        metric.name(),
        metric.dim(),
        mask.grid().h(),
        lhs,
        rhs,
        4.0,
        ConstantSide::Rhs,
    );
    record_pair_hypotheses(&mut report, metric, pair, &s, battery)?;
    finish(report)
}

fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

/// `∫ |u|^s F^q(X) dm ≤ 4^{1/p} A^{1/p} B^{1/p'}` with
/// `A = ∫ (F²(X)/f_X) F²(∇u) dm` and
/// `B = ∫ F^{qp'}(X) f_X^{1−p'} |u|^{(ps−2)/(p−1)} dm`; `A` and `B` are kept in
/// the metadata.
#[allow(clippy::too_many_arguments)]
pub fn check_general_lemma(
    metric: &Arc<dyn FinslerMetric>,
    pair: &WeightPair,
    u: &ScalarField,
    q: f64,
    s_exp: f64,
    p: f64,
    mask: &DomainMask,
    battery: &TestFunctionBattery,
) -> Result<InequalityReport> {
    if !(s_exp > 0.0) || !(p > 1.0) || !q.is_finite() || !s_exp.is_finite() || !p.is_finite() {
        return Err(Error::BadExponent(format!("q = {q}, s = {s_exp}, p = {p}")));
    }
    let pc = conjugate(p);
    let e = (p * s_exp - 2.0) / (p - 1.0);
    let s = pair.sampler(metric, u, mask)?;
    let lhs = s.integral(|z| pow_times(z.u, s_exp, z.a.powf(q)))?;
    let a = s.integral(|z| if z.gu == 0.0 { 0.0 } else { z.a * z.a / z.b * z.gu * z.gu })?;
    let b = s.integral(|z| pow_times(z.u, e, z.a.powf(q * pc) / z.b.powf(pc - 1.0)))?;
    let rhs = a.powf(1.0 / p) * b.powf(1.0 / pc);
    let mut report = InequalityReport::new(
        TheoremId::LemmaGeneral,
        metric.name(),
        metric.dim(),
        mask.grid().h(),
        lhs,
        rhs,
        4f64.powf(1.0 / p),
        ConstantSide::Rhs,
    )
    .with_param("q", q)
    .with_param("s", s_exp)
    .with_param("p", p);
    report.set_meta("energy_term", a);
    report.set_meta("weight_term", b);
    record_pair_hypotheses(&mut report, metric, pair, &s, battery)?;
    finish(report)
}

/// Solves `1/q = 1/2 + (1−r)/(rz)` for `r` and checks `1/s = r/2 + (1−r)/z`.
pub fn gn_exponent(q: f64, s: f64, z: f64) -> Result<f64> {
    if !(s > 0.0) || !(z > 0.0) || q == 0.0 || !q.is_finite() {
        return Err(Error::ExponentInconsistent(format!("q = {q}, s = {s}, z = {z}")));
    }
    let r = 1.0 / (1.0 + z * (1.0 / q - 0.5));
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::ExponentInconsistent(format!("r = {r} outside (0, 1)")));
    }
    let resid = 1.0 / s - (r / 2.0 + (1.0 - r) / z);
    if resid.abs() > 1e-12 * (1.0 + 1.0 / s) {
        return Err(Error::ExponentInconsistent(format!(
            "1/s = {} but r/2 + (1-r)/z = {}",
            1.0 / s,
            r / 2.0 + (1.0 - r) / z
        )));
    }
    Ok(r)
}

/// `(∫ |u|^s F*^q(Dρ)/ρ^q dm)^{1/s} ≤ 2^{q/s} (∫ F²(∇u) dm)^{r/2} (∫ |u|^z dm)^{(1−r)/z}`.
#[allow(clippy::too_many_arguments)]
pub fn check_gn(
    metric: &Arc<dyn FinslerMetric>,
    rho: &ScalarField,
    u: &ScalarField,
    q: f64,
    s_exp: f64,
    z: f64,
    mask: &DomainMask,
    battery: &TestFunctionBattery,
) -> Result<InequalityReport> {
    let r = gn_exponent(q, s_exp, z)?;
    let s = Sampler::for_weight(metric, rho, u, mask)?;
    let weighted = s.integral(|p| pow_times(p.u, s_exp, (p.b / p.a).powf(q)))?;
    let energy = s.integral(|p| p.gu * p.gu)?;
    let lz = s.integral(|p| pow_times(p.u, z, 1.0))?;
    let lhs = weighted.powf(1.0 / s_exp);
    let rhs = energy.powf(r / 2.0) * lz.powf((1.0 - r) / z);
    let mut report = InequalityReport::new(
        TheoremId::Gn,
        metric.name(),
        metric.dim(),
        mask.grid().h(),
        lhs,
        rhs,
        2f64.powf(q / s_exp),
        ConstantSide::Rhs,
    )
    .with_param("q", q)
    .with_param("s", s_exp)
    .with_param("z", z)
    .with_param("r", r);
    if q == 1.0 && s_exp == 2.0 {
        report = report.with_label("COROLLARY_1_2");
    }
    report.set_meta("energy", energy);
    report.set_meta("lz_integral", lz);
    record_nonnegative(&mut report, "rho_nonnegative", rho, mask);
    report.set_hypothesis("integrable", weighted.is_finite());
    record_harmonicity(&mut report, "superharmonic", 1.0, metric, rho, battery, mask)?;
    finish(report)
}

/// `∫ |u|^s dm ≤ 4^{1/p} (∫ F²(∇u) dm)^{1/p}
/// (∫ ρ^{2(p'−1)} F*^{−2(p'−1)}(Dρ) |u|^{(ps−2)/(p−1)} dm)^{1/p'}`.
#[allow(clippy::too_many_arguments)]
pub fn check_hpw(
    metric: &Arc<dyn FinslerMetric>,
    rho: &ScalarField,
    u: &ScalarField,
    s_exp: f64,
    p: f64,
    mask: &DomainMask,
    battery: &TestFunctionBattery,
) -> Result<InequalityReport> {
    if !(s_exp > 0.0) || !(p > 1.0) || !s_exp.is_finite() || !p.is_finite() {
        return Err(Error::BadExponent(format!("s = {s_exp}, p = {p}")));
    }
    let pc = conjugate(p);
    let e = (p * s_exp - 2.0) / (p - 1.0);
    let s = Sampler::for_weight(metric, rho, u, mask)?;
    let lhs = s.integral(|z| pow_times(z.u, s_exp, 1.0))?;
    let energy = s.integral(|z| z.gu * z.gu)?;
    let w = s.integral(|z| pow_times(z.u, e, (z.a / z.b).powf(2.0 * (pc - 1.0))))?;
    let rhs = energy.powf(1.0 / p) * w.powf(1.0 / pc);
    let mut report = InequalityReport::new(
        TheoremId::Hpw,
        metric.name(),
        metric.dim(),
        mask.grid().h(),
        lhs,
        rhs,
        4f64.powf(1.0 / p),
        ConstantSide::Rhs,
    )
    .with_param("s", s_exp)
    .with_param("p", p);
    if p == 2.0 && s_exp == 2.0 {
        report = report.with_label("COROLLARY_1_3");
    }
    report.set_meta("energy", energy);
    report.set_meta("weight_term", w);
    record_nonnegative(&mut report, "rho_nonnegative", rho, mask);
    report.set_hypothesis("integrable", w.is_finite() && lhs.is_finite());
    record_harmonicity(&mut report, "superharmonic", 1.0, metric, rho, battery, mask)?;
    finish(report)
}
