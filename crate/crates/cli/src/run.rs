//! Executes the checks of a loaded configuration.

use std::sync::Arc;
use std::time::Instant;

use finsler_core::inequality::{
    check_caccioppoli, check_distance_hardy, check_general_lemma, check_gn, check_hardy_core, check_hpw,
    check_lemma_core, check_log_hardy, check_weighted_hardy, WeightPair,
};
use finsler_core::profiles::{distance_power, inverse_distance, log_distance, radial_cutoff, shell_bump};
use finsler_core::report::fmt_num;
use finsler_core::variational::{
    capacity_estimate, minimize_rayleigh, poincare_constant_probe, sharpness_probe, CapacityOptions,
    CapacityResult, StepRule,
};
use finsler_core::zoo::distance_field;
use finsler_core::{
    build_battery, build_domain, build_metric, Direction, DomainMask, Error, FinslerMetric, Grid,
    InequalityReport, MetricCertificate, ScalarField, TestFunctionBattery, TheoremId,
};
use serde::Serialize;

use crate::config::{Check, ConfigError, GridConfig, LoadedConfig, RunConfig, TestFunctionConfig, WeightConfig};

/// Everything the checks share: metric, grid, masks and fields.
pub struct Context {
    pub metric: Arc<dyn FinslerMetric>,
    pub cert: MetricCertificate,
    pub grid: Arc<Grid>,
    pub mask: DomainMask,
    pub battery: TestFunctionBattery,
    pub rho: Option<ScalarField>,
    pub u: Option<ScalarField>,
}

/// Failure while preparing the shared context.
#[derive(Debug, thiserror::Error)]
pub enum SetupError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("solver failure while preparing fields: {0}")]
    Solver(Error),
}

fn setup_err<'a>(cfg: &'a LoadedConfig, field: &str) -> impl Fn(Error) -> SetupError + 'a {
    let field = field.to_string();
    move |e: Error| {
        if e.is_non_convergence() {
            SetupError::Solver(e)
        } else {
            SetupError::Config(cfg.error(field.clone(), e))
        }
    }
}

pub fn build_grid(raw: &RunConfig) -> finsler_core::Result<Grid> {
    match &raw.grid {
        GridConfig::Cube { half_width, h } => Grid::cube(raw.metric.dim(), *half_width, *h),
        GridConfig::Box {
            lower,
            upper,
            resolution,
        } => Grid::new(lower.clone(), upper.clone(), resolution.clone()),
    }
}

pub fn build_context(cfg: &LoadedConfig) -> Result<Context, SetupError> {
    let raw = &cfg.raw;
    let spec = raw.metric.to_spec().map_err(|m| cfg.error("metric", m))?;
    let (metric, cert) = build_metric(&spec).map_err(setup_err(cfg, "metric"))?;
    let grid = Arc::new(build_grid(raw).map_err(setup_err(cfg, "grid"))?);
    let origin = vec![0.0; metric.dim()];
    let r = distance_field(&metric, &origin, &grid, Direction::Forward).map_err(setup_err(cfg, "domain"))?;
    let mask = build_domain(&raw.domain, &grid, Some(&r)).map_err(setup_err(cfg, "domain"))?;
    let battery_mask = match &raw.battery_domain {
        Some(d) => build_domain(d, &grid, Some(&r)).map_err(setup_err(cfg, "battery_domain"))?,
        None => mask.clone(),
    };
    let battery = build_battery(&raw.battery, &battery_mask).map_err(setup_err(cfg, "battery"))?;
    let rho = match &raw.weight {
        None => None,
        Some(w) => Some(build_weight(cfg, &metric, &grid, w)?),
    };
    let u = match &raw.test_function {
        None => None,
        Some(TestFunctionConfig::RadialCutoff { radius, power }) => {
            Some(radial_cutoff(&metric, &grid, *radius, *power).map_err(setup_err(cfg, "test_function"))?)
        }
        Some(TestFunctionConfig::ShellBump { inner, outer }) => {
            Some(shell_bump(&metric, &grid, *inner, *outer).map_err(setup_err(cfg, "test_function"))?)
        }
    };
    Ok(Context {
        metric,
        cert,
        grid,
        mask,
        battery,
        rho,
        u,
    })
}

fn build_weight(
    cfg: &LoadedConfig,
    metric: &Arc<dyn FinslerMetric>,
    grid: &Arc<Grid>,
    w: &WeightConfig,
) -> Result<ScalarField, SetupError> {
    let field = match w {
        WeightConfig::InverseDistance { direction } => inverse_distance(metric, grid, *direction),
        WeightConfig::DistancePower { exponent, direction } => distance_power(metric, grid, *exponent, *direction),
        WeightConfig::LogDistance { sign, direction } => log_distance(metric, grid, *sign, *direction),
        WeightConfig::CustomField { path } => {
            let full = cfg.resolve(path);
            let text = std::fs::read_to_string(&full).map_err(|e| cfg.error("weight.path", e))?;
            let values: Vec<f64> = serde_json::from_str(&text).map_err(|e| cfg.error("weight.path", e))?;
            if values.len() != grid.len() {
                return Err(cfg
                    .error("weight.path", format!("{} values for {} cells", values.len(), grid.len()))
                    .into());
            }
            ScalarField::from_values(grid.clone(), values)
        }
    };
    field.map_err(setup_err(cfg, "weight"))
}

/// Extra output of the non-inequality checks.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Detail {
    Inequality(InequalityReport),
    BestConstant {
        estimate: f64,
        trace: Vec<f64>,
        iterations: usize,
        converged: bool,
    },
    Sharpness {
        widths: Vec<f64>,
        quotients: Vec<f64>,
        strictly_decreasing: bool,
    },
    Capacity(CapacityResult),
    Poincare {
        estimate: f64,
    },
}

/// One row of the report; every requested check yields exactly one.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub theorem_id: TheoremId,
    pub metric: String,
    pub n: usize,
    pub params: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub constant: Option<f64>,
    pub ratio: Option<f64>,
    pub margin: Option<f64>,
    pub passed: bool,
    pub grid_h: f64,
    pub runtime_ms: f64,
    pub error: Option<String>,
    pub non_convergence: bool,
    pub detail: Option<Detail>,
}

impl CheckRow {
    fn blank(ctx: &Context, check: &Check) -> Self {
        Self {
            theorem_id: check.theorem,
            metric: ctx.metric.name().to_string(),
            n: ctx.metric.dim(),
            params: check.params_string(),
            lhs: None,
            rhs: None,
            constant: None,
            ratio: None,
            margin: None,
            passed: false,
            grid_h: ctx.grid.h(),
            runtime_ms: 0.0,
            error: None,
            non_convergence: false,
            detail: None,
        }
    }

    fn from_report(ctx: &Context, report: InequalityReport) -> Self {
        Self {
            theorem_id: report.theorem_id,
            metric: report.metric.clone(),
            n: report.n,
            params: report.params_string(),
            lhs: Some(report.lhs),
            rhs: Some(report.rhs),
            constant: Some(report.constant),
            ratio: report.ratio,
            margin: Some(report.margin),
            passed: report.passed && report.hypotheses_hold(),
            grid_h: ctx.grid.h(),
            runtime_ms: 0.0,
            error: None,
            non_convergence: false,
            detail: Some(Detail::Inequality(report)),
        }
    }
}

fn join(vs: &[f64]) -> String {
    vs.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>().join("/")
}

fn with_param(params: &str, extra: &str) -> String {
    if params.is_empty() {
        extra.to_string()
    } else {
        format!("{params};{extra}")
    }
}

fn required<'a>(f: &'a Option<ScalarField>, what: &str) -> finsler_core::Result<&'a ScalarField> {
    f.as_ref().ok_or_else(|| Error::InvalidSpec(format!("missing {what}")))
}

fn num(check: &Check, key: &str) -> f64 {
    check.number(key).unwrap_or(f64::NAN)
}

fn inequality(ctx: &Context, check: &Check) -> finsler_core::Result<InequalityReport> {
    let m = &ctx.metric;
    let (mask, bat) = (&ctx.mask, &ctx.battery);
    let u = required(&ctx.u, "test_function")?;
    let rho = || required(&ctx.rho, "weight");
    let pair = || WeightPair::from_weight(m, rho()?, 0.0, 0.0, mask);
    match check.theorem {
        TheoremId::HardyCore => check_hardy_core(m, rho()?, u, mask, bat),
        TheoremId::WeightedHardy => check_weighted_hardy(m, &ctx.cert, rho()?, u, num(check, "theta"), mask, bat),
        TheoremId::Caccioppoli => check_caccioppoli(m, &ctx.cert, rho()?, u, num(check, "q"), mask, bat),
        TheoremId::DistHardy | TheoremId::DistHardyBasic => {
            check_distance_hardy(m, &ctx.cert, num(check, "alpha"), u, mask)
        }
        TheoremId::LogHardy => check_log_hardy(m, &ctx.cert, num(check, "alpha"), u, mask),
        TheoremId::LemmaCore => check_lemma_core(m, &pair()?, u, mask, bat),
        TheoremId::LemmaGeneral => check_general_lemma(
            m,
            &pair()?,
            u,
            num(check, "q"),
            num(check, "s"),
            num(check, "p"),
            mask,
            bat,
        ),
        TheoremId::Gn => check_gn(m, rho()?, u, num(check, "q"), num(check, "s"), num(check, "z"), mask, bat),
        TheoremId::Hpw => check_hpw(m, rho()?, u, num(check, "s"), num(check, "p"), mask, bat),
        other => Err(Error::InvalidSpec(format!("{other} is not an inequality"))),
    }
}

fn best_constant(ctx: &Context, cfg: &RunConfig, check: &Check, row: &mut CheckRow) -> finsler_core::Result<()> {
    let rho = required(&ctx.rho, "weight")?;
    let init = match &ctx.u {
        Some(u) => u.clone(),
        None => ctx.battery.member_field(0),
    };
    let iters = check
        .number("max_iters")
        .map(|v| v as usize)
        .unwrap_or(cfg.tolerances.rayleigh_max_iters);
    let res = minimize_rayleigh(&ctx.metric, rho, &ctx.mask, &init, iters, StepRule::default())?;
    let floor = 0.25;
    let tol = (20.0 * row.grid_h * row.grid_h * floor).max(1e-10);
    row.lhs = Some(floor);
    row.rhs = Some(res.estimate);
    row.constant = Some(1.0);
    row.ratio = Some(res.estimate / floor);
    row.margin = Some(res.estimate - floor);
    row.passed = res.estimate - floor >= -tol;
    row.params = with_param(&row.params, &format!("converged={}", res.converged));
    row.detail = Some(Detail::BestConstant {
        estimate: res.estimate,
        trace: res.trace,
        iterations: res.iterations,
        converged: res.converged,
    });
    Ok(())
}

fn sharpness(ctx: &Context, check: &Check, row: &mut CheckRow) -> finsler_core::Result<()> {
    let rho = required(&ctx.rho, "weight")?;
    let widths = check.list("widths").unwrap_or(&[]).to_vec();
    let q = sharpness_probe(&ctx.metric, rho, &ctx.mask, &widths)?;
    let decreasing = q.windows(2).all(|w| w[1] < w[0]);
    let last = q.last().copied().unwrap_or(f64::NAN);
    row.lhs = Some(0.25);
    row.rhs = Some(last);
    row.constant = Some(1.0);
    row.ratio = Some(last / 0.25);
    row.margin = Some(last - 0.25);
    row.passed = decreasing;
    row.params = with_param(&row.params, &format!("quotients={}", join(&q)));
    row.detail = Some(Detail::Sharpness {
        widths,
        quotients: q,
        strictly_decreasing: decreasing,
    });
    Ok(())
}

fn capacity(ctx: &Context, cfg: &RunConfig, row: &mut CheckRow) -> finsler_core::Result<()> {
    let cap = cfg
        .capacity
        .as_ref()
        .ok_or_else(|| Error::InvalidSpec("missing capacity section".into()))?;
    let options = CapacityOptions {
        spacing: cap.spacing.clone(),
        max_iters: cfg.tolerances.capacity_max_iters,
        rel_tol: cfg.tolerances.capacity_rel_tol,
    };
    let res = capacity_estimate(&ctx.metric, &cap.k, &cap.outer_radii, &options)?;
    let values: Vec<f64> = res.per_radius.iter().map(|e| e.value).collect();
    let hint = serde_json::to_value(res.hint)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    row.params = with_param(
        &row.params,
        &format!(
            "k={};radii={};values={};hint={hint}",
            cap.k.label(),
            join(&cap.outer_radii),
            join(&values)
        ),
    );
    row.lhs = Some(res.estimate);
    row.passed = res.monotone && res.per_radius.iter().all(|e| e.converged);
    row.non_convergence = res.per_radius.iter().any(|e| !e.converged);
    row.grid_h = res.per_radius.last().map(|e| e.h).unwrap_or(row.grid_h);
    row.detail = Some(Detail::Capacity(res));
    Ok(())
}

fn poincare(ctx: &Context, row: &mut CheckRow) -> finsler_core::Result<()> {
    let members: Vec<ScalarField> = (0..ctx.battery.len()).map(|i| ctx.battery.member_field(i)).collect();
    let est = poincare_constant_probe(&ctx.metric, &ctx.mask, &members)?;
    row.lhs = Some(est);
    row.passed = est.is_finite() && est > 0.0;
    row.detail = Some(Detail::Poincare { estimate: est });
    Ok(())
}

/// Runs one check; errors become part of the row.
pub fn run_check(ctx: &Context, cfg: &RunConfig, check: &Check) -> CheckRow {
    let start = Instant::now();
    let mut row = CheckRow::blank(ctx, check);
    let outcome = match check.theorem {
        TheoremId::BestConstant => best_constant(ctx, cfg, check, &mut row),
        TheoremId::Sharpness => sharpness(ctx, check, &mut row),
        TheoremId::Capacity => capacity(ctx, cfg, &mut row),
        TheoremId::Poincare => poincare(ctx, &mut row),
        _ => inequality(ctx, check).map(|r| row = CheckRow::from_report(ctx, r)),
    };
    if let Err(e) = outcome {
        row.non_convergence = e.is_non_convergence();
        row.error = Some(e.to_string());
        if let Error::HypothesisViolated { report, .. } = e {
            let msg = row.error.take();
            row = CheckRow::from_report(ctx, *report);
            row.passed = false;
            row.error = msg;
        }
    }
    row.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    row
}

/// Runs the checks concurrently; rows come back in request order.
pub fn run_checks(ctx: &Context, cfg: &RunConfig, checks: &[Check]) -> Vec<CheckRow> {
    std::thread::scope(|s| {
        let handles: Vec<_> = checks.iter().map(|c| s.spawn(move || run_check(ctx, cfg, c))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("check worker panicked"))
            .collect()
    })
}

/// Full result of a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub grid_h: f64,
    pub cells: usize,
    pub mask_cells: usize,
    pub battery_size: usize,
    pub total_runtime_ms: f64,
    pub rows: Vec<CheckRow>,
}

impl RunReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn any_non_convergence(&self) -> bool {
        self.rows.iter().any(|r| r.non_convergence)
    }

    /// 0 pass, 1 check failure, 3 solver non-convergence.
    pub fn exit_code(&self) -> i32 {
        if self.any_non_convergence() {
            3
        } else if self.all_passed() {
            0
        } else {
            1
        }
    }
}

pub fn run(cfg: &LoadedConfig, checks: &[Check]) -> Result<RunReport, SetupError> {
    let start = Instant::now();
    let ctx = build_context(cfg)?;
    let rows = run_checks(&ctx, &cfg.raw, checks);
    Ok(RunReport {
        config: cfg.raw.clone(),
        grid_h: ctx.grid.h(),
        cells: ctx.grid.len(),
        mask_cells: ctx.mask.count(),
        battery_size: ctx.battery.len(),
        total_runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        rows,
    })
}
