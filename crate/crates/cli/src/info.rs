//! `metric-info`: the certificate of a metric next to sampled estimates.

use std::fmt::Write;

use finsler_core::build_metric;
use finsler_core::metric::{estimate_reversibility, estimate_uniformity, Certified, PolarMetric, Provenance};
use serde::Serialize;

use crate::config::MetricConfig;

#[derive(Debug, Clone, Serialize)]
pub struct MetricInfo {
    pub metric: String,
    pub n: usize,
    pub reversibility_declared: Option<f64>,
    pub reversibility_estimated: f64,
    pub dual_reversibility_estimated: f64,
    pub lambda: Certified<f64>,
    pub big_lambda: Certified<f64>,
    pub curvature_bound: Option<Certified<f64>>,
    pub vanishing_mean_covariation: Option<Certified<bool>>,
}

/// Accepts either inline JSON or a path to a JSON file.
pub fn parse_spec(spec: &str) -> anyhow::Result<MetricConfig> {
    let trimmed = spec.trim_start();
    let text = if trimmed.starts_with('{') {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec)?
    };
    Ok(serde_json::from_str(&text)?)
}

pub fn metric_info(spec: &MetricConfig) -> finsler_core::Result<MetricInfo> {
    let core_spec = spec.to_spec().map_err(finsler_core::Error::InvalidSpec)?;
    let (m, cert) = build_metric(&core_spec)?;
    let points = vec![vec![0.0; m.dim()]];
    let rev = estimate_reversibility(m.as_ref(), &points);
    let dual = estimate_reversibility(&PolarMetric::new(m.as_ref()), &points);
    let uni = estimate_uniformity(m.as_ref(), &points);
    let lambda = if cert.uniformity_lo.is_declared() {
        cert.uniformity_lo
    } else {
        Certified::estimated(uni.lambda, uni.gap)
    };
    let big_lambda = if cert.uniformity_hi.is_declared() {
        cert.uniformity_hi
    } else {
        Certified::estimated(uni.big_lambda, uni.gap)
    };
    Ok(MetricInfo {
        metric: m.name().to_string(),
        n: m.dim(),
        reversibility_declared: cert.reversibility.is_declared().then_some(cert.reversibility.value),
        reversibility_estimated: rev.value,
        dual_reversibility_estimated: dual.value,
        lambda,
        big_lambda,
        curvature_bound: cert.curvature_bound,
        vanishing_mean_covariation: cert.vanishing_mean_covariation,
    })
}

fn tag(p: &Provenance) -> String {
    match p {
        Provenance::Declared => "[declared]".into(),
        Provenance::Estimated { tolerance } => format!("[estimated ±{tolerance:.1e}]"),
    }
}

fn certified<T: std::fmt::Display>(c: &Option<Certified<T>>) -> String {
    match c {
        Some(c) => format!("{} {}", c.value, tag(&c.provenance)),
        None => "unknown [undeclared]".into(),
    }
}

impl MetricInfo {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let declared = self
            .reversibility_declared
            .map(|v| v.to_string())
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(s, "metric: {} (n = {})", self.metric, self.n);
        let _ = writeln!(s, "r_F declared: {declared}");
        let _ = writeln!(s, "r_F estimated: {:.10}", self.reversibility_estimated);
        let _ = writeln!(s, "r_F* estimated: {:.10}", self.dual_reversibility_estimated);
        let _ = writeln!(s, "lambda: {:.10} {}", self.lambda.value, tag(&self.lambda.provenance));
        let _ = writeln!(s, "Lambda: {:.10} {}", self.big_lambda.value, tag(&self.big_lambda.provenance));
        let _ = writeln!(s, "c (flag curvature bound): {}", certified(&self.curvature_bound));
        let _ = writeln!(s, "S = 0: {}", certified(&self.vanishing_mean_covariation));
        s
    }
}
