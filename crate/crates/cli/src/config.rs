//! Run configuration: JSON schema, loading and validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use finsler_core::inequality::gn_exponent;
use finsler_core::zoo::{CustomNormSpec, EuclideanSpec, RandersSpec};
use finsler_core::{BatterySpec, Direction, DomainDescriptor, MetricSpec, TheoremId};
use serde::{Deserialize, Serialize};

/// A configuration problem, located by file and field.
#[derive(Debug, thiserror::Error)]
#[error("{path}: {field}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: &Path, field: impl Into<String>, message: impl fmt::Display) -> Self {
        Self {
            path: path.display().to_string(),
            field: field.into(),
            message: message.to_string(),
        }
    }
}

/// Metric objects as accepted on the command line and in configs:
/// `{"kind":"euclidean","n":3}`, `{"kind":"randers","n":3,"b":[0.5,0,0]}` or
/// `{"kind":"custom","n":3,"norm":{"type":"quadratic","matrix":[…]}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricConfig {
    Euclidean { n: usize },
    Randers { n: usize, b: Vec<f64> },
    Custom { n: usize, norm: CustomNorm },
}

/// Norms that can be written down in JSON. Both are handed to the core as
/// callbacks, so every duality computation runs through the Newton solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CustomNorm {
    /// `|y|`.
    L2,
    /// `sqrt(yᵀ A y)` for a symmetric positive definite `A` (row-major rows).
    Quadratic { matrix: Vec<Vec<f64>> },
}

impl MetricConfig {
    pub fn dim(&self) -> usize {
        match self {
            Self::Euclidean { n } | Self::Randers { n, .. } | Self::Custom { n, .. } => *n,
        }
    }

    pub fn to_spec(&self) -> Result<MetricSpec, String> {
        Ok(match self {
            Self::Euclidean { n } => MetricSpec::Euclidean(EuclideanSpec { n: *n }),
            Self::Randers { n, b } => MetricSpec::Randers(RandersSpec { n: *n, b: b.clone() }),
            Self::Custom { n, norm } => MetricSpec::Custom(custom_spec(*n, norm)?),
        })
    }
}

fn custom_spec(n: usize, norm: &CustomNorm) -> Result<CustomNormSpec, String> {
    match norm {
        CustomNorm::L2 => Ok(CustomNormSpec {
            n,
            label: "custom_l2".into(),
            norm: Arc::new(|y| y.iter().map(|v| v * v).sum::<f64>().sqrt()),
            grad: Some(Arc::new(|y, out| {
                let l = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                for (o, v) in out.iter_mut().zip(y) {
                    *o = v / l;
                }
            })),
            hessian: None,
        }),
        CustomNorm::Quadratic { matrix } => {
            if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
                return Err(format!("matrix must be {n}x{n}"));
            }
            for i in 0..n {
                for j in 0..i {
                    if (matrix[i][j] - matrix[j][i]).abs() > 1e-12 * (1.0 + matrix[i][j].abs()) {
                        return Err("matrix is not symmetric".into());
                    }
                }
            }
            let a: Vec<f64> = matrix.iter().flatten().copied().collect();
            let ag = a.clone();
            let quad = move |a: &[f64], y: &[f64], out: &mut [f64]| {
                for i in 0..n {
                    out[i] = (0..n).map(|j| a[i * n + j] * y[j]).sum();
                }
            };
            Ok(CustomNormSpec {
                n,
                label: "custom_quadratic".into(),
                norm: Arc::new(move |y| {
                    let mut ay = [0.0; 8];
                    quad(&a, y, &mut ay[..n]);
                    y.iter().zip(&ay).map(|(p, q)| p * q).sum::<f64>().max(0.0).sqrt()
                }),
                grad: Some(Arc::new(move |y, out| {
                    quad(&ag, y, out);
                    let f = y.iter().zip(out.iter()).map(|(p, q)| p * q).sum::<f64>().sqrt();
                    for o in out.iter_mut() {
                        *o /= f;
                    }
                })),
                hessian: None,
            })
        }
    }
}

/// Either a centred cube `[-half_width, half_width]^n` with spacing `h`, or an
/// explicit box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum GridConfig {
    Cube { half_width: f64, h: f64 },
    Box { lower: Vec<f64>, upper: Vec<f64>, resolution: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightConfig {
    InverseDistance {
        #[serde(default)]
        direction: Direction,
    },
    DistancePower {
        exponent: f64,
        #[serde(default)]
        direction: Direction,
    },
    LogDistance {
        sign: f64,
        #[serde(default)]
        direction: Direction,
    },
    /// A JSON array of cell values in linear grid order, relative to the
    /// config file.
    CustomField { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunctionConfig {
    /// `(1 − r/radius)₊^power`.
    RadialCutoff { radius: f64, power: f64 },
    /// Smooth bump supported in `inner < r < outer`.
    ShellBump { inner: f64, outer: f64 },
}

/// Capacity experiment: `K`, outer radii and grid spacings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityConfig {
    pub k: DomainDescriptor,
    pub outer_radii: Vec<f64>,
    pub spacing: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    List(Vec<f64>),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Number(v) => write!(f, "{}", finsler_core::report::fmt_num(*v)),
            Self::List(vs) => {
                let parts: Vec<String> = vs.iter().map(|v| finsler_core::report::fmt_num(*v)).collect();
                write!(f, "{}", parts.join("/"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub theorem: String,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub rayleigh_max_iters: usize,
    pub capacity_max_iters: usize,
    pub capacity_rel_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rayleigh_max_iters: 2000,
            capacity_max_iters: 20_000,
            capacity_rel_tol: 1e-11,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub csv: String,
    pub json: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            csv: "report.csv".into(),
            json: "report.json".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub metric: MetricConfig,
    pub grid: GridConfig,
    pub domain: DomainDescriptor,
    #[serde(default)]
    pub weight: Option<WeightConfig>,
    #[serde(default)]
    pub test_function: Option<TestFunctionConfig>,
    #[serde(default)]
    pub battery: BatterySpec,
    /// Domain the battery is fitted to, when it differs from `domain`.
    #[serde(default)]
    pub battery_domain: Option<DomainDescriptor>,
    #[serde(default)]
    pub capacity: Option<CapacityConfig>,
    pub checks: Vec<CheckConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
}

/// A validated check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub theorem: TheoremId,
    pub params: BTreeMap<String, ParamValue>,
}

impl Check {
    pub fn number(&self, key: &str) -> Option<f64> {
        match self.params.get(key) {
            Some(ParamValue::Number(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn list(&self, key: &str) -> Option<&[f64]> {
        match self.params.get(key) {
            Some(ParamValue::List(v)) => Some(v),
            _ => None,
        }
    }

    /// `key=value` pairs joined by `;`.
    pub fn params_string(&self) -> String {
        let parts: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        parts.join(";")
    }
}

/// A loaded configuration with its checks validated.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub path: PathBuf,
    pub raw: RunConfig,
    pub checks: Vec<Check>,
}

impl LoadedConfig {
    pub fn error(&self, field: impl Into<String>, message: impl fmt::Display) -> ConfigError {
        ConfigError::new(&self.path, field, message)
    }

    /// Resolves a path given in the config relative to the config file.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            return p.to_path_buf();
        }
        self.path.parent().map(|d| d.join(p)).unwrap_or_else(|| p.to_path_buf())
    }
}

pub fn load(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new(path, "<file>", e))?;
    let raw: RunConfig = serde_json::from_str(&text).map_err(|e| ConfigError::new(path, "<json>", e))?;
    validate(path, raw)
}

fn need(field: &str, check: &Check, key: &str) -> Result<f64, String> {
    check
        .number(key)
        .ok_or_else(|| format!("{field}: {} requires numeric parameter `{key}`", check.theorem))
}

fn allowed(check: &Check) -> &'static [&'static str] {
    use TheoremId::*;
    match check.theorem {
        HardyCore | LemmaCore => &[],
        WeightedHardy => &["theta"],
        Caccioppoli => &["q"],
        DistHardy | DistHardyBasic | LogHardy => &["alpha"],
        LemmaGeneral => &["q", "s", "p"],
        Gn => &["q", "s", "z"],
        Hpw => &["s", "p"],
        BestConstant => &["max_iters"],
        Sharpness => &["widths"],
        Capacity => &[],
        Poincare => &[],
    }
}

/// Parameter preconditions of a check, evaluated before any computation.
fn check_params(field: &str, c: &Check, raw: &RunConfig) -> Result<(), String> {
    use TheoremId::*;
    for key in c.params.keys() {
        if !allowed(c).contains(&key.as_str()) {
            return Err(format!("{field}: unknown parameter `{key}` for {}", c.theorem));
        }
    }
    let needs_weight = matches!(
        c.theorem,
        HardyCore | WeightedHardy | Caccioppoli | LemmaCore | LemmaGeneral | Gn | Hpw | BestConstant | Sharpness
    );
    if needs_weight && raw.weight.is_none() {
        return Err(format!("{field}: {} requires `weight`", c.theorem));
    }
    let needs_u = !matches!(c.theorem, BestConstant | Sharpness | Capacity | Poincare);
    if needs_u && raw.test_function.is_none() {
        return Err(format!("{field}: {} requires `test_function`", c.theorem));
    }
    match c.theorem {
        WeightedHardy => {
            if !need(field, c, "theta")?.is_finite() {
                return Err(format!("{field}: theta must be finite"));
            }
        }
        Caccioppoli => {
            if !(need(field, c, "q")? > -1.0) {
                return Err(format!("{field}: q must exceed -1"));
            }
        }
        DistHardy | DistHardyBasic => {
            let a = need(field, c, "alpha")?;
            if !(a < 1.0) {
                return Err(format!("{field}: alpha must be < 1"));
            }
            if c.theorem == DistHardyBasic && a != 0.0 {
                return Err(format!("{field}: DIST_HARDY_BASIC has alpha = 0"));
            }
            if raw.metric.dim() < 3 {
                return Err(format!("{field}: needs n >= 3"));
            }
        }
        LogHardy => {
            let a = need(field, c, "alpha")?;
            if a == 1.0 || !a.is_finite() {
                return Err(format!("{field}: alpha must differ from 1"));
            }
        }
        LemmaGeneral | Hpw => {
            let s = need(field, c, "s")?;
            let p = need(field, c, "p")?;
            if c.theorem == LemmaGeneral {
                need(field, c, "q")?;
            }
            if !(s > 0.0) || !(p > 1.0) {
                return Err(format!("{field}: need s > 0 and p > 1"));
            }
        }
        Gn => {
            let (q, s, z) = (need(field, c, "q")?, need(field, c, "s")?, need(field, c, "z")?);
            gn_exponent(q, s, z).map_err(|e| format!("{field}: {e}"))?;
        }
        BestConstant => {
            if let Some(m) = c.number("max_iters") {
                if !(m >= 1.0) || m.fract() != 0.0 {
                    return Err(format!("{field}: max_iters must be a positive integer"));
                }
            }
        }
        Sharpness => {
            let w = c
                .list("widths")
                .ok_or_else(|| format!("{field}: SHARPNESS requires a list `widths`"))?;
            if w.is_empty() || w.iter().any(|v| !(*v > 0.0)) {
                return Err(format!("{field}: widths must be positive"));
            }
        }
        Capacity => {
            let cap = raw
                .capacity
                .as_ref()
                .ok_or_else(|| format!("{field}: CAPACITY requires `capacity`"))?;
            if cap.outer_radii.is_empty() || cap.outer_radii.iter().any(|r| !(*r > 0.0)) {
                return Err("capacity.outer_radii: must be a non-empty list of positive radii".into());
            }
            if cap.spacing.len() != 1 && cap.spacing.len() != cap.outer_radii.len() {
                return Err("capacity.spacing: one value or one per outer radius".into());
            }
        }
        HardyCore | LemmaCore | Poincare => {}
    }
    Ok(())
}

impl LoadedConfig {
    /// Validates a check that was not part of the file.
    pub fn validate_extra(&self, check: &Check) -> Result<(), ConfigError> {
        let field = format!("<{}>", check.theorem);
        check_params(&field, check, &self.raw).map_err(|m| self.error(field.clone(), m))
    }
}

pub fn validate(path: &Path, raw: RunConfig) -> Result<LoadedConfig, ConfigError> {
    if raw.checks.is_empty() {
        return Err(ConfigError::new(path, "checks", "no checks requested"));
    }
    let n = raw.metric.dim();
    match &raw.grid {
        GridConfig::Cube { half_width, h } => {
            if !(*h > 0.0) || !(*half_width > *h) {
                return Err(ConfigError::new(path, "grid", "need 0 < h < half_width"));
            }
        }
        GridConfig::Box { lower, upper, resolution } => {
            if lower.len() != n || upper.len() != n || resolution.len() != n {
                return Err(ConfigError::new(path, "grid", format!("box must have {n} components")));
            }
        }
    }
    let mut checks: Vec<Check> = Vec::with_capacity(raw.checks.len());
    for (i, c) in raw.checks.iter().enumerate() {
        let field = format!("checks[{i}]");
        let theorem = TheoremId::parse(&c.theorem)
            .ok_or_else(|| ConfigError::new(path, format!("{field}.theorem"), format!("unknown theorem `{}`", c.theorem)))?;
        let check = Check {
            theorem,
            params: c.params.clone(),
        };
        if checks.contains(&check) {
            return Err(ConfigError::new(path, field, "duplicate check (same theorem and parameters)"));
        }
        check_params(&field, &check, &raw).map_err(|m| ConfigError::new(path, field.clone(), m))?;
        checks.push(check);
    }
    let loaded = LoadedConfig {
        path: path.to_path_buf(),
        raw,
        checks,
    };
    if let Some(WeightConfig::CustomField { path: p }) = &loaded.raw.weight {
        let full = loaded.resolve(p);
        if !full.is_file() {
            return Err(loaded.error("weight.path", format!("{} does not exist", full.display())));
        }
    }
    loaded
        .raw
        .metric
        .to_spec()
        .map_err(|m| loaded.error("metric.norm", m))?;
    Ok(loaded)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> serde_json::Value {
        serde_json::json!({
            "metric": {"kind": "euclidean", "n": 3},
            "grid": {"half_width": 1.125, "h": 0.125},
            "domain": {"kind": "punctured_ball", "radius": 1.1},
            "weight": {"kind": "inverse_distance"},
            "test_function": {"kind": "radial_cutoff", "radius": 1.0, "power": 2.0},
            "checks": [{"theorem": "HARDY_CORE"}]
        })
    }

    fn parse(v: serde_json::Value) -> Result<LoadedConfig, ConfigError> {
        validate(Path::new("cfg.json"), serde_json::from_value(v).unwrap())
    }

    #[test]
    fn accepts_the_base_config() {
        let c = parse(base()).unwrap();
        assert_eq!(c.checks[0].theorem, TheoremId::HardyCore);
        assert_eq!(c.raw.battery, BatterySpec::default());
    }

    #[test]
    fn empty_and_duplicate_checks() {
        let mut v = base();
        v["checks"] = serde_json::json!([]);
        assert_eq!(parse(v).unwrap_err().field, "checks");
        let mut v = base();
        v["checks"] = serde_json::json!([
            {"theorem": "WEIGHTED_HARDY", "params": {"theta": 0.5}},
            {"theorem": "WEIGHTED_HARDY", "params": {"theta": 0.25}},
            {"theorem": "WEIGHTED_HARDY", "params": {"theta": 0.5}}
        ]);
        assert_eq!(parse(v).unwrap_err().field, "checks[2]");
    }

    #[test]
    fn parameter_preconditions() {
        for (check, field) in [
            (serde_json::json!({"theorem": "CACCIOPPOLI", "params": {"q": -1.0}}), "checks[0]"),
            (serde_json::json!({"theorem": "GN", "params": {"q": 1.0, "s": 3.0, "z": 2.0}}), "checks[0]"),
            (serde_json::json!({"theorem": "NOPE"}), "checks[0].theorem"),
            (serde_json::json!({"theorem": "HARDY_CORE", "params": {"theta": 1.0}}), "checks[0]"),
            (serde_json::json!({"theorem": "SHARPNESS", "params": {"widths": 0.1}}), "checks[0]"),
        ] {
            let mut v = base();
            v["checks"] = serde_json::json!([check]);
            let e = parse(v).unwrap_err();
            assert_eq!(e.field, field, "{e}");
        }
    }

    #[test]
    fn custom_norms() {
        let mut v = base();
        v["metric"] = serde_json::json!({"kind": "custom", "n": 3, "norm": {"type": "quadratic", "matrix": [[2, 0, 0], [0, 1, 0], [1, 0, 1]]}});
        assert_eq!(parse(v).unwrap_err().field, "metric.norm");
        let m: MetricConfig = serde_json::from_str(r#"{"kind":"custom","n":2,"norm":{"type":"l2"}}"#).unwrap();
        assert!(m.to_spec().is_ok());
    }

    #[test]
    fn missing_weight_file() {
        let mut v = base();
        v["weight"] = serde_json::json!({"kind": "custom_field", "path": "does/not/exist.json"});
        assert_eq!(parse(v).unwrap_err().field, "weight.path");
    }
}
