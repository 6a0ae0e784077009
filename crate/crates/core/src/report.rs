//! Result records shared by the inequality checkers and the variational tools.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TheoremId {
    HardyCore,
    WeightedHardy,
    Caccioppoli,
    DistHardy,
    DistHardyBasic,
    LogHardy,
    LemmaCore,
    LemmaGeneral,
    Gn,
    Hpw,
    BestConstant,
    Sharpness,
    Capacity,
    Poincare,
}

impl TheoremId {
    pub const ALL: [TheoremId; 14] = [
        Self::HardyCore,
        Self::WeightedHardy,
        Self::Caccioppoli,
        Self::DistHardy,
        Self::DistHardyBasic,
        Self::LogHardy,
        Self::LemmaCore,
        Self::LemmaGeneral,
        Self::Gn,
        Self::Hpw,
        Self::BestConstant,
        Self::Sharpness,
        Self::Capacity,
        Self::Poincare,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::HardyCore => "HARDY_CORE",
            Self::WeightedHardy => "WEIGHTED_HARDY",
            Self::Caccioppoli => "CACCIOPPOLI",
            Self::DistHardy => "DIST_HARDY",
            Self::DistHardyBasic => "DIST_HARDY_BASIC",
            Self::LogHardy => "LOG_HARDY",
            Self::LemmaCore => "LEMMA_CORE",
            Self::LemmaGeneral => "LEMMA_GENERAL",
            Self::Gn => "GN",
            Self::Hpw => "HPW",
            Self::BestConstant => "BEST_CONSTANT",
            Self::Sharpness => "SHARPNESS",
            Self::Capacity => "CAPACITY",
            Self::Poincare => "POINCARE",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The side of the inequality the multiplicative constant multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantSide {
    Lhs,
    Rhs,
}

/// Both sides of one inequality instance `A ≤ B`.
///
/// `lhs` and `rhs` are the raw integrals; the constant is kept separate and
/// applied to `constant_side`. With `A`, `B` the constant-weighted sides,
/// `ratio = B/A` (absent when `A = 0`), `margin = B − A` and
/// `passed ⇔ margin ≥ −tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub theorem_id: TheoremId,
    /// Named special case, e.g. `COROLLARY_1_2`.
    pub label: Option<String>,
    pub metric: String,
    pub n: usize,
    pub parameters: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub constant_side: ConstantSide,
    pub ratio: Option<f64>,
    pub margin: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub hypotheses: BTreeMap<String, bool>,
    pub metadata: BTreeMap<String, f64>,
    pub grid_h: f64,
}

impl InequalityReport {
    /// `tolerance = max(1e−10, 20·h²·max(A, B))`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        theorem_id: TheoremId,
        metric: &str,
        n: usize,
        grid_h: f64,
        lhs: f64,
        rhs: f64,
        constant: f64,
        constant_side: ConstantSide,
    ) -> Self {
        let mut r = Self {
            theorem_id,
            label: None,
            metric: metric.to_string(),
            n,
            parameters: BTreeMap::new(),
            lhs,
            rhs,
            constant,
            constant_side,
            ratio: None,
            margin: 0.0,
            tolerance: 0.0,
            passed: false,
            hypotheses: BTreeMap::new(),
            metadata: BTreeMap::new(),
            grid_h,
        };
        r.evaluate();
        r
    }

    /// Constant-weighted `(A, B)`.
    pub fn effective_sides(&self) -> (f64, f64) {
        match self.constant_side {
            ConstantSide::Lhs => (self.constant * self.lhs, self.rhs),
            ConstantSide::Rhs => (self.lhs, self.constant * self.rhs),
        }
    }

    fn evaluate(&mut self) {
        let (a, b) = self.effective_sides();
        self.margin = b - a;
        self.ratio = if a != 0.0 { Some(b / a) } else { None };
        let h = self.grid_h;
        self.tolerance = (20.0 * h * h * a.abs().max(b.abs())).max(1e-10);
        self.passed = self.margin >= -self.tolerance;
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }

    pub fn set_hypothesis(&mut self, name: &str, holds: bool) {
        self.hypotheses.insert(name.to_string(), holds);
    }

    pub fn set_meta(&mut self, key: &str, value: f64) {
        self.metadata.insert(key.to_string(), value);
    }

    /// True when every recorded hypothesis holds.
    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.values().all(|v| *v)
    }

    /// Parameters as `key=value` pairs joined by `;`, in key order.
    pub fn params_string(&self) -> String {
        let mut parts: Vec<String> = self
            .parameters
            .iter()
            .map(|(k, v)| format!("{k}={}", fmt_num(*v)))
            .collect();
        if let Some(l) = &self.label {
            parts.push(format!("label={l}"));
        }
        parts.join(";")
    }
}

/// Shortest round-trip representation of a float.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}
