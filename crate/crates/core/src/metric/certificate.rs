use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    /// Known in closed form for the metric family.
    Declared,
    /// Obtained by sampling, with an estimated absolute error.
    Estimated { tolerance: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certified<T> {
    pub value: T,
    pub provenance: Provenance,
}

impl<T> Certified<T> {
    pub fn declared(value: T) -> Self {
        Self {
            value,
            provenance: Provenance::Declared,
        }
    }

    pub fn estimated(value: T, tolerance: f64) -> Self {
        Self {
            value,
            provenance: Provenance::Estimated { tolerance },
        }
    }

    pub fn is_declared(&self) -> bool {
        self.provenance == Provenance::Declared
    }
}

/// Global constants of a metric together with where each one came from.
///
/// `None` marks a quantity that is neither declared nor estimable by sampling
/// (curvature data for a custom norm).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricCertificate {
    pub reversibility: Certified<f64>,
    pub uniformity_lo: Certified<f64>,
    pub uniformity_hi: Certified<f64>,
    pub curvature_bound: Option<Certified<f64>>,
    pub vanishing_mean_covariation: Option<Certified<bool>>,
    pub ricci_lower: Option<Certified<f64>>,
}

impl MetricCertificate {
    pub fn reversibility(&self) -> f64 {
        self.reversibility.value
    }

    /// True when the certificate declares flag curvature `≤ 0` and `S = 0`.
    pub fn declares_flat_hypotheses(&self) -> bool {
        let curvature = matches!(self.curvature_bound, Some(c) if c.is_declared() && c.value <= 0.0);
        let covariation = matches!(
            self.vanishing_mean_covariation,
            Some(s) if s.is_declared() && s.value
        );
        curvature && covariation
    }

    /// Checks the invariants `1 ≤ r_F` and `0 < λ ≤ Λ`.
    pub fn is_consistent(&self) -> bool {
        let r = self.reversibility.value;
        let lo = self.uniformity_lo.value;
        let hi = self.uniformity_hi.value;
        r >= 1.0 && lo > 0.0 && lo <= hi
    }
}
