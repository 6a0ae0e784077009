//! Families of smooth, nonnegative, compactly supported test functions.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{JetFn, ScalarField};
use crate::grid::{DomainMask, Grid};
use crate::linalg::MAX_DIM;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BatterySpec {
    /// Lattice points per axis.
    pub lattice: usize,
    /// Half-widths of the bump supports.
    pub scales: Vec<f64>,
    /// Additional members at random centres.
    pub random: usize,
    pub seed: u64,
}

impl Default for BatterySpec {
    fn default() -> Self {
        Self {
            lattice: 3,
            scales: vec![0.1, 0.2, 0.3],
            random: 5,
            seed: 7,
        }
    }
}

/// `φ(x) = Π ψ((x_i − c_i)/s)` with `ψ(t) = exp(−1/(1 − t²))` on `|t| < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: Vec<f64>,
    pub scale: f64,
    cells: Vec<usize>,
}

fn psi(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

impl Bump {
    /// Value at `x`; writes the differential into `d`.
    pub fn eval(&self, x: &[f64], d: &mut [f64]) -> f64 {
        let n = x.len();
        let mut t = [0.0; MAX_DIM];
        let mut p = [0.0; MAX_DIM];
        let mut v = 1.0;
        for i in 0..n {
            t[i] = (x[i] - self.center[i]) / self.scale;
            p[i] = psi(t[i]);
            v *= p[i];
        }
        if v == 0.0 {
            d[..n].fill(0.0);
            return 0.0;
        }
        for i in 0..n {
            let s = 1.0 - t[i] * t[i];
            d[i] = v * (-2.0 * t[i] / (s * s)) / self.scale;
        }
        v
    }

    /// Cells where the bump is nonzero, in increasing order.
    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn jet(&self) -> JetFn {
        let b = self.clone();
        Arc::new(move |x: &[f64], d: &mut [f64]| b.eval(x, d))
    }
}

#[derive(Debug, Clone)]
pub struct TestFunctionBattery {
    grid: Arc<Grid>,
    members: Vec<Bump>,
}

impl TestFunctionBattery {
    pub fn from_bumps(mask: &DomainMask, bumps: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let mut members = Vec::new();
        for (c, s) in bumps {
            match fit(mask, c.clone(), s) {
                Some(b) => members.push(b),
                None => {
                    return Err(Error::UnsupportedPhi(format!(
                        "bump at {c:?} with scale {s} leaves the mask interior"
                    )))
                }
            }
        }
        if members.is_empty() {
            return Err(Error::UnsupportedPhi("empty battery".into()));
        }
        Ok(Self {
            grid: mask.grid().clone(),
            members,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Bump] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &Bump {
        &self.members[i]
    }

    /// Member `i` as a sampled field with its jet.
    pub fn member_field(&self, i: usize) -> ScalarField {
        ScalarField::from_jet(self.grid.clone(), self.members[i].jet(), Vec::new())
    }

    /// A new battery containing these members followed by `other`'s.
    pub fn extended(&self, other: &TestFunctionBattery) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let mut members = self.members.clone();
        members.extend(other.members.iter().cloned());
        Ok(Self {
            grid: self.grid.clone(),
            members,
        })
    }
}

/// The bump with the given centre and scale, if its support (plus a one-cell
/// collar) lies in the mask and it spans at least two cells per axis.
fn fit(mask: &DomainMask, center: Vec<f64>, scale: f64) -> Option<Bump> {
    let grid = mask.grid();
    let n = grid.dim();
    if center.len() != n || !(scale >= 2.0 * grid.h()) {
        return None;
    }
    let lo: Vec<f64> = center.iter().map(|c| c - scale).collect();
    let hi: Vec<f64> = center.iter().map(|c| c + scale).collect();
    for i in 0..n {
        if lo[i] < grid.lower()[i] || hi[i] > grid.upper()[i] {
            return None;
        }
    }
    let mut bump = Bump {
        center,
        scale,
        cells: Vec::new(),
    };
    let mut x = [0.0; MAX_DIM];
    let mut d = [0.0; MAX_DIM];
    for idx in grid.cells_in_box(&lo, &hi) {
        grid.center(idx, &mut x[..n]);
        if bump.eval(&x[..n], &mut d[..n]) > 0.0 {
            if !mask.is_interior(idx) {
                return None;
            }
            bump.cells.push(idx);
        }
    }
    if bump.cells.is_empty() {
        return None;
    }
    Some(bump)
}

/// Lattice-times-scales bumps plus seeded random members, keeping those
/// supported in the mask interior.
pub fn build_battery(spec: &BatterySpec, mask: &DomainMask) -> Result<TestFunctionBattery> {
    let grid = mask.grid();
    let n = grid.dim();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    let mut x = [0.0; MAX_DIM];
    for &i in mask.cells() {
        grid.center(i, &mut x[..n]);
        for a in 0..n {
            lo[a] = lo[a].min(x[a]);
            hi[a] = hi[a].max(x[a]);
        }
    }
    let mut members = Vec::new();
    let k = spec.lattice;
    let total = k.pow(n as u32);
    for mut t in 0..total {
        let mut c = vec![0.0; n];
        for a in (0..n).rev() {
            let j = t % k;
            t /= k;
            c[a] = lo[a] + (j as f64 + 1.0) * (hi[a] - lo[a]) / (k as f64 + 1.0);
        }
        for &s in &spec.scales {
            if let Some(b) = fit(mask, c.clone(), s) {
                members.push(b);
            }
        }
    }
    if !spec.scales.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let mut placed = 0;
        let mut attempts = 0;
        while placed < spec.random && attempts < 10_000 {
            attempts += 1;
            let c: Vec<f64> = (0..n).map(|a| rng.gen_range(lo[a]..=hi[a])).collect();
            let s = spec.scales[rng.gen_range(0..spec.scales.len())];
            if let Some(b) = fit(mask, c, s) {
                members.push(b);
                placed += 1;
            }
        }
    }
    if members.is_empty() {
        return Err(Error::UnsupportedPhi("no battery member fits inside the mask".into()));
    }
    Ok(TestFunctionBattery {
        grid: grid.clone(),
        members,
    })
}
