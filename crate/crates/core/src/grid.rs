//! Structured cell-centred grids and the domain masks built on them.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::linalg::MAX_DIM;

/// Axis-aligned box split into `resolution[i]` cells along axis `i`.
///
/// Cells are addressed by a linear index with the last axis varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    lower: Vec<f64>,
    upper: Vec<f64>,
    resolution: Vec<usize>,
    spacing: Vec<f64>,
    strides: Vec<usize>,
}

impl Grid {
    pub const MIN_RESOLUTION: usize = 8;

    pub fn new(lower: Vec<f64>, upper: Vec<f64>, resolution: Vec<usize>) -> Result<Self> {
        let n = lower.len();
        if n == 0 || n > MAX_DIM || upper.len() != n || resolution.len() != n {
            return Err(Error::InvalidGrid(format!(
                "corner/resolution dimensions {}/{}/{}",
                lower.len(),
                upper.len(),
                resolution.len()
            )));
        }
        for i in 0..n {
            if !(upper[i] > lower[i]) || !lower[i].is_finite() || !upper[i].is_finite() {
                return Err(Error::InvalidGrid(format!("axis {i}: upper must exceed lower")));
            }
            if resolution[i] < Self::MIN_RESOLUTION {
                return Err(Error::InvalidGrid(format!(
                    "axis {i}: resolution {} below {}",
                    resolution[i],
                    Self::MIN_RESOLUTION
                )));
            }
        }
        let spacing = (0..n)
            .map(|i| (upper[i] - lower[i]) / resolution[i] as f64)
            .collect();
        let mut strides = vec![1; n];
        for i in (0..n - 1).rev() {
            strides[i] = strides[i + 1] * resolution[i + 1];
        }
        Ok(Self {
            lower,
            upper,
            resolution,
            spacing,
            strides,
        })
    }

    /// The cube `[−half_width, half_width]^n` with spacing as close to `h` as
    /// an even cell count allows, so that the origin is a cell vertex.
    pub fn cube(n: usize, half_width: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) || !(half_width > 0.0) {
            return Err(Error::InvalidGrid("non-positive width or spacing".into()));
        }
        let half_cells = (half_width / h).round().max(1.0) as usize;
        let res = 2 * half_cells;
        Self::new(vec![-half_width; n], vec![half_width; n], vec![res; n])
    }

    /// Like [`Grid::cube`] but the half width is rounded up to a whole number
    /// of cells of size exactly `h`.
    pub fn cube_with_spacing(n: usize, half_width: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) || !(half_width > 0.0) {
            return Err(Error::InvalidGrid("non-positive width or spacing".into()));
        }
        let half_cells = (half_width / h - 1e-9).ceil().max(1.0) as usize;
        let a = half_cells as f64 * h;
        Self::new(vec![-a; n], vec![a; n], vec![2 * half_cells; n])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn len(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    /// Largest spacing over the axes.
    pub fn h(&self) -> f64 {
        self.spacing.iter().cloned().fold(0.0, f64::max)
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn multi_index(&self, idx: usize, out: &mut [usize]) {
        let mut rem = idx;
        for i in 0..self.dim() {
            out[i] = rem / self.strides[i];
            rem %= self.strides[i];
        }
    }

    pub fn linear_index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(m, s)| m * s).sum()
    }

    pub fn center(&self, idx: usize, out: &mut [f64]) {
        let mut rem = idx;
        for i in 0..self.dim() {
            let k = rem / self.strides[i];
            rem %= self.strides[i];
            out[i] = self.lower[i] + (k as f64 + 0.5) * self.spacing[i];
        }
    }

    pub fn center_vec(&self, idx: usize) -> Vec<f64> {
        let mut c = vec![0.0; self.dim()];
        self.center(idx, &mut c);
        c
    }

    /// Index of the cell `offset` steps away along `axis`, if inside the box.
    pub fn neighbor(&self, idx: usize, axis: usize, offset: isize) -> Option<usize> {
        let k = (idx / self.strides[axis]) % self.resolution[axis];
        let target = k as isize + offset;
        if target < 0 || target >= self.resolution[axis] as isize {
            return None;
        }
        Some((idx as isize + offset * self.strides[axis] as isize) as usize)
    }

    /// Index of the cell containing `x`, if inside the box.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        let mut idx = 0;
        for i in 0..self.dim() {
            let t = ((x[i] - self.lower[i]) / self.spacing[i]).floor();
            if t < 0.0 || t >= self.resolution[i] as f64 {
                return None;
            }
            idx += t as usize * self.strides[i];
        }
        Some(idx)
    }

    /// Linear indices of all cells whose centres lie in the closed box
    /// `[lo, hi]`, in increasing order.
    pub fn cells_in_box(&self, lo: &[f64], hi: &[f64]) -> Vec<usize> {
        let n = self.dim();
        let mut first = vec![0usize; n];
        let mut last = vec![0usize; n];
        for i in 0..n {
            let a = ((lo[i] - self.lower[i]) / self.spacing[i] - 0.5).ceil();
            let b = ((hi[i] - self.lower[i]) / self.spacing[i] - 0.5).floor();
            let a = a.max(0.0);
            let b = b.min(self.resolution[i] as f64 - 1.0);
            if a > b {
                return Vec::new();
            }
            first[i] = a as usize;
            last[i] = b as usize;
        }
        let mut out = Vec::new();
        let mut cur = first.clone();
        loop {
            out.push(self.linear_index(&cur));
            let mut axis = n;
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                if cur[axis] < last[axis] {
                    cur[axis] += 1;
                    break;
                }
                cur[axis] = first[axis];
            }
        }
    }
}

/// Description of a domain; the paper-specific shapes plus a predicate escape
/// hatch.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainDescriptor {
    /// The whole grid box.
    Box,
    /// Euclidean ball `|x − center| < radius`.
    Ball { center: Option<Vec<f64>>, radius: f64 },
    /// Euclidean annulus `inner < |x − center| < outer`.
    Annulus {
        center: Option<Vec<f64>>,
        inner: f64,
        outer: f64,
    },
    /// Ball with the cells within `excision` of the centre removed. The default
    /// excision radius is `3h`; `0` removes only the centre point, which a
    /// cell-centred grid never samples when the centre is a cell vertex.
    PuncturedBall {
        center: Option<Vec<f64>>,
        radius: f64,
        excision: Option<f64>,
    },
    /// The grid box minus the cells within `excision` (default `3h`) of the centre.
    PuncturedBox {
        center: Option<Vec<f64>>,
        excision: Option<f64>,
    },
    /// `{ r < level }` for a distance field `r`.
    RSublevel { level: f64 },
    /// `{ r > level }`, truncated by the grid box.
    RSuperlevel { level: f64 },
    #[serde(skip)]
    Custom(Arc<dyn Fn(&[f64]) -> bool + Send + Sync>),
}

impl fmt::Debug for DomainDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Box => write!(f, "Box"),
            Self::Ball { center, radius } => write!(f, "Ball({center:?}, {radius})"),
            Self::Annulus {
                center,
                inner,
                outer,
            } => write!(f, "Annulus({center:?}, {inner}, {outer})"),
            Self::PuncturedBall {
                center,
                radius,
                excision,
            } => write!(f, "PuncturedBall({center:?}, {radius}, {excision:?})"),
            Self::PuncturedBox { center, excision } => {
                write!(f, "PuncturedBox({center:?}, {excision:?})")
            }
            Self::RSublevel { level } => write!(f, "RSublevel({level})"),
            Self::RSuperlevel { level } => write!(f, "RSuperlevel({level})"),
            Self::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl DomainDescriptor {
    pub fn ball(radius: f64) -> Self {
        Self::Ball {
            center: None,
            radius,
        }
    }

    pub fn annulus(inner: f64, outer: f64) -> Self {
        Self::Annulus {
            center: None,
            inner,
            outer,
        }
    }

    pub fn punctured_ball(radius: f64) -> Self {
        Self::PuncturedBall {
            center: None,
            radius,
            excision: None,
        }
    }

    pub fn punctured_ball_with_excision(radius: f64, excision: f64) -> Self {
        Self::PuncturedBall {
            center: None,
            radius,
            excision: Some(excision),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Box => "box",
            Self::Ball { .. } => "ball",
            Self::Annulus { .. } => "annulus",
            Self::PuncturedBall { .. } => "punctured_ball",
            Self::PuncturedBox { .. } => "punctured_box",
            Self::RSublevel { .. } => "r_sublevel",
            Self::RSuperlevel { .. } => "r_superlevel",
            Self::Custom(_) => "custom",
        }
    }
}

/// Cells of a [`Grid`] belonging to a domain. Membership is decided at the cell
/// centre.
#[derive(Debug, Clone)]
pub struct DomainMask {
    grid: Arc<Grid>,
    inside: Vec<bool>,
    descriptor: DomainDescriptor,
    cells: Vec<usize>,
    /// Point removed from the domain, when the descriptor has one.
    puncture: Option<Vec<f64>>,
    /// For superlevel sets: radius of the largest level set inside the box.
    truncation_radius: Option<f64>,
}

impl DomainMask {
    pub fn from_predicate(
        grid: Arc<Grid>,
        descriptor: DomainDescriptor,
        pred: impl Fn(usize, &[f64]) -> bool,
    ) -> Result<Self> {
        let n = grid.dim();
        let mut x = [0.0; MAX_DIM];
        let inside: Vec<bool> = (0..grid.len())
            .map(|i| {
                grid.center(i, &mut x[..n]);
                pred(i, &x[..n])
            })
            .collect();
        Self::from_flags(grid, descriptor, inside)
    }

    pub fn from_flags(grid: Arc<Grid>, descriptor: DomainDescriptor, inside: Vec<bool>) -> Result<Self> {
        if inside.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        let cells: Vec<usize> = (0..inside.len()).filter(|&i| inside[i]).collect();
        let mask = Self {
            grid,
            inside,
            descriptor,
            cells,
            puncture: None,
            truncation_radius: None,
        };
        if mask.interior_cells().next().is_none() {
            return Err(Error::DegenerateDomain);
        }
        Ok(mask)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn descriptor(&self) -> &DomainDescriptor {
        &self.descriptor
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.inside[idx]
    }

    pub fn flags(&self) -> &[bool] {
        &self.inside
    }

    /// Included cells in increasing index order.
    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn count(&self) -> usize {
        self.cells.len()
    }

    pub fn fraction(&self) -> f64 {
        self.cells.len() as f64 / self.grid.len() as f64
    }

    pub fn puncture(&self) -> Option<&[f64]> {
        self.puncture.as_deref()
    }

    pub fn truncation_radius(&self) -> Option<f64> {
        self.truncation_radius
    }

    /// True when the cell and all of its axis neighbours are included.
    pub fn is_interior(&self, idx: usize) -> bool {
        if !self.inside[idx] {
            return false;
        }
        (0..self.grid.dim()).all(|a| {
            [-1isize, 1].iter().all(|&o| {
                self.grid
                    .neighbor(idx, a, o)
                    .is_some_and(|j| self.inside[j])
            })
        })
    }

    pub fn interior_cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.cells.iter().copied().filter(|&i| self.is_interior(i))
    }

    /// Cellwise `self ⊆ other`.
    pub fn is_subset_of(&self, other: &DomainMask) -> bool {
        self.grid == other.grid && self.cells.iter().all(|&i| other.inside[i])
    }

    /// Intersection with another mask on the same grid.
    pub fn intersect(&self, other: &DomainMask) -> Result<DomainMask> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let flags = self
            .inside
            .iter()
            .zip(&other.inside)
            .map(|(a, b)| *a && *b)
            .collect();
        let mut m = Self::from_flags(self.grid.clone(), self.descriptor.clone(), flags)?;
        m.puncture = self.puncture.clone().or_else(|| other.puncture.clone());
        m.truncation_radius = self.truncation_radius.or(other.truncation_radius);
        Ok(m)
    }
}

fn dist(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Builds the mask for `descriptor`; `r_field` is required for level sets of
/// a distance function.
pub fn build_domain(
    descriptor: &DomainDescriptor,
    grid: &Arc<Grid>,
    r_field: Option<&ScalarField>,
) -> Result<DomainMask> {
    let n = grid.dim();
    let origin = vec![0.0; n];
    let center_of = |c: &Option<Vec<f64>>| -> Result<Vec<f64>> {
        let c = c.clone().unwrap_or_else(|| origin.clone());
        if c.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: c.len(),
            });
        }
        Ok(c)
    };
    let h = grid.h();
    let need_r = || -> Result<&ScalarField> {
        let r = r_field.ok_or_else(|| Error::InvalidGrid("level set needs a distance field".into()))?;
        if r.grid().as_ref() != grid.as_ref() {
            return Err(Error::GridMismatch);
        }
        Ok(r)
    };
    let d = descriptor.clone();
    match descriptor {
        DomainDescriptor::Box => DomainMask::from_predicate(grid.clone(), d, |_, _| true),
        DomainDescriptor::Ball { center, radius } => {
            let c = center_of(center)?;
            DomainMask::from_predicate(grid.clone(), d, |_, x| dist(x, &c) < *radius)
        }
        DomainDescriptor::Annulus {
            center,
            inner,
            outer,
        } => {
            let c = center_of(center)?;
            DomainMask::from_predicate(grid.clone(), d, |_, x| {
                let t = dist(x, &c);
                t > *inner && t < *outer
            })
        }
        DomainDescriptor::PuncturedBall {
            center,
            radius,
            excision,
        } => {
            let c = center_of(center)?;
            let e = excision.unwrap_or(3.0 * h);
            let mut m = DomainMask::from_predicate(grid.clone(), d, |_, x| {
                let t = dist(x, &c);
                t < *radius && t > e
            })?;
            m.puncture = Some(c);
            Ok(m)
        }
        DomainDescriptor::PuncturedBox { center, excision } => {
            let c = center_of(center)?;
            let e = excision.unwrap_or(3.0 * h);
            let mut m = DomainMask::from_predicate(grid.clone(), d, |_, x| dist(x, &c) > e)?;
            m.puncture = Some(c);
            Ok(m)
        }
        DomainDescriptor::RSublevel { level } => {
            let r = need_r()?;
            DomainMask::from_predicate(grid.clone(), d, |i, _| r.values()[i] < *level)
        }
        DomainDescriptor::RSuperlevel { level } => {
            let r = need_r()?;
            let mut m = DomainMask::from_predicate(grid.clone(), d, |i, _| r.values()[i] > *level)?;
            let mut boundary_min = f64::INFINITY;
            let mut multi = [0usize; MAX_DIM];
            for i in 0..grid.len() {
                grid.multi_index(i, &mut multi[..n]);
                let on_face = (0..n).any(|a| multi[a] == 0 || multi[a] + 1 == grid.resolution()[a]);
                if on_face {
                    boundary_min = boundary_min.min(r.values()[i]);
                }
            }
            m.truncation_radius = Some(boundary_min);
            Ok(m)
        }
        DomainDescriptor::Custom(pred) => {
            DomainMask::from_predicate(grid.clone(), d, |_, x| pred(x))
        }
    }
}
