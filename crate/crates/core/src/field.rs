//! Sampled fields on a [`Grid`].
//!
//! A [`ScalarField`] stores one value per cell. It may additionally carry a
//! closed-form jet (value and differential at any point) together with the
//! points where that jet is singular; quadrature uses both to refine cells
//! next to integrable singularities.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::MAX_DIM;

/// `jet(x, du)` returns `u(x)` and writes `Du(x)` into `du`.
pub type JetFn = Arc<dyn Fn(&[f64], &mut [f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct Jet {
    pub eval: JetFn,
    /// Points where the jet is not smooth.
    pub singular_points: Vec<Vec<f64>>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("singular_points", &self.singular_points)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
    jet: Option<Jet>,
}

impl ScalarField {
    pub fn from_values(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid,
            values,
            jet: None,
        })
    }

    /// Samples `f` at the cell centres. No closed-form differential is kept.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> Self {
        let n = grid.dim();
        let mut x = [0.0; MAX_DIM];
        let values = (0..grid.len())
            .map(|i| {
                grid.center(i, &mut x[..n]);
                f(&x[..n])
            })
            .collect();
        Self {
            grid,
            values,
            jet: None,
        }
    }

    /// Samples a closed-form jet at the cell centres and keeps it.
    pub fn from_jet(grid: Arc<Grid>, eval: JetFn, singular_points: Vec<Vec<f64>>) -> Self {
        let n = grid.dim();
        let mut x = [0.0; MAX_DIM];
        let mut du = [0.0; MAX_DIM];
        let values = (0..grid.len())
            .map(|i| {
                grid.center(i, &mut x[..n]);
                eval(&x[..n], &mut du[..n])
            })
            .collect();
        Self {
            grid,
            values,
            jet: Some(Jet {
                eval,
                singular_points,
            }),
        }
    }

    pub fn constant(grid: Arc<Grid>, c: f64) -> Self {
        let eval: JetFn = Arc::new(move |x: &[f64], du: &mut [f64]| {
            du[..x.len()].fill(0.0);
            c
        });
        Self::from_jet(grid, eval, Vec::new())
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        self.jet = None;
        &mut self.values
    }

    pub fn jet(&self) -> Option<&Jet> {
        self.jet.as_ref()
    }

    pub fn singular_points(&self) -> &[Vec<f64>] {
        self.jet.as_ref().map_or(&[], |j| &j.singular_points)
    }

    /// Drops the closed-form jet, keeping only the samples.
    pub fn without_jet(mut self) -> Self {
        self.jet = None;
        self
    }

    /// `c·u`, keeping the jet when present.
    pub fn scaled(&self, c: f64) -> Self {
        let values = self.values.iter().map(|v| c * v).collect();
        let jet = self.jet.as_ref().map(|j| {
            let inner = j.eval.clone();
            let eval: JetFn = Arc::new(move |x: &[f64], du: &mut [f64]| {
                let v = inner(x, du);
                for d in &mut du[..x.len()] {
                    *d *= c;
                }
                c * v
            });
            Jet {
                eval,
                singular_points: j.singular_points.clone(),
            }
        });
        Self {
            grid: self.grid.clone(),
            values,
            jet,
        }
    }

    /// `g ∘ u` with `g` given together with its derivative.
    pub fn compose(
        &self,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dg: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let values = self.values.iter().map(|&v| g(v)).collect();
        let g = Arc::new(g);
        let jet = self.jet.as_ref().map(|j| {
            let inner = j.eval.clone();
            let g = g.clone();
            let eval: JetFn = Arc::new(move |x: &[f64], du: &mut [f64]| {
                let v = inner(x, du);
                let s = dg(v);
                for d in &mut du[..x.len()] {
                    *d *= s;
                }
                g(v)
            });
            Jet {
                eval,
                singular_points: j.singular_points.clone(),
            }
        });
        Self {
            grid: self.grid.clone(),
            values,
            jet,
        }
    }

    /// Pointwise product, keeping jets when both factors have one.
    pub fn product(&self, other: &ScalarField) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        let jet = match (&self.jet, &other.jet) {
            (Some(a), Some(b)) => {
                let (fa, fb) = (a.eval.clone(), b.eval.clone());
                let eval: JetFn = Arc::new(move |x: &[f64], du: &mut [f64]| {
                    let n = x.len();
                    let mut db = [0.0; MAX_DIM];
                    let va = fa(x, du);
                    let vb = fb(x, &mut db[..n]);
                    for i in 0..n {
                        du[i] = du[i] * vb + va * db[i];
                    }
                    va * vb
                });
                let mut singular = a.singular_points.clone();
                for p in &b.singular_points {
                    if !singular.contains(p) {
                        singular.push(p.clone());
                    }
                }
                Some(Jet {
                    eval,
                    singular_points: singular,
                })
            }
            _ => None,
        };
        Ok(Self {
            grid: self.grid.clone(),
            values,
            jet,
        })
    }
}

/// `n` components per cell, stored cell by cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentField {
    grid: Arc<Grid>,
    data: Vec<f64>,
}

impl ComponentField {
    pub fn zeros(grid: Arc<Grid>) -> Self {
        let len = grid.len() * grid.dim();
        Self {
            grid,
            data: vec![0.0; len],
        }
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(&[f64], &mut [f64])) -> Self {
        let n = grid.dim();
        let mut out = Self::zeros(grid.clone());
        let mut x = [0.0; MAX_DIM];
        for i in 0..grid.len() {
            grid.center(i, &mut x[..n]);
            f(&x[..n], &mut out.data[i * n..(i + 1) * n]);
        }
        out
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn at(&self, idx: usize) -> &[f64] {
        let n = self.grid.dim();
        &self.data[idx * n..(idx + 1) * n]
    }

    pub fn at_mut(&mut self, idx: usize) -> &mut [f64] {
        let n = self.grid.dim();
        &mut self.data[idx * n..(idx + 1) * n]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }
}

/// A covector field such as `Du`.
pub type CoVectorField = ComponentField;
/// A vector field such as `∇u` or `X`.
pub type VectorField = ComponentField;
