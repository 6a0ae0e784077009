//! Finsler calculus on Minkowski-type spaces and numerical checks of
//! Hardy-type inequalities.
//!
//! A [`FinslerMetric`] supplies the norm `F(x, y)` and its derivatives; the
//! polar transform, Legendre map and dual norm live in [`metric`]. Grids,
//! masked domains and fields carry the discretisation, [`calculus`] provides
//! differentials, gradients and the weak Laplacian, and [`inequality`]
//! evaluates both sides of each inequality, returning an [`InequalityReport`].
//! [`variational`] holds the best-constant minimiser and capacity solver.

pub mod battery;
pub mod calculus;
pub mod error;
pub mod field;
pub mod grid;
pub mod inequality;
pub mod linalg;
pub mod metric;
pub mod profiles;
pub mod quadrature;
pub mod report;
pub mod variational;
pub mod zoo;

pub use battery::{build_battery, BatterySpec, Bump, TestFunctionBattery};
pub use error::{Error, Result};
pub use field::{CoVectorField, ComponentField, Jet, JetFn, ScalarField, VectorField};
pub use grid::{build_domain, DomainDescriptor, DomainMask, Grid};
pub use metric::{CoVector, FinslerMetric, MetricCertificate, Vector};
pub use quadrature::{integrate, Measure};
pub use report::{ConstantSide, InequalityReport, TheoremId};
pub use zoo::{build_metric, Direction, Euclidean, MetricSpec, Randers};
