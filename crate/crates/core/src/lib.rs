//! Minkowski valuations on convex bodies computed as spherical and
//! Grassmannian convolution operators, together with seeded verification
//! suites for the identities and inequalities they satisfy.

// Negated float comparisons are NaN guards.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod consts;
pub mod error;
pub mod geometry;
pub mod grassmann;
pub mod harness;
pub mod linalg;
pub mod measures;
pub mod quadrature;
pub mod rng;
pub mod sphere;
pub mod stats;
pub mod valuations;

pub use error::{Error, Result};
pub use geometry::{Ball, BodyHandle, Polytope, SupportBody};
pub use grassmann::{GrassmannFunction, GrassmannSample, RotationSample, Subspace};
pub use harness::{CheckResult, Report, ReportFormat, SuiteConfig};
pub use measures::{AtomicMeasure, QuermassVector};
pub use sphere::{EstimatedFunction, SphereGrid, SphericalFunction, ZonalProfile};
pub use stats::Estimate;
pub use valuations::{CroftonMeasure, MinkowskiValuation, OperatorSpec};
