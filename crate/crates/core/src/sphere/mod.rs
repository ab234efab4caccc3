//! Quadrature on `S^{n-1}`, tabulated spherical functions, and zonal
//! convolution.

pub mod function;
pub mod grid;
pub(crate) mod interp;
pub mod support;
pub mod zonal;

pub use function::{pair, EstimatedFunction, SphericalFunction};
pub use grid::{build_sphere_grid, GridKind, SphereGrid};
pub use support::{
    check_sublinear, interpolation_allowance, is_support_function, SublinearityWitness,
    SupportCheck,
};
pub use zonal::{
    approximate_identity, convolve_field, convolve_field_at, convolve_zonal,
    convolve_zonal_estimated, ConvolutionRule, ZonalProfile,
};
