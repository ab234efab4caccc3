//! Real and Minkowski valuations generated by Crofton measures, and the
//! named operators built from projections.

pub mod crofton;
pub mod operators;

pub use crofton::{
    apply_crofton_minkowski, associated_body, crofton_value, pi_i_constant, CroftonMeasure,
};
pub use operators::{
    difference_body, intrinsic_volume, klain_function, lambda_i, mean_section_even,
    pi_i_radial_factor, pi_i_support, projection_body, projection_body_generators,
    projection_support_atoms, projection_support_direct, zonotope_volume, MinkowskiValuation,
    OperatorSpec, RealValuation, VolumeRoute,
};
