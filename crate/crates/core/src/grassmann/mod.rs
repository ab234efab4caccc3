//! Subspaces, measures on Grassmannians, cosine and Radon transforms, and
//! the lifted convolution on `O(n)`.

pub mod group;
pub mod sample;
pub mod subspace;
pub mod transforms;

pub use group::{
    convolve_measures, convolve_measures_sampled, lifted_convolve_grassmann,
    lifted_convolve_sphere, RotationSample,
};
pub use sample::{
    rotation_mapping_pole, sample_grassmann, stratified_subspaces, subspaces_containing,
    subspaces_orthogonal_to, GrassmannFunction, GrassmannSample,
};
pub use subspace::{cosine, perp, principal_cosines, Subspace};
pub use transforms::{cosine_transform, cosine_transform_at, radon_to_sphere};
