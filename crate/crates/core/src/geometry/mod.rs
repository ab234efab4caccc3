//! Convex bodies, hulls, face lattices and exact volumes.

pub mod body;
pub mod faces;
pub mod hull;

pub use body::{
    minkowski_combine, project_coordinates, project_volume, projected_intrinsic_volumes,
    random_polytope, steiner_point, support_eval, Ball, BodyHandle, Polytope, SupportBody,
};
pub use faces::FaceLattice;
pub use hull::{convex_hull, hull_volume};
