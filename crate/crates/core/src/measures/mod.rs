//! Area measures, mixed volumes, quermassintegrals and intrinsic volumes.

pub mod area;
pub mod atomic;
pub mod mixed;
pub mod quermass;

pub use area::{area_measure, even_area_measure, surface_area_measure, AreaOptions};
pub use atomic::AtomicMeasure;
pub use mixed::{mixed_quermass_pair, mixed_quermass_with, mixed_volume_fit, MixedVolumeFit};
pub use quermass::{
    polytopal_ball, quermass_exact, quermass_kubota, quermass_steiner_fit, quermass_vector_kubota,
    QuermassSource, QuermassVector, SteinerFitOptions,
};
