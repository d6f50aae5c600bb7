//! Core volume and mesh data structures, file I/O, pre/post-processing and
//! surface sampling.
//!
//! All operations are pure functions of immutable inputs and are safe to call
//! concurrently on shared data.

mod io;
mod marching;
mod mesh;
mod process;
mod sample;
mod tables;
mod volume;

pub use io::{read_obj, read_volume, write_obj, write_volume};
pub use marching::extract_isosurface;
pub(crate) use mesh::dist3;
pub use mesh::{vertex_normals, SurfaceMesh};
pub use process::{
    components_of_label, crop_roi, fill_holes, largest_component, zscore_normalize, Connectivity,
};
pub use sample::{center_intensities, project_labels_to_surface, sample_msp, Profile};
pub use volume::{neighbors_26, Volume, VolumeData, VolumeKind, NEIGHBORS_6};
