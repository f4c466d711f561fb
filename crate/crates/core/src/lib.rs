//! Directional dilation-ratio shape descriptors for binary silhouettes.
//!
//! A silhouette is normalized to a fixed area, stretched by the
//! volume-preserving maps `F(θ, β)` (expand by `β` along direction `θ`,
//! contract by `1/β` across it), and for every stretched copy the area of
//! its Euclidean `ε`-neighbourhood ring is divided by the shape area. The
//! resulting `(θ, β)` grid is the descriptor; two descriptors are compared
//! with a weighted L2 distance minimized over the θ-shifts and θ-reversals
//! induced by rotating and reflecting the shape.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, datasets and
//! parallel matrix evaluation live in the `dirshape` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod config;
pub mod descriptor;
pub mod edt;
mod error;
pub mod label;
pub mod mask;
pub mod metric;
pub mod retrieval;
pub mod synth;
pub mod transform;

pub use config::MetricConfig;
pub use descriptor::{compute_descriptor, compute_p, DescriptorGrid};
pub use edt::{distance_transform, DistanceField};
pub use error::{Error, Result};
pub use mask::{area, fill_holes, normalize_area, validate_shape, BinaryMask, ShapeValidation};
pub use metric::{descriptor_distance, hausdorff_orbit_distance, OrbitAlignment};
pub use retrieval::{nth_neighbor_scores, ClassScores, DistanceMatrix, RetrievalReport};
pub use transform::{apply_transform, make_transform, AffineMap, TransformParams};

/// Largest canvas side a warp may produce.
pub const MAX_CANVAS: usize = 8192;
