//! Budgeted geometry refinement for urban wireless digital twins.
//!
//! A low-fidelity twin (degraded building footprints and heights) is scored
//! building by building with the ellipsoid-guided selective refinement
//! (EGSR) ranking: every building is abstracted as a convex prism, every
//! transmitter-receiver pair spans a prolate spheroid of bounded excess path
//! length, and a building's score is its normalized overlap with those
//! spheroids, boosted when it is the first obstruction of the direct path.
//! The top-`W` buildings are then refined.
//!
//! The crate also carries a deterministic image-method ray tracer (line of
//! sight plus specular facade reflections) that serves as the ground-truth
//! channel generator, and the fidelity metrics used to judge a refinement:
//! radio-map RMSE, building-removal impact profiles and MRT beamforming gain.
//!
//! Module map:
//!
//! - [`scene`]: buildings, terrain, transmitter, synthetic cities,
//!   degradation, refinement and the scene JSON format.
//! - [`geometry`]: polygons, building proxies, the relevance ellipsoid,
//!   overlap volumes and line-of-sight blockers.
//! - [`rx_proxy`]: the transmitter-centred polar receiver proxy set.
//! - [`egsr`]: per-pair scores, aggregation and top-`W` selection.
//! - [`raytrace`]: facets, traced paths, radio maps and channel vectors.
//! - [`metrics`]: ablation, RMSE, task losses and beamforming statistics.
//! - [`harness`]: baselines, experiment configuration and CSV pipelines.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod egsr;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod metrics;
pub mod raytrace;
pub mod rng;
pub mod rx_proxy;
pub mod scene;

pub use error::{Error, Result};

/// Horizontal vector in meters.
pub type Vec2 = nalgebra::Vector2<f64>;
/// Position or direction in meters.
pub type Vec3 = nalgebra::Vector3<f64>;
