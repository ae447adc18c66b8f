//! Geometric core of the ranking: footprint polygons, convex building
//! proxies, the propagation-relevance ellipsoid and the estimators built on
//! top of them.
//!
//! All boundary predicates use the absolute tolerance [`GEOM_TOL`]. Grazing
//! contact is a miss for blocker detection and a hit for ellipsoid
//! membership.

mod ellipsoid;
mod polygon;
mod proxy;

pub use ellipsoid::{vertical_overlap_thickness, Ellipsoid};
pub use polygon::{
    convex_hull_2d, is_convex, point_in_polygon, polygon_area, segment_polygon_intervals, Aabb2,
};
pub use proxy::{
    build_proxy, footprint_samples, overlap_samples, overlap_volume, primary_los_blocker,
    segment_prism_entry, write_samples_csv, BuildingProxy, OverlapEstimate,
};

/// Absolute tolerance, in meters, for every boundary predicate.
pub const GEOM_TOL: f64 = 1e-9;

#[inline]
pub(crate) fn cross2(a: crate::Vec2, b: crate::Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}
