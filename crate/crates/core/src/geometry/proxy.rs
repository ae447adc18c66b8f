use std::io::Write;
use std::path::Path;

use rand::Rng;

use super::{convex_hull_2d, cross2, polygon_area, Aabb2, Ellipsoid, GEOM_TOL};
use crate::geometry::vertical_overlap_thickness;
use crate::scene::Building;
use crate::{rng, Error, Result, Vec2, Vec3};

/// Convex prism standing in for a building: the convex hull of its
/// footprint extruded over `[z_low, z_high]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildingProxy {
    pub id: u32,
    /// Counter-clockwise convex hull.
    pub hull: Vec<Vec2>,
    pub z_low: f64,
    pub z_high: f64,
    /// Hull area in m².
    pub area: f64,
    pub bbox: Aabb2,
}

impl BuildingProxy {
    pub fn volume(&self) -> f64 {
        self.area * (self.z_high - self.z_low)
    }

    /// Inclusive containment in the hull (CCW half-plane test).
    pub fn hull_contains(&self, u: Vec2) -> bool {
        let n = self.hull.len();
        (0..n).all(|i| {
            let a = self.hull[i];
            let b = self.hull[(i + 1) % n];
            let e = b - a;
            cross2(e, u - a) >= -GEOM_TOL * e.norm()
        })
    }
}

pub fn build_proxy(building: &Building) -> Result<BuildingProxy> {
    let hull = convex_hull_2d(&building.footprint).map_err(|e| {
        Error::DegenerateGeometry(format!("building {}: {e}", building.id))
    })?;
    let area = polygon_area(&hull)?;
    if area <= 0.0 {
        return Err(Error::DegenerateGeometry(format!(
            "building {} has a zero-area hull",
            building.id
        )));
    }
    Ok(BuildingProxy {
        id: building.id,
        bbox: Aabb2::from_points(&hull),
        hull,
        z_low: building.base_z,
        z_high: building.base_z + building.height,
        area,
    })
}

/// Monte-Carlo estimate of `Vol(proxy ∩ ellipsoid)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapEstimate {
    /// Overlap volume in m³.
    pub volume: f64,
    /// Volume normalized by the full ellipsoid volume, 0 when `b = 0`.
    pub rho: f64,
    /// Number of accepted footprint samples.
    pub samples: usize,
}

impl OverlapEstimate {
    const ZERO: OverlapEstimate = OverlapEstimate {
        volume: 0.0,
        rho: 0.0,
        samples: 0,
    };
}

/// Stratified jittered samples over the hull: one uniform point per grid cell
/// of pitch `interval` over the bounding box, kept when inside the hull.
pub fn footprint_samples<R: Rng>(proxy: &BuildingProxy, interval: f64, rng: &mut R) -> Vec<Vec2> {
    assert!(interval > 0.0, "sampling interval must be positive");
    let extent = proxy.bbox.max - proxy.bbox.min;
    let nx = ((extent.x / interval).ceil() as usize).max(1);
    let ny = ((extent.y / interval).ceil() as usize).max(1);
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let jitter: (f64, f64) = (rng.random(), rng.random());
            let u = proxy.bbox.min
                + Vec2::new((i as f64 + jitter.0) * interval, (j as f64 + jitter.1) * interval);
            if proxy.hull_contains(u) {
                out.push(u);
            }
        }
    }
    out
}

fn disjoint_boxes(proxy: &BuildingProxy, e: &Ellipsoid) -> bool {
    let h = e.half_extents();
    let c = e.center;
    proxy.bbox.max.x < c.x - h.x
        || proxy.bbox.min.x > c.x + h.x
        || proxy.bbox.max.y < c.y - h.y
        || proxy.bbox.min.y > c.y + h.y
        || proxy.z_high < c.z - h.z
        || proxy.z_low > c.z + h.z
}

/// `(|F|/Q)·Σ τ(u_q)` over stratified footprint samples drawn from the
/// stream keyed by `seed`.
pub fn overlap_volume(proxy: &BuildingProxy, e: &Ellipsoid, interval: f64, seed: u64) -> OverlapEstimate {
    if e.semi_minor <= 0.0 || disjoint_boxes(proxy, e) {
        return OverlapEstimate::ZERO;
    }
    let mut rng = rng::stream(&[rng::domain::OVERLAP, seed]);
    let samples = footprint_samples(proxy, interval, &mut rng);
    if samples.is_empty() {
        return OverlapEstimate::ZERO;
    }
    let sum: f64 = samples
        .iter()
        .map(|&u| vertical_overlap_thickness(e, u, proxy.z_low, proxy.z_high))
        .sum();
    let volume = proxy.area / samples.len() as f64 * sum;
    OverlapEstimate {
        volume,
        rho: volume / e.volume(),
        samples: samples.len(),
    }
}

/// The `(u, τ(u))` pairs behind [`overlap_volume`], for inspection.
pub fn overlap_samples(proxy: &BuildingProxy, e: &Ellipsoid, interval: f64, seed: u64) -> Vec<(Vec2, f64)> {
    let mut rng = rng::stream(&[rng::domain::OVERLAP, seed]);
    footprint_samples(proxy, interval, &mut rng)
        .into_iter()
        .map(|u| (u, vertical_overlap_thickness(e, u, proxy.z_low, proxy.z_high)))
        .collect()
}

pub fn write_samples_csv(path: &Path, samples: &[(Vec2, f64)]) -> Result<()> {
    let mut out = String::from("x,y,tau\n");
    for (u, tau) in samples {
        out.push_str(&format!("{},{},{}\n", u.x, u.y, tau));
    }
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(out.as_bytes()))
        .map_err(|e| Error::io(path, e))
}

/// Smallest parameter `t ∈ [0, 1]` at which the segment `x_t → x_r` enters
/// the proxy prism, or `None` if it misses. Contact shallower than
/// [`GEOM_TOL`] is a miss; an endpoint strictly inside yields `t = 0`.
pub fn segment_prism_entry(x_t: &Vec3, x_r: &Vec3, proxy: &BuildingProxy) -> Option<f64> {
    let a = x_t.xy();
    let d = x_r.xy() - a;
    let seg_box = Aabb2::of_segment(a, x_r.xy());
    if !seg_box.overlaps(&proxy.bbox) {
        return None;
    }
    let (mut t_in, mut t_out) = (0.0f64, 1.0f64);

    // z slab, shrunk by the tolerance
    let dz = x_r.z - x_t.z;
    let (zl, zh) = (proxy.z_low + GEOM_TOL, proxy.z_high - GEOM_TOL);
    if dz == 0.0 {
        if x_t.z <= zl || x_t.z >= zh {
            return None;
        }
    } else {
        let (t0, t1) = ((zl - x_t.z) / dz, (zh - x_t.z) / dz);
        t_in = t_in.max(t0.min(t1));
        t_out = t_out.min(t0.max(t1));
    }

    // Cyrus–Beck against the hull shrunk by the tolerance
    let n = proxy.hull.len();
    for i in 0..n {
        let v = proxy.hull[i];
        let e = proxy.hull[(i + 1) % n] - v;
        let len = e.norm();
        let normal = Vec2::new(e.y, -e.x) / len;
        let num = normal.dot(&(a - v)) + GEOM_TOL;
        let den = normal.dot(&d);
        if den == 0.0 {
            if num >= 0.0 {
                return None;
            }
        } else {
            let t = -num / den;
            if den > 0.0 {
                t_out = t_out.min(t);
            } else {
                t_in = t_in.max(t);
            }
        }
        if t_in >= t_out {
            return None;
        }
    }
    (t_in < t_out).then_some(t_in)
}

/// Id of the first proxy entered along `x_t → x_r`; ties go to the smaller id.
pub fn primary_los_blocker(x_t: &Vec3, x_r: &Vec3, proxies: &[BuildingProxy]) -> Option<u32> {
    proxies
        .iter()
        .filter_map(|p| segment_prism_entry(x_t, x_r, p).map(|t| (t, p.id)))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, id)| id)
}
