//! Deterministic image-method ray tracer over prism scenes.
//!
//! Paths are the direct line of sight plus specular reflections off
//! vertical building facades, up to a configurable interaction depth.
//! Rooftops and the ground do not reflect. Every building is a vertical
//! prism, so reflections only mirror the horizontal coordinates and the
//! height of each reflection point follows from linear interpolation along
//! the unfolded path.
//!
//! For a fixed transmitter the tracer precomputes a beam tree: each node is
//! a facet sequence together with the image of the transmitter and the
//! portion of the last facet that is reachable through all earlier facets.
//! A receiver then only has to be tested against each node's wedge before
//! the path is reconstructed and checked for occlusion.

mod map;

pub use map::{RadioMap, NO_COVERAGE};

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{cross2, point_in_polygon, segment_polygon_intervals, Aabb2, GEOM_TOL};
use crate::scene::{Scene, TxConfig};
use crate::{Vec2, Vec3};

/// Offset applied at reflection points before occlusion tests, meters.
const REFLECTION_OFFSET: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RayConfig {
    /// |Γ| of every facade reflection.
    pub reflection_magnitude: f64,
    /// arg Γ in radians.
    pub reflection_phase: f64,
    pub max_depth: usize,
}

impl Default for RayConfig {
    fn default() -> Self {
        RayConfig { reflection_magnitude: 0.6, reflection_phase: PI, max_depth: 3 }
    }
}

impl RayConfig {
    pub fn with_depth(max_depth: usize) -> Self {
        RayConfig { max_depth, ..RayConfig::default() }
    }

    pub fn gamma(&self) -> Complex64 {
        Complex64::from_polar(self.reflection_magnitude, self.reflection_phase)
    }
}

/// Vertical rectangle spanned by one footprint edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub building_id: u32,
    pub a: Vec2,
    pub b: Vec2,
    pub z_low: f64,
    pub z_high: f64,
    /// Horizontal outward unit normal.
    pub normal: Vec2,
}

impl Facet {
    /// Signed distance of `p` from the facet line, positive outside.
    pub fn side(&self, p: Vec2) -> f64 {
        (p - self.a).dot(&self.normal)
    }

    pub fn mirror(&self, p: Vec2) -> Vec2 {
        p - self.normal * (2.0 * self.side(p))
    }
}

/// One facet per footprint edge, in building then edge order.
pub fn extract_facets(scene: &Scene) -> Vec<Facet> {
    let mut out = Vec::new();
    for b in &scene.buildings {
        let n = b.footprint.len();
        for k in 0..n {
            let (a, c) = (b.footprint[k], b.footprint[(k + 1) % n]);
            let e = c - a;
            let len = e.norm();
            if len <= GEOM_TOL {
                continue;
            }
            out.push(Facet {
                building_id: b.id,
                a,
                b: c,
                z_low: b.base_z,
                z_high: b.top_z(),
                normal: Vec2::new(e.y, -e.x) / len,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct TracedPath {
    /// Number of reflections; 0 is the line-of-sight path.
    pub order: usize,
    /// Indices into the facet list, in interaction order.
    pub facets: Vec<usize>,
    /// Building of each interaction.
    pub buildings: Vec<u32>,
    /// Reflection points.
    pub points: Vec<Vec3>,
    pub length: f64,
    pub amplitude: Complex64,
    /// Unit direction leaving the transmitter.
    pub departure: Vec3,
}

impl TracedPath {
    pub fn is_los(&self) -> bool {
        self.order == 0
    }
}

/// `10·log10(Σ|a_p|²)`, or [`NO_COVERAGE`] without paths.
pub fn path_gain_db(paths: &[TracedPath]) -> f64 {
    if paths.is_empty() {
        return NO_COVERAGE;
    }
    let power: f64 = paths.iter().map(|p| p.amplitude.norm_sqr()).sum();
    10.0 * power.log10()
}

struct Occluder {
    footprint: Vec<Vec2>,
    bbox: Aabb2,
    z_low: f64,
    z_high: f64,
}

impl Occluder {
    fn blocks(&self, p: &Vec3, q: &Vec3) -> bool {
        if !self.bbox.overlaps(&Aabb2::of_segment(p.xy(), q.xy())) {
            return false;
        }
        if p.z.min(q.z) >= self.z_high - GEOM_TOL || p.z.max(q.z) <= self.z_low + GEOM_TOL {
            return false;
        }
        let dz = q.z - p.z;
        segment_polygon_intervals(p.xy(), q.xy(), &self.footprint).into_iter().any(|(t0, t1)| {
            let (z0, z1) = (p.z + t0 * dz, p.z + t1 * dz);
            z0.min(z1) < self.z_high - GEOM_TOL && z0.max(z1) > self.z_low + GEOM_TOL
        })
    }
}

/// `n·x + c ≥ 0` with a unit normal `n`.
#[derive(Debug, Clone, Copy)]
struct HalfPlane {
    n: Vec2,
    c: f64,
}

impl HalfPlane {
    /// Left of the directed line `from → to`.
    fn left_of(from: Vec2, to: Vec2) -> Option<HalfPlane> {
        let d = to - from;
        let len = d.norm();
        if len <= 1e-12 {
            return None;
        }
        let n = Vec2::new(-d.y, d.x) / len;
        Some(HalfPlane { n, c: -n.dot(&from) })
    }

    fn eval(&self, p: Vec2) -> f64 {
        self.n.dot(&p) + self.c
    }

    fn flipped(self) -> HalfPlane {
        HalfPlane { n: -self.n, c: -self.c }
    }
}

#[derive(Debug, Clone)]
struct BeamNode {
    facet: usize,
    parent: Option<usize>,
    /// Transmitter image after all reflections of the sequence.
    image: Vec2,
    /// Receivers must satisfy every half-plane (front of the facet, inside
    /// the wedge, beyond the aperture).
    bounds: [HalfPlane; 4],
}

/// Clips the segment `a → b` to `h ≥ 0`.
fn clip(a: Vec2, b: Vec2, h: &HalfPlane) -> Option<(Vec2, Vec2)> {
    let (fa, fb) = (h.eval(a), h.eval(b));
    match (fa >= 0.0, fb >= 0.0) {
        (true, true) => Some((a, b)),
        (false, false) => None,
        (true, false) => Some((a, a + (b - a) * (fa / (fa - fb)))),
        (false, true) => Some((a + (b - a) * (fa / (fa - fb)), b)),
    }
}

/// Wedge of rays from `image` through the aperture `p–q`, restricted to the
/// far side of the aperture line.
fn beam_bounds(image: Vec2, p: Vec2, q: Vec2) -> Option<[HalfPlane; 3]> {
    let (p, q) = if cross2(p - image, q - image) >= 0.0 { (p, q) } else { (q, p) };
    let side_p = HalfPlane::left_of(image, p)?;
    let side_q = HalfPlane::left_of(q, image)?;
    let mut beyond = HalfPlane::left_of(p, q)?;
    if beyond.eval(image) > 0.0 {
        beyond = beyond.flipped();
    }
    Some([side_p, side_q, beyond])
}

/// Intersection parameter along the facet of the line `from → to`.
fn facet_hit(facet: &Facet, from: Vec2, to: Vec2) -> Option<(f64, Vec2)> {
    let d = to - from;
    let e = facet.b - facet.a;
    let denom = cross2(d, e);
    if denom.abs() < 1e-300 {
        return None;
    }
    let s = cross2(facet.a - from, d) / denom;
    Some((s, facet.a + e * s))
}

/// Ray tracer bound to one transmitter.
pub struct Tracer {
    tx: TxConfig,
    config: RayConfig,
    facets: Vec<Facet>,
    occluders: Vec<Occluder>,
    nodes: Vec<BeamNode>,
}

impl Tracer {
    pub fn new(scene: &Scene, tx: &TxConfig, config: &RayConfig) -> Tracer {
        let facets = extract_facets(scene);
        let occluders = scene
            .buildings
            .iter()
            .map(|b| Occluder {
                bbox: Aabb2::from_points(&b.footprint),
                footprint: b.footprint.clone(),
                z_low: b.base_z,
                z_high: b.top_z(),
            })
            .collect();
        let mut tracer = Tracer { tx: *tx, config: config.clone(), facets, occluders, nodes: Vec::new() };
        tracer.expand(None, tx.position.xy(), None, 0);
        tracer
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Number of facet sequences reachable from the transmitter.
    pub fn beam_count(&self) -> usize {
        self.nodes.len()
    }

    fn expand(&mut self, parent: Option<usize>, image: Vec2, aperture: Option<[HalfPlane; 3]>, depth: usize) {
        if depth >= self.config.max_depth {
            return;
        }
        let last = parent.map(|p| self.nodes[p].facet);
        for g in 0..self.facets.len() {
            if Some(g) == last {
                continue;
            }
            let facet = &self.facets[g];
            if facet.side(image) <= GEOM_TOL {
                continue;
            }
            let mut piece = Some((facet.a, facet.b));
            if let Some(planes) = &aperture {
                for h in planes {
                    piece = piece.and_then(|(a, b)| clip(a, b, h));
                }
            }
            let Some((c0, c1)) = piece else { continue };
            if (c1 - c0).norm() <= GEOM_TOL {
                continue;
            }
            let front = HalfPlane { n: facet.normal, c: -facet.normal.dot(&facet.a) };
            let child_image = facet.mirror(image);
            let Some(child_wedge) = beam_bounds(child_image, c0, c1) else { continue };
            self.nodes.push(BeamNode {
                facet: g,
                parent,
                image: child_image,
                bounds: [front, child_wedge[0], child_wedge[1], child_wedge[2]],
            });
            let idx = self.nodes.len() - 1;
            self.expand(Some(idx), child_image, Some(child_wedge), depth + 1);
        }
    }

    fn occluded(&self, p: &Vec3, q: &Vec3) -> bool {
        self.occluders.iter().any(|o| o.blocks(p, q))
    }

    fn make_path(&self, order: usize, facets: Vec<usize>, points: Vec<Vec3>, length: f64, x_r: &Vec3) -> TracedPath {
        let lambda = self.tx.wavelength();
        let first = points.first().copied().unwrap_or(*x_r);
        let magnitude = lambda / (4.0 * PI * length) * self.config.reflection_magnitude.powi(order as i32);
        let phase = -2.0 * PI * (length / lambda).rem_euclid(1.0) + order as f64 * self.config.reflection_phase;
        TracedPath {
            order,
            buildings: facets.iter().map(|&f| self.facets[f].building_id).collect(),
            facets,
            points,
            length,
            amplitude: Complex64::from_polar(magnitude, phase),
            departure: (first - self.tx.position).normalize(),
        }
    }

    /// Reconstructs and validates the path of one beam node.
    fn path_through(&self, node_idx: usize, x_r: &Vec3) -> Option<TracedPath> {
        let x_t = self.tx.position;
        let r = x_r.xy();
        let node = &self.nodes[node_idx];
        if node.bounds.iter().any(|h| h.eval(r) < -GEOM_TOL) || node.bounds[0].eval(r) <= GEOM_TOL {
            return None;
        }
        let mut chain = Vec::new();
        let mut cur = Some(node_idx);
        while let Some(k) = cur {
            chain.push(k);
            cur = self.nodes[k].parent;
        }
        // walk back from the receiver: the k-th point lies on the line from
        // the k-th image to the (k+1)-th point
        let mut hits2 = vec![Vec2::zeros(); chain.len()];
        let mut target = r;
        for (slot, &k) in chain.iter().enumerate() {
            let n = &self.nodes[k];
            let (s, hit) = facet_hit(&self.facets[n.facet], n.image, target)?;
            if !(-1e-9..=1.0 + 1e-9).contains(&s) {
                return None;
            }
            hits2[chain.len() - 1 - slot] = hit;
            target = hit;
        }
        let facets: Vec<usize> = chain.iter().rev().map(|&k| self.nodes[k].facet).collect();

        let mut cumulative = Vec::with_capacity(hits2.len());
        let mut prev = x_t.xy();
        let mut s = 0.0;
        for h in &hits2 {
            s += (h - prev).norm();
            cumulative.push(s);
            prev = *h;
        }
        let total2 = s + (r - prev).norm();
        if total2 <= 0.0 {
            return None;
        }
        let dz = x_r.z - x_t.z;
        let mut points = Vec::with_capacity(hits2.len());
        for ((h, s), &f) in hits2.iter().zip(&cumulative).zip(&facets) {
            let z = x_t.z + dz * (s / total2);
            let facet = &self.facets[f];
            if z < facet.z_low - GEOM_TOL || z > facet.z_high + GEOM_TOL {
                return None;
            }
            points.push(Vec3::new(h.x, h.y, z));
        }

        let mut from = x_t;
        for k in 0..=points.len() {
            let to = if k < points.len() { points[k] } else { *x_r };
            let d = to - from;
            let len = d.norm();
            if len <= 2.0 * REFLECTION_OFFSET {
                return None;
            }
            let u = d / len;
            let start = if k > 0 { from + u * REFLECTION_OFFSET } else { from };
            let end = if k < points.len() { to - u * REFLECTION_OFFSET } else { to };
            if self.occluded(&start, &end) {
                return None;
            }
            from = to;
        }

        let length = ((node.image - r).norm_squared() + dz * dz).sqrt();
        Some(self.make_path(points.len(), facets, points, length, x_r))
    }

    /// All valid paths to `x_r`: line of sight first, then reflections in
    /// lexicographic facet-sequence order.
    pub fn paths_to(&self, x_r: &Vec3) -> Vec<TracedPath> {
        let mut out = Vec::new();
        let x_t = self.tx.position;
        let d = (x_r - x_t).norm();
        if d > 0.0 && !self.occluded(&x_t, x_r) {
            out.push(self.make_path(0, Vec::new(), Vec::new(), d, x_r));
        }
        for k in 0..self.nodes.len() {
            if let Some(p) = self.path_through(k, x_r) {
                out.push(p);
            }
        }
        out
    }

    pub fn gain_db(&self, x_r: &Vec3) -> f64 {
        path_gain_db(&self.paths_to(x_r))
    }

    /// True when `u` is inside (or on the boundary of) any footprint.
    pub fn inside_building(&self, u: Vec2) -> bool {
        self.occluders.iter().any(|o| {
            u.x >= o.bbox.min.x - GEOM_TOL
                && u.x <= o.bbox.max.x + GEOM_TOL
                && u.y >= o.bbox.min.y - GEOM_TOL
                && u.y <= o.bbox.max.y + GEOM_TOL
                && point_in_polygon(u, &o.footprint)
        })
    }

    /// Path gain at every terrain cell center lifted by `h_r`.
    pub fn radio_map(&self, scene: &Scene, h_r: f64) -> RadioMap {
        let terrain = &scene.terrain;
        let values: Vec<f64> = (0..terrain.n_cells())
            .into_par_iter()
            .map(|k| {
                let c = terrain.cell_center_at(k);
                if self.inside_building(c) {
                    NO_COVERAGE
                } else {
                    self.gain_db(&Vec3::new(c.x, c.y, terrain.elevation_at(k) + h_r))
                }
            })
            .collect();
        RadioMap { nx: terrain.nx, ny: terrain.ny, origin: terrain.origin, cell_size: terrain.cell_size, values }
    }

    /// Coherent array response `h_m = Σ_p a_p·exp(j2π·s·m·u_x(p))` of the
    /// ULA laid along the x axis.
    pub fn channel(&self, x_r: &Vec3) -> Vec<Complex64> {
        channel_from_paths(&self.paths_to(x_r), self.tx.array_size, self.tx.element_spacing)
    }
}

/// Array response for an explicit path list.
pub fn channel_from_paths(paths: &[TracedPath], elements: usize, spacing_wavelengths: f64) -> Vec<Complex64> {
    (0..elements)
        .map(|m| {
            paths
                .iter()
                .map(|p| p.amplitude * Complex64::cis(2.0 * PI * spacing_wavelengths * m as f64 * p.departure.x))
                .sum()
        })
        .collect()
}

fn tx_at(scene: &Scene, x_t: Vec3) -> TxConfig {
    TxConfig { position: x_t, ..scene.tx }
}

/// Paths from `x_t` to `x_r` using the scene's carrier and default Γ.
pub fn trace_paths(scene: &Scene, x_t: Vec3, x_r: Vec3, max_depth: usize) -> Vec<TracedPath> {
    Tracer::new(scene, &tx_at(scene, x_t), &RayConfig::with_depth(max_depth)).paths_to(&x_r)
}

pub fn compute_radio_map(scene: &Scene, tx: &TxConfig, h_r: f64, max_depth: usize) -> RadioMap {
    Tracer::new(scene, tx, &RayConfig::with_depth(max_depth)).radio_map(scene, h_r)
}

pub fn compute_channel(scene: &Scene, tx: &TxConfig, x_r: Vec3, max_depth: usize) -> Vec<Complex64> {
    Tracer::new(scene, tx, &RayConfig::with_depth(max_depth)).channel(&x_r)
}
