use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{Fidelity, Scene};
use crate::geometry::{convex_hull_2d, cross2, polygon_area, Aabb2};
use crate::{rng, Error, Result, Vec2};

/// Seeded geometric perturbation that emulates a sparse-scan reconstruction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DegradeParams {
    /// Per-coordinate standard deviation of footprint vertex jitter, meters.
    pub vertex_jitter_sigma: f64,
    /// Standard deviation of the height perturbation, meters.
    pub height_sigma: f64,
    /// Keep at most this many hull vertices; `None` keeps all.
    pub simplify_to: Option<usize>,
}

impl Default for DegradeParams {
    fn default() -> Self {
        DegradeParams {
            vertex_jitter_sigma: 1.0,
            height_sigma: 2.0,
            simplify_to: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Degraded {
    pub scene: Scene,
    /// One line per building that needed a fallback or clamp.
    pub warnings: Vec<String>,
}

const MIN_HEIGHT: f64 = 1.0;

/// Drops the vertex spanning the smallest triangle until `max` remain.
fn simplify(mut hull: Vec<Vec2>, max: usize) -> Vec<Vec2> {
    let max = max.max(3);
    while hull.len() > max {
        let n = hull.len();
        let (drop, _) = (0..n)
            .map(|i| {
                let (p, c, q) = (hull[(i + n - 1) % n], hull[i], hull[(i + 1) % n]);
                (i, cross2(c - p, q - p).abs())
            })
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .expect("non-empty hull");
        hull.remove(drop);
    }
    hull
}

/// Perturbs every building independently with a stream keyed by
/// `(seed, building id)`: jittered footprint vertices are convexified,
/// optionally simplified, and the height is perturbed. Output buildings are
/// tagged low fidelity.
pub fn degrade_scene(scene: &Scene, params: &DegradeParams, seed: u64) -> Result<Degraded> {
    if let Some(b) = scene.buildings.iter().find(|b| b.fidelity != Fidelity::High) {
        return Err(Error::InvalidParameter(format!(
            "degradation expects a high-fidelity scene; building {} is already low",
            b.id
        )));
    }
    let jitter = Normal::new(0.0, params.vertex_jitter_sigma)
        .map_err(|e| Error::InvalidParameter(format!("vertex_jitter_sigma: {e}")))?;
    let height_noise = Normal::new(0.0, params.height_sigma)
        .map_err(|e| Error::InvalidParameter(format!("height_sigma: {e}")))?;
    let (lo, hi) = (scene.terrain.origin, scene.terrain.max_corner());

    let mut warnings = Vec::new();
    let mut out = scene.clone();
    for b in out.buildings.iter_mut() {
        let mut rng = rng::stream(&[rng::domain::DEGRADE, seed, b.id as u64]);
        let jittered: Vec<Vec2> = b
            .footprint
            .iter()
            .map(|p| {
                let d = Vec2::new(jitter.sample(&mut rng), jitter.sample(&mut rng));
                (p + d).sup(&lo).inf(&hi)
            })
            .collect();
        let height = b.height + height_noise.sample(&mut rng);

        let hull = convex_hull_2d(&jittered).map(|h| match params.simplify_to {
            Some(k) => simplify(h, k),
            None => h,
        });
        let footprint = match hull {
            Ok(h) if h.len() >= 3 && polygon_area(&h).is_ok_and(|a| a > 0.0) => {
                // start at the vertex nearest the original first vertex
                let first = b.footprint[0];
                let start = (0..h.len())
                    .min_by(|&i, &j| (h[i] - first).norm().total_cmp(&(h[j] - first).norm()))
                    .unwrap_or(0);
                let mut h = h;
                h.rotate_left(start);
                h
            }
            _ => {
                warnings.push(format!(
                    "building {}: degenerate degraded footprint, using bounding box",
                    b.id
                ));
                Aabb2::from_points(&b.footprint).corners()
            }
        };
        if height < MIN_HEIGHT {
            warnings.push(format!(
                "building {}: degraded height {height:.3} m clamped to {MIN_HEIGHT} m",
                b.id
            ));
        }
        b.footprint = footprint;
        b.height = height.max(MIN_HEIGHT);
        b.fidelity = Fidelity::Low;
    }
    Ok(Degraded {
        scene: out,
        warnings,
    })
}
