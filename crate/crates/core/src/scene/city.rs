use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Building, Fidelity, Scene, Terrain, TxConfig};
use crate::{rng, Error, Result, Vec2, Vec3};

/// Shape and placement knobs for [`generate_synthetic_city`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CityParams {
    /// Range of the footprint's larger semi-axis, meters.
    pub radius_range: [f64; 2],
    /// Minor-to-major semi-axis ratio range.
    pub aspect_range: [f64; 2],
    pub height_range: [f64; 2],
    /// Inclusive vertex count range; values outside 4..=8 are clamped.
    pub vertex_range: [usize; 2],
    /// Minimum clearance between bounding circles of neighbours, meters.
    pub gap: f64,
    /// Minimum distance between a footprint and the terrain border.
    pub margin: f64,
    pub cell_size: f64,
    /// Transmitter position; defaults to the extent center at `tx_height`.
    pub tx_position: Option<[f64; 3]>,
    pub tx_height: f64,
    /// Horizontal keep-out radius around the transmitter.
    pub tx_clearance: f64,
    pub max_attempts: usize,
}

impl Default for CityParams {
    fn default() -> Self {
        CityParams {
            radius_range: [8.0, 22.0],
            aspect_range: [0.5, 1.0],
            height_range: [10.0, 60.0],
            vertex_range: [4, 8],
            gap: 4.0,
            margin: 5.0,
            cell_size: 5.0,
            tx_position: None,
            tx_height: 20.0,
            tx_clearance: 12.0,
            max_attempts: 5000,
        }
    }
}

struct Placed {
    center: Vec2,
    radius: f64,
}

/// Seeded synthetic city of non-overlapping convex prisms on a flat square
/// terrain of side `extent`. All buildings are tagged high fidelity and get
/// ids `0..n_buildings`.
pub fn generate_synthetic_city(seed: u64, n_buildings: usize, extent: f64, params: &CityParams) -> Result<Scene> {
    if !(extent.is_finite() && extent > 0.0) {
        return Err(Error::InvalidParameter(format!("extent must be positive, got {extent}")));
    }
    let n_cells = (extent / params.cell_size).ceil() as usize;
    let terrain = Terrain::flat(Vec2::zeros(), params.cell_size, n_cells, n_cells);
    let tx_pos = params
        .tx_position
        .map(|p| Vec3::new(p[0], p[1], p[2]))
        .unwrap_or_else(|| Vec3::new(0.5 * extent, 0.5 * extent, params.tx_height));

    let mut rng = rng::stream(&[rng::domain::CITY, seed]);
    let (vmin, vmax) = (params.vertex_range[0].clamp(4, 8), params.vertex_range[1].clamp(4, 8));
    let mut placed: Vec<Placed> = Vec::with_capacity(n_buildings);
    let mut buildings = Vec::with_capacity(n_buildings);

    for id in 0..n_buildings {
        let mut attempts = 0;
        let building = loop {
            if attempts == params.max_attempts {
                return Err(Error::Placement {
                    seed,
                    requested: n_buildings,
                    placed: id,
                    extent,
                    density: n_buildings as f64 / (extent * extent),
                    attempts,
                });
            }
            attempts += 1;

            let radius = rng.random_range(params.radius_range[0]..=params.radius_range[1]);
            let lo = params.margin + radius;
            let hi = extent - params.margin - radius;
            if hi <= lo {
                continue;
            }
            let center = Vec2::new(rng.random_range(lo..hi), rng.random_range(lo..hi));
            if (center - tx_pos.xy()).norm() < radius + params.tx_clearance {
                continue;
            }
            if placed
                .iter()
                .any(|p| (p.center - center).norm() < p.radius + radius + params.gap)
            {
                continue;
            }

            let aspect = rng.random_range(params.aspect_range[0]..=params.aspect_range[1]);
            let rotation = rng.random_range(0.0..TAU);
            let k = rng.random_range(vmin..=vmax);
            let step = TAU / k as f64;
            let (sin_r, cos_r) = rotation.sin_cos();
            // vertices on a rotated ellipse are in strictly convex position
            let footprint: Vec<Vec2> = (0..k)
                .map(|j| {
                    let t = step * (j as f64 + rng.random_range(-0.3..0.3));
                    let local = Vec2::new(radius * t.cos(), radius * aspect * t.sin());
                    center
                        + Vec2::new(
                            local.x * cos_r - local.y * sin_r,
                            local.x * sin_r + local.y * cos_r,
                        )
                })
                .collect();
            let height = rng.random_range(params.height_range[0]..=params.height_range[1]);
            placed.push(Placed { center, radius });
            break Building {
                id: id as u32,
                footprint,
                base_z: 0.0,
                height,
                fidelity: Fidelity::High,
            };
        };
        buildings.push(building);
    }

    Ok(Scene {
        buildings,
        terrain,
        tx: TxConfig::at(tx_pos),
    })
}
