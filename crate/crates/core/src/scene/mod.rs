//! Digital-twin scene model: prism buildings over a gridded terrain plus the
//! transmitter configuration, in high- and low-fidelity variants.

mod city;
mod degrade;
mod io;

use std::collections::BTreeSet;

pub use city::{generate_synthetic_city, CityParams};
pub use degrade::{degrade_scene, DegradeParams, Degraded};
pub use io::{
    load_scene, save_scene, save_scene_with, scene_from_json, scene_to_json, scene_to_json_with, Provenance,
    SCENE_SCHEMA,
};

use crate::geometry::{cross2, polygon_area};
use crate::{Error, Result, Vec2, Vec3};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fidelity {
    High,
    Low,
}

/// A vertical prism: footprint polygon extruded from `base_z` by `height`.
#[derive(Debug, Clone, PartialEq)]
pub struct Building {
    pub id: u32,
    /// Simple polygon, counter-clockwise, meters.
    pub footprint: Vec<Vec2>,
    pub base_z: f64,
    pub height: f64,
    pub fidelity: Fidelity,
}

impl Building {
    pub fn top_z(&self) -> f64 {
        self.base_z + self.height
    }

    /// Checks the footprint and height invariants; the error message names
    /// the violated rule.
    pub fn check(&self) -> std::result::Result<(), String> {
        let fp = &self.footprint;
        if fp.len() < 3 {
            return Err(format!("footprint has {} vertices, need at least 3", fp.len()));
        }
        if !fp.iter().all(|p| p.x.is_finite() && p.y.is_finite()) {
            return Err("footprint has non-finite coordinates".into());
        }
        if !(self.height.is_finite() && self.height > 0.0) {
            return Err(format!("height must be positive, got {}", self.height));
        }
        if !self.base_z.is_finite() {
            return Err("base_z must be finite".into());
        }
        if !is_simple(fp) {
            return Err("footprint is self-intersecting".into());
        }
        let area = polygon_area(fp).map_err(|e| e.to_string())?;
        if area <= 0.0 {
            return Err(format!(
                "footprint must be counter-clockwise with positive area (signed area {area})"
            ));
        }
        Ok(())
    }
}

fn segments_cross(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = cross2(b - a, c - a);
    let d2 = cross2(b - a, d - a);
    let d3 = cross2(d - c, a - c);
    let d4 = cross2(d - c, b - c);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |p: Vec2, q: Vec2, r: Vec2, side: f64| {
        side == 0.0
            && r.x >= p.x.min(q.x)
            && r.x <= p.x.max(q.x)
            && r.y >= p.y.min(q.y)
            && r.y <= p.y.max(q.y)
    };
    on(a, b, c, d1) || on(a, b, d, d2) || on(c, d, a, d3) || on(c, d, b, d4)
}

fn is_simple(poly: &[Vec2]) -> bool {
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if a == b {
            return false;
        }
        for j in (i + 1)..n {
            // skip edges that share a vertex
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if segments_cross(a, b, poly[j], poly[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

/// Terrain elevation: one flat plane or one value per cell, row-major with
/// `x` varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub enum Elevation {
    Flat(f64),
    Grid(Vec<f64>),
}

/// Square-cell measurement grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Terrain {
    pub origin: Vec2,
    pub cell_size: f64,
    pub nx: usize,
    pub ny: usize,
    pub elevation: Elevation,
}

impl Terrain {
    pub fn flat(origin: Vec2, cell_size: f64, nx: usize, ny: usize) -> Self {
        Terrain {
            origin,
            cell_size,
            nx,
            ny,
            elevation: Elevation::Flat(0.0),
        }
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    /// Horizontal center of cell `(i, j)`.
    pub fn cell_center(&self, i: usize, j: usize) -> Vec2 {
        self.origin + Vec2::new((i as f64 + 0.5) * self.cell_size, (j as f64 + 0.5) * self.cell_size)
    }

    /// Center of the cell with row-major index `k`.
    pub fn cell_center_at(&self, k: usize) -> Vec2 {
        self.cell_center(k % self.nx, k / self.nx)
    }

    pub fn elevation_at(&self, k: usize) -> f64 {
        match &self.elevation {
            Elevation::Flat(z) => *z,
            Elevation::Grid(v) => v[k],
        }
    }

    pub fn max_corner(&self) -> Vec2 {
        self.origin + Vec2::new(self.nx as f64 * self.cell_size, self.ny as f64 * self.cell_size)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let hi = self.max_corner();
        p.x >= self.origin.x && p.y >= self.origin.y && p.x <= hi.x && p.y <= hi.y
    }

    pub fn check(&self) -> std::result::Result<(), String> {
        if !(self.cell_size.is_finite() && self.cell_size > 0.0) {
            return Err(format!("cell_size must be positive, got {}", self.cell_size));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err("nx and ny must be at least 1".into());
        }
        if let Elevation::Grid(v) = &self.elevation {
            if v.len() != self.n_cells() {
                return Err(format!(
                    "elevation grid has {} values, expected nx*ny = {}",
                    v.len(),
                    self.n_cells()
                ));
            }
        }
        Ok(())
    }
}

/// Transmitter: position plus a uniform linear array along the x axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TxConfig {
    pub position: Vec3,
    pub frequency_hz: f64,
    pub array_size: usize,
    /// Element spacing in wavelengths.
    pub element_spacing: f64,
}

impl TxConfig {
    /// 3.5 GHz carrier, 1×64 half-wavelength ULA.
    pub fn at(position: Vec3) -> Self {
        TxConfig {
            position,
            frequency_hz: 3.5e9,
            array_size: 64,
            element_spacing: 0.5,
        }
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency_hz
    }

    pub fn check(&self) -> std::result::Result<(), String> {
        if !(self.frequency_hz.is_finite() && self.frequency_hz > 0.0) {
            return Err("frequency must be positive".into());
        }
        if self.array_size == 0 {
            return Err("array_size must be at least 1".into());
        }
        if !(self.element_spacing.is_finite() && self.element_spacing > 0.0) {
            return Err("element spacing must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub buildings: Vec<Building>,
    pub terrain: Terrain,
    pub tx: TxConfig,
}

impl Scene {
    /// Validates every scene invariant. Errors carry a JSON pointer into the
    /// scene document layout.
    pub fn validate(&self) -> Result<()> {
        let invalid = |pointer: String, message: String| Error::InvalidScene { pointer, message };
        self.terrain
            .check()
            .map_err(|m| invalid("/terrain".into(), m))?;
        self.tx.check().map_err(|m| invalid("/tx".into(), m))?;
        let mut seen = BTreeSet::new();
        for (k, b) in self.buildings.iter().enumerate() {
            if !seen.insert(b.id) {
                return Err(invalid(format!("/buildings/{k}/id"), format!("duplicate building id {}", b.id)));
            }
            b.check()
                .map_err(|m| invalid(format!("/buildings/{k}/footprint"), format!("building {}: {m}", b.id)))?;
            if let Some(p) = b.footprint.iter().find(|p| !self.terrain.contains(**p)) {
                return Err(invalid(
                    format!("/buildings/{k}/footprint"),
                    format!("building {}: vertex ({}, {}) lies outside the terrain", b.id, p.x, p.y),
                ));
            }
        }
        Ok(())
    }

    pub fn building(&self, id: u32) -> Option<&Building> {
        self.buildings.iter().find(|b| b.id == id)
    }

    pub fn ids(&self) -> BTreeSet<u32> {
        self.buildings.iter().map(|b| b.id).collect()
    }

    /// The scene with one building removed.
    pub fn without_building(&self, id: u32) -> Result<Scene> {
        if self.building(id).is_none() {
            return Err(Error::UnknownBuilding(id));
        }
        let mut out = self.clone();
        out.buildings.retain(|b| b.id != id);
        Ok(out)
    }

    pub fn with_tx(&self, tx: TxConfig) -> Scene {
        Scene { tx, ..self.clone() }
    }
}

/// Buildings chosen for refinement under a building-count budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementPlan {
    pub budget: usize,
    pub selected: BTreeSet<u32>,
}

impl RefinementPlan {
    pub fn new(budget: usize, selected: impl IntoIterator<Item = u32>) -> Result<Self> {
        let selected: BTreeSet<u32> = selected.into_iter().collect();
        if selected.len() > budget {
            return Err(Error::OverBudget {
                selected: selected.len(),
                budget,
            });
        }
        Ok(RefinementPlan { budget, selected })
    }

    pub fn empty() -> Self {
        RefinementPlan {
            budget: 0,
            selected: BTreeSet::new(),
        }
    }

    /// Every building in `scene`.
    pub fn all(scene: &Scene) -> Self {
        let selected = scene.ids();
        RefinementPlan {
            budget: selected.len(),
            selected,
        }
    }
}

/// Replaces the selected buildings of `low` by their counterparts in `hi`.
///
/// The two scenes must carry the same building id set; building order and
/// terrain follow `low`.
pub fn apply_refinement(low: &Scene, hi: &Scene, plan: &RefinementPlan) -> Result<Scene> {
    let (low_ids, hi_ids) = (low.ids(), hi.ids());
    let mismatch: Vec<u32> = low_ids.symmetric_difference(&hi_ids).copied().collect();
    if !mismatch.is_empty() {
        return Err(Error::SceneMismatch { ids: mismatch });
    }
    if let Some(&id) = plan.selected.iter().find(|id| !low_ids.contains(id)) {
        return Err(Error::UnknownBuilding(id));
    }
    let mut out = low.clone();
    for b in out.buildings.iter_mut() {
        if plan.selected.contains(&b.id) {
            *b = hi.building(b.id).expect("id sets match").clone();
            b.fidelity = Fidelity::High;
        }
    }
    Ok(out)
}
