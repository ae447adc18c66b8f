//! Transmitter-centred receiver proxy set.
//!
//! Terrain cell centers lifted by `h_r` are candidate receivers. They are
//! binned into radial bands around the transmitter, each band into rings of
//! the band's spacing, each ring into azimuth sectors, and one candidate per
//! non-empty polar cell is kept. Near the transmitter the cells are small,
//! so the proxy set is dense there and sparse far away.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::{point_in_polygon, Aabb2};
use crate::scene::{Building, Terrain};
use crate::{Error, Result, Vec2, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RxCandidate {
    /// Row-major terrain cell index the candidate was lifted from.
    pub cell: usize,
    pub position: Vec3,
    /// Horizontal distance to the transmitter.
    pub r: f64,
    /// Azimuth about the transmitter in `(−π, π]`.
    pub phi: f64,
}

/// Polar cell `(band, ring, sector)`; `band` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarCell {
    pub band: usize,
    pub ring: usize,
    pub sector: usize,
    pub sector_count: usize,
    pub r_center: f64,
    pub phi_center: f64,
}

impl PolarCell {
    pub fn key(&self) -> (usize, usize, usize) {
        (self.band, self.ring, self.sector)
    }

    /// Cell center in Cartesian coordinates for a transmitter at `tx`.
    pub fn center_xy(&self, tx: Vec2) -> Vec2 {
        tx + Vec2::new(self.r_center * self.phi_center.cos(), self.r_center * self.phi_center.sin())
    }
}

/// Stratification parameters. `band_boundaries` lists `R_2 < … < R_L`
/// (the first band starts at 0), so `spacings` has one more entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RxProxyParams {
    pub band_boundaries: Vec<f64>,
    pub spacings: Vec<f64>,
    pub min_sectors: usize,
    /// Receiver height above terrain, meters.
    pub h_r: f64,
}

impl Default for RxProxyParams {
    fn default() -> Self {
        RxProxyParams {
            band_boundaries: vec![50.0, 100.0, 200.0, 350.0],
            spacings: vec![0.55, 0.75, 1.5, 2.7, 4.0],
            min_sectors: 8,
            h_r: 1.5,
        }
    }
}

impl RxProxyParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.spacings.len() != self.band_boundaries.len() + 1 {
            return bad(format!(
                "{} band boundaries need {} spacings, got {}",
                self.band_boundaries.len(),
                self.band_boundaries.len() + 1,
                self.spacings.len()
            ));
        }
        let mut prev = 0.0;
        for &r in &self.band_boundaries {
            if !(r > prev) {
                return bad("band boundaries must be positive and strictly increasing".into());
            }
            prev = r;
        }
        if self.spacings.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
            return bad("band spacings must be positive".into());
        }
        if self.min_sectors == 0 {
            return bad("min_sectors must be at least 1".into());
        }
        if !(self.h_r >= 0.0) {
            return bad("h_r must be non-negative".into());
        }
        Ok(())
    }

    /// Lower radius of band `l` (1-based).
    fn band_start(&self, l: usize) -> f64 {
        if l == 1 {
            0.0
        } else {
            self.band_boundaries[l - 2]
        }
    }
}

/// One candidate per terrain cell whose center is outside every footprint.
pub fn generate_candidates(terrain: &Terrain, buildings: &[Building], tx: Vec3, h_r: f64) -> Vec<RxCandidate> {
    let boxes: Vec<Aabb2> = buildings.iter().map(|b| Aabb2::from_points(&b.footprint)).collect();
    (0..terrain.n_cells())
        .filter_map(|k| {
            let c = terrain.cell_center_at(k);
            let inside = buildings.iter().zip(&boxes).any(|(b, bb)| {
                c.x >= bb.min.x && c.x <= bb.max.x && c.y >= bb.min.y && c.y <= bb.max.y
                    && point_in_polygon(c, &b.footprint)
            });
            if inside {
                return None;
            }
            let rel = c - tx.xy();
            let mut phi = rel.y.atan2(rel.x);
            if phi <= -PI {
                phi = PI;
            }
            Some(RxCandidate {
                cell: k,
                position: Vec3::new(c.x, c.y, terrain.elevation_at(k) + h_r),
                r: rel.norm(),
                phi,
            })
        })
        .collect()
}

/// Polar cell of a single `(r, φ)` location.
pub fn polar_cell(r: f64, phi: f64, params: &RxProxyParams) -> PolarCell {
    let band = 1 + params.band_boundaries.iter().filter(|&&b| r >= b).count();
    let spacing = params.spacings[band - 1];
    let ring = ((r - params.band_start(band)) / spacing).floor().max(0.0) as usize;
    let r_center = params.band_start(band) + (ring as f64 + 0.5) * spacing;
    let sector_count = params
        .min_sectors
        .max((TAU * r_center / spacing).round() as usize);
    let width = TAU / sector_count as f64;
    let sector = (((phi + PI) / width).floor() as usize).min(sector_count - 1);
    PolarCell {
        band,
        ring,
        sector,
        sector_count,
        r_center,
        phi_center: -PI + (sector as f64 + 0.5) * width,
    }
}

/// Polar cell of every candidate, in candidate order.
pub fn stratify_polar(candidates: &[RxCandidate], params: &RxProxyParams) -> Result<Vec<PolarCell>> {
    params.validate()?;
    Ok(candidates.iter().map(|c| polar_cell(c.r, c.phi, params)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RxProxySet {
    pub representatives: Vec<RxCandidate>,
    /// Cell of each representative.
    pub cells: Vec<PolarCell>,
    /// Index of each representative in the candidate list.
    pub source: Vec<usize>,
}

impl RxProxySet {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    /// CSV with columns `id,x,y,z,l,k,m`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("id,x,y,z,l,k,m\n");
        for (rep, cell) in self.representatives.iter().zip(&self.cells) {
            let p = rep.position;
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                rep.cell, p.x, p.y, p.z, cell.band, cell.ring, cell.sector
            ));
        }
        std::fs::File::create(path)
            .and_then(|mut f| f.write_all(out.as_bytes()))
            .map_err(|e| Error::io(path, e))
    }
}

/// Keeps, per non-empty polar cell, the candidate nearest (in the plane) to
/// the cell center; ties go to the smaller candidate index. Output is
/// ordered by `(band, ring, sector)`.
pub fn select_representatives(candidates: &[RxCandidate], assignment: &[PolarCell], tx: Vec3) -> RxProxySet {
    assert_eq!(candidates.len(), assignment.len());
    let mut best: BTreeMap<(usize, usize, usize), (usize, f64)> = BTreeMap::new();
    for (idx, (cand, cell)) in candidates.iter().zip(assignment).enumerate() {
        let dist = (cand.position.xy() - cell.center_xy(tx.xy())).norm();
        best.entry(cell.key())
            .and_modify(|cur| {
                if dist < cur.1 {
                    *cur = (idx, dist);
                }
            })
            .or_insert((idx, dist));
    }
    let source: Vec<usize> = best.values().map(|&(i, _)| i).collect();
    RxProxySet {
        representatives: source.iter().map(|&i| candidates[i]).collect(),
        cells: source.iter().map(|&i| assignment[i]).collect(),
        source,
    }
}

/// Candidates, stratification and representative selection in one call.
pub fn build_rx_proxy_set(terrain: &Terrain, buildings: &[Building], tx: Vec3, params: &RxProxyParams) -> Result<RxProxySet> {
    let candidates = generate_candidates(terrain, buildings, tx, params.h_r);
    let assignment = stratify_polar(&candidates, params)?;
    Ok(select_representatives(&candidates, &assignment, tx))
}
