//! Ellipsoid-guided selective refinement: ranks the buildings of a
//! low-fidelity scene by their relevance to transmitter-receiver
//! propagation and picks the top `W`.
//!
//! For receiver proxy `n` and building `i`, the pair score is
//! `s_{i,n} = χ_{i,n}·ρ_{i,n}` where `ρ` is the building proxy's overlap
//! with the relevance ellipsoid normalized by the ellipsoid volume and `χ`
//! is `η_LoS` for the primary line-of-sight blocker and 1 otherwise. The
//! building score is the mean over all `N` receiver proxies, including
//! receivers for which every pair score is zero.

use std::collections::BTreeSet;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{build_proxy, overlap_volume, primary_los_blocker, BuildingProxy, Ellipsoid};
use crate::rx_proxy::{build_rx_proxy_set, RxProxyParams};
use crate::scene::{RefinementPlan, Scene, TxConfig};
use crate::{rng, Error, Result, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EgsrParams {
    /// Maximum excess path length Δ, meters.
    pub delta: f64,
    /// Boost applied to the primary line-of-sight blocker.
    pub eta_los: f64,
    /// Footprint sampling pitch for overlap volumes, meters.
    pub sampling_interval: f64,
    pub rx: RxProxyParams,
    pub seed: u64,
}

impl Default for EgsrParams {
    fn default() -> Self {
        EgsrParams {
            delta: 50.0,
            eta_los: 2.0,
            sampling_interval: 2.0,
            rx: RxProxyParams::default(),
            seed: 0,
        }
    }
}

impl EgsrParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParameter(format!("delta must be >= 0, got {}", self.delta)));
        }
        if !(self.eta_los > 1.0) {
            return Err(Error::InvalidParameter(format!("eta_los must exceed 1, got {}", self.eta_los)));
        }
        if !(self.sampling_interval > 0.0) {
            return Err(Error::InvalidParameter("sampling_interval must be positive".into()));
        }
        self.rx.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairScore {
    /// LoS weight χ.
    pub chi: f64,
    /// Normalized overlap ρ.
    pub rho: f64,
    pub score: f64,
}

/// Seed of the footprint-sampling stream for one (building, receiver) pair.
pub fn pair_seed(global: u64, building_id: u32, rx_index: usize) -> u64 {
    rng::mix_seed(&[global, building_id as u64, rx_index as u64])
}

/// Score of one building against an already constructed ellipsoid.
pub fn score_pair(
    proxy: &BuildingProxy,
    ellipsoid: &Ellipsoid,
    primary_blocker: Option<u32>,
    params: &EgsrParams,
    rx_index: usize,
) -> PairScore {
    let chi = if primary_blocker == Some(proxy.id) { params.eta_los } else { 1.0 };
    let rho = overlap_volume(
        proxy,
        ellipsoid,
        params.sampling_interval,
        pair_seed(params.seed, proxy.id, rx_index),
    )
    .rho;
    PairScore { chi, rho, score: chi * rho }
}

/// `s_{i,n}` for the pair `(x_t, x_r)`, the `rx_index`-th receiver proxy.
pub fn pair_score(
    proxy: &BuildingProxy,
    x_t: Vec3,
    x_r: Vec3,
    params: &EgsrParams,
    primary_blocker: Option<u32>,
    rx_index: usize,
) -> PairScore {
    score_pair(proxy, &Ellipsoid::new(x_t, x_r, params.delta), primary_blocker, params, rx_index)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    /// Building ids in scene order.
    pub ids: Vec<u32>,
    /// Aggregate score per building, aligned with `ids`.
    pub scores: Vec<f64>,
    /// Number of receiver proxies `N`.
    pub n_rx: usize,
    /// `pairs[n][i] = s_{i,n}` when retained.
    pub pairs: Option<Vec<Vec<f64>>>,
    pub warnings: Vec<String>,
}

impl ScoreTable {
    pub fn score_of(&self, id: u32) -> Option<f64> {
        self.ids.iter().position(|&i| i == id).map(|k| self.scores[k])
    }

    /// `(id, score)` by descending score, ties by ascending id.
    pub fn ranking(&self) -> Vec<(u32, f64)> {
        let mut r: Vec<(u32, f64)> = self.ids.iter().copied().zip(self.scores.iter().copied()).collect();
        r.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        r
    }

    /// `building_id,score,rank,is_selected` rows in rank order (rank 1 is
    /// the highest score).
    pub fn to_csv(&self, selected: &BTreeSet<u32>) -> String {
        let mut out = String::from("building_id,score,rank,is_selected\n");
        for (rank, (id, score)) in self.ranking().into_iter().enumerate() {
            out.push_str(&format!("{id},{score},{},{}\n", rank + 1, selected.contains(&id)));
        }
        out
    }

    /// Per-pair matrix as `rx_index,building_id,score`, nonzero entries only.
    pub fn pairs_to_csv(&self) -> Option<String> {
        let pairs = self.pairs.as_ref()?;
        let mut out = String::from("rx_index,building_id,score\n");
        for (n, row) in pairs.iter().enumerate() {
            for (id, s) in self.ids.iter().zip(row) {
                if *s != 0.0 {
                    out.push_str(&format!("{n},{id},{s}\n"));
                }
            }
        }
        Some(out)
    }

    /// Reads the table written by [`ScoreTable::to_csv`]; `#` lines are
    /// comments. Rows come back in rank order.
    pub fn from_csv(text: &str) -> Result<ScoreTable> {
        let parse_err = |m: String| Error::Parse { what: "score table", message: m };
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut ids = Vec::new();
        let mut scores = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| parse_err(e.to_string()))?;
            let id: u32 = rec.get(0).unwrap_or("").parse().map_err(|e| parse_err(format!("building_id: {e}")))?;
            let s: f64 = rec.get(1).unwrap_or("").parse().map_err(|e| parse_err(format!("score: {e}")))?;
            ids.push(id);
            scores.push(s);
        }
        Ok(ScoreTable { ids, scores, n_rx: 0, pairs: None, warnings: Vec::new() })
    }

    pub fn write_csv(&self, path: &Path, selected: &BTreeSet<u32>) -> Result<()> {
        std::fs::write(path, self.to_csv(selected)).map_err(|e| Error::io(path, e))
    }
}

const RX_CHUNK: usize = 64;

/// Scores every building of `scene` (expected to be the low-fidelity twin)
/// for the transmitter `tx`.
pub fn score_scene(scene: &Scene, tx: &TxConfig, params: &EgsrParams) -> Result<ScoreTable> {
    score_scene_impl(scene, tx, params, false)
}

/// As [`score_scene`], also keeping the full `s_{i,n}` matrix.
pub fn score_scene_with_pairs(scene: &Scene, tx: &TxConfig, params: &EgsrParams) -> Result<ScoreTable> {
    score_scene_impl(scene, tx, params, true)
}

fn score_scene_impl(scene: &Scene, tx: &TxConfig, params: &EgsrParams, retain: bool) -> Result<ScoreTable> {
    params.validate()?;
    let ids: Vec<u32> = scene.buildings.iter().map(|b| b.id).collect();
    let mut warnings = Vec::new();
    let proxies: Vec<Option<BuildingProxy>> = scene
        .buildings
        .iter()
        .map(|b| match build_proxy(b) {
            Ok(p) => Some(p),
            Err(e) => {
                warnings.push(format!("building {} scored 0: {e}", b.id));
                None
            }
        })
        .collect();
    let valid: Vec<BuildingProxy> = proxies.iter().flatten().cloned().collect();

    let rx_set = build_rx_proxy_set(&scene.terrain, &scene.buildings, tx.position, &params.rx)?;
    if rx_set.is_empty() {
        return Err(Error::NoRxProxies);
    }
    let n_rx = rx_set.len();
    let x_t = tx.position;

    let row_for = |n: usize| -> Vec<f64> {
        let x_r = rx_set.representatives[n].position;
        let e = Ellipsoid::new(x_t, x_r, params.delta);
        let blocker = primary_los_blocker(&x_t, &x_r, &valid);
        proxies
            .iter()
            .map(|p| p.as_ref().map_or(0.0, |p| score_pair(p, &e, blocker, params, n).score))
            .collect()
    };

    // Fixed chunk boundaries and a sequential final reduction keep the sums
    // identical for any thread count.
    let chunks: Vec<(Vec<f64>, Vec<Vec<f64>>)> = (0..n_rx)
        .collect::<Vec<_>>()
        .par_chunks(RX_CHUNK)
        .map(|chunk| {
            let mut partial = vec![0.0; ids.len()];
            let mut rows = Vec::new();
            for &n in chunk {
                let row = row_for(n);
                for (acc, s) in partial.iter_mut().zip(&row) {
                    *acc += s;
                }
                if retain {
                    rows.push(row);
                }
            }
            (partial, rows)
        })
        .collect();

    let mut scores = vec![0.0; ids.len()];
    let mut pairs = retain.then(Vec::new);
    for (partial, rows) in chunks {
        for (acc, s) in scores.iter_mut().zip(&partial) {
            *acc += s;
        }
        if let Some(p) = pairs.as_mut() {
            p.extend(rows);
        }
    }
    for s in scores.iter_mut() {
        *s /= n_rx as f64;
    }
    Ok(ScoreTable { ids, scores, n_rx, pairs, warnings })
}

/// The `w` highest-scoring buildings, ties broken by smaller id.
pub fn select_top_w(table: &ScoreTable, w: usize) -> RefinementPlan {
    RefinementPlan {
        budget: w,
        selected: table.ranking().into_iter().take(w).map(|(id, _)| id).collect(),
    }
}
