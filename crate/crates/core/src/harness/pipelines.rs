use std::path::Path;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use super::baselines::{baseline_select_random, baseline_select_volume};
use super::config::{Deployment, ExperimentConfig, Method};
use crate::egsr::{score_scene, select_top_w, EgsrParams, ScoreTable};
use crate::geometry::Ellipsoid;
use crate::metrics::{
    ablation_against, ablation_receivers, bf_ccdf, bf_gains, default_gamma_grid, gini, impact_range,
    impact_strength, rmse_all, rmse_cov, ssbf_loss, AblationReport, AblationRow, BfEvaluation,
};
use crate::raytrace::{RadioMap, RayConfig, Tracer};
use crate::rng::{self, domain};
use crate::rx_proxy::build_rx_proxy_set;
use crate::scene::{
    apply_refinement, degrade_scene, generate_synthetic_city, load_scene, Provenance, RefinementPlan, Scene,
    TxConfig,
};
use crate::{Error, Result, Vec3};

/// A CSV table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// CSV text, preceded by a `#` provenance line when given.
    pub fn to_csv(&self, provenance: Option<&Provenance>) -> String {
        let mut out = String::new();
        if let Some(p) = provenance {
            out.push_str(&format!("# {}\n", p.line()));
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path, provenance: Option<&Provenance>) -> Result<()> {
        std::fs::write(path, self.to_csv(provenance)).map_err(|e| Error::io(path, e))
    }
}

/// A reference scene and its degraded twin.
#[derive(Debug, Clone)]
pub struct ScenePair {
    pub seed: u64,
    pub hi: Scene,
    pub low: Scene,
    pub warnings: Vec<String>,
}

/// Resolved experiment: scenes are built once, reference radio maps are
/// traced on first use and shared by every pipeline.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub hash: String,
    pub scenes: Vec<ScenePair>,
    hifi: Vec<OnceLock<Arc<RadioMap>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub rmse_all: f64,
    pub rmse_cov: f64,
    /// MRT gains over the reference coverage region.
    pub bf_gains: Option<Vec<f64>>,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Experiment> {
        config.validate()?;
        let loaded = match &config.scene.file {
            Some(path) => Some(load_scene(path)?),
            None => None,
        };
        let scenes = config
            .seeds
            .iter()
            .map(|&seed| {
                let hi = match &loaded {
                    Some(s) => s.clone(),
                    None => generate_synthetic_city(seed, config.scene.n_buildings, config.scene.extent, &config.scene.city)?,
                };
                let degraded = degrade_scene(&hi, &config.degrade, seed)?;
                Ok(ScenePair { seed, hi, low: degraded.scene, warnings: degraded.warnings })
            })
            .collect::<Result<Vec<_>>>()?;
        let slots = scenes.len() * config.deployments.len();
        Ok(Experiment {
            hash: config.hash(),
            hifi: (0..slots).map(|_| OnceLock::new()).collect(),
            config,
            scenes,
        })
    }

    pub fn provenance(&self) -> Provenance {
        Provenance { config_hash: self.hash.clone(), seeds: self.config.seeds.clone() }
    }

    pub fn scenario(&self, s: usize) -> String {
        format!("s{}", self.scenes[s].seed)
    }

    pub fn tx_label(d: usize) -> String {
        format!("tx{}", d + 1)
    }

    pub fn ray(&self) -> RayConfig {
        self.config.radio.ray()
    }

    /// Transmitter of deployment `d` in scene `s`.
    pub fn tx(&self, s: usize, d: usize) -> Result<TxConfig> {
        let hi = &self.scenes[s].hi;
        let position = match self.config.deployments[d] {
            Deployment::Scene(_) => hi.tx.position,
            Deployment::Position(p) => Vec3::new(p[0], p[1], p[2]),
        };
        let probe = Tracer::new(hi, &hi.tx, &RayConfig::with_depth(0));
        if probe.inside_building(position.xy()) {
            return Err(Error::InvalidParameter(format!(
                "deployment {} of scenario {} lies inside a building",
                d + 1,
                self.scenario(s)
            )));
        }
        Ok(self.config.radio.tx_at(position))
    }

    pub fn radio_map(&self, scene: &Scene, tx: &TxConfig) -> RadioMap {
        Tracer::new(scene, tx, &self.ray()).radio_map(scene, self.config.radio.rx_height)
    }

    /// Reference map of scene `s` under deployment `d`, traced once.
    pub fn hifi_map(&self, s: usize, d: usize) -> Result<Arc<RadioMap>> {
        let slot = &self.hifi[s * self.config.deployments.len() + d];
        if let Some(m) = slot.get() {
            return Ok(m.clone());
        }
        let tx = self.tx(s, d)?;
        Ok(slot.get_or_init(|| Arc::new(self.radio_map(&self.scenes[s].hi, &tx))).clone())
    }

    pub fn egsr_params(&self, s: usize, delta: f64) -> EgsrParams {
        EgsrParams {
            delta,
            seed: rng::mix_seed(&[self.config.egsr.seed, self.scenes[s].seed]),
            ..self.config.egsr.clone()
        }
    }

    pub fn scores(&self, s: usize, d: usize, delta: f64) -> Result<ScoreTable> {
        let tx = self.tx(s, d)?;
        score_scene(&self.scenes[s].low, &tx, &self.egsr_params(s, delta))
    }

    fn random_seed(&self, s: usize, w: usize, repeat: usize) -> u64 {
        rng::mix_seed(&[domain::RANDOM_BASELINE, self.scenes[s].seed, w as u64, repeat as u64])
    }

    /// Refines the degraded twin of scene `s` with `plan` and compares it
    /// against the reference.
    pub fn evaluate(&self, s: usize, d: usize, plan: &RefinementPlan, beamforming: bool) -> Result<Evaluation> {
        let pair = &self.scenes[s];
        let tx = self.tx(s, d)?;
        let star = self.hifi_map(s, d)?;
        let refined = apply_refinement(&pair.low, &pair.hi, plan)?;
        let hat = self.radio_map(&refined, &tx);
        let p_th = self.config.radio.coverage_threshold_db;
        let bf = if beamforming {
            Some(bf_gains(&refined, &pair.hi, &star, &tx, self.config.radio.rx_height, &self.ray(), p_th)?)
        } else {
            None
        };
        Ok(Evaluation { rmse_all: rmse_all(&hat, &star)?, rmse_cov: rmse_cov(&hat, &star, p_th)?, bf_gains: bf })
    }

    fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.scenes.len()).flat_map(|s| (0..self.config.deployments.len()).map(move |d| (s, d))).collect()
    }

    /// Building-removal study on every reference scene and deployment.
    pub fn run_ablation(&self) -> Result<AblationResults> {
        let cfg = &self.config;
        let ray = self.ray();
        let entries = self
            .pairs()
            .into_iter()
            .map(|(s, d)| {
                let hi = &self.scenes[s].hi;
                let tx = self.tx(s, d)?;
                let base = self.hifi_map(s, d)?;
                let cells = ablation_receivers(hi, &base, cfg.ablation.receivers, cfg.radio.coverage_threshold_db);
                let rows = hi
                    .buildings
                    .par_iter()
                    .map(|b| {
                        let dev = ablation_against(hi, &base, &cells, &tx, b.id, cfg.radio.rx_height, &ray)?;
                        Ok(AblationRow {
                            building_id: b.id,
                            strength_db: impact_strength(&dev),
                            range: impact_range(&dev, cfg.ablation.tau_db),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(AblationEntry {
                    scenario: self.scenario(s),
                    tx: Self::tx_label(d),
                    receivers: cells.len(),
                    report: AblationReport { tau_db: cfg.ablation.tau_db, rows },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AblationResults { entries })
    }

    /// Every configured method at every budget against the reference maps.
    pub fn run_refinement_comparison(&self) -> Result<ComparisonResults> {
        let cfg = &self.config;
        let pairs = self.pairs();
        let needs_scores = cfg.methods.contains(&Method::Egsr);
        let scores: Vec<Option<ScoreTable>> = pairs
            .par_iter()
            .map(|&(s, d)| needs_scores.then(|| self.scores(s, d, cfg.egsr.delta)).transpose())
            .collect::<Result<_>>()?;
        let uniform: Vec<Option<Evaluation>> = pairs
            .par_iter()
            .map(|&(s, d)| {
                if cfg.methods.contains(&Method::Uniform) {
                    self.evaluate(s, d, &RefinementPlan::all(&self.scenes[s].low), cfg.beamforming).map(Some)
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<_>>()?;

        let mut jobs = Vec::new();
        for (p, &(s, d)) in pairs.iter().enumerate() {
            for &method in &cfg.methods {
                for &w in &cfg.budgets {
                    jobs.push((p, s, d, method, w));
                }
            }
        }
        let gamma = default_gamma_grid();
        let rows = jobs
            .par_iter()
            .map(|&(p, s, d, method, w)| {
                let evals = match method {
                    Method::Uniform => vec![uniform[p].clone().expect("uniform evaluated")],
                    Method::Egsr => {
                        let plan = select_top_w(scores[p].as_ref().expect("scores computed"), w);
                        vec![self.evaluate(s, d, &plan, cfg.beamforming)?]
                    }
                    Method::Volume => {
                        vec![self.evaluate(s, d, &baseline_select_volume(&self.scenes[s].low, w), cfg.beamforming)?]
                    }
                    Method::Random => (0..cfg.random_repeats)
                        .map(|r| {
                            let plan = baseline_select_random(&self.scenes[s].low, w, self.random_seed(s, w, r));
                            self.evaluate(s, d, &plan, cfg.beamforming)
                        })
                        .collect::<Result<Vec<_>>>()?,
                };
                Ok(ComparisonRow::summarize(self.scenario(s), Self::tx_label(d), method, w, &evals, &gamma))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ComparisonResults { gamma, rows })
    }

    /// Re-scores and re-evaluates EGSR for every Δ at a fixed budget.
    pub fn run_delta_sweep(&self) -> Result<DeltaSweepResults> {
        let cfg = &self.config;
        let mut jobs = Vec::new();
        for (s, d) in self.pairs() {
            for &delta in &cfg.delta_sweep.deltas {
                jobs.push((s, d, delta));
            }
        }
        let rows = jobs
            .par_iter()
            .map(|&(s, d, delta)| {
                let table = self.scores(s, d, delta)?;
                let plan = select_top_w(&table, cfg.delta_sweep.budget);
                let eval = self.evaluate(s, d, &plan, false)?;
                let tx = self.tx(s, d)?;
                let low = &self.scenes[s].low;
                let rx = build_rx_proxy_set(&low.terrain, &low.buildings, tx.position, &cfg.egsr.rx)?;
                let volumes: Vec<f64> = rx
                    .representatives
                    .iter()
                    .map(|c| Ellipsoid::new(tx.position, c.position, delta).volume())
                    .collect();
                Ok(DeltaRow {
                    scenario: self.scenario(s),
                    tx: Self::tx_label(d),
                    delta,
                    rmse_cov: eval.rmse_cov,
                    rmse_all: eval.rmse_all,
                    mean_ellipsoid_volume: crate::metrics::pairwise_sum(&volumes) / volumes.len().max(1) as f64,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DeltaSweepResults { rows })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationEntry {
    pub scenario: String,
    pub tx: String,
    /// Size of the receiver set.
    pub receivers: usize,
    pub report: AblationReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationResults {
    pub entries: Vec<AblationEntry>,
}

impl AblationResults {
    /// Rows ordered by the first deployment's impact strength within each
    /// scenario; later deployments reuse that order.
    pub fn profile_table(&self) -> Table {
        let tau = self.entries.first().map_or(1.0, |e| e.report.tau_db);
        let range_col = format!("A_{tau}db");
        let mut t = Table::new(&["scenario", "tx", "rank", "building_id", "S_pg_db", &range_col]);
        let mut order: Option<(String, Vec<u32>)> = None;
        for e in &self.entries {
            if order.as_ref().is_none_or(|(sc, _)| sc != &e.scenario) {
                order = Some((e.scenario.clone(), e.report.ordering()));
            }
            let (_, ids) = order.as_ref().expect("set above");
            for (rank, id) in ids.iter().enumerate() {
                let row = e.report.rows.iter().find(|r| r.building_id == *id).expect("same building set");
                t.push(vec![
                    e.scenario.clone(),
                    e.tx.clone(),
                    (rank + 1).to_string(),
                    id.to_string(),
                    row.strength_db.to_string(),
                    row.range.to_string(),
                ]);
            }
        }
        t
    }

    pub fn summary_table(&self) -> Table {
        let mut t =
            Table::new(&["scenario", "tx", "buildings", "receivers", "gini_strength", "gini_range", "max_strength_db"]);
        for e in &self.entries {
            let ranges: Vec<f64> = e.report.rows.iter().map(|r| r.range).collect();
            let max = e.report.strengths().into_iter().fold(0.0, f64::max);
            t.push(vec![
                e.scenario.clone(),
                e.tx.clone(),
                e.report.rows.len().to_string(),
                e.receivers.to_string(),
                e.report.gini().to_string(),
                gini(&ranges).to_string(),
                max.to_string(),
            ]);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub scenario: String,
    pub tx: String,
    pub method: Method,
    pub budget: usize,
    /// Means over repeats (one repeat for deterministic methods).
    pub rmse_all: f64,
    pub rmse_cov: f64,
    pub rmse_all_std: f64,
    pub rmse_cov_std: f64,
    pub repeats: usize,
    pub ssbf_loss: Option<f64>,
    pub ccdf: Option<Vec<f64>>,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl ComparisonRow {
    fn summarize(scenario: String, tx: String, method: Method, budget: usize, evals: &[Evaluation], gamma: &[f64]) -> Self {
        let (rmse_all, rmse_all_std) = mean_std(&evals.iter().map(|e| e.rmse_all).collect::<Vec<_>>());
        let (rmse_cov, rmse_cov_std) = mean_std(&evals.iter().map(|e| e.rmse_cov).collect::<Vec<_>>());
        let bf: Option<Vec<BfEvaluation>> =
            evals.iter().map(|e| e.bf_gains.as_ref().map(|g| bf_ccdf(g, gamma))).collect();
        let (ssbf, ccdf) = match bf {
            Some(list) => {
                let losses: Vec<f64> = list.iter().map(|b| ssbf_loss(&b.gains)).collect();
                let ccdf = (0..gamma.len())
                    .map(|k| list.iter().map(|b| b.ccdf[k]).sum::<f64>() / list.len() as f64)
                    .collect();
                (Some(mean_std(&losses).0), Some(ccdf))
            }
            None => (None, None),
        };
        ComparisonRow {
            scenario,
            tx,
            method,
            budget,
            rmse_all,
            rmse_cov,
            rmse_all_std,
            rmse_cov_std,
            repeats: evals.len(),
            ssbf_loss: ssbf,
            ccdf,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonResults {
    pub gamma: Vec<f64>,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonResults {
    pub fn row(&self, scenario: &str, tx: &str, method: Method, budget: usize) -> Option<&ComparisonRow> {
        self.rows
            .iter()
            .find(|r| r.scenario == scenario && r.tx == tx && r.method == method && r.budget == budget)
    }

    pub fn rmse_table(&self) -> Table {
        let mut t = Table::new(&[
            "scenario",
            "tx",
            "method",
            "W",
            "rmse_all",
            "rmse_cov",
            "rmse_all_std",
            "rmse_cov_std",
            "ssbf_loss",
            "repeats",
        ]);
        for r in &self.rows {
            t.push(vec![
                r.scenario.clone(),
                r.tx.clone(),
                r.method.name().to_string(),
                r.budget.to_string(),
                r.rmse_all.to_string(),
                r.rmse_cov.to_string(),
                r.rmse_all_std.to_string(),
                r.rmse_cov_std.to_string(),
                r.ssbf_loss.map_or(String::new(), |v| v.to_string()),
                r.repeats.to_string(),
            ]);
        }
        t
    }

    pub fn ccdf_table(&self) -> Table {
        let mut t = Table::new(&["scenario", "tx", "method", "W", "gamma", "ccdf"]);
        for r in &self.rows {
            if let Some(ccdf) = &r.ccdf {
                for (g, c) in self.gamma.iter().zip(ccdf) {
                    t.push(vec![
                        r.scenario.clone(),
                        r.tx.clone(),
                        r.method.name().to_string(),
                        r.budget.to_string(),
                        g.to_string(),
                        c.to_string(),
                    ]);
                }
            }
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaRow {
    pub scenario: String,
    pub tx: String,
    pub delta: f64,
    pub rmse_cov: f64,
    pub rmse_all: f64,
    /// Mean relevance-ellipsoid volume over the receiver proxies.
    pub mean_ellipsoid_volume: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSweepResults {
    pub rows: Vec<DeltaRow>,
}

impl DeltaSweepResults {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["scenario", "tx", "delta", "rmse_cov", "rmse_all", "mean_ellipsoid_volume"]);
        for r in &self.rows {
            t.push(vec![
                r.scenario.clone(),
                r.tx.clone(),
                r.delta.to_string(),
                r.rmse_cov.to_string(),
                r.rmse_all.to_string(),
                r.mean_ellipsoid_volume.to_string(),
            ]);
        }
        t
    }
}

pub fn run_ablation_experiment(config: &ExperimentConfig) -> Result<AblationResults> {
    Experiment::new(config.clone())?.run_ablation()
}

pub fn run_refinement_comparison(config: &ExperimentConfig) -> Result<ComparisonResults> {
    Experiment::new(config.clone())?.run_refinement_comparison()
}

pub fn run_delta_sweep(config: &ExperimentConfig) -> Result<DeltaSweepResults> {
    Experiment::new(config.clone())?.run_delta_sweep()
}

/// MRT beamforming of the `hat` scene scored on the `star` scene over the
/// latter's coverage region.
pub fn bf_evaluate(hat: &Scene, star: &Scene, tx: &TxConfig, config: &ExperimentConfig) -> Result<BfEvaluation> {
    let ray = config.radio.ray();
    let star_map = Tracer::new(star, tx, &ray).radio_map(star, config.radio.rx_height);
    let gains = bf_gains(hat, star, &star_map, tx, config.radio.rx_height, &ray, config.radio.coverage_threshold_db)?;
    Ok(bf_ccdf(&gains, &default_gamma_grid()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::DeltaSweep;

    fn small_config() -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        c.seeds = vec![4];
        c.scene.n_buildings = 8;
        c.scene.extent = 160.0;
        c.radio.max_depth = 1;
        c.budgets = vec![0, 3, 8];
        c.random_repeats = 3;
        c.delta_sweep = DeltaSweep { deltas: vec![10.0, 50.0], budget: 3 };
        c
    }

    #[test]
    fn refining_everything_reproduces_the_reference() {
        let exp = Experiment::new(small_config()).unwrap();
        let results = exp.run_refinement_comparison().unwrap();
        for method in [Method::Egsr, Method::Random, Method::Volume, Method::Uniform] {
            let full = results.row("s4", "tx1", method, 8).unwrap();
            assert_eq!(full.rmse_all, 0.0, "{method:?}");
            assert_eq!(full.rmse_cov, 0.0);
            assert!(full.ssbf_loss.unwrap().abs() < 1e-9);
        }
        let none: Vec<f64> = [Method::Egsr, Method::Random, Method::Volume]
            .iter()
            .map(|&m| results.row("s4", "tx1", m, 0).unwrap().rmse_all)
            .collect();
        assert!(none[0] > 0.0);
        assert!(none.iter().all(|&v| v == none[0]));
        assert_eq!(results.row("s4", "tx1", Method::Random, 3).unwrap().repeats, 3);
    }

    #[test]
    fn tables_carry_provenance_and_one_row_per_job() {
        let exp = Experiment::new(small_config()).unwrap();
        let results = exp.run_refinement_comparison().unwrap();
        let csv = results.rmse_table().to_csv(Some(&exp.provenance()));
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), format!("# config_hash={} seed=4", exp.hash));
        assert!(lines.next().unwrap().starts_with("scenario,tx,method,W,rmse_all"));
        assert_eq!(lines.count(), 4 * 3);
        assert_eq!(results.ccdf_table().rows.len(), 4 * 3 * results.gamma.len());
    }

    #[test]
    fn ablation_and_sweep_shapes() {
        let exp = Experiment::new(small_config()).unwrap();
        let ab = exp.run_ablation().unwrap();
        assert_eq!(ab.entries.len(), 1);
        assert_eq!(ab.entries[0].report.rows.len(), 8);
        assert_eq!(ab.profile_table().rows.len(), 8);
        assert_eq!(ab.summary_table().rows.len(), 1);

        let sweep = exp.run_delta_sweep().unwrap();
        assert_eq!(sweep.rows.len(), 2);
        assert!(sweep.rows[1].mean_ellipsoid_volume > sweep.rows[0].mean_ellipsoid_volume);
    }

    #[test]
    fn deployment_inside_a_building_is_rejected() {
        let mut c = small_config();
        let exp = Experiment::new(c.clone()).unwrap();
        let fp = &exp.scenes[0].hi.buildings[0].footprint;
        let inside = fp.iter().fold(crate::Vec2::zeros(), |a, p| a + p) / fp.len() as f64;
        c.deployments = vec![Deployment::Position([inside.x, inside.y, 20.0])];
        let exp = Experiment::new(c).unwrap();
        assert!(matches!(exp.tx(0, 0), Err(Error::InvalidParameter(_))));
    }
}
