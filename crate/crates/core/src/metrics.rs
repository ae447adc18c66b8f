//! Fidelity measures: building-removal impact, radio-map errors, task
//! losses and beamforming-gain statistics.
//!
//! Uncovered cells ([`NO_COVERAGE`]) are clamped to [`CLAMP_FLOOR_DB`]
//! before any dB arithmetic so every error stays finite. Sums over cells
//! use pairwise summation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::raytrace::{RadioMap, RayConfig, Tracer, NO_COVERAGE};
use crate::scene::{Scene, TxConfig};
use crate::{Error, Result, Vec3};

pub const CLAMP_FLOOR_DB: f64 = -200.0;
pub const COVERAGE_THRESHOLD_DB: f64 = -80.0;
/// Default impact-range threshold τ.
pub const DEFAULT_TAU_DB: f64 = 1.0;

pub fn clamp_db(v: f64) -> f64 {
    if v == NO_COVERAGE || v < CLAMP_FLOOR_DB {
        CLAMP_FLOOR_DB
    } else {
        v
    }
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        xs.iter().sum()
    } else {
        let (a, b) = xs.split_at(xs.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

fn check_grid(a: &RadioMap, b: &RadioMap) -> Result<()> {
    if a.same_grid(b) && a.values.len() == b.values.len() {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!("{}x{} map vs {}x{} map", a.nx, a.ny, b.nx, b.ny)))
    }
}

/// Terrain cells outside every building footprint, i.e. the receivers of
/// the scene.
pub fn receiver_cells(scene: &Scene) -> Vec<usize> {
    let probe = Tracer::new(scene, &scene.tx, &RayConfig::with_depth(0));
    (0..scene.terrain.n_cells())
        .filter(|&k| !probe.inside_building(scene.terrain.cell_center_at(k)))
        .collect()
}

/// Per-cell absolute path-gain deviation over a receiver set.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationMap {
    /// Terrain cell indices.
    pub cells: Vec<usize>,
    /// Deviation in dB, aligned with `cells`.
    pub values: Vec<f64>,
}

/// `|clamp(a) − clamp(b)|` at the given cells.
pub fn deviation_map(a: &RadioMap, b: &RadioMap, cells: &[usize]) -> Result<DeviationMap> {
    check_grid(a, b)?;
    let values = cells.iter().map(|&k| (clamp_db(a.values[k]) - clamp_db(b.values[k])).abs()).collect();
    Ok(DeviationMap { cells: cells.to_vec(), values })
}

/// Fixed receiver set over which building-removal deviations are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AblationReceivers {
    /// Cells whose reference gain exceeds the coverage threshold.
    Coverage,
    /// Cells reached by at least one path in the reference map.
    Reached,
    /// Every cell outside the building footprints.
    Outdoor,
}

pub fn ablation_receivers(scene_hi: &Scene, base: &RadioMap, which: AblationReceivers, p_th: f64) -> Vec<usize> {
    match which {
        AblationReceivers::Coverage => coverage_set(base, p_th),
        AblationReceivers::Reached => (0..base.values.len()).filter(|&k| base.values[k].is_finite()).collect(),
        AblationReceivers::Outdoor => receiver_cells(scene_hi),
    }
}

/// Deviation caused by removing `building_id` from `scene_hi`, over the
/// coverage region of the full scene's map.
pub fn ablation_deviation_map(
    scene_hi: &Scene,
    tx: &TxConfig,
    building_id: u32,
    h_r: f64,
    max_depth: usize,
) -> Result<DeviationMap> {
    let config = RayConfig::with_depth(max_depth);
    let base = Tracer::new(scene_hi, tx, &config).radio_map(scene_hi, h_r);
    let cells = coverage_set(&base, COVERAGE_THRESHOLD_DB);
    ablation_against(scene_hi, &base, &cells, tx, building_id, h_r, &config)
}

/// Deviation at `cells` between a precomputed map of `scene_hi` and the
/// map with `building_id` removed.
pub fn ablation_against(
    scene_hi: &Scene,
    base: &RadioMap,
    cells: &[usize],
    tx: &TxConfig,
    building_id: u32,
    h_r: f64,
    config: &RayConfig,
) -> Result<DeviationMap> {
    let ablated_scene = scene_hi.without_building(building_id)?;
    let ablated = Tracer::new(&ablated_scene, tx, config).radio_map(&ablated_scene, h_r);
    deviation_map(base, &ablated, cells)
}

/// Largest deviation, 0 for an empty map.
pub fn impact_strength(dev: &DeviationMap) -> f64 {
    dev.values.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max)
}

/// Fraction of receivers with deviation of at least `tau`.
pub fn impact_range(dev: &DeviationMap, tau: f64) -> f64 {
    if dev.values.is_empty() {
        return 0.0;
    }
    dev.values.iter().filter(|&&v| v >= tau).count() as f64 / dev.values.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub building_id: u32,
    pub strength_db: f64,
    pub range: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationReport {
    pub tau_db: f64,
    /// In scene order.
    pub rows: Vec<AblationRow>,
}

impl AblationReport {
    pub fn strengths(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.strength_db).collect()
    }

    /// Building ids by descending strength, ties by id.
    pub fn ordering(&self) -> Vec<u32> {
        let mut rows: Vec<&AblationRow> = self.rows.iter().collect();
        rows.sort_by(|a, b| b.strength_db.total_cmp(&a.strength_db).then(a.building_id.cmp(&b.building_id)));
        rows.into_iter().map(|r| r.building_id).collect()
    }

    pub fn gini(&self) -> f64 {
        gini(&self.strengths())
    }
}

/// Gini coefficient of non-negative values; 0 when all are zero.
pub fn gini(values: &[f64]) -> f64 {
    let n = values.len();
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let total = pairwise_sum(&v);
    if n == 0 || total <= 0.0 {
        return 0.0;
    }
    let weighted: Vec<f64> = v.iter().enumerate().map(|(i, x)| (i + 1) as f64 * x).collect();
    2.0 * pairwise_sum(&weighted) / (n as f64 * total) - (n as f64 + 1.0) / n as f64
}

fn rmse_over(hat: &RadioMap, star: &RadioMap, cells: impl Iterator<Item = usize>) -> f64 {
    let sq: Vec<f64> = cells.map(|k| (clamp_db(hat.values[k]) - clamp_db(star.values[k])).powi(2)).collect();
    if sq.is_empty() {
        return 0.0;
    }
    (pairwise_sum(&sq) / sq.len() as f64).sqrt()
}

pub fn rmse_all(hat: &RadioMap, star: &RadioMap) -> Result<f64> {
    check_grid(hat, star)?;
    Ok(rmse_over(hat, star, 0..star.values.len()))
}

/// Cells whose reference gain exceeds `p_th`.
pub fn coverage_set(star: &RadioMap, p_th: f64) -> Vec<usize> {
    (0..star.values.len()).filter(|&k| star.values[k] > p_th).collect()
}

pub fn rmse_cov(hat: &RadioMap, star: &RadioMap, p_th: f64) -> Result<f64> {
    check_grid(hat, star)?;
    let cov = coverage_set(star, p_th);
    if cov.is_empty() {
        return Err(Error::EmptyCoverage { threshold_db: p_th });
    }
    Ok(rmse_over(hat, star, cov.into_iter()))
}

/// Mean absolute path-gain deviation over all cells.
pub fn rm_mae_loss(hat: &RadioMap, star: &RadioMap) -> Result<f64> {
    check_grid(hat, star)?;
    if star.values.is_empty() {
        return Ok(0.0);
    }
    let abs: Vec<f64> = (0..star.values.len())
        .map(|k| (clamp_db(hat.values[k]) - clamp_db(star.values[k])).abs())
        .collect();
    Ok(pairwise_sum(&abs) / abs.len() as f64)
}

fn norm2(h: &[Complex64]) -> f64 {
    h.iter().map(|x| x.norm_sqr()).sum()
}

/// MRT beamformer `h/‖h‖`.
pub fn mrt_beamformer(h: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = norm2(h).sqrt();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroChannel);
    }
    Ok(h.iter().map(|x| x / n).collect())
}

/// `|wᴴh*|²/‖h*‖²` for a unit-norm `w`.
pub fn normalized_bf_gain(w: &[Complex64], h_star: &[Complex64]) -> Result<f64> {
    if w.len() != h_star.len() {
        return Err(Error::ShapeMismatch(format!("beamformer of {} vs channel of {}", w.len(), h_star.len())));
    }
    let energy = norm2(h_star);
    if energy == 0.0 {
        return Err(Error::ZeroChannel);
    }
    let inner: Complex64 = w.iter().zip(h_star).map(|(a, b)| a.conj() * b).sum();
    let g = inner.norm_sqr() / energy;
    assert!((-1e-12..=1.0 + 1e-12).contains(&g), "beamforming gain {g} outside [0, 1]");
    Ok(g.clamp(0.0, 1.0))
}

/// Mean of `1 − G`.
pub fn ssbf_loss(gains: &[f64]) -> f64 {
    if gains.is_empty() {
        return 0.0;
    }
    let loss: Vec<f64> = gains.iter().map(|g| 1.0 - g).collect();
    pairwise_sum(&loss) / gains.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct BfEvaluation {
    pub gains: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Fraction of gains `≥ γ`, aligned with `gamma`.
    pub ccdf: Vec<f64>,
}

impl BfEvaluation {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gamma,ccdf\n");
        for (g, c) in self.gamma.iter().zip(&self.ccdf) {
            out.push_str(&format!("{g},{c}\n"));
        }
        out
    }
}

/// `0, 0.01, …, 1`.
pub fn default_gamma_grid() -> Vec<f64> {
    (0..=100).map(|k| k as f64 / 100.0).collect()
}

pub fn bf_ccdf(gains: &[f64], gamma_grid: &[f64]) -> BfEvaluation {
    let mut sorted = gains.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let ccdf = gamma_grid
        .iter()
        .map(|&g| {
            if n == 0 {
                0.0
            } else {
                (n - sorted.partition_point(|&x| x < g)) as f64 / n as f64
            }
        })
        .collect();
    BfEvaluation { gains: gains.to_vec(), gamma: gamma_grid.to_vec(), ccdf }
}

/// MRT gains at the covered cells of `star_map`: the beamformer comes from
/// the `hat` scene's channel and is scored on the `star` scene's channel.
/// Cells where the estimated channel is zero score 0.
pub fn bf_gains(
    hat_scene: &Scene,
    star_scene: &Scene,
    star_map: &RadioMap,
    tx: &TxConfig,
    h_r: f64,
    config: &RayConfig,
    p_th: f64,
) -> Result<Vec<f64>> {
    use rayon::prelude::*;
    let hat = Tracer::new(hat_scene, tx, config);
    let star = Tracer::new(star_scene, tx, config);
    let terrain = &star_scene.terrain;
    coverage_set(star_map, p_th)
        .into_par_iter()
        .map(|k| {
            let c = terrain.cell_center_at(k);
            let x_r = Vec3::new(c.x, c.y, terrain.elevation_at(k) + h_r);
            let h_star = star.channel(&x_r);
            match mrt_beamformer(&hat.channel(&x_r)) {
                Ok(w) => normalized_bf_gain(&w, &h_star),
                Err(Error::ZeroChannel) => Ok(0.0),
                Err(e) => Err(e),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::tests::rect;
    use crate::scene::Terrain;
    use crate::Vec2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn map(nx: usize, ny: usize, values: Vec<f64>) -> RadioMap {
        RadioMap { nx, ny, origin: Vec2::zeros(), cell_size: 5.0, values }
    }

    fn random_map(rng: &mut ChaCha8Rng, n: usize) -> RadioMap {
        map(n, n, (0..n * n).map(|_| rng.random_range(-140.0..-40.0)).collect())
    }

    fn dev(values: Vec<f64>) -> DeviationMap {
        DeviationMap { cells: (0..values.len()).collect(), values }
    }

    #[test]
    fn defaults() {
        assert_eq!(COVERAGE_THRESHOLD_DB, -80.0);
        assert_eq!(DEFAULT_TAU_DB, 1.0);
        assert_eq!(clamp_db(NO_COVERAGE), -200.0);
        assert_eq!(clamp_db(-90.0), -90.0);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_integers() {
        let xs: Vec<f64> = (0..1000).map(|k| k as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499_500.0);
    }

    #[test]
    fn strength_and_range() {
        assert_eq!(impact_strength(&dev(vec![0.0; 100])), 0.0);
        assert_eq!(impact_range(&dev(vec![0.0; 100]), 1.0), 0.0);
        let mut v = vec![0.0; 100];
        v[37] = 5.0;
        let d = dev(v);
        assert_eq!(impact_strength(&d), 5.0);
        assert_eq!(impact_range(&d, 1.0), 0.01);
    }

    #[test]
    fn strength_and_range_match_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let values: Vec<f64> = (0..200).map(|_| rng.random_range(0.0..10.0)).collect();
            let d = dev(values.clone());
            let mut max = 0.0;
            let mut count = 0;
            for &v in &values {
                if v > max {
                    max = v;
                }
                if v >= 2.5 {
                    count += 1;
                }
            }
            assert_eq!(impact_strength(&d), max);
            assert_eq!(impact_range(&d, 2.5), count as f64 / 200.0);
            // non-increasing in tau
            let mut prev = 1.0;
            for tau in [0.0, 1.0, 2.0, 5.0, 9.0, 11.0] {
                let a = impact_range(&d, tau);
                assert!(a <= prev);
                prev = a;
                if a > 0.0 {
                    assert!(impact_strength(&d) >= tau);
                }
            }
        }
    }

    #[test]
    fn rmse_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_map(&mut rng, 5);
        assert_eq!(rmse_all(&a, &a).unwrap(), 0.0);
        let shifted = map(5, 5, a.values.iter().map(|v| v + 3.0).collect());
        assert!((rmse_all(&shifted, &a).unwrap() - 3.0).abs() < 1e-12);
        assert!((rm_mae_loss(&shifted, &a).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(rm_mae_loss(&a, &a).unwrap(), 0.0);
        let b = random_map(&mut rng, 5);
        let mut sq = 0.0;
        let mut abs = 0.0;
        for k in 0..25 {
            sq += (a.values[k] - b.values[k]).powi(2);
            abs += (a.values[k] - b.values[k]).abs();
        }
        let want = (sq / 25.0).sqrt();
        assert!((rmse_all(&a, &b).unwrap() - want).abs() <= 1e-12 * want);
        assert!((rm_mae_loss(&a, &b).unwrap() - abs / 25.0).abs() <= 1e-12 * abs);
    }

    #[test]
    fn rmse_cov_restricts_to_covered_cells() {
        let star = map(2, 2, vec![-70.0, -90.0, NO_COVERAGE, -60.0]);
        let hat = map(2, 2, vec![-72.0, -50.0, -100.0, NO_COVERAGE]);
        assert_eq!(coverage_set(&star, -80.0), vec![0, 3]);
        let want = ((4.0 + 140.0f64 * 140.0) / 2.0).sqrt();
        assert!((rmse_cov(&hat, &star, -80.0).unwrap() - want).abs() < 1e-12);
        let all = map(2, 2, vec![-70.0, -71.0, -72.0, -60.0]);
        assert_eq!(rmse_cov(&hat, &all, -80.0).unwrap(), rmse_all(&hat, &all).unwrap());
        let dark = map(1, 1, vec![NO_COVERAGE]);
        match rmse_cov(&dark, &dark, -80.0) {
            Err(e @ Error::EmptyCoverage { .. }) => assert!(e.to_string().contains("-80")),
            other => panic!("{other:?}"),
        }
        assert!(rmse_all(&map(1, 1, vec![0.0]), &star).is_err());
    }

    #[test]
    fn mrt_and_gain() {
        let e1 = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert_eq!(mrt_beamformer(&e1).unwrap(), e1);
        assert!(matches!(mrt_beamformer(&[Complex64::new(0.0, 0.0); 3]), Err(Error::ZeroChannel)));
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let h: Vec<Complex64> =
                (0..64).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * 1e-5).collect();
            let w = mrt_beamformer(&h).unwrap();
            let n: f64 = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-12);
            let scale = h.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            for (a, b) in w.iter().zip(&h) {
                assert!((a * scale - b).norm() < 1e-18);
            }
            assert!((normalized_bf_gain(&w, &h).unwrap() - 1.0).abs() < 1e-12);
        }
        let w = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let h = vec![Complex64::new(3.0, 0.0), Complex64::new(3.0, 0.0)];
        assert!((normalized_bf_gain(&w, &h).unwrap() - 0.5).abs() < 1e-15);
        let orth = vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)];
        assert_eq!(normalized_bf_gain(&orth, &[Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap(), 0.0);
    }

    #[test]
    fn ssbf_loss_cases() {
        assert_eq!(ssbf_loss(&[1.0; 10]), 0.0);
        assert_eq!(ssbf_loss(&[0.0; 10]), 1.0);
        let g = [0.1, 0.5, 0.9, 0.75];
        assert!((ssbf_loss(&g) - (0.9 + 0.5 + 0.1 + 0.25) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn ccdf_cases() {
        let grid = default_gamma_grid();
        let ones = bf_ccdf(&[1.0; 5], &grid);
        assert!(ones.ccdf.iter().all(|&c| c == 1.0));
        let two = bf_ccdf(&[0.2, 0.8], &[0.5]);
        assert_eq!(two.ccdf, vec![0.5]);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let gains: Vec<f64> = (0..100).map(|_| rng.random_range(0.0..1.0)).collect();
        let e = bf_ccdf(&gains, &grid);
        for (g, c) in grid.iter().zip(&e.ccdf) {
            let count = gains.iter().filter(|&&x| x >= *g).count();
            assert_eq!(*c, count as f64 / 100.0);
        }
        assert_eq!(e.ccdf[0], 1.0);
        assert!(e.ccdf.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(bf_ccdf(&gains, &[1.5]).ccdf, vec![0.0]);
        assert!(e.to_csv().starts_with("gamma,ccdf\n0,1\n"));
    }

    #[test]
    fn gini_cases() {
        assert_eq!(gini(&[0.0; 5]), 0.0);
        assert!(gini(&[3.0; 8]).abs() < 1e-15);
        // one nonzero among n gives (n-1)/n
        assert!((gini(&[0.0, 0.0, 0.0, 7.0]) - 0.75).abs() < 1e-15);
        // mean absolute difference oracle
        let v = [1.0, 4.0, 2.5, 9.0, 0.0, 3.0];
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let mad: f64 = v.iter().flat_map(|a| v.iter().map(move |b| (a - b).abs())).sum();
        assert!((gini(&v) - mad / (2.0 * n * n * mean)).abs() < 1e-12);
    }

    fn slab_scene() -> Scene {
        Scene {
            buildings: vec![rect(0, 101.0, 61.0, 121.0, 101.0, 30.0), rect(1, 900.0, 900.0, 910.0, 910.0, 5.0)],
            terrain: Terrain::flat(Vec2::zeros(), 5.0, 40, 40),
            tx: crate::scene::TxConfig::at(Vec3::new(41.3, 81.7, 10.0)),
        }
    }

    #[test]
    fn far_building_has_no_impact() {
        let s = slab_scene();
        let d = ablation_deviation_map(&s, &s.tx, 1, 1.5, 2).unwrap();
        assert!(!d.cells.is_empty());
        assert!(d.values.iter().all(|&v| v == 0.0));
        assert_eq!(impact_strength(&d), 0.0);
    }

    #[test]
    fn receiver_sets_are_nested() {
        let s = slab_scene();
        let base = compute(&s, 1);
        let cov = ablation_receivers(&s, &base, AblationReceivers::Coverage, -80.0);
        let reached = ablation_receivers(&s, &base, AblationReceivers::Reached, -80.0);
        let outdoor = ablation_receivers(&s, &base, AblationReceivers::Outdoor, -80.0);
        assert!(cov.len() < reached.len() && reached.len() < outdoor.len());
        assert!(cov.iter().all(|k| reached.contains(k)) && reached.iter().all(|k| outdoor.contains(k)));
    }

    #[test]
    fn removing_the_blocker_restores_line_of_sight() {
        let s = slab_scene();
        let with = compute(&s, 1);
        let cells = ablation_receivers(&s, &with, AblationReceivers::Outdoor, COVERAGE_THRESHOLD_DB);
        let d = ablation_against(&s, &with, &cells, &s.tx, 0, 1.5, &RayConfig::with_depth(1)).unwrap();
        let without = compute(&s.without_building(0).unwrap(), 1);
        for (k, v) in d.cells.iter().zip(&d.values) {
            assert_eq!(*v, (clamp_db(with.values[*k]) - clamp_db(without.values[*k])).abs());
        }
        // a shadowed cell behind the slab
        let k = 16 * 40 + 30;
        let pos = d.cells.iter().position(|&c| c == k).unwrap();
        assert_eq!(with.values[k], NO_COVERAGE);
        assert!((d.values[pos] - (without.values[k] - CLAMP_FLOOR_DB)).abs() < 1e-9);
        // restoring the building gives the original map back
        let restored = compute(&s, 1);
        assert!(deviation_map(&with, &restored, &d.cells).unwrap().values.iter().all(|&v| v == 0.0));
    }

    fn compute(s: &Scene, depth: usize) -> RadioMap {
        crate::raytrace::compute_radio_map(s, &s.tx, 1.5, depth)
    }
}
