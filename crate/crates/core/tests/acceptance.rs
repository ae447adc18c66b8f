//! Acceptance suite. Every criterion prints one `[PASS]` or `[FAIL]` line,
//! even under output capture, and then asserts. Criteria run one at a time
//! so the timed ones are not slowed by their neighbours.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;
use twinforge::egsr::EgsrParams;
use twinforge::geometry::{build_proxy, overlap_volume, vertical_overlap_thickness, Ellipsoid};
use twinforge::harness::{bf_evaluate, Experiment, ExperimentConfig, Method};
use twinforge::metrics::{coverage_set, mrt_beamformer, normalized_bf_gain, rmse_all};
use twinforge::raytrace::{RayConfig, Tracer};
use twinforge::rng::stream;
use twinforge::rx_proxy::RxProxyParams;
use twinforge::scene::{
    apply_refinement, degrade_scene, generate_synthetic_city, Building, CityParams, DegradeParams, Fidelity,
    RefinementPlan, Scene, Terrain, TxConfig,
};
use twinforge::{Vec2, Vec3};

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|p| p.into_inner())
}

/// Written straight to the stdout handle so the line survives output capture.
fn report(id: u32, name: &str, ok: bool, detail: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "[{}] criterion {id}: {name}: {detail}", if ok { "PASS" } else { "FAIL" });
}

fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f)
}

fn random_point(rng: &mut impl Rng, half: f64, z: (f64, f64)) -> Vec3 {
    Vec3::new(rng.random_range(-half..half), rng.random_range(-half..half), rng.random_range(z.0..z.1))
}

fn polyline_length(points: &[Vec3]) -> f64 {
    points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// Focal-sum test against `d + Δ`, written out independently of the library.
fn focal_excess(p: &Vec3, x_t: &Vec3, x_r: &Vec3, delta: f64) -> f64 {
    (p - x_t).norm() + (p - x_r).norm() - ((x_r - x_t).norm() + delta)
}

/// A path with `k` interior vertices and total length close to, but never
/// above, `target`: the vertices are pulled toward the midpoint of the
/// foci by a common factor found by bisection (length is convex in it).
fn bounded_path(rng: &mut impl Rng, x_t: Vec3, x_r: Vec3, k: usize, target: f64) -> Vec<Vec3> {
    if k == 0 {
        return vec![x_t, x_r];
    }
    let c = 0.5 * (x_t + x_r);
    let spread: Vec<Vec3> = (0..k).map(|_| random_point(rng, 150.0, (-60.0, 60.0))).collect();
    let build = |s: f64| {
        let mut pts = vec![x_t];
        pts.extend(spread.iter().map(|o| c + s * o));
        pts.push(x_r);
        pts
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while polyline_length(&build(hi)) < target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if polyline_length(&build(mid)) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    build(lo)
}

#[test]
fn criterion_01_bounded_paths_stay_inside_the_ellipsoid() {
    let _guard = serial();
    let start = Instant::now();
    let mut rng = stream(&[0xACC, 1]);
    let (mut paths, mut points, mut outside) = (0usize, 0usize, 0usize);
    let mut worst = f64::NEG_INFINITY;
    let mut check = |path: &[Vec3], e: &Ellipsoid, points: &mut usize, outside: &mut usize| {
        for p in path {
            *points += 1;
            worst = worst.max(focal_excess(p, &e.focus_t, &e.focus_r, e.delta));
            if !e.contains(p) {
                *outside += 1;
            }
        }
    };

    while paths < 10_000 {
        let x_t = random_point(&mut rng, 200.0, (0.0, 60.0));
        let x_r = random_point(&mut rng, 200.0, (0.0, 60.0));
        let delta = rng.random_range(0.0..=200.0);
        let k = rng.random_range(0..=3usize);
        let fraction = if rng.random_bool(0.2) { 1.0 } else { rng.random::<f64>() };
        let d = (x_r - x_t).norm();
        let path = bounded_path(&mut rng, x_t, x_r, k, d + fraction * delta);
        assert!(polyline_length(&path) <= d + delta);
        check(&path, &Ellipsoid::new(x_t, x_r, delta), &mut points, &mut outside);
        paths += 1;
    }

    // Physical paths from the tracer, each inside the ellipsoid of its own
    // excess length and of any larger one.
    let scene = generate_synthetic_city(11, 40, 300.0, &CityParams::default()).unwrap();
    let tracer = Tracer::new(&scene, &scene.tx, &RayConfig::with_depth(3));
    let mut traced = 0;
    while traced < 2_000 {
        let x_r = Vec3::new(rng.random_range(5.0..295.0), rng.random_range(5.0..295.0), 1.5);
        if tracer.inside_building(x_r.xy()) {
            continue;
        }
        for p in tracer.paths_to(&x_r) {
            let excess = p.length - (x_r - scene.tx.position).norm();
            let delta = excess.max(0.0) + rng.random_range(0.0..(200.0 - excess).max(1e-9));
            if delta > 200.0 {
                continue;
            }
            let mut full = vec![scene.tx.position];
            full.extend(&p.points);
            full.push(x_r);
            check(&full, &Ellipsoid::new(scene.tx.position, x_r, delta), &mut points, &mut outside);
            traced += 1;
        }
    }

    let elapsed = start.elapsed();
    let ok = outside == 0 && elapsed < Duration::from_secs(2);
    report(
        1,
        "bounded-length paths inside the ellipsoid",
        ok,
        &format!(
            "{paths} synthetic + {traced} traced paths, {points} points, {outside} outside, max focal excess {worst:.2e} m, {elapsed:.2?}"
        ),
    );
    assert_eq!(outside, 0);
    assert!(elapsed < Duration::from_secs(2), "took {elapsed:?}");
}

fn random_building(rng: &mut impl Rng, id: u32) -> Building {
    let center = Vec2::new(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0));
    let radius = rng.random_range(5.0..14.0);
    let n = rng.random_range(5..=9);
    let footprint: Vec<Vec2> = (0..n)
        .map(|_| {
            let a = rng.random_range(0.0..2.0 * PI);
            let r = radius * rng.random_range(0.6..1.0);
            center + Vec2::new(r * a.cos(), r * a.sin())
        })
        .collect();
    let hull = twinforge::geometry::convex_hull_2d(&footprint).unwrap();
    Building { id, footprint: hull, base_z: rng.random_range(0.0..3.0), height: rng.random_range(6.0..40.0), fidelity: Fidelity::High }
}

/// Inclusive point-in-convex-polygon for a counter-clockwise ring.
fn in_convex(poly: &[Vec2], p: Vec2) -> bool {
    (0..poly.len()).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let (e, q) = (b - a, p - a);
        e.x * q.y - e.y * q.x >= 0.0
    })
}

/// Brute-force `Vol(prism ∩ ellipsoid)` on a 0.1 m voxel lattice.
fn voxel_overlap(b: &Building, x_t: Vec3, x_r: Vec3, delta: f64) -> f64 {
    const H: f64 = 0.1;
    let (mut lo, mut hi) = (Vec2::repeat(f64::INFINITY), Vec2::repeat(f64::NEG_INFINITY));
    for p in &b.footprint {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let nx = ((hi.x - lo.x) / H).ceil() as usize;
    let ny = ((hi.y - lo.y) / H).ceil() as usize;
    let nz = (b.height / H).ceil() as usize;
    let bound = (x_r - x_t).norm() + delta;
    let mut count = 0usize;
    for i in 0..nx {
        for j in 0..ny {
            let u = lo + Vec2::new((i as f64 + 0.5) * H, (j as f64 + 0.5) * H);
            if !in_convex(&b.footprint, u) {
                continue;
            }
            for k in 0..nz {
                let z = b.base_z + (k as f64 + 0.5) * H;
                if z > b.base_z + b.height {
                    break;
                }
                let p = Vec3::new(u.x, u.y, z);
                if (p - x_t).norm() + (p - x_r).norm() <= bound {
                    count += 1;
                }
            }
        }
    }
    count as f64 * H * H * H
}

#[test]
fn criterion_02_overlap_volume_matches_voxel_oracle() {
    let _guard = serial();
    let start = Instant::now();
    let mut rng = stream(&[0xACC, 2]);
    let interval = EgsrParams::default().sampling_interval;
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    let mut configs = 0;
    while configs < 20 {
        let b = random_building(&mut rng, configs);
        let x_t = Vec3::new(rng.random_range(-150.0..-40.0), rng.random_range(-60.0..60.0), rng.random_range(10.0..40.0));
        let x_r = Vec3::new(rng.random_range(40.0..150.0), rng.random_range(-60.0..60.0), 1.5);
        let delta = rng.random_range(2.0..100.0);
        let truth = voxel_overlap(&b, x_t, x_r, delta);
        if truth < 1.0 {
            continue;
        }
        let proxy = build_proxy(&b).unwrap();
        let est = overlap_volume(&proxy, &Ellipsoid::new(x_t, x_r, delta), interval, configs as u64).volume;
        let rel = (est - truth).abs() / truth;
        worst = worst.max(rel);
        lines.push(format!("  config {configs:>2}: delta {delta:6.2} oracle {truth:10.2} m3 estimate {est:10.2} m3 rel {rel:.4}"));
        configs += 1;
    }
    let elapsed = start.elapsed();
    for l in &lines {
        println!("{l}");
    }
    let ok = worst <= 0.05 && elapsed < Duration::from_secs(60);
    report(
        2,
        "Monte-Carlo overlap vs 0.1 m voxels",
        ok,
        &format!("20 configurations at {interval} m pitch, worst relative error {worst:.4}, {elapsed:.2?}"),
    );
    assert!(worst <= 0.05, "worst relative error {worst}");
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
}

#[test]
fn criterion_03_vertical_thickness_matches_scan() {
    let _guard = serial();
    let mut rng = stream(&[0xACC, 3]);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x_t = random_point(&mut rng, 100.0, (0.0, 50.0));
        let x_r = random_point(&mut rng, 100.0, (0.0, 50.0));
        let delta = rng.random_range(0.5..80.0);
        let e = Ellipsoid::new(x_t, x_r, delta);
        let t = rng.random::<f64>();
        let mid = x_t + t * (x_r - x_t);
        let u = mid.xy() + Vec2::new(rng.random_range(-0.6..0.6), rng.random_range(-0.6..0.6)) * e.semi_minor;
        let z_low = rng.random_range(-20.0..40.0);
        let z_high = z_low + rng.random_range(0.5..60.0);

        const STEP: f64 = 1e-3;
        let n = ((z_high - z_low) / STEP).ceil() as usize;
        let inside = (0..n)
            .filter(|&k| {
                let z = (z_low + (k as f64 + 0.5) * STEP).min(z_high);
                focal_excess(&Vec3::new(u.x, u.y, z), &x_t, &x_r, delta) <= 0.0
            })
            .count();
        let scan = inside as f64 * STEP;
        let analytic = vertical_overlap_thickness(&e, u, z_low, z_high);
        worst = worst.max((analytic - scan).abs());
    }
    report(3, "vertical thickness vs 1e-3 m scan", worst <= 2e-3, &format!("100 cases, worst |diff| {worst:.2e} m"));
    assert!(worst <= 2e-3);
}

#[test]
fn criterion_04_refining_every_building_is_the_identity() {
    let _guard = serial();
    let mut details = Vec::new();
    let mut ok = true;
    for seed in [0u64, 5, 9] {
        let hi = generate_synthetic_city(seed, 60, 400.0, &CityParams::default()).unwrap();
        let low = degrade_scene(&hi, &DegradeParams::default(), seed).unwrap().scene;
        let refined = apply_refinement(&low, &hi, &RefinementPlan::all(&low)).unwrap();
        let config = RayConfig::default();
        let star = Tracer::new(&hi, &hi.tx, &config).radio_map(&hi, 1.5);
        let hat = Tracer::new(&refined, &refined.tx, &config).radio_map(&refined, 1.5);
        let bit_equal = star.values.iter().zip(&hat.values).all(|(a, b)| a.to_bits() == b.to_bits());
        let rmse = rmse_all(&hat, &star).unwrap();
        ok &= bit_equal && rmse == 0.0;
        details.push(format!("seed {seed}: bit-equal {bit_equal}, rmse_all {rmse}"));
    }

    let mut config = ExperimentConfig::default();
    config.seeds = vec![3];
    config.radio.max_depth = 2;
    config.budgets = vec![0, 60];
    config.methods = vec![Method::Egsr, Method::Uniform];
    config.beamforming = false;
    let results = Experiment::new(config).unwrap().run_refinement_comparison().unwrap();
    let ceiling = results.row("s3", "tx1", Method::Uniform, 0).unwrap().rmse_all;
    let full = results.row("s3", "tx1", Method::Egsr, 60).unwrap().rmse_all;
    ok &= ceiling == 0.0 && full == 0.0;
    details.push(format!("pipeline: uniform {ceiling}, egsr W=60 {full}"));

    report(4, "refine-all identity", ok, &details.join("; "));
    assert!(ok);
}

#[test]
fn criterion_05_egsr_beats_random_and_volume() {
    let _guard = serial();
    let mut config = ExperimentConfig::default();
    config.seeds = (0..10).collect();
    config.scene.n_buildings = 60;
    config.scene.extent = 400.0;
    config.degrade = DegradeParams { vertex_jitter_sigma: 1.0, height_sigma: 2.0, simplify_to: None };
    config.egsr.delta = 50.0;
    config.radio.max_depth = 2;
    config.budgets = vec![10];
    config.methods = vec![Method::Egsr, Method::Random, Method::Volume];
    config.random_repeats = 20;
    config.beamforming = false;

    let start = Instant::now();
    let (exp, results) = single_threaded(|| {
        let exp = Experiment::new(config).unwrap();
        let results = exp.run_refinement_comparison().unwrap();
        (exp, results)
    });
    let elapsed = start.elapsed();
    let terrain = &exp.scenes[0].hi.terrain;
    assert!(terrain.nx <= 100 && terrain.ny <= 100);

    let (mut beats_random, mut beats_volume) = (0, 0);
    for s in 0..exp.scenes.len() {
        let scenario = exp.scenario(s);
        let egsr = results.row(&scenario, "tx1", Method::Egsr, 10).unwrap().rmse_cov;
        let random = results.row(&scenario, "tx1", Method::Random, 10).unwrap();
        let volume = results.row(&scenario, "tx1", Method::Volume, 10).unwrap().rmse_cov;
        assert_eq!(random.repeats, 20);
        beats_random += (egsr < random.rmse_cov) as usize;
        beats_volume += (egsr <= volume) as usize;
        println!(
            "  {scenario}: egsr {egsr:.3} dB, random mean {:.3} dB (std {:.3}), volume {volume:.3} dB",
            random.rmse_cov, random.rmse_cov_std
        );
    }
    let ok = beats_random >= 8 && beats_volume >= 7 && elapsed < Duration::from_secs(600);
    report(
        5,
        "EGSR vs random and volume at W = 10",
        ok,
        &format!("below random mean in {beats_random}/10, at or below volume in {beats_volume}/10, {elapsed:.1?} on one thread"),
    );
    assert!(beats_random >= 8);
    assert!(beats_volume >= 7);
    assert!(elapsed < Duration::from_secs(600));
}

#[test]
fn criterion_06_ablation_profile_is_heavy_tailed() {
    let _guard = serial();
    let config = ExperimentConfig::default();
    let results = Experiment::new(config).unwrap().run_ablation().unwrap();
    let ginis: Vec<f64> = results.entries.iter().map(|e| e.report.gini()).collect();
    for e in &results.entries {
        println!("  {} {}: {} receivers, Gini {:.3}", e.scenario, e.tx, e.receivers, e.report.gini());
    }
    let ok = !ginis.is_empty() && ginis.iter().all(|&g| g > 0.5);
    report(6, "heavy-tailed removal impact", ok, &format!("Gini per default scene {ginis:.3?}"));
    assert!(ok);
}

fn open_scene() -> Scene {
    Scene {
        buildings: Vec::new(),
        terrain: Terrain::flat(Vec2::new(0.0, 0.0), 5.0, 60, 60),
        tx: TxConfig::at(Vec3::new(137.3, 151.9, 25.0)),
    }
}

#[test]
fn criterion_07_free_space_and_mirror_exactness() {
    let _guard = serial();
    let scene = open_scene();
    let map = Tracer::new(&scene, &scene.tx, &RayConfig::default()).radio_map(&scene, 1.5);
    let lambda = 299_792_458.0 / scene.tx.frequency_hz;
    let mut worst_db: f64 = 0.0;
    for j in 0..scene.terrain.ny {
        for i in 0..scene.terrain.nx {
            let c = Vec2::new((i as f64 + 0.5) * 5.0, (j as f64 + 0.5) * 5.0);
            let dist = (Vec3::new(c.x, c.y, 1.5) - scene.tx.position).norm();
            let friis = 20.0 * (lambda / (4.0 * PI * dist)).log10();
            worst_db = worst_db.max((map.values[j * scene.terrain.nx + i] - friis).abs());
        }
    }

    // A thin wall along x = 100 and a transmitter-receiver pair in front of it.
    let wall = Building {
        id: 0,
        footprint: vec![Vec2::new(100.0, 20.0), Vec2::new(102.0, 20.0), Vec2::new(102.0, 180.0), Vec2::new(100.0, 180.0)],
        base_z: 0.0,
        height: 40.0,
        fidelity: Fidelity::High,
    };
    let mirror_scene = Scene { buildings: vec![wall], ..open_scene() };
    let mut rng = stream(&[0xACC, 7]);
    let mut worst_len: f64 = 0.0;
    let mut mirrors = 0;
    for _ in 0..50 {
        let x_t = Vec3::new(rng.random_range(20.0..90.0), rng.random_range(60.0..140.0), rng.random_range(5.0..30.0));
        let x_r = Vec3::new(rng.random_range(20.0..90.0), rng.random_range(60.0..140.0), 1.5);
        let tracer = Tracer::new(&mirror_scene, &TxConfig::at(x_t), &RayConfig::with_depth(1));
        let image = Vec3::new(200.0 - x_t.x, x_t.y, x_t.z);
        let expected = (image - x_r).norm();
        let paths = tracer.paths_to(&x_r);
        let reflected: Vec<_> = paths.iter().filter(|p| p.order == 1 && (p.points[0].x - 100.0).abs() < 1e-9).collect();
        assert_eq!(reflected.len(), 1, "one reflection off the near face");
        worst_len = worst_len.max((reflected[0].length - expected).abs());
        mirrors += 1;
    }

    let ok = worst_db <= 1e-9 && worst_len <= 1e-9;
    report(
        7,
        "Friis and image-source exactness",
        ok,
        &format!("{} open cells, worst {worst_db:.2e} dB; {mirrors} mirror paths, worst {worst_len:.2e} m", map.values.len()),
    );
    assert!(worst_db <= 1e-9);
    assert!(worst_len <= 1e-9);
}

#[test]
fn criterion_08_beamforming_sanity() {
    let _guard = serial();
    let config = ExperimentConfig::default();
    let hi = generate_synthetic_city(0, 60, 400.0, &CityParams::default()).unwrap();
    let low = degrade_scene(&hi, &DegradeParams::default(), 0).unwrap().scene;
    let tx = config.radio.tx_at(hi.tx.position);
    let tracer = Tracer::new(&hi, &tx, &config.radio.ray());
    let star = tracer.radio_map(&hi, config.radio.rx_height);
    let covered = coverage_set(&star, config.radio.coverage_threshold_db);

    let mut worst: f64 = 0.0;
    for &k in &covered {
        let c = hi.terrain.cell_center_at(k);
        let h = tracer.channel(&Vec3::new(c.x, c.y, hi.terrain.elevation_at(k) + config.radio.rx_height));
        let w = mrt_beamformer(&h).unwrap();
        let inner: Complex64 = w.iter().zip(&h).map(|(a, b)| a.conj() * b).sum();
        let raw = inner.norm_sqr() / h.iter().map(|x| x.norm_sqr()).sum::<f64>();
        let g = normalized_bf_gain(&w, &h).unwrap();
        worst = worst.max((raw - 1.0).abs()).max((g - 1.0).abs());
    }

    let mut monotone = true;
    let mut at_zero = true;
    let mut curves = 0;
    for hat in [&hi, &low] {
        let eval = bf_evaluate(hat, &hi, &tx, &config).unwrap();
        monotone &= eval.ccdf.windows(2).all(|w| w[1] <= w[0]);
        at_zero &= eval.gamma[0] == 0.0 && eval.ccdf[0] == 1.0;
        curves += 1;
    }
    let mut comparison = config.clone();
    comparison.seeds = vec![1];
    comparison.scene.n_buildings = 20;
    comparison.scene.extent = 200.0;
    comparison.radio.max_depth = 1;
    comparison.budgets = vec![0, 5];
    comparison.random_repeats = 3;
    let results = Experiment::new(comparison).unwrap().run_refinement_comparison().unwrap();
    for row in &results.rows {
        let ccdf = row.ccdf.as_ref().unwrap();
        monotone &= ccdf.windows(2).all(|w| w[1] <= w[0]);
        at_zero &= ccdf[0] == 1.0;
        curves += 1;
    }

    let ok = !covered.is_empty() && worst <= 1e-12 && monotone && at_zero;
    report(
        8,
        "MRT gain and CCDF shape",
        ok,
        &format!("{} covered cells, worst |G - 1| {worst:.2e}; {curves} CCDFs monotone {monotone}, start at 1 {at_zero}", covered.len()),
    );
    assert!(ok);
}

const DETERMINISM_CONFIG: &str = r#"
seeds = [2]
budgets = [0, 4, 8]
random_repeats = 4

[scene]
n_buildings = 16
extent = 180.0

[radio]
max_depth = 2

[delta_sweep]
deltas = [10.0, 50.0, 100.0]
budget = 4
"#;

fn run_cli(config: &Path, out: &Path, threads: usize, subcommand: &str) {
    let status = Command::new(env!("CARGO_BIN_EXE_twinforge"))
        .arg("--config")
        .arg(config)
        .arg("--out-dir")
        .arg(out)
        .arg("--threads")
        .arg(threads.to_string())
        .arg(subcommand)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
}

#[test]
fn criterion_09_cli_outputs_are_byte_identical() {
    let _guard = serial();
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.toml");
    std::fs::write(&config, DETERMINISM_CONFIG).unwrap();

    let runs = [("a", 1), ("b", 1), ("c", 4), ("d", 8)];
    for (name, threads) in runs {
        let out = dir.path().join(name);
        run_cli(&config, &out, threads, "compare");
        run_cli(&config, &out, threads, "delta-sweep");
    }
    let mut identical = true;
    let mut compared = 0;
    for file in ["rmse_vs_w.csv", "bf_ccdf.csv", "delta_sweep.csv"] {
        let reference = std::fs::read(dir.path().join("a").join(file)).unwrap();
        assert!(!reference.is_empty());
        for (name, _) in &runs[1..] {
            identical &= std::fs::read(dir.path().join(name).join(file)).unwrap() == reference;
            compared += 1;
        }
    }
    report(
        9,
        "deterministic compare and delta-sweep",
        identical,
        &format!("{compared} file pairs across a repeat run and --threads 1/4/8, identical {identical}"),
    );
    assert!(identical);
}

#[test]
fn criterion_10_defaults_match_reference_parameters() {
    let _guard = serial();
    let config = ExperimentConfig::default();
    let snapshot = include_str!("snapshots/default_config.toml");
    let snapshot_ok = config.to_toml() == snapshot;
    let parsed_ok = ExperimentConfig::parse(snapshot, false).unwrap() == config;

    let rx = RxProxyParams::default();
    let egsr = EgsrParams::default();
    let checks = [
        ("carrier 3.5 GHz", config.radio.frequency_hz == 3.5e9 && TxConfig::at(Vec3::zeros()).frequency_hz == 3.5e9),
        ("max depth 3", config.radio.max_depth == 3 && RayConfig::default().max_depth == 3),
        ("coverage threshold -80 dB", config.radio.coverage_threshold_db == -80.0),
        ("delta 50 m", config.egsr.delta == 50.0 && egsr.delta == 50.0),
        ("eta_LoS 2.0", config.egsr.eta_los == 2.0 && egsr.eta_los == 2.0),
        ("band boundaries", rx.band_boundaries == [50.0, 100.0, 200.0, 350.0]),
        ("band spacings", rx.spacings == [0.55, 0.75, 1.5, 2.7, 4.0]),
        ("min sectors 8", rx.min_sectors == 8),
        ("64-element half-wavelength array", config.radio.array_size == 64 && config.radio.element_spacing_wavelengths == 0.5),
        ("snapshot text", snapshot_ok),
        ("snapshot parses back", parsed_ok),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    report(
        10,
        "default parameters",
        failed.is_empty(),
        &if failed.is_empty() { format!("{} checks", checks.len()) } else { format!("mismatch: {failed:?}") },
    );
    assert!(failed.is_empty(), "{failed:?}");
}
