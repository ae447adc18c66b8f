//! `twinforge` command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use super::{bf_evaluate, Experiment, ExperimentConfig, Table};
use crate::egsr::{score_scene_with_pairs, select_top_w, EgsrParams, ScoreTable};
use crate::metrics::ssbf_loss;
use crate::raytrace::Tracer;
use crate::rx_proxy::build_rx_proxy_set;
use crate::scene::{
    apply_refinement, degrade_scene, generate_synthetic_city, load_scene, save_scene_with, Provenance,
    RefinementPlan, Scene, TxConfig,
};
use crate::{Error, Result, Vec3};

#[derive(Debug, Parser)]
#[command(name = "twinforge", version, about = "Budgeted geometry refinement for wireless digital twins")]
pub struct Cli {
    /// Experiment configuration (TOML, or JSON by extension).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Replaces the configured seed list by this single seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory (overrides the configuration).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic high-fidelity city.
    GenScene {
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Derive the low-fidelity twin of a scene.
    Degrade {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Score every building of a (low-fidelity) scene.
    Score {
        #[arg(long)]
        scene: PathBuf,
        /// Mark the top-W buildings as selected.
        #[arg(long)]
        budget: Option<usize>,
        /// Transmitter position `x,y,z`; defaults to the scene's.
        #[arg(long, value_parser = parse_position)]
        tx: Option<Vec3>,
        /// Also write the per-pair score matrix.
        #[arg(long)]
        pairs: bool,
    },
    /// Pick the top-W buildings from a score table.
    Select {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        budget: usize,
    },
    /// Apply a refinement plan to a low-fidelity scene.
    Refine {
        #[arg(long)]
        low: PathBuf,
        #[arg(long)]
        hi: PathBuf,
        #[arg(long)]
        plan: PathBuf,
    },
    /// Trace the radio map of a scene.
    Radiomap {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, value_parser = parse_position)]
        tx: Option<Vec3>,
    },
    /// Building-removal ablation on the reference scenes.
    Ablate,
    /// Compare refinement methods across budgets.
    Compare,
    /// EGSR accuracy across the configured Δ values.
    DeltaSweep,
    /// MRT beamforming gain of one scene evaluated on another.
    BfEval {
        /// Scene the beamformer is designed on.
        #[arg(long)]
        hat: PathBuf,
        /// Reference scene.
        #[arg(long)]
        star: PathBuf,
        #[arg(long, value_parser = parse_position)]
        tx: Option<Vec3>,
    },
}

fn parse_position(s: &str) -> std::result::Result<Vec3, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match v.as_slice() {
        [x, y, z] => Ok(Vec3::new(*x, *y, *z)),
        _ => Err("expected x,y,z".into()),
    }
}

/// Refinement plan file.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
    budget: usize,
    selected: Vec<u32>,
}

struct Context {
    config: ExperimentConfig,
    provenance: Provenance,
    out_dir: PathBuf,
}

impl Context {
    fn out(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn seed(&self) -> u64 {
        self.config.seeds[0]
    }

    fn tx_for(&self, scene: &Scene, over: Option<Vec3>) -> TxConfig {
        self.config.radio.tx_at(over.unwrap_or(scene.tx.position))
    }

    fn egsr(&self) -> EgsrParams {
        EgsrParams { seed: crate::rng::mix_seed(&[self.config.egsr.seed, self.seed()]), ..self.config.egsr.clone() }
    }

    fn write(&self, name: &str, text: &str) -> Result<PathBuf> {
        let path = self.out(name);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    fn table(&self, name: &str, table: &Table) -> Result<PathBuf> {
        self.write(name, &table.to_csv(Some(&self.provenance)))
    }
}

fn load_context(cli: &Cli) -> Result<Context> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seeds = vec![seed];
    }
    if let Some(dir) = &cli.out_dir {
        config.output_dir = dir.clone();
    }
    if cli.threads == Some(0) {
        return Err(Error::Config("--threads must be at least 1".into()));
    }
    config.validate()?;
    let out_dir = config.output_dir.clone();
    std::fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
    let provenance = Provenance { config_hash: config.hash(), seeds: config.seeds.clone() };
    Ok(Context { config, provenance, out_dir })
}

fn run_command(cli: &Cli, ctx: &Context) -> Result<Vec<PathBuf>> {
    let cfg = &ctx.config;
    let prov = Some(&ctx.provenance);
    let mut written = Vec::new();
    match &cli.command {
        Command::GenScene { output } => {
            let scene = generate_synthetic_city(ctx.seed(), cfg.scene.n_buildings, cfg.scene.extent, &cfg.scene.city)?;
            let path = output.clone().unwrap_or_else(|| ctx.out("scene_hi.json"));
            save_scene_with(&scene, &path, prov)?;
            written.push(path);
        }
        Command::Degrade { scene, output } => {
            let d = degrade_scene(&load_scene(scene)?, &cfg.degrade, ctx.seed())?;
            for w in &d.warnings {
                eprintln!("warning: {w}");
            }
            let path = output.clone().unwrap_or_else(|| ctx.out("scene_low.json"));
            save_scene_with(&d.scene, &path, prov)?;
            written.push(path);
        }
        Command::Score { scene, budget, tx, pairs } => {
            let scene = load_scene(scene)?;
            let tx = ctx.tx_for(&scene, *tx);
            let params = ctx.egsr();
            let table = score_scene_with_pairs(&scene, &tx, &params)?;
            for w in &table.warnings {
                eprintln!("warning: {w}");
            }
            let selected = budget.map(|w| select_top_w(&table, w).selected).unwrap_or_default();
            let text = format!("# {}\n{}", ctx.provenance.line(), table.to_csv(&selected));
            written.push(ctx.write("scores.csv", &text)?);
            if *pairs {
                let text = format!("# {}\n{}", ctx.provenance.line(), table.pairs_to_csv().unwrap_or_default());
                written.push(ctx.write("pair_scores.csv", &text)?);
            }
            let rx = build_rx_proxy_set(&scene.terrain, &scene.buildings, tx.position, &params.rx)?;
            let path = ctx.out("rx_proxies.csv");
            rx.write_csv(&path)?;
            written.push(path);
        }
        Command::Select { scores, budget } => {
            let text = std::fs::read_to_string(scores).map_err(|e| Error::io(scores, e))?;
            let plan = select_top_w(&ScoreTable::from_csv(&text)?, *budget);
            let doc = PlanDoc { provenance: prov.cloned(), budget: plan.budget, selected: plan.selected.into_iter().collect() };
            let json = serde_json::to_string_pretty(&doc).expect("plan serializes") + "\n";
            written.push(ctx.write("plan.json", &json)?);
        }
        Command::Refine { low, hi, plan } => {
            let text = std::fs::read_to_string(plan).map_err(|e| Error::io(plan, e))?;
            let doc: PlanDoc =
                serde_json::from_str(&text).map_err(|e| Error::Parse { what: "refinement plan", message: e.to_string() })?;
            let plan = RefinementPlan::new(doc.budget, doc.selected)?;
            let refined = apply_refinement(&load_scene(low)?, &load_scene(hi)?, &plan)?;
            let path = ctx.out("scene_refined.json");
            save_scene_with(&refined, &path, prov)?;
            written.push(path);
        }
        Command::Radiomap { scene, tx } => {
            let scene = load_scene(scene)?;
            let tx = ctx.tx_for(&scene, *tx);
            let map = Tracer::new(&scene, &tx, &cfg.radio.ray()).radio_map(&scene, cfg.radio.rx_height);
            let path = ctx.out("radiomap.csv");
            map.save(&path, &[ctx.provenance.line()])?;
            written.push(path);
        }
        Command::Ablate => {
            let results = Experiment::new(cfg.clone())?.run_ablation()?;
            written.push(ctx.table("ablation_profile.csv", &results.profile_table())?);
            written.push(ctx.table("ablation_summary.csv", &results.summary_table())?);
        }
        Command::Compare => {
            let results = Experiment::new(cfg.clone())?.run_refinement_comparison()?;
            written.push(ctx.table("rmse_vs_w.csv", &results.rmse_table())?);
            if cfg.beamforming {
                written.push(ctx.table("bf_ccdf.csv", &results.ccdf_table())?);
            }
        }
        Command::DeltaSweep => {
            let results = Experiment::new(cfg.clone())?.run_delta_sweep()?;
            written.push(ctx.table("delta_sweep.csv", &results.table())?);
        }
        Command::BfEval { hat, star, tx } => {
            let (hat, star) = (load_scene(hat)?, load_scene(star)?);
            let tx = ctx.tx_for(&star, *tx);
            let eval = bf_evaluate(&hat, &star, &tx, cfg)?;
            written.push(ctx.write("bf_ccdf.csv", &format!("# {}\n{}", ctx.provenance.line(), eval.to_csv()))?);
            let mut summary = Table::new(&["receivers", "ssbf_loss", "mean_gain"]);
            let n = eval.gains.len();
            let mean = if n == 0 { 0.0 } else { eval.gains.iter().sum::<f64>() / n as f64 };
            summary.push(vec![n.to_string(), ssbf_loss(&eval.gains).to_string(), mean.to_string()]);
            written.push(ctx.table("bf_summary.csv", &summary)?);
        }
    }
    Ok(written)
}

/// Exit status: 0 on success, 2 for configuration errors, 3 for failures
/// while running.
pub fn run(cli: &Cli) -> ExitCode {
    let ctx = match load_context(cli) {
        Ok(ctx) => ctx,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let job = || run_command(cli, &ctx);
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(job),
            Err(e) => Err(Error::Config(format!("thread pool: {e}"))),
        },
        None => job(),
    };
    match result {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", display(&p));
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

pub fn main() -> ExitCode {
    run(&Cli::parse())
}
