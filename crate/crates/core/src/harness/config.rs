use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::egsr::EgsrParams;
use crate::metrics::{AblationReceivers, COVERAGE_THRESHOLD_DB, DEFAULT_TAU_DB};
use crate::raytrace::RayConfig;
use crate::scene::{CityParams, DegradeParams, TxConfig};
use crate::{Error, Result, Vec3};

/// Where the high-fidelity scenes come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneSource {
    /// Scene document to load; when absent a synthetic city is generated
    /// for every seed.
    pub file: Option<PathBuf>,
    pub n_buildings: usize,
    /// Side of the square synthetic terrain, meters.
    pub extent: f64,
    pub city: CityParams,
}

impl Default for SceneSource {
    fn default() -> Self {
        SceneSource { file: None, n_buildings: 60, extent: 400.0, city: CityParams::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SceneTx {
    /// The transmitter stored in the scene.
    SceneTx,
}

/// One transmitter deployment: the scene's own transmitter or an explicit
/// position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Deployment {
    Scene(SceneTx),
    Position([f64; 3]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioConfig {
    pub frequency_hz: f64,
    pub array_size: usize,
    pub element_spacing_wavelengths: f64,
    /// Receiver height above terrain, meters.
    pub rx_height: f64,
    pub coverage_threshold_db: f64,
    pub max_depth: usize,
    pub reflection_magnitude: f64,
    pub reflection_phase: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        let ray = RayConfig::default();
        RadioConfig {
            frequency_hz: 3.5e9,
            array_size: 64,
            element_spacing_wavelengths: 0.5,
            rx_height: 1.5,
            coverage_threshold_db: COVERAGE_THRESHOLD_DB,
            max_depth: ray.max_depth,
            reflection_magnitude: ray.reflection_magnitude,
            reflection_phase: ray.reflection_phase,
        }
    }
}

impl RadioConfig {
    pub fn ray(&self) -> RayConfig {
        RayConfig {
            reflection_magnitude: self.reflection_magnitude,
            reflection_phase: self.reflection_phase,
            max_depth: self.max_depth,
        }
    }

    pub fn tx_at(&self, position: Vec3) -> TxConfig {
        TxConfig {
            position,
            frequency_hz: self.frequency_hz,
            array_size: self.array_size,
            element_spacing: self.element_spacing_wavelengths,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeltaSweep {
    pub deltas: Vec<f64>,
    pub budget: usize,
}

impl Default for DeltaSweep {
    fn default() -> Self {
        DeltaSweep { deltas: vec![5.0, 10.0, 30.0, 50.0, 100.0, 150.0], budget: 30 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AblationSettings {
    pub tau_db: f64,
    pub receivers: AblationReceivers,
}

impl Default for AblationSettings {
    fn default() -> Self {
        AblationSettings { tau_db: DEFAULT_TAU_DB, receivers: AblationReceivers::Coverage }
    }
}

/// Refinement strategy compared by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Egsr,
    Random,
    Volume,
    /// Every building refined.
    Uniform,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Egsr => "egsr",
            Method::Random => "random",
            Method::Volume => "volume",
            Method::Uniform => "uniform",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// One scene (generated or degraded) per seed.
    pub seeds: Vec<u64>,
    pub scene: SceneSource,
    pub degrade: DegradeParams,
    pub deployments: Vec<Deployment>,
    pub radio: RadioConfig,
    pub egsr: EgsrParams,
    pub budgets: Vec<usize>,
    pub methods: Vec<Method>,
    pub random_repeats: usize,
    /// Evaluate MRT beamforming in the refinement comparison.
    pub beamforming: bool,
    pub delta_sweep: DeltaSweep,
    pub ablation: AblationSettings,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seeds: vec![0, 1, 2],
            scene: SceneSource::default(),
            degrade: DegradeParams::default(),
            deployments: vec![Deployment::Scene(SceneTx::SceneTx)],
            radio: RadioConfig::default(),
            egsr: EgsrParams::default(),
            budgets: vec![0, 5, 10, 20, 30],
            methods: vec![Method::Egsr, Method::Random, Method::Volume, Method::Uniform],
            random_repeats: 20,
            beamforming: true,
            delta_sweep: DeltaSweep::default(),
            ablation: AblationSettings::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

fn config_err(m: impl Into<String>) -> Error {
    Error::Config(m.into())
}

impl ExperimentConfig {
    /// Parses TOML, or JSON when `json` is set.
    pub fn parse(text: &str, json: bool) -> Result<Self> {
        let config: ExperimentConfig = if json {
            serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| config_err(e.to_string()))?
        };
        config.validate()?;
        Ok(config)
    }

    /// Reads a `.json` or TOML configuration file. Relative scene paths
    /// resolve against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let mut config = Self::parse(&text, json)?;
        if let (Some(file), Some(dir)) = (config.scene.file.as_mut(), path.parent()) {
            if file.is_relative() {
                *file = dir.join(&*file);
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(config_err("at least one seed is required"));
        }
        if self.deployments.is_empty() {
            return Err(config_err("at least one transmitter deployment is required"));
        }
        if self.methods.is_empty() {
            return Err(config_err("at least one method is required"));
        }
        if self.random_repeats == 0 {
            return Err(config_err("random_repeats must be at least 1"));
        }
        if let Some(file) = &self.scene.file {
            if !file.is_file() {
                return Err(config_err(format!("scene file {} does not exist", file.display())));
            }
        } else if !(self.scene.extent > 0.0) {
            return Err(config_err("scene.extent must be positive"));
        }
        let r = &self.radio;
        if !(r.frequency_hz > 0.0) || r.array_size == 0 || !(r.element_spacing_wavelengths > 0.0) {
            return Err(config_err("radio: frequency, array size and element spacing must be positive"));
        }
        if !(r.reflection_magnitude >= 0.0 && r.reflection_magnitude <= 1.0) {
            return Err(config_err("radio.reflection_magnitude must lie in [0, 1]"));
        }
        if self.delta_sweep.deltas.iter().any(|d| !(*d >= 0.0)) {
            return Err(config_err("delta_sweep.deltas must be non-negative"));
        }
        if !(self.ablation.tau_db >= 0.0) {
            return Err(config_err("ablation.tau_db must be non-negative"));
        }
        self.egsr.validate().map_err(|e| config_err(format!("egsr: {e}")))
    }

    /// SHA-256 of the canonical JSON form, ignoring the output directory;
    /// the first 16 hex digits.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = PathBuf::new();
        let json = serde_json::to_string(&canonical).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        hex::encode(digest)[..16].to_string()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
