//! Versioned JSON scene documents (`"schema": "twinforge-scene/1"`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Building, Elevation, Fidelity, Scene, Terrain, TxConfig};
use crate::{Error, Result, Vec2, Vec3};

pub const SCENE_SCHEMA: &str = "twinforge-scene/1";

/// Identifies the configuration and seed an artifact was produced from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub config_hash: String,
    pub seeds: Vec<u64>,
}

impl Provenance {
    /// `config_hash=… seed=…` as used in artifact comment lines.
    pub fn line(&self) -> String {
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        format!("config_hash={} seed={}", self.config_hash, seeds.join(","))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneDoc {
    schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
    terrain: TerrainDoc,
    tx: TxDoc,
    buildings: Vec<BuildingDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TerrainDoc {
    origin: [f64; 2],
    cell_size: f64,
    nx: usize,
    ny: usize,
    elevation: ElevationDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ElevationDoc {
    Flat(f64),
    Grid(Vec<f64>),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TxDoc {
    position: [f64; 3],
    frequency_hz: f64,
    array_size: usize,
    element_spacing_wavelengths: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BuildingDoc {
    id: u32,
    base_z: f64,
    height: f64,
    fidelity: FidelityDoc,
    footprint: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
enum FidelityDoc {
    #[serde(rename = "HIGH")]
    High,
    #[serde(rename = "LOW")]
    Low,
}

impl From<&Scene> for SceneDoc {
    fn from(s: &Scene) -> Self {
        SceneDoc {
            schema: SCENE_SCHEMA.to_string(),
            provenance: None,
            terrain: TerrainDoc {
                origin: [s.terrain.origin.x, s.terrain.origin.y],
                cell_size: s.terrain.cell_size,
                nx: s.terrain.nx,
                ny: s.terrain.ny,
                elevation: match &s.terrain.elevation {
                    Elevation::Flat(z) => ElevationDoc::Flat(*z),
                    Elevation::Grid(v) => ElevationDoc::Grid(v.clone()),
                },
            },
            tx: TxDoc {
                position: [s.tx.position.x, s.tx.position.y, s.tx.position.z],
                frequency_hz: s.tx.frequency_hz,
                array_size: s.tx.array_size,
                element_spacing_wavelengths: s.tx.element_spacing,
            },
            buildings: s
                .buildings
                .iter()
                .map(|b| BuildingDoc {
                    id: b.id,
                    base_z: b.base_z,
                    height: b.height,
                    fidelity: match b.fidelity {
                        Fidelity::High => FidelityDoc::High,
                        Fidelity::Low => FidelityDoc::Low,
                    },
                    footprint: b.footprint.iter().map(|p| [p.x, p.y]).collect(),
                })
                .collect(),
        }
    }
}

impl From<SceneDoc> for Scene {
    fn from(d: SceneDoc) -> Self {
        Scene {
            terrain: Terrain {
                origin: Vec2::new(d.terrain.origin[0], d.terrain.origin[1]),
                cell_size: d.terrain.cell_size,
                nx: d.terrain.nx,
                ny: d.terrain.ny,
                elevation: match d.terrain.elevation {
                    ElevationDoc::Flat(z) => Elevation::Flat(z),
                    ElevationDoc::Grid(v) => Elevation::Grid(v),
                },
            },
            tx: TxConfig {
                position: Vec3::new(d.tx.position[0], d.tx.position[1], d.tx.position[2]),
                frequency_hz: d.tx.frequency_hz,
                array_size: d.tx.array_size,
                element_spacing: d.tx.element_spacing_wavelengths,
            },
            buildings: d
                .buildings
                .into_iter()
                .map(|b| Building {
                    id: b.id,
                    base_z: b.base_z,
                    height: b.height,
                    fidelity: match b.fidelity {
                        FidelityDoc::High => Fidelity::High,
                        FidelityDoc::Low => Fidelity::Low,
                    },
                    footprint: b.footprint.into_iter().map(|p| Vec2::new(p[0], p[1])).collect(),
                })
                .collect(),
        }
    }
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    out
}

pub fn scene_to_json(scene: &Scene) -> String {
    scene_to_json_with(scene, None)
}

/// As [`scene_to_json`], recording where the scene came from.
pub fn scene_to_json_with(scene: &Scene, provenance: Option<&Provenance>) -> String {
    let mut doc = SceneDoc::from(scene);
    doc.provenance = provenance.cloned();
    let mut s = serde_json::to_string_pretty(&doc).expect("scene serializes");
    s.push('\n');
    s
}

/// Parses and validates a scene document.
pub fn scene_from_json(text: &str) -> Result<Scene> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: SceneDoc = serde_path_to_error::deserialize(de).map_err(|e| Error::InvalidScene {
        pointer: pointer_of(e.path()),
        message: e.inner().to_string(),
    })?;
    if doc.schema != SCENE_SCHEMA {
        return Err(Error::InvalidScene {
            pointer: "/schema".into(),
            message: format!("expected \"{SCENE_SCHEMA}\", found \"{}\"", doc.schema),
        });
    }
    let scene = Scene::from(doc);
    scene.validate()?;
    Ok(scene)
}

pub fn load_scene(path: &Path) -> Result<Scene> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    scene_from_json(&text)
}

pub fn save_scene(scene: &Scene, path: &Path) -> Result<()> {
    save_scene_with(scene, path, None)
}

pub fn save_scene_with(scene: &Scene, path: &Path, provenance: Option<&Provenance>) -> Result<()> {
    std::fs::write(path, scene_to_json_with(scene, provenance)).map_err(|e| Error::io(path, e))
}
