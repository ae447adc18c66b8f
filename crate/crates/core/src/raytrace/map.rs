use std::path::Path;

use crate::scene::Terrain;
use crate::{Error, Result, Vec2};

/// Sentinel for cells that receive no path (or lie inside a building).
pub const NO_COVERAGE: f64 = f64::NEG_INFINITY;

const MAGIC: &str = "# twinforge-radiomap/1";

/// Path gain in dB over the terrain grid, row-major with `x` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct RadioMap {
    pub nx: usize,
    pub ny: usize,
    pub origin: Vec2,
    pub cell_size: f64,
    pub values: Vec<f64>,
}

impl RadioMap {
    pub fn for_terrain(terrain: &Terrain, values: Vec<f64>) -> Result<Self> {
        if values.len() != terrain.n_cells() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {}x{} terrain",
                values.len(),
                terrain.nx,
                terrain.ny
            )));
        }
        Ok(RadioMap { nx: terrain.nx, ny: terrain.ny, origin: terrain.origin, cell_size: terrain.cell_size, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn same_grid(&self, other: &RadioMap) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.origin == other.origin && self.cell_size == other.cell_size
    }

    pub fn covered_cells(&self) -> usize {
        self.values.iter().filter(|v| v.is_finite()).count()
    }

    /// Text form: a magic line, optional `#` comment lines, a header row,
    /// the grid description and then `ny` rows of `nx` values.
    pub fn to_text(&self, comments: &[String]) -> String {
        let mut out = String::with_capacity(self.values.len() * 20);
        out.push_str(MAGIC);
        out.push('\n');
        for c in comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str("nx,ny,origin_x,origin_y,cell_size\n");
        out.push_str(&format!("{},{},{},{},{}\n", self.nx, self.ny, self.origin.x, self.origin.y, self.cell_size));
        for row in self.values.chunks(self.nx.max(1)) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<RadioMap> {
        let err = |m: String| Error::Parse { what: "radio map", message: m };
        let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| err("missing header".into()))?;
        if header.trim() != "nx,ny,origin_x,origin_y,cell_size" {
            return Err(err(format!("unexpected header `{header}`")));
        }
        let grid: Vec<&str> = lines.next().ok_or_else(|| err("missing grid line".into()))?.split(',').collect();
        if grid.len() != 5 {
            return Err(err("grid line needs 5 fields".into()));
        }
        let int = |s: &str| s.trim().parse::<usize>().map_err(|e| err(format!("`{s}`: {e}")));
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| err(format!("`{s}`: {e}")));
        let (nx, ny) = (int(grid[0])?, int(grid[1])?);
        let origin = Vec2::new(num(grid[2])?, num(grid[3])?);
        let cell_size = num(grid[4])?;
        let mut values = Vec::with_capacity(nx * ny);
        for (j, line) in lines.enumerate() {
            let row: Vec<f64> = line.split(',').map(num).collect::<Result<_>>()?;
            if row.len() != nx {
                return Err(err(format!("row {j} has {} values, expected {nx}", row.len())));
            }
            values.extend(row);
        }
        if values.len() != nx * ny {
            return Err(err(format!("expected {ny} rows, got {}", values.len() / nx.max(1))));
        }
        Ok(RadioMap { nx, ny, origin, cell_size, values })
    }

    pub fn save(&self, path: &Path, comments: &[String]) -> Result<()> {
        std::fs::write(path, self.to_text(comments)).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<RadioMap> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RadioMap::from_text(&text)
    }
}
