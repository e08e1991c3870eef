//! Mesh JSON: `{"dimension": n, "vertices": [[x, y, (z)], ...], "simplices": [[v0, ..., vn], ...]}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::complex::SimplicialComplex;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshFile {
    pub dimension: usize,
    pub vertices: Vec<Vec<f64>>,
    pub simplices: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<usize>>,
}

impl MeshFile {
    pub fn from_complex(c: &SimplicialComplex) -> Self {
        Self {
            dimension: c.dimension(),
            vertices: c.vertices().to_vec(),
            simplices: c.oriented_top_simplices(),
            counts: Some(c.counts()),
        }
    }

    /// Builds the complex, canonicalizing order. Orientation is inferred and
    /// seeded from the tuple order of the first simplex in each component.
    pub fn to_complex(&self) -> Result<SimplicialComplex> {
        self.check()?;
        SimplicialComplex::build(&self.simplices, &self.vertices)
    }

    /// Same as [`to_complex`](Self::to_complex) but tolerates non-orientable input.
    pub fn to_complex_lenient(&self) -> Result<SimplicialComplex> {
        self.check()?;
        SimplicialComplex::build_lenient(&self.simplices, &self.vertices)
    }

    fn check(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::InvalidMesh("dimension must be at least 1".into()));
        }
        if let Some(s) = self.simplices.iter().find(|s| s.len() != self.dimension + 1) {
            return Err(Error::InvalidMesh(format!(
                "simplex {s:?} does not have dimension {}",
                self.dimension
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("mesh serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<MeshFile> {
    MeshFile::from_json(&std::fs::read_to_string(path)?)
}

pub fn write_mesh(path: impl AsRef<Path>, c: &SimplicialComplex) -> Result<()> {
    let mut s = MeshFile::from_complex(c).to_json();
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}
