use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::metric::{Cochain, CochainFile};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub dhdt_residual: f64,
    pub boundary_power: f64,
    /// Coefficients of `α_p` against the Neumann p-fields.
    pub harm_p: Vec<f64>,
    /// Coefficients of `b = ⋆α_q` against the Neumann (p-1)-fields.
    pub harm_q: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub alpha_p: Cochain,
    pub e_q: Cochain,
}

#[derive(Serialize)]
struct SnapshotFile<'a> {
    step: usize,
    t: f64,
    alpha_p: &'a CochainFile,
    e_q: &'a CochainFile,
}

/// One row per time level, `steps + 1` in total.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub p: usize,
    pub q: usize,
    pub dt: f64,
    pub spectral_radius: f64,
    pub dt_spectral_radius: f64,
    pub rows: Vec<TraceRow>,
    pub snapshots: Vec<Snapshot>,
}

impl Trace {
    pub fn max_relative_energy_drift(&self) -> f64 {
        let h0 = self.rows[0].h;
        let drift = self.rows.iter().map(|r| (r.h - h0).abs()).fold(0.0, f64::max);
        if h0 > 0.0 {
            drift / h0
        } else {
            drift
        }
    }

    /// Largest absolute change of any harmonic coefficient from its initial value.
    pub fn max_harmonic_drift(&self) -> f64 {
        let first = &self.rows[0];
        self.rows
            .iter()
            .flat_map(|r| {
                r.harm_p
                    .iter()
                    .zip(&first.harm_p)
                    .chain(r.harm_q.iter().zip(&first.harm_q))
                    .map(|(a, b)| (a - b).abs())
            })
            .fold(0.0, f64::max)
    }

    pub fn max_dhdt_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.dhdt_residual).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let first = &self.rows[0];
        let mut out = String::from("t,H,dHdt_residual,boundary_power");
        for i in 0..first.harm_p.len() {
            write!(out, ",harm_p_{i}").unwrap();
        }
        for i in 0..first.harm_q.len() {
            write!(out, ",harm_q_{i}").unwrap();
        }
        out.push('\n');
        for r in &self.rows {
            write!(out, "{:e},{:e},{:e},{:e}", r.t, r.h, r.dhdt_residual, r.boundary_power).unwrap();
            for x in r.harm_p.iter().chain(&r.harm_q) {
                write!(out, ",{x:e}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Writes `snapshot_NNNNNN.json` per snapshot into `dir`, creating it if needed.
    pub fn write_snapshots(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        for s in &self.snapshots {
            let (a, b) = (CochainFile::from_cochain(&s.alpha_p), CochainFile::from_cochain(&s.e_q));
            let file = SnapshotFile {
                step: s.step,
                t: s.t,
                alpha_p: &a,
                e_q: &b,
            };
            let path = dir.join(format!("snapshot_{:06}.json", s.step));
            std::fs::write(path, serde_json::to_string_pretty(&file)? + "\n")?;
        }
        Ok(())
    }
}
