//! Deterministic test meshes.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::complex::SimplicialComplex;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Sphere,
    Torus,
    Disk,
    Annulus,
    Ball,
    SolidTorus,
}

impl Shape {
    pub const ALL: [Shape; 6] = [
        Shape::Sphere,
        Shape::Torus,
        Shape::Disk,
        Shape::Annulus,
        Shape::Ball,
        Shape::SolidTorus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Shape::Sphere => "sphere",
            Shape::Torus => "torus",
            Shape::Disk => "disk",
            Shape::Annulus => "annulus",
            Shape::Ball => "ball",
            Shape::SolidTorus => "solid_torus",
        }
    }

    pub fn min_resolution(self) -> usize {
        match self {
            Shape::Torus => 3,
            _ => 1,
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Shape::ALL
            .into_iter()
            .find(|sh| sh.name() == s || sh.name().replace('_', "-") == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown shape '{s}'")))
    }
}

/// Generates the named shape at the given resolution.
///
/// - `sphere`: each face of a tetrahedron split into `r²` triangles, projected to the unit sphere.
/// - `torus`: `m × m` periodic grid, two triangles per cell, on a torus of revolution (m ≥ 3).
/// - `disk`: `r × r` grid on the unit square.
/// - `annulus`: `r` radial layers and `4r + 4` angular segments between radii 1 and 2.
/// - `ball`: `r³` cubes, six Kuhn tetrahedra each.
/// - `solid_torus`: `r × r` square cross-section swept through `3r` angular steps.
pub fn gen_mesh(shape: Shape, resolution: usize) -> Result<SimplicialComplex> {
    if resolution < shape.min_resolution() {
        return Err(Error::UnsupportedResolution {
            shape: shape.name(),
            resolution,
            minimum: shape.min_resolution(),
        });
    }
    let (tops, coords) = match shape {
        Shape::Sphere => sphere(resolution),
        Shape::Torus => torus(resolution),
        Shape::Disk => disk(resolution),
        Shape::Annulus => annulus(resolution),
        Shape::Ball => ball(resolution),
        Shape::SolidTorus => solid_torus(resolution),
    };
    SimplicialComplex::build(&tops, &coords)
}

type Raw = (Vec<Vec<usize>>, Vec<Vec<f64>>);

fn sphere(r: usize) -> Raw {
    let s = 1.0 / 3f64.sqrt();
    let corners = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
    let faces = [[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]];
    // points keyed by their integer weights on the four corners
    let mut ids: BTreeMap<[usize; 4], usize> = BTreeMap::new();
    let mut coords = Vec::new();
    let mut tops = Vec::new();
    let mut point = |w: [usize; 4], coords: &mut Vec<Vec<f64>>| -> usize {
        *ids.entry(w).or_insert_with(|| {
            let mut p = [0.0; 3];
            for (c, &wc) in corners.iter().zip(&w) {
                for i in 0..3 {
                    p[i] += c[i] * wc as f64;
                }
            }
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            coords.push(p.iter().map(|x| x / norm).collect());
            coords.len() - 1
        })
    };
    for f in faces {
        let mut at = |i: usize, j: usize, coords: &mut Vec<Vec<f64>>| {
            let mut w = [0usize; 4];
            w[f[0]] = r - i - j;
            w[f[1]] = i;
            w[f[2]] = j;
            point(w, coords)
        };
        for i in 0..r {
            for j in 0..r - i {
                let a = at(i, j, &mut coords);
                let b = at(i + 1, j, &mut coords);
                let c = at(i, j + 1, &mut coords);
                tops.push(vec![a, b, c]);
                if i + j + 1 < r {
                    let d = at(i + 1, j + 1, &mut coords);
                    tops.push(vec![b, d, c]);
                }
            }
        }
    }
    (tops, coords)
}

fn torus(m: usize) -> Raw {
    let (big, small) = (2.0, 1.0);
    let id = |i: usize, j: usize| (i % m) * m + (j % m);
    let mut coords = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let (u, v) = (TAU * i as f64 / m as f64, TAU * j as f64 / m as f64);
            let rho = big + small * v.cos();
            coords.push(vec![rho * u.cos(), rho * u.sin(), small * v.sin()]);
        }
    }
    let mut tops = Vec::with_capacity(2 * m * m);
    for i in 0..m {
        for j in 0..m {
            tops.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            tops.push(vec![id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    (tops, coords)
}

fn disk(r: usize) -> Raw {
    let id = |i: usize, j: usize| i * (r + 1) + j;
    let mut coords = Vec::new();
    for i in 0..=r {
        for j in 0..=r {
            coords.push(vec![i as f64 / r as f64, j as f64 / r as f64]);
        }
    }
    let mut tops = Vec::new();
    for i in 0..r {
        for j in 0..r {
            tops.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            tops.push(vec![id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    (tops, coords)
}

fn annulus(r: usize) -> Raw {
    let segments = 4 * r + 4;
    let id = |l: usize, s: usize| l * segments + (s % segments);
    let mut coords = Vec::new();
    for l in 0..=r {
        let rho = 1.0 + l as f64 / r as f64;
        for s in 0..segments {
            let t = TAU * s as f64 / segments as f64;
            coords.push(vec![rho * t.cos(), rho * t.sin()]);
        }
    }
    let mut tops = Vec::new();
    for l in 0..r {
        for s in 0..segments {
            tops.push(vec![id(l, s), id(l + 1, s), id(l + 1, s + 1)]);
            tops.push(vec![id(l, s), id(l + 1, s + 1), id(l, s + 1)]);
        }
    }
    (tops, coords)
}

const KUHN_PATHS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Kuhn tetrahedra of a grid; `id` maps (possibly wrapped) lattice points to vertex ids.
fn kuhn(cells: [usize; 3], id: impl Fn([usize; 3]) -> usize) -> Vec<Vec<usize>> {
    let mut tops = Vec::new();
    for x in 0..cells[0] {
        for y in 0..cells[1] {
            for z in 0..cells[2] {
                for path in KUHN_PATHS {
                    let mut p = [x, y, z];
                    let mut tet = vec![id(p)];
                    for axis in path {
                        p[axis] += 1;
                        tet.push(id(p));
                    }
                    tops.push(tet);
                }
            }
        }
    }
    tops
}

fn ball(r: usize) -> Raw {
    let side = r + 1;
    let mut coords = Vec::new();
    for x in 0..side {
        for y in 0..side {
            for z in 0..side {
                coords.push(vec![x as f64 / r as f64, y as f64 / r as f64, z as f64 / r as f64]);
            }
        }
    }
    let tops = kuhn([r, r, r], |p| (p[0] * side + p[1]) * side + p[2]);
    (tops, coords)
}

fn solid_torus(r: usize) -> Raw {
    let side = r + 1;
    let around = 3 * r;
    let mut coords = Vec::new();
    for x in 0..side {
        for y in 0..side {
            for k in 0..around {
                let rho = 1.0 + x as f64 / r as f64;
                let z = y as f64 / r as f64 - 0.5;
                let t = TAU * k as f64 / around as f64;
                coords.push(vec![rho * t.cos(), rho * t.sin(), z]);
            }
        }
    }
    let tops = kuhn([r, r, around], |p| (p[0] * side + p[1]) * around + p[2] % around);
    (tops, coords)
}
