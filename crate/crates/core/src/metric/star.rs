use nalgebra::DVector;

use super::{Cochain, MetricStructure};
use crate::error::{Error, Result};
use crate::mesh::geometry::{circumcenter, simplex_volume};
use crate::mesh::SimplicialComplex;

/// Barycentric coordinates below this count as "circumcenter not strictly inside".
const WELL_CENTERED_TOL: f64 = 1e-12;

/// The Riesz representation `η ↦ ⟨c, η⟩` of a cochain under the mass metric.
#[derive(Clone, Debug, PartialEq)]
pub struct DualRepresentation {
    primal: Cochain,
    coefficients: DVector<f64>,
}

impl DualRepresentation {
    pub fn degree(&self) -> usize {
        self.primal.degree()
    }

    /// The cochain being represented.
    pub fn primal(&self) -> &Cochain {
        &self.primal
    }

    /// `M c`, so that the functional is `η ↦ coefficients · η`.
    pub fn coefficients(&self) -> &DVector<f64> {
        &self.coefficients
    }

    pub fn pair(&self, eta: &Cochain) -> Result<f64> {
        eta.ensure_on(self.primal.complex_id(), self.degree())?;
        Ok(self.coefficients.dot(eta.values()))
    }
}

/// A cochain on the circumcentric dual: one value per dual cell, indexed by
/// the primal simplices the cells are dual to.
#[derive(Clone, Debug, PartialEq)]
pub struct DualCochain {
    pub primal_degree: usize,
    pub dual_degree: usize,
    pub values: Vec<f64>,
}

impl MetricStructure {
    pub fn hodge_star(&self, c: &Cochain) -> Result<DualRepresentation> {
        self.check(c)?;
        Ok(DualRepresentation {
            primal: c.clone(),
            coefficients: &self.mass[c.degree()] * c.values(),
        })
    }

    /// True when every simplex of positive dimension strictly contains its circumcenter.
    pub fn is_well_centered(&self) -> bool {
        well_centered(&self.complex)
    }

    /// `|⋆σ| / |σ|` for every k-simplex, with dual cells clipped to the mesh.
    pub fn circumcentric_ratios(&self, k: usize) -> Result<Vec<f64>> {
        let c = &self.complex;
        if k > c.dimension() {
            return Err(Error::DegreeOutOfRange {
                degree: k,
                max: c.dimension(),
            });
        }
        if !self.is_well_centered() {
            return Err(Error::NotWellCentered);
        }
        let dual = dual_volumes(c, k);
        Ok(c.simplices(k)
            .iter()
            .zip(dual)
            .map(|(s, d)| d / simplex_volume(&points(c, s)))
            .collect())
    }

    /// Diagonal Hodge star into the dual complex. Only defined on well-centered meshes.
    pub fn circumcentric_star(&self, c: &Cochain) -> Result<DualCochain> {
        self.check(c)?;
        let ratios = self.circumcentric_ratios(c.degree())?;
        Ok(DualCochain {
            primal_degree: c.degree(),
            dual_degree: self.dimension() - c.degree(),
            values: ratios.iter().zip(c.as_slice()).map(|(r, x)| r * x).collect(),
        })
    }
}

fn points<'a>(c: &'a SimplicialComplex, s: &[usize]) -> Vec<&'a [f64]> {
    s.iter().map(|&v| c.vertices()[v].as_slice()).collect()
}

fn well_centered(c: &SimplicialComplex) -> bool {
    (1..=c.dimension()).all(|k| {
        c.simplices(k).iter().all(|s| match circumcenter(&points(c, s)) {
            Some((_, bary)) => bary.iter().all(|&b| b > WELL_CENTERED_TOL),
            None => false,
        })
    })
}

/// Sum over top simplices and over flags `σ = σ_k ⊂ … ⊂ σ_n = T` of the volume
/// of the simplex spanned by the circumcenters of the flag.
fn dual_volumes(c: &SimplicialComplex, k: usize) -> Vec<f64> {
    let n = c.dimension();
    let mut out = vec![0.0; c.num_simplices(k)];
    for top in c.simplices(n) {
        for face in super::whitney::local_faces(n + 1, k + 1) {
            let sigma: Vec<usize> = face.iter().map(|&i| top[i]).collect();
            let rest: Vec<usize> = top.iter().copied().filter(|v| !sigma.contains(v)).collect();
            let mut total = 0.0;
            for_each_permutation(&rest, &mut |order| {
                let mut cur = sigma.clone();
                let mut centers = vec![center_of(c, &cur)];
                for &v in order {
                    cur.push(v);
                    centers.push(center_of(c, &cur));
                }
                let refs: Vec<&[f64]> = centers.iter().map(Vec::as_slice).collect();
                total += simplex_volume(&refs);
            });
            let mut sorted = sigma;
            sorted.sort_unstable();
            out[c.index_of(&sorted).expect("face of top simplex")] += total;
        }
    }
    out
}

fn center_of(c: &SimplicialComplex, s: &[usize]) -> Vec<f64> {
    circumcenter(&points(c, s)).expect("non-degenerate simplex").0
}

fn for_each_permutation(items: &[usize], f: &mut impl FnMut(&[usize])) {
    fn rec(items: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == items.len() {
            f(items);
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            rec(items, k + 1, f);
            items.swap(k, i);
        }
    }
    rec(&mut items.to_vec(), 0, f);
}
