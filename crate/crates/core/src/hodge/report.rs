use nalgebra::DVector;
use serde::Serialize;

use super::{BoundaryCondition, Hodge};
use crate::error::{Error, Result};
use crate::mesh::{betti_numbers, betti_numbers_float};
use crate::metric::Cochain;

/// One degree of the cohomology table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyRow {
    pub k: usize,
    /// `dim H^k(M, d)`, computed as the Neumann harmonic dimension.
    pub dim_d: usize,
    /// `dim H^k(M, δ)`, computed as the Dirichlet harmonic dimension.
    pub dim_delta: usize,
    pub betti_k: usize,
    pub betti_n_minus_k: usize,
    /// `dim_d == betti_k && dim_delta == betti_n_minus_k`.
    pub consistent: bool,
}

/// Harmonic dimensions attached to a Stokes-Dirac pair `(p, q)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StokesDiracCohomology {
    pub p: usize,
    pub q: usize,
    pub neumann_q: usize,
    pub dirichlet_p: usize,
    pub neumann_p: usize,
    pub dirichlet_q: usize,
}

/// A vector field on a 3-complex, sampled per vertex or per tetrahedron.
#[derive(Clone, Debug, PartialEq)]
pub enum VectorField {
    PerVertex(Vec<[f64; 3]>),
    PerTet(Vec<[f64; 3]>),
}

/// Orthogonal split of a flattened field into knots (divergence free,
/// tangent to the boundary) and gradients.
#[derive(Clone, Debug, PartialEq)]
pub struct KnotsAndGradients {
    pub field: Cochain,
    pub knot_part: Cochain,
    pub gradient_part: Cochain,
    /// Component of the knot part in the Neumann harmonic 1-fields.
    pub harmonic_knot_part: Cochain,
    pub dim_harmonic_knots: usize,
    pub dim_harmonic_gradients: usize,
}

impl Hodge {
    /// Betti numbers from the exact oracle, falling back to floating rank on overflow.
    pub fn betti_numbers(&self) -> Vec<usize> {
        let c = self.metric().complex();
        betti_numbers(c).unwrap_or_else(|_| betti_numbers_float(c))
    }

    pub fn cohomology_report(&self) -> Result<Vec<CohomologyRow>> {
        let n = self.dimension();
        let betti = self.betti_numbers();
        (0..=n)
            .map(|k| {
                let dim_d = self.harmonic_basis(k, BoundaryCondition::Neumann)?.dim();
                let dim_delta = self.harmonic_basis(k, BoundaryCondition::Dirichlet)?.dim();
                Ok(CohomologyRow {
                    k,
                    dim_d,
                    dim_delta,
                    betti_k: betti[k],
                    betti_n_minus_k: betti[n - k],
                    consistent: dim_d == betti[k] && dim_delta == betti[n - k],
                })
            })
            .collect()
    }

    /// `{H^q_N, H^p_T, H^p_N, H^q_T}` for `p + q = n + 1`.
    pub fn stokes_dirac_cohomology(&self, p: usize, q: usize) -> Result<StokesDiracCohomology> {
        let n = self.dimension();
        check_degrees(p, q, n)?;
        let dim = |k, bc| self.harmonic_basis(k, bc).map(|b| b.dim());
        Ok(StokesDiracCohomology {
            p,
            q,
            neumann_q: dim(q, BoundaryCondition::Neumann)?,
            dirichlet_p: dim(p, BoundaryCondition::Dirichlet)?,
            neumann_p: dim(p, BoundaryCondition::Neumann)?,
            dirichlet_q: dim(q, BoundaryCondition::Dirichlet)?,
        })
    }

    /// Edge-midpoint flattening: `c(a, b) = v((x_a + x_b)/2) · (x_b − x_a)`.
    pub fn flatten(&self, vf: &VectorField) -> Result<Cochain> {
        let c = self.metric().complex();
        if c.dimension() != 3 {
            return Err(Error::WrongDimension {
                expected: 3,
                found: c.dimension(),
            });
        }
        let x = c.vertices();
        if x.first().is_some_and(|p| p.len() != 3) {
            return Err(Error::WrongDimension {
                expected: 3,
                found: x[0].len(),
            });
        }
        let edges = c.simplices(1);
        let midpoint: Vec<[f64; 3]> = match vf {
            VectorField::PerVertex(v) => {
                expect_len(v.len(), c.num_simplices(0))?;
                edges
                    .iter()
                    .map(|e| std::array::from_fn(|i| 0.5 * (v[e[0]][i] + v[e[1]][i])))
                    .collect()
            }
            VectorField::PerTet(v) => {
                expect_len(v.len(), c.num_simplices(3))?;
                let mut sum = vec![[0.0; 3]; edges.len()];
                let mut count = vec![0usize; edges.len()];
                for (t, tet) in c.simplices(3).iter().enumerate() {
                    for a in 0..4 {
                        for b in a + 1..4 {
                            let e = c.index_of(&[tet[a], tet[b]]).expect("edge of tet");
                            count[e] += 1;
                            for i in 0..3 {
                                sum[e][i] += v[t][i];
                            }
                        }
                    }
                }
                sum.iter()
                    .zip(&count)
                    .map(|(s, &n)| std::array::from_fn(|i| s[i] / n as f64))
                    .collect()
            }
        };
        if midpoint.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("vector field"));
        }
        let values = DVector::from_iterator(
            edges.len(),
            edges
                .iter()
                .zip(&midpoint)
                .map(|(e, v)| (0..3).map(|i| v[i] * (x[e[1]][i] - x[e[0]][i])).sum()),
        );
        Ok(self.metric().wrap(1, values))
    }

    pub fn decompose_vector_field_3d(&self, vf: &VectorField) -> Result<KnotsAndGradients> {
        let field = self.flatten(vf)?;
        let gradient_part = self.exact_part(&field)?;
        let knot_part = &field - &gradient_part;
        let knots = self.harmonic_basis(1, BoundaryCondition::Neumann)?;
        let harmonic_knot_part = knots.project(self.metric(), &knot_part)?;
        Ok(KnotsAndGradients {
            field,
            knot_part,
            gradient_part,
            harmonic_knot_part,
            dim_harmonic_knots: knots.dim(),
            dim_harmonic_gradients: self.harmonic_basis(2, BoundaryCondition::Neumann)?.dim(),
        })
    }
}

pub(crate) fn check_degrees(p: usize, q: usize, n: usize) -> Result<()> {
    if p + q != n + 1 || p == 0 || q == 0 || p > n || q > n {
        return Err(Error::InvalidDegrees { p, q, n });
    }
    Ok(())
}

fn expect_len(found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::InvalidConfig(format!(
            "vector field has {found} samples, expected {expected}"
        )));
    }
    Ok(())
}
