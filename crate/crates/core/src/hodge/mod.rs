//! Harmonic fields, the Hodge-Morrey-Friedrichs decomposition and cohomology tables.

mod decomposition;
mod report;

use std::fmt;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use decomposition::{ComponentNorms, FriedrichsSplit, HmfComponents};
pub(crate) use report::check_degrees;
pub use report::{CohomologyRow, KnotsAndGradients, StokesDiracCohomology, VectorField};

use crate::error::{Error, Result};
use crate::linalg;
use crate::metric::{Cochain, MetricStructure};

/// Leakage into exact ⊕ coexact above which a cochain is rejected by the Friedrichs split.
pub const COMPLEMENT_RTOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    /// Vanishing normal trace: `nω = 0`.
    Neumann,
    /// Vanishing tangential trace: `tω = 0`.
    Dirichlet,
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryCondition::Neumann => "neumann",
            BoundaryCondition::Dirichlet => "dirichlet",
        })
    }
}

/// M-orthonormal basis of harmonic k-fields under one boundary condition.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicBasis {
    pub degree: usize,
    pub bc: BoundaryCondition,
    pub basis: Vec<Cochain>,
}

impl HarmonicBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// M-orthogonal projection onto the span of the basis.
    pub fn project(&self, m: &MetricStructure, c: &Cochain) -> Result<Cochain> {
        let mut out = Cochain::zeros(m.complex(), c.degree());
        for b in &self.basis {
            out = &out + &b.scaled(m.inner_product(c, b)?);
        }
        Ok(out)
    }

    /// Coefficients `⟨c, λ_i⟩` against each basis element.
    pub fn coefficients(&self, m: &MetricStructure, c: &Cochain) -> Result<Vec<f64>> {
        self.basis.iter().map(|b| m.inner_product(c, b)).collect()
    }
}

#[derive(Debug)]
struct Projectors {
    /// Onto `d` of zero-trace (k-1)-cochains.
    exact_interior: DMatrix<f64>,
    /// Onto `d` of all (k-1)-cochains.
    exact_full: DMatrix<f64>,
    /// Onto the image of the algebraic `δ` on (k+1)-cochains.
    coexact: DMatrix<f64>,
}

/// A metric together with lazily computed, cached harmonic bases and projectors.
#[derive(Debug)]
pub struct Hodge {
    metric: MetricStructure,
    neumann: Vec<OnceLock<Result<HarmonicBasis>>>,
    dirichlet: Vec<OnceLock<Result<HarmonicBasis>>>,
    projectors: Vec<OnceLock<Projectors>>,
}

impl Hodge {
    pub fn new(metric: MetricStructure) -> Self {
        let n = metric.dimension();
        Self {
            metric,
            neumann: (0..=n).map(|_| OnceLock::new()).collect(),
            dirichlet: (0..=n).map(|_| OnceLock::new()).collect(),
            projectors: (0..=n).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn metric(&self) -> &MetricStructure {
        &self.metric
    }

    pub fn dimension(&self) -> usize {
        self.metric.dimension()
    }

    fn check_degree(&self, k: usize) -> Result<()> {
        if k > self.dimension() {
            return Err(Error::DegreeOutOfRange {
                degree: k,
                max: self.dimension(),
            });
        }
        Ok(())
    }

    fn projectors(&self, k: usize) -> &Projectors {
        self.projectors[k].get_or_init(|| {
            let m = &self.metric;
            let mk = m.mass(k);
            let nk = mk.nrows();
            let (exact_interior, exact_full) = if k == 0 {
                (DMatrix::zeros(nk, nk), DMatrix::zeros(nk, nk))
            } else {
                let d = m.derivative_matrix(k - 1);
                let di = linalg::select_columns(&d, m.interior_indices(k - 1));
                (linalg::range_projector(&di, mk), linalg::range_projector(&d, mk))
            };
            let coexact = if k == self.dimension() {
                DMatrix::zeros(nk, nk)
            } else {
                let dt = m.derivative_matrix(k).transpose();
                let b = mass_solve_columns(m, k, &dt);
                linalg::range_projector(&b, mk)
            };
            Projectors {
                exact_interior,
                exact_full,
                coexact,
            }
        })
    }

    /// Harmonic k-fields: `dω = 0` and `δω = 0`, with the boundary condition
    /// selecting the algebraic (Neumann) or zero-trace restricted (Dirichlet) complex.
    pub fn harmonic_basis(&self, k: usize, bc: BoundaryCondition) -> Result<&HarmonicBasis> {
        self.check_degree(k)?;
        let cell = match bc {
            BoundaryCondition::Neumann => &self.neumann[k],
            BoundaryCondition::Dirichlet => &self.dirichlet[k],
        };
        cell.get_or_init(|| match bc {
            BoundaryCondition::Neumann => self.neumann_basis(k),
            BoundaryCondition::Dirichlet => self.dirichlet_basis(k),
        })
        .as_ref()
        .map_err(Clone::clone)
    }

    fn neumann_basis(&self, k: usize) -> Result<HarmonicBasis> {
        let m = &self.metric;
        let n = self.dimension();
        let mk = m.mass(k);
        let mut lap = DMatrix::zeros(mk.nrows(), mk.nrows());
        if k < n {
            let d = m.derivative_matrix(k);
            lap += d.transpose() * m.mass(k + 1) * &d;
        }
        if k > 0 {
            // M D (M_{k-1})⁻¹ Dᵀ M, the Gram form of the algebraic δ
            let d = m.derivative_matrix(k - 1);
            let w = d.transpose() * mk;
            lap += w.transpose() * mass_solve_columns(m, k - 1, &w);
        }
        let raw = linalg::generalized_kernel(&lap, mk, k)?;
        let p = self.projectors(k);
        let cleaned = raw
            .into_iter()
            .map(|x| {
                let y = &p.exact_full * &x + &p.coexact * &x;
                x - y
            })
            .collect();
        let basis = linalg::m_orthonormalize(cleaned, mk)?;
        Ok(HarmonicBasis {
            degree: k,
            bc: BoundaryCondition::Neumann,
            basis: basis.into_iter().map(|v| m.wrap(k, v)).collect(),
        })
    }

    fn dirichlet_basis(&self, k: usize) -> Result<HarmonicBasis> {
        let m = &self.metric;
        let n = self.dimension();
        let idx = m.interior_indices(k);
        let nk = m.complex().num_simplices(k);
        let mii = linalg::submatrix(m.mass(k), idx, idx);
        let mut lap = DMatrix::zeros(idx.len(), idx.len());
        // coexact directions inside the zero-trace space: columns of M_II⁻¹ A1ᵀ
        let mut coexact_dirs = DMatrix::zeros(idx.len(), 0);
        if k < n {
            let a1 = linalg::select_columns(&m.derivative_matrix(k), idx);
            lap += a1.transpose() * m.mass(k + 1) * &a1;
            if !idx.is_empty() {
                let ch = linalg::cholesky(&mii, "interior mass matrix")?;
                coexact_dirs = ch.solve(&a1.transpose());
            }
        }
        let mut exact_dirs = DMatrix::zeros(idx.len(), 0);
        if k > 0 {
            let prev = m.interior_indices(k - 1);
            let a0 = linalg::submatrix(&m.derivative_matrix(k - 1), idx, prev);
            if !prev.is_empty() {
                let mpp = linalg::submatrix(m.mass(k - 1), prev, prev);
                let w = a0.transpose() * &mii;
                let ch = linalg::cholesky(&mpp, "interior mass matrix")?;
                lap += w.transpose() * ch.solve(&w);
            }
            exact_dirs = a0;
        }
        let raw = linalg::generalized_kernel(&lap, &mii, k)?;
        let pe = linalg::range_projector(&exact_dirs, &mii);
        let pc = linalg::range_projector(&coexact_dirs, &mii);
        let cleaned = raw.into_iter().map(|x| &x - &pe * &x - &pc * &x).collect();
        let basis = linalg::m_orthonormalize(cleaned, &mii)?;
        Ok(HarmonicBasis {
            degree: k,
            bc: BoundaryCondition::Dirichlet,
            basis: basis
                .into_iter()
                .map(|v| m.wrap(k, linalg::scatter(&v, idx, nk)))
                .collect(),
        })
    }
}

/// `M_k⁻¹ X` column by column.
fn mass_solve_columns(m: &MetricStructure, k: usize, x: &DMatrix<f64>) -> DMatrix<f64> {
    let cols: Vec<DVector<f64>> = x.column_iter().map(|c| m.solve_mass(k, &c.into_owned())).collect();
    if cols.is_empty() {
        DMatrix::zeros(x.nrows(), 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{betti_numbers, gen_mesh, Shape};

    fn hodge(shape: Shape, r: usize) -> Hodge {
        Hodge::new(MetricStructure::new(gen_mesh(shape, r).unwrap()).unwrap())
    }

    #[test]
    fn torus_has_two_harmonic_one_forms() {
        let h = hodge(Shape::Torus, 4);
        let b = h.harmonic_basis(1, BoundaryCondition::Neumann).unwrap();
        assert_eq!(b.dim(), 2);
        let m = h.metric();
        for (i, x) in b.basis.iter().enumerate() {
            assert!(m.norm(&m.exterior_derivative(x).unwrap()) < 1e-10);
            assert!(m.norm(&m.codifferential(x).unwrap()) < 1e-10);
            for (j, y) in b.basis.iter().enumerate() {
                let g = m.inner_product(x, y).unwrap();
                assert!((g - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn dimensions_match_betti_numbers() {
        for (shape, r) in [
            (Shape::Sphere, 1),
            (Shape::Annulus, 1),
            (Shape::Disk, 2),
            (Shape::SolidTorus, 1),
        ] {
            let h = hodge(shape, r);
            let betti = betti_numbers(h.metric().complex()).unwrap();
            let n = h.dimension();
            for k in 0..=n {
                assert_eq!(
                    h.harmonic_basis(k, BoundaryCondition::Neumann).unwrap().dim(),
                    betti[k],
                    "{shape} N{k}"
                );
                assert_eq!(
                    h.harmonic_basis(k, BoundaryCondition::Dirichlet).unwrap().dim(),
                    betti[n - k],
                    "{shape} D{k}"
                );
            }
        }
    }

    #[test]
    fn dirichlet_fields_have_zero_trace() {
        let h = hodge(Shape::Annulus, 2);
        let b = h.harmonic_basis(1, BoundaryCondition::Dirichlet).unwrap();
        assert_eq!(b.dim(), 1);
        let t = h.metric().tangential_trace(&b.basis[0]).unwrap();
        assert_eq!(t.max_abs(), 0.0);
    }
}
