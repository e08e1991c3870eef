//! Cochains, the Whitney L² metric and the operators built on it.

mod cochain;
mod star;
pub mod whitney;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

pub use cochain::{Cochain, CochainFile};
pub use star::{DualCochain, DualRepresentation};

use crate::error::{Error, Result};
use crate::linalg;
use crate::mesh::{extract_boundary, BoundaryComplex, SimplicialComplex};

/// Relative symmetry tolerance checked on every assembled mass matrix.
pub const MASS_SYMMETRY_RTOL: f64 = 1e-12;

/// `d`: the coboundary, `(dc)[τ] = Σ_σ ∂[σ, τ] c[σ]`. Works on any complex,
/// including a [`BoundaryComplex`]'s own complex.
pub fn exterior_derivative(complex: &SimplicialComplex, c: &Cochain) -> Result<Cochain> {
    c.ensure_on(complex.id(), c.degree())?;
    let k = c.degree();
    if k >= complex.dimension() {
        return Err(Error::DegreeOutOfRange {
            degree: k,
            max: complex.dimension().saturating_sub(1),
        });
    }
    let values = complex.boundary(k + 1).apply_transpose(c.as_slice());
    Ok(Cochain::from_parts(k + 1, DVector::from_vec(values), complex.id()))
}

/// Integer coefficient vectors of both sides of the discrete Stokes identity,
/// and their evaluations on one cochain.
#[derive(Clone, Debug, PartialEq)]
pub struct StokesCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// Per (n-1)-simplex: `Σ_T ∂_n[σ, T]`.
    pub lhs_coefficients: Vec<i64>,
    /// Per (n-1)-simplex: the induced sign if it lies on the boundary, else 0.
    pub rhs_coefficients: Vec<i64>,
}

/// Whitney mass matrices of one complex, with cached factorizations.
#[derive(Clone, Debug)]
pub struct MetricStructure {
    complex: SimplicialComplex,
    boundary: BoundaryComplex,
    mass: Vec<DMatrix<f64>>,
    chol: Vec<Cholesky<f64, Dyn>>,
    interior: Vec<Vec<usize>>,
    interior_chol: Vec<Option<Cholesky<f64, Dyn>>>,
}

impl MetricStructure {
    pub fn new(complex: SimplicialComplex) -> Result<Self> {
        let mass = whitney::assemble_mass(&complex)?;
        for (k, m) in mass.iter().enumerate() {
            let scale = m.amax();
            let asym = (m - m.transpose()).amax();
            if asym > MASS_SYMMETRY_RTOL * scale || m.iter().any(|x| !x.is_finite()) {
                return Err(Error::FactorizationFailure(format!("mass matrix {k} is not symmetric")));
            }
        }
        let chol = mass
            .iter()
            .enumerate()
            .map(|(k, m)| linalg::cholesky(m, &format!("mass matrix {k}")))
            .collect::<Result<Vec<_>>>()?;
        let boundary = extract_boundary(&complex)?;
        let interior: Vec<Vec<usize>> = (0..=complex.dimension())
            .map(|k| boundary.interior_indices(k))
            .collect();
        let interior_chol = interior
            .iter()
            .enumerate()
            .map(|(k, idx)| {
                if idx.is_empty() {
                    Ok(None)
                } else {
                    linalg::cholesky(&linalg::submatrix(&mass[k], idx, idx), "interior mass matrix").map(Some)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            complex,
            boundary,
            mass,
            chol,
            interior,
            interior_chol,
        })
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn boundary(&self) -> &BoundaryComplex {
        &self.boundary
    }

    pub fn dimension(&self) -> usize {
        self.complex.dimension()
    }

    pub fn mass(&self, k: usize) -> &DMatrix<f64> {
        &self.mass[k]
    }

    /// Parent k-simplices not on the boundary (the zero-trace degrees of freedom).
    pub fn interior_indices(&self, k: usize) -> &[usize] {
        &self.interior[k]
    }

    /// Dense matrix of `d: C^k → C^{k+1}`.
    pub fn derivative_matrix(&self, k: usize) -> DMatrix<f64> {
        self.complex.boundary(k + 1).to_dense().transpose()
    }

    pub fn solve_mass(&self, k: usize, rhs: &DVector<f64>) -> DVector<f64> {
        self.chol[k].solve(rhs)
    }

    /// Solves `M_II x = rhs_I` on the interior block and extends `x` by zero.
    pub(crate) fn solve_interior_mass(&self, k: usize, rhs: &DVector<f64>) -> DVector<f64> {
        let idx = &self.interior[k];
        match &self.interior_chol[k] {
            None => DVector::zeros(rhs.len()),
            Some(ch) => {
                let sub = DVector::from_iterator(idx.len(), idx.iter().map(|&i| rhs[i]));
                linalg::scatter(&ch.solve(&sub), idx, rhs.len())
            }
        }
    }

    pub(crate) fn check(&self, c: &Cochain) -> Result<()> {
        c.ensure_on(self.complex.id(), c.degree())
    }

    pub(crate) fn wrap(&self, degree: usize, values: DVector<f64>) -> Cochain {
        Cochain::from_parts(degree, values, self.complex.id())
    }

    pub fn exterior_derivative(&self, c: &Cochain) -> Result<Cochain> {
        exterior_derivative(&self.complex, c)
    }

    fn ensure_positive_degree(&self, c: &Cochain) -> Result<()> {
        self.check(c)?;
        if c.degree() == 0 {
            return Err(Error::DegreeOutOfRange {
                degree: 0,
                max: self.dimension(),
            });
        }
        Ok(())
    }

    /// `D^T M c` for a k-cochain, as a (k-1)-coefficient vector.
    fn weak_divergence(&self, c: &Cochain) -> DVector<f64> {
        let mc = &self.mass[c.degree()] * c.values();
        DVector::from_vec(self.complex.boundary(c.degree()).apply(mc.as_slice()))
    }

    /// Algebraic codifferential `δc = M⁻¹ Dᵀ M c`: the adjoint of `d` against all
    /// (k-1)-cochains, which encodes a vanishing normal trace.
    pub fn codifferential(&self, c: &Cochain) -> Result<Cochain> {
        self.ensure_positive_degree(c)?;
        let k = c.degree();
        Ok(self.wrap(k - 1, self.solve_mass(k - 1, &self.weak_divergence(c))))
    }

    /// Codifferential taken weakly against zero-trace (k-1)-cochains only.
    /// The result vanishes on boundary degrees of freedom.
    pub fn constrained_codifferential(&self, c: &Cochain) -> Result<Cochain> {
        self.ensure_positive_degree(c)?;
        let k = c.degree();
        Ok(self.wrap(k - 1, self.solve_interior_mass(k - 1, &self.weak_divergence(c))))
    }

    /// `aᵀ M b`, evaluated symmetrically so that swapping arguments is bit-exact.
    pub fn inner_product(&self, a: &Cochain, b: &Cochain) -> Result<f64> {
        self.check(a)?;
        b.ensure_on(self.complex.id(), a.degree())?;
        Ok(symmetric_form(&self.mass[a.degree()], a.values(), b.values()))
    }

    pub fn norm(&self, a: &Cochain) -> f64 {
        symmetric_form(&self.mass[a.degree()], a.values(), a.values())
            .max(0.0)
            .sqrt()
    }

    /// Restriction to the boundary complex, oriented by the induced orientation.
    pub fn tangential_trace(&self, c: &Cochain) -> Result<Cochain> {
        self.check(c)?;
        let n = self.dimension();
        if c.degree() + 1 > n {
            return Err(Error::DegreeOutOfRange {
                degree: c.degree(),
                max: n - 1,
            });
        }
        let inc = self.boundary.inclusion(c.degree());
        let values = DVector::from_iterator(inc.len(), inc.iter().map(|&(p, s)| s as f64 * c.values()[p]));
        Ok(Cochain::from_parts(c.degree(), values, self.boundary.complex().id()))
    }

    /// Extends a boundary cochain to the parent by zero: the right inverse of
    /// [`tangential_trace`](Self::tangential_trace).
    pub fn extend_by_zero(&self, psi: &Cochain) -> Result<Cochain> {
        psi.ensure_on(self.boundary.complex().id(), psi.degree())?;
        let k = psi.degree();
        let mut out = DVector::zeros(self.complex.num_simplices(k));
        for (j, &(p, s)) in self.boundary.inclusion(k).iter().enumerate() {
            out[p] = s as f64 * psi.values()[j];
        }
        Ok(self.wrap(k, out))
    }

    /// Normal trace of a k-cochain as a boundary functional on (k-1)-cochains:
    /// `Σ_j t(a)_j · n(b)_j = ⟨da, b⟩ − ⟨a, δ_c b⟩` for every (k-1)-cochain `a`.
    pub fn normal_trace(&self, b: &Cochain) -> Result<Cochain> {
        self.ensure_positive_degree(b)?;
        let k = b.degree();
        let y = self.weak_divergence(b);
        let x = self.solve_interior_mass(k - 1, &y);
        let r = y - &self.mass[k - 1] * x;
        let inc = self.boundary.inclusion(k - 1);
        let values = DVector::from_iterator(inc.len(), inc.iter().map(|&(p, s)| s as f64 * r[p]));
        Ok(Cochain::from_parts(k - 1, values, self.boundary.complex().id()))
    }

    /// Both sides of `Σ_T dc(T) = Σ_{∂} t(c)` as integer combinations of `c`.
    pub fn stokes_check(&self, c: &Cochain) -> Result<StokesCheck> {
        let n = self.dimension();
        c.ensure_on(self.complex.id(), n - 1)?;
        let mut lhs_coefficients = vec![0i64; self.complex.num_simplices(n - 1)];
        for col in self.complex.boundary(n).columns() {
            for &(i, s) in col {
                lhs_coefficients[i] += s as i64;
            }
        }
        let mut rhs_coefficients = vec![0i64; lhs_coefficients.len()];
        for &(p, s) in self.boundary.inclusion(n - 1) {
            rhs_coefficients[p] += s as i64;
        }
        let eval = |coef: &[i64]| -> f64 {
            coef.iter()
                .zip(c.as_slice())
                .filter(|(k, _)| **k != 0)
                .map(|(&k, &x)| k as f64 * x)
                .sum()
        };
        Ok(StokesCheck {
            lhs: eval(&lhs_coefficients),
            rhs: eval(&rhs_coefficients),
            lhs_coefficients,
            rhs_coefficients,
        })
    }

    fn green_args(&self, a: &Cochain, b: &Cochain) -> Result<()> {
        self.check(a)?;
        b.ensure_on(self.complex.id(), a.degree() + 1)
    }

    /// `⟨da, b⟩ − ⟨a, δb⟩` with the algebraic codifferential; zero up to rounding.
    pub fn green_defect(&self, a: &Cochain, b: &Cochain) -> Result<f64> {
        self.green_args(a, b)?;
        Ok(self.inner_product(&self.exterior_derivative(a)?, b)? - self.inner_product(a, &self.codifferential(b)?)?)
    }

    /// `⟨da, b⟩ − ⟨a, δ_c b⟩`: the discrete boundary term `∫_∂ ta ∧ ⋆nb`.
    pub fn green_defect_constrained(&self, a: &Cochain, b: &Cochain) -> Result<f64> {
        self.green_args(a, b)?;
        Ok(self.inner_product(&self.exterior_derivative(a)?, b)?
            - self.inner_product(a, &self.constrained_codifferential(b)?)?)
    }

    /// Pairing of a boundary (k-1)-cochain with the normal trace of a k-cochain.
    pub fn boundary_pairing(&self, t: &Cochain, b: &Cochain) -> Result<f64> {
        let nb = self.normal_trace(b)?;
        t.ensure_on(nb.complex_id(), nb.degree())?;
        Ok(t.values().dot(nb.values()))
    }
}

fn symmetric_form(m: &DMatrix<f64>, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let n = a.len();
    let mut acc = 0.0;
    for j in 0..n {
        acc += m[(j, j)] * (a[j] * b[j]);
        for i in j + 1..n {
            let mij = m[(i, j)];
            if mij != 0.0 {
                acc += mij * (a[i] * b[j] + a[j] * b[i]);
            }
        }
    }
    acc
}
