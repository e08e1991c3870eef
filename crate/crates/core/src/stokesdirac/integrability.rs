use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hodge::{BoundaryCondition, Hodge};
use crate::linalg;
use crate::metric::{self, Cochain};

/// Relative tolerance of each solvability condition.
pub const INTEGRABILITY_RTOL: f64 = 1e-9;
/// Relative residual above which the witness solve is reported as failed.
pub const WITNESS_RTOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `d f = 0`.
    Closedness,
    /// `t f = d ψ` on the boundary.
    TraceCompatibility,
    /// `⟨f, λ⟩ = ∫ ψ ∧ ⋆nλ` for every Dirichlet harmonic field `λ`.
    HarmonicPairing,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub condition: Condition,
    pub magnitude: f64,
}

/// Whether `d e = f`, `t e = ψ` has a solution, with a witness when it does.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegrabilityVerdict {
    pub solvable: bool,
    pub closedness: f64,
    pub trace_mismatch: f64,
    /// Worst relative mismatch over the Dirichlet basis.
    pub harmonic_mismatch: f64,
    pub violated: Vec<Violation>,
    #[serde(skip)]
    pub witness: Option<Cochain>,
    /// `‖d e − f‖∞ / ‖f‖∞` for the witness.
    pub residual: Option<f64>,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

/// Decides whether the flow `f ∈ C^k` is the derivative of an effort with boundary values `ψ`.
pub fn integrability_check(hodge: &Hodge, f: &Cochain, psi: &Cochain) -> Result<IntegrabilityVerdict> {
    let m = hodge.metric();
    let n = m.dimension();
    let k = f.degree();
    if k == 0 || k > n {
        return Err(Error::DegreeOutOfRange { degree: k, max: n });
    }
    m.check(f)?;
    psi.ensure_on(m.boundary().complex().id(), k - 1)?;
    if f.as_slice().iter().chain(psi.as_slice()).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("integrability input"));
    }

    let f_max = f.max_abs();
    let closedness = if k < n {
        ratio(m.exterior_derivative(f)?.max_abs(), (k + 2) as f64 * f_max)
    } else {
        0.0
    };

    let trace_mismatch = if k < n {
        let tf = m.tangential_trace(f)?;
        let dpsi = metric::exterior_derivative(m.boundary().complex(), psi)?;
        let diff = (tf.values() - dpsi.values()).amax();
        ratio(diff, (k + 1) as f64 * f_max.max(psi.max_abs()))
    } else {
        0.0
    };

    let mut harmonic_mismatch = 0.0f64;
    let f_norm = m.norm(f);
    let psi_norm = psi.values().norm();
    for lambda in &hodge.harmonic_basis(k, BoundaryCondition::Dirichlet)?.basis {
        let nt = m.normal_trace(lambda)?;
        let lhs = m.inner_product(f, lambda)?;
        let rhs = psi.values().dot(nt.values());
        let scale = f_norm + psi_norm * nt.values().norm();
        harmonic_mismatch = harmonic_mismatch.max(ratio((lhs - rhs).abs(), scale));
    }

    let violated: Vec<Violation> = [
        (Condition::Closedness, closedness),
        (Condition::TraceCompatibility, trace_mismatch),
        (Condition::HarmonicPairing, harmonic_mismatch),
    ]
    .into_iter()
    .filter(|&(_, v)| v > INTEGRABILITY_RTOL)
    .map(|(condition, magnitude)| Violation { condition, magnitude })
    .collect();

    let mut verdict = IntegrabilityVerdict {
        solvable: violated.is_empty(),
        closedness,
        trace_mismatch,
        harmonic_mismatch,
        violated,
        witness: None,
        residual: None,
    };
    if verdict.solvable {
        let (e, residual) = witness(hodge, f, psi)?;
        verdict.witness = Some(e);
        verdict.residual = Some(residual);
    }
    Ok(verdict)
}

fn witness(hodge: &Hodge, f: &Cochain, psi: &Cochain) -> Result<(Cochain, f64)> {
    let m = hodge.metric();
    let k = f.degree();
    let e_b = m.extend_by_zero(psi)?;
    let d = m.derivative_matrix(k - 1);
    let interior = m.interior_indices(k - 1);
    let rhs = f.values() - &d * e_b.values();
    let mut values = e_b.values().clone();
    if !interior.is_empty() {
        let di = linalg::select_columns(&d, interior);
        let x = lstsq(di, &rhs)?;
        for (&i, v) in interior.iter().zip(x.iter()) {
            values[i] = *v;
        }
    }
    let e = m.wrap(k - 1, values);
    let residual = ratio((m.exterior_derivative(&e)?.values() - f.values()).amax(), f.max_abs());
    if residual > WITNESS_RTOL {
        return Err(Error::SolverFailure(residual));
    }
    Ok((e, residual))
}

fn lstsq(a: DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    svd.solve(b, linalg::PINV_RTOL * smax)
        .map_err(|e| Error::FactorizationFailure(e.to_string()))
}
