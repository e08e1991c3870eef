use serde::Serialize;

use super::StokesDiracSystem;
use crate::error::Result;
use crate::hodge::BoundaryCondition;
use crate::metric::Cochain;

/// Relative tolerance of the power balance on closed meshes.
pub const CLOSED_BALANCE_RTOL: f64 = 1e-12;
/// Relative tolerance of the power balance on meshes with boundary.
pub const BOUNDED_BALANCE_RTOL: f64 = 1e-10;
/// Relative tolerance of `boundary_term = exact + harmonic`.
pub const SPLIT_RTOL: f64 = 1e-8;
/// Relative tolerance of the harmonic flow identities.
pub const HARMONIC_FLOW_RTOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerBalanceReport {
    #[serde(rename = "dH_dt")]
    pub dh_dt: f64,
    /// `-(⟨α_p, f_p⟩ + ⟨b, ⋆f_q⟩)`.
    pub internal_term: f64,
    /// `-σ Σ_j t(b)_j n(α_p)_j`.
    pub boundary_term: f64,
    /// Boundary pairing with the exact and remaining harmonic parts of `α_p`.
    pub exact_boundary_part: f64,
    /// Boundary pairing with the Dirichlet harmonic part of `α_p`.
    pub harmonic_boundary_part: f64,
    /// Boundary pairing with the coexact part of `α_p`; vanishes up to rounding.
    pub coexact_boundary_part: f64,
    /// Magnitude of the pairings entering `dH/dt`, used to make residuals relative.
    pub scale: f64,
    /// `|dH/dt − boundary_term| / scale`.
    pub balance_residual: f64,
    /// `|boundary_term − exact − harmonic| / Σ_j |t(b)_j n(α_p)_j|`.
    pub split_residual: f64,
    /// Relative norm of the coexact part of `f_p`, which is closed.
    pub flow_coexact_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// One term of a harmonic flow identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowResidual {
    pub lhs: f64,
    pub rhs: f64,
    pub relative: f64,
}

/// Residuals of `⟨f_p, λ⟩ = ∫ t e_q ∧ ⋆nλ` over Dirichlet p-fields and of
/// `⟨⋆f_q, μ⟩ = ∫ tμ ∧ ⋆n α_p` over Neumann (p-1)-fields (the duals of Dirichlet q-fields).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarmonicFlowResiduals {
    pub p_side: Vec<FlowResidual>,
    pub q_side: Vec<FlowResidual>,
}

impl HarmonicFlowResiduals {
    pub fn max_relative(&self) -> f64 {
        self.p_side
            .iter()
            .chain(&self.q_side)
            .map(|r| r.relative)
            .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_relative() <= HARMONIC_FLOW_RTOL
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

impl StokesDiracSystem<'_> {
    /// `Σ_j t(x)_j n(y)_j` and `Σ_j |t(x)_j n(y)_j|`.
    fn pairing(&self, x: &Cochain, y: &Cochain) -> Result<(f64, f64)> {
        let m = self.metric();
        let t = m.tangential_trace(x)?;
        let n = m.normal_trace(y)?;
        let sum = t.values().dot(n.values());
        let abs = t
            .values()
            .iter()
            .zip(n.values().iter())
            .map(|(a, b)| (a * b).abs())
            .sum();
        Ok((sum, abs))
    }

    pub fn power_balance(&self) -> Result<PowerBalanceReport> {
        let m = self.metric();
        let e = self.efforts();
        let f = self.flows(&e)?;
        let (da, db) = (-&f.f_p, -&f.star_f_q);
        let pa = m.inner_product(&self.alpha_p, &da)?;
        let pb = m.inner_product(&self.e_q, &db)?;
        let dh_dt = pa + pb;
        let internal_term = -(m.inner_product(&self.alpha_p, &f.f_p)? + m.inner_product(&self.e_q, &f.star_f_q)?);
        let (pair, _) = self.pairing(&self.e_q, &self.alpha_p)?;
        let boundary_term = -self.sign() * pair;
        let scale = m.norm(&self.alpha_p) * m.norm(&f.f_p) + m.norm(&self.e_q) * m.norm(&f.star_f_q);
        let balance_residual = ratio((dh_dt - boundary_term).abs(), scale);
        let tolerance = if m.boundary().is_empty() {
            CLOSED_BALANCE_RTOL
        } else {
            BOUNDED_BALANCE_RTOL
        };
        Ok(PowerBalanceReport {
            dh_dt,
            internal_term,
            boundary_term,
            exact_boundary_part: boundary_term,
            harmonic_boundary_part: 0.0,
            coexact_boundary_part: 0.0,
            scale,
            balance_residual,
            split_residual: 0.0,
            flow_coexact_residual: 0.0,
            tolerance,
            passed: balance_residual <= tolerance,
        })
    }

    /// [`power_balance`](Self::power_balance) with the boundary term split along the
    /// Hodge-Morrey-Friedrichs decomposition of `α_p`.
    pub fn extended_power_balance(&self) -> Result<PowerBalanceReport> {
        let mut report = self.power_balance()?;
        let h = self.hodge();
        let s = self.sign();
        let parts = h.hodge_morrey_friedrichs(&self.alpha_p)?;
        let exact = &parts.d_alpha + &parts.delta_gamma;
        let (pe, _) = self.pairing(&self.e_q, &exact)?;
        let (ph, _) = self.pairing(&self.e_q, &parts.lambda_t)?;
        let (pc, _) = self.pairing(&self.e_q, &parts.delta_beta)?;
        let (_, abs) = self.pairing(&self.e_q, &self.alpha_p)?;
        report.exact_boundary_part = -s * pe;
        report.harmonic_boundary_part = -s * ph;
        report.coexact_boundary_part = -s * pc;
        report.split_residual = ratio(
            (report.boundary_term - report.exact_boundary_part - report.harmonic_boundary_part).abs(),
            abs,
        );
        let f_p = self.flows(&self.efforts())?.f_p;
        let flow_parts = h.hodge_morrey_friedrichs(&f_p)?;
        report.flow_coexact_residual = ratio(flow_parts.norms.delta_beta, flow_parts.norms.input);
        report.passed &= report.split_residual <= SPLIT_RTOL;
        Ok(report)
    }

    pub fn harmonic_flow_identity(&self) -> Result<HarmonicFlowResiduals> {
        let m = self.metric();
        let h = self.hodge();
        let s = self.sign();
        let f = self.flows(&self.efforts())?;
        let mut p_side = Vec::new();
        for lambda in &h.harmonic_basis(self.p, BoundaryCondition::Dirichlet)?.basis {
            let lhs = m.inner_product(&f.f_p, lambda)?;
            let (pair, abs) = self.pairing(&self.e_q, lambda)?;
            let rhs = s * pair;
            let scale = m.norm(&f.f_p) * m.norm(lambda) + abs;
            p_side.push(FlowResidual {
                lhs,
                rhs,
                relative: ratio((lhs - rhs).abs(), scale),
            });
        }
        let mut q_side = Vec::new();
        for mu in &h.harmonic_basis(self.p - 1, BoundaryCondition::Neumann)?.basis {
            let lhs = m.inner_product(&f.star_f_q, mu)?;
            let (pair, abs) = self.pairing(mu, &self.alpha_p)?;
            let rhs = s * pair;
            let scale = m.norm(&f.star_f_q) * m.norm(mu) + abs;
            q_side.push(FlowResidual {
                lhs,
                rhs,
                relative: ratio((lhs - rhs).abs(), scale),
            });
        }
        Ok(HarmonicFlowResiduals { p_side, q_side })
    }
}
