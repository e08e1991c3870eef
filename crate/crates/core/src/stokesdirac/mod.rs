//! Stokes-Dirac systems on a discrete manifold with boundary.
//!
//! For degrees `p + q = n + 1` the energy variables are `α_p ∈ C^p` and
//! `α_q`. Only primal cochains are available, so `α_q` is carried by its Hodge
//! dual `b = ⋆α_q ∈ C^{p-1}`, which is also the effort `e_q`. The other effort
//! `e_p = ⋆α_p` is the Riesz functional of `α_p`. With `σ = (-1)^r`, `r = pq + 1`:
//!
//! - `f_p = σ d e_q` is a primal exact p-cochain;
//! - `⋆f_q = -σ δ_c α_p` lives in `C^{p-1}`, where `δ_c` is the constrained codifferential;
//! - the dynamics are `∂_t α_p = -f_p`, `∂_t b = -⋆f_q`, with the boundary values of `b` held
//!   fixed as the port input.
//!
//! Then `dH/dt = -σ (⟨d b, α_p⟩ − ⟨b, δ_c α_p⟩)`, the constrained Green defect, which is
//! a sum over boundary degrees of freedom only.

mod balance;
mod integrability;

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use balance::{
    FlowResidual, HarmonicFlowResiduals, PowerBalanceReport, BOUNDED_BALANCE_RTOL, CLOSED_BALANCE_RTOL,
    HARMONIC_FLOW_RTOL, SPLIT_RTOL,
};
pub use integrability::{
    integrability_check, Condition, IntegrabilityVerdict, Violation, INTEGRABILITY_RTOL, WITNESS_RTOL,
};

use crate::error::{Error, Result};
use crate::hodge::{check_degrees, Hodge};
use crate::metric::{Cochain, CochainFile, DualRepresentation, MetricStructure};

/// Efforts: `e_p = ⋆α_p` as a functional and `e_q = b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Efforts {
    pub e_p: DualRepresentation,
    pub e_q: Cochain,
}

/// Flows: the primal `f_p` and the dual representative `⋆f_q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Flows {
    pub f_p: Cochain,
    pub star_f_q: Cochain,
}

/// Boundary port variables, both of degree p-1 on the boundary complex.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPort {
    /// `t e_p = ⋆ n α_p`, the normal-trace functional of `α_p`.
    pub f_b: Cochain,
    /// `(-1)^p t e_q`.
    pub e_b: Cochain,
    /// `Σ_j e_b[j] f_b[j]` with the sign that makes it equal the boundary term.
    pub power: f64,
}

#[derive(Clone, Debug)]
pub struct StokesDiracSystem<'h> {
    hodge: &'h Hodge,
    p: usize,
    q: usize,
    alpha_p: Cochain,
    e_q: Cochain,
}

impl<'h> StokesDiracSystem<'h> {
    pub fn new(hodge: &'h Hodge, p: usize, q: usize, alpha_p: Cochain, e_q: Cochain) -> Result<Self> {
        check_degrees(p, q, hodge.dimension())?;
        let m = hodge.metric();
        alpha_p.ensure_on(m.complex().id(), p)?;
        e_q.ensure_on(m.complex().id(), p - 1)?;
        Ok(Self {
            hodge,
            p,
            q,
            alpha_p,
            e_q,
        })
    }

    pub fn zero(hodge: &'h Hodge, p: usize, q: usize) -> Result<Self> {
        let c = hodge.metric().complex();
        Self::new(
            hodge,
            p,
            q,
            Cochain::zeros(c, p),
            Cochain::zeros(c, p.saturating_sub(1)),
        )
    }

    /// Entries uniform in [-1, 1).
    pub fn random(hodge: &'h Hodge, p: usize, q: usize, rng: &mut impl Rng) -> Result<Self> {
        check_degrees(p, q, hodge.dimension())?;
        let c = hodge.metric().complex();
        let a = Cochain::random(c, p, rng);
        let b = Cochain::random(c, p - 1, rng);
        Self::new(hodge, p, q, a, b)
    }

    pub fn with_state(&self, alpha_p: Cochain, e_q: Cochain) -> Result<Self> {
        Self::new(self.hodge, self.p, self.q, alpha_p, e_q)
    }

    pub fn hodge(&self) -> &'h Hodge {
        self.hodge
    }

    pub fn metric(&self) -> &'h MetricStructure {
        self.hodge.metric()
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn alpha_p(&self) -> &Cochain {
        &self.alpha_p
    }

    /// `⋆α_q`, which is also the effort `e_q`.
    pub fn e_q(&self) -> &Cochain {
        &self.e_q
    }

    /// `r = pq + 1`.
    pub fn r(&self) -> usize {
        self.p * self.q + 1
    }

    /// `(-1)^r`.
    pub fn sign(&self) -> f64 {
        if self.r().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// `½(⟨α_p, α_p⟩ + ⟨b, b⟩)`.
    pub fn hamiltonian(&self) -> f64 {
        let m = self.metric();
        0.5 * (m.norm(&self.alpha_p).powi(2) + m.norm(&self.e_q).powi(2))
    }

    pub fn efforts(&self) -> Efforts {
        Efforts {
            e_p: self
                .metric()
                .hodge_star(&self.alpha_p)
                .expect("state belongs to the metric"),
            e_q: self.e_q.clone(),
        }
    }

    pub fn flows(&self, e: &Efforts) -> Result<Flows> {
        let m = self.metric();
        e.e_q.ensure_on(m.complex().id(), self.p - 1)?;
        if e.e_p.degree() != self.p {
            return Err(Error::DegreeMismatch {
                expected: self.p,
                found: e.e_p.degree(),
            });
        }
        let s = self.sign();
        Ok(Flows {
            f_p: m.exterior_derivative(&e.e_q)?.scaled(s),
            star_f_q: m.constrained_codifferential(e.e_p.primal())?.scaled(-s),
        })
    }

    /// `(∂_t α_p, ∂_t b) = (-f_p, -⋆f_q)`; the boundary entries of `∂_t b` are zero.
    pub fn time_derivative(&self) -> Result<(Cochain, Cochain)> {
        let f = self.flows(&self.efforts())?;
        Ok((-&f.f_p, -&f.star_f_q))
    }

    pub fn boundary_port(&self, e: &Efforts) -> Result<BoundaryPort> {
        let m = self.metric();
        let f_b = m.normal_trace(e.e_p.primal())?;
        let parity = if self.p.is_multiple_of(2) { 1.0 } else { -1.0 };
        let e_b = m.tangential_trace(&e.e_q)?.scaled(parity);
        let power = -self.sign() * parity * e_b.values().dot(f_b.values());
        Ok(BoundaryPort { f_b, e_b, power })
    }
}

/// State JSON: `{"p", "q", "alpha_p": cochain, "e_q": cochain}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub p: usize,
    pub q: usize,
    pub alpha_p: CochainFile,
    pub e_q: CochainFile,
}

impl StateFile {
    pub fn from_system(sys: &StokesDiracSystem<'_>) -> Self {
        Self {
            p: sys.p,
            q: sys.q,
            alpha_p: CochainFile::from_cochain(&sys.alpha_p),
            e_q: CochainFile::from_cochain(&sys.e_q),
        }
    }

    pub fn to_system<'h>(&self, hodge: &'h Hodge) -> Result<StokesDiracSystem<'h>> {
        let c = hodge.metric().complex();
        StokesDiracSystem::new(
            hodge,
            self.p,
            self.q,
            self.alpha_p.to_cochain(c)?,
            self.e_q.to_cochain(c)?,
        )
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{gen_mesh, Shape};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hodge(shape: Shape, r: usize) -> Hodge {
        Hodge::new(MetricStructure::new(gen_mesh(shape, r).unwrap()).unwrap())
    }

    #[test]
    fn sign_for_surfaces() {
        let h = hodge(Shape::Disk, 1);
        let sys = StokesDiracSystem::zero(&h, 1, 2).unwrap();
        assert_eq!((sys.r(), sys.sign()), (3, -1.0));
        assert!(StokesDiracSystem::zero(&h, 1, 1).is_err());
    }

    #[test]
    fn efforts_are_the_gradient_of_the_hamiltonian() {
        let h = hodge(Shape::Annulus, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sys = StokesDiracSystem::random(&h, 1, 2, &mut rng).unwrap();
        let c = h.metric().complex();
        let (va, vb) = (Cochain::random(c, 1, &mut rng), Cochain::random(c, 0, &mut rng));
        let eps = 1e-5;
        let plus = sys
            .with_state(&sys.alpha_p + &va.scaled(eps), &sys.e_q + &vb.scaled(eps))
            .unwrap();
        let minus = sys
            .with_state(&sys.alpha_p - &va.scaled(eps), &sys.e_q - &vb.scaled(eps))
            .unwrap();
        let fd = (plus.hamiltonian() - minus.hamiltonian()) / (2.0 * eps);
        let e = sys.efforts();
        let exact = e.e_p.pair(&va).unwrap() + h.metric().inner_product(&e.e_q, &vb).unwrap();
        assert!((fd - exact).abs() <= 1e-6 * exact.abs());
    }

    #[test]
    fn flows_of_constant_effort_vanish() {
        let h = hodge(Shape::Disk, 2);
        let c = h.metric().complex();
        let b = h
            .metric()
            .wrap(0, nalgebra::DVector::from_element(c.num_simplices(0), 2.5));
        let sys = StokesDiracSystem::new(&h, 1, 2, Cochain::zeros(c, 1), b).unwrap();
        assert_eq!(sys.flows(&sys.efforts()).unwrap().f_p.max_abs(), 0.0);
    }

    #[test]
    fn port_is_empty_on_closed_meshes() {
        let h = hodge(Shape::Torus, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sys = StokesDiracSystem::random(&h, 1, 2, &mut rng).unwrap();
        let port = sys.boundary_port(&sys.efforts()).unwrap();
        assert!(port.f_b.is_empty() && port.e_b.is_empty());
        assert_eq!(port.power, 0.0);
    }

    #[test]
    fn state_file_round_trip() {
        let h = hodge(Shape::Disk, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sys = StokesDiracSystem::random(&h, 2, 1, &mut rng).unwrap();
        let f = StateFile::from_system(&sys);
        let back: StateFile = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        let sys2 = back.to_system(&h).unwrap();
        assert_eq!(sys2.alpha_p(), sys.alpha_p());
        assert_eq!(sys2.e_q(), sys.e_q());
    }
}
