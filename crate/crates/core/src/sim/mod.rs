//! Implicit-midpoint time integration of Stokes-Dirac systems.

mod trace;

use std::ops::AddAssign;

use nalgebra::{DMatrix, DVector, LU};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use trace::{Snapshot, Trace, TraceRow};

use crate::error::{Error, Result};
use crate::hodge::{BoundaryCondition, Hodge};
use crate::linalg;
use crate::metric::Cochain;
use crate::stokesdirac::StokesDiracSystem;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    #[default]
    ImplicitMidpoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// Entries uniform in [-1, 1) from a ChaCha8 stream.
    Random { seed: u64 },
    /// One Neumann harmonic field. `degree == p` seeds `α_p`; `degree == q` or
    /// `p - 1` seeds `b = ⋆α_q` with the dual (p-1)-field.
    HarmonicSeeded {
        degree: usize,
        index: usize,
        amplitude: f64,
    },
    /// `b = exp(-|x - x_c|² / 2w²)` at barycenters of (p-1)-simplices, `α_p = 0`.
    GaussianBump { center: usize, width: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub dt: f64,
    pub steps: usize,
    pub integrator: Integrator,
    pub init: InitialState,
    /// Keep a snapshot every `stride` steps; 0 disables snapshots.
    pub stride: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            steps: 1000,
            integrator: Integrator::ImplicitMidpoint,
            init: InitialState::Random { seed: 0 },
            stride: 0,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be positive".into()));
        }
        Ok(())
    }

    /// Builds the initial system described by [`init`](Self::init).
    pub fn initial_system<'h>(&self, hodge: &'h Hodge, p: usize, q: usize) -> Result<StokesDiracSystem<'h>> {
        initial_system(hodge, p, q, &self.init)
    }
}

pub fn initial_system<'h>(hodge: &'h Hodge, p: usize, q: usize, init: &InitialState) -> Result<StokesDiracSystem<'h>> {
    let zero = StokesDiracSystem::zero(hodge, p, q)?;
    let m = hodge.metric();
    let c = m.complex();
    match *init {
        InitialState::Random { seed } => StokesDiracSystem::random(hodge, p, q, &mut ChaCha8Rng::seed_from_u64(seed)),
        InitialState::HarmonicSeeded {
            degree,
            index,
            amplitude,
        } => {
            let k = if degree == p {
                p
            } else if degree == q || degree + 1 == p {
                p - 1
            } else {
                return Err(Error::InvalidConfig(format!(
                    "harmonic seed degree {degree} is neither p = {p} nor q = {q}"
                )));
            };
            let basis = hodge.harmonic_basis(k, BoundaryCondition::Neumann)?;
            let field = basis.basis.get(index).ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "harmonic index {index} out of range (dimension {})",
                    basis.dim()
                ))
            })?;
            let field = field.scaled(amplitude);
            if k == p {
                zero.with_state(field, zero.e_q().clone())
            } else {
                zero.with_state(zero.alpha_p().clone(), field)
            }
        }
        InitialState::GaussianBump { center, width } => {
            if center >= c.num_simplices(0) {
                return Err(Error::InvalidConfig(format!("center vertex {center} out of range")));
            }
            if !(width.is_finite() && width > 0.0) {
                return Err(Error::InvalidConfig(format!("width must be positive, got {width}")));
            }
            let x = c.vertices();
            let xc = &x[center];
            let values = c
                .simplices(p - 1)
                .iter()
                .map(|s| {
                    let r2: f64 = (0..xc.len())
                        .map(|i| {
                            let bary = s.iter().map(|&v| x[v][i]).sum::<f64>() / s.len() as f64;
                            (bary - xc[i]).powi(2)
                        })
                        .sum();
                    (-r2 / (2.0 * width * width)).exp()
                })
                .collect();
            zero.with_state(zero.alpha_p().clone(), Cochain::new(c, p - 1, values)?)
        }
    }
}

/// The factorized midpoint operator for one `(system, dt)`.
///
/// The unknowns are `z = (α_p, b_I)`; boundary entries of `b` stay fixed and
/// enter as the forcing `g = (-σ D_B b_B, 0)`, so that `ż = A z + g` with
/// `A = [[0, -σ D_I], [σ M_II⁻¹ D_Iᵀ M, 0]]`.
#[derive(Debug)]
pub struct MidpointStepper<'h> {
    hodge: &'h Hodge,
    p: usize,
    q: usize,
    dt: f64,
    interior: Vec<usize>,
    boundary: Vec<usize>,
    a: DMatrix<f64>,
    d_b: DMatrix<f64>,
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    sign: f64,
}

impl<'h> MidpointStepper<'h> {
    /// `dt` may be negative, which integrates backwards in time.
    pub fn new(hodge: &'h Hodge, p: usize, q: usize, dt: f64) -> Result<Self> {
        if !dt.is_finite() || dt == 0.0 {
            return Err(Error::InvalidConfig(format!("dt must be finite and nonzero, got {dt}")));
        }
        let sign = StokesDiracSystem::zero(hodge, p, q)?.sign();
        let m = hodge.metric();
        let np = m.complex().num_simplices(p);
        let interior = m.interior_indices(p - 1).to_vec();
        let boundary: Vec<usize> = m.boundary().inclusion(p - 1).iter().map(|&(i, _)| i).collect();
        let d = m.derivative_matrix(p - 1);
        let d_i = linalg::select_columns(&d, &interior);
        let d_b = linalg::select_columns(&d, &boundary);
        let ni = interior.len();
        let mut a = DMatrix::zeros(np + ni, np + ni);
        a.view_mut((0, np), (np, ni)).copy_from(&(&d_i * -sign));
        if ni > 0 {
            let m_ii = linalg::submatrix(m.mass(p - 1), &interior, &interior);
            let rhs = d_i.transpose() * m.mass(p);
            let lower = linalg::cholesky(&m_ii, "interior mass matrix")?.solve(&rhs);
            a.view_mut((np, 0), (ni, np)).copy_from(&(lower * sign));
        }
        let n = np + ni;
        let op = DMatrix::identity(n, n) - &a * (0.5 * dt);
        let lu = op.lu();
        if !lu.is_invertible() {
            return Err(Error::FactorizationFailure("singular midpoint operator".into()));
        }
        Ok(Self {
            hodge,
            p,
            q,
            dt,
            interior,
            boundary,
            a,
            d_b,
            lu,
            sign,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// The generator `A` of `ż = A z + g`.
    pub fn generator(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// Power-iteration estimate of the spectral radius of `A`.
    pub fn spectral_radius(&self) -> f64 {
        let n = self.a.nrows();
        if n == 0 {
            return 0.0;
        }
        let a2 = &self.a * &self.a;
        let mut x = DVector::from_fn(n, |i, _| 1.0 + (i % 7) as f64 / 7.0);
        let mut rho2 = 0.0;
        for _ in 0..200 {
            let y = &a2 * &x;
            let ny = y.norm();
            if ny == 0.0 {
                return 0.0;
            }
            rho2 = ny / x.norm();
            x = y / ny;
        }
        rho2.sqrt()
    }

    fn pack(&self, sys: &StokesDiracSystem<'_>) -> DVector<f64> {
        let a = sys.alpha_p().values();
        let b = sys.e_q().values();
        DVector::from_iterator(
            a.len() + self.interior.len(),
            a.iter().copied().chain(self.interior.iter().map(|&i| b[i])),
        )
    }

    pub fn step(&self, sys: &StokesDiracSystem<'h>) -> Result<StokesDiracSystem<'h>> {
        if sys.degrees() != (self.p, self.q) {
            return Err(Error::InvalidDegrees {
                p: sys.degrees().0,
                q: sys.degrees().1,
                n: self.hodge.dimension(),
            });
        }
        let m = self.hodge.metric();
        let np = sys.alpha_p().len();
        let z0 = self.pack(sys);
        let b = sys.e_q().values();
        let b_b = DVector::from_iterator(self.boundary.len(), self.boundary.iter().map(|&i| b[i]));
        let mut rhs = &z0 + &self.a * &z0 * (0.5 * self.dt);
        if !self.boundary.is_empty() {
            let g = &self.d_b * b_b * (-self.sign * self.dt);
            rhs.rows_mut(0, np).add_assign(&g);
        }
        let z1 = self
            .lu
            .solve(&rhs)
            .ok_or_else(|| Error::FactorizationFailure("midpoint solve".into()))?;
        if z1.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("midpoint step"));
        }
        let alpha = m.wrap(self.p, z1.rows(0, np).into_owned());
        let mut b1 = b.clone();
        for (k, &i) in self.interior.iter().enumerate() {
            b1[i] = z1[np + k];
        }
        sys.with_state(alpha, m.wrap(self.p - 1, b1))
    }
}

/// One implicit-midpoint step. Loops should build a [`MidpointStepper`] once instead.
pub fn step_implicit_midpoint<'h>(sys: &StokesDiracSystem<'h>, dt: f64) -> Result<StokesDiracSystem<'h>> {
    let (p, q) = sys.degrees();
    MidpointStepper::new(sys.hodge(), p, q, dt)?.step(sys)
}

/// `(t, H, residual, boundary power, harmonic coefficients)` for one state; the
/// residual is the instantaneous power balance residual.
fn row(sys: &StokesDiracSystem<'_>, t: f64, dhdt_residual: Option<f64>) -> Result<TraceRow> {
    let h = sys.hodge();
    let m = h.metric();
    let (p, _) = sys.degrees();
    let bal = sys.power_balance()?;
    Ok(TraceRow {
        t,
        h: sys.hamiltonian(),
        dhdt_residual: dhdt_residual.unwrap_or(bal.balance_residual),
        boundary_power: bal.boundary_term,
        harm_p: h
            .harmonic_basis(p, BoundaryCondition::Neumann)?
            .coefficients(m, sys.alpha_p())?,
        harm_q: h
            .harmonic_basis(p - 1, BoundaryCondition::Neumann)?
            .coefficients(m, sys.e_q())?,
    })
}

/// Integrates `steps` midpoint steps from `sys`. Row `i > 0` records
/// `|ΔH/Δt − P(midpoint)|` relative to the midpoint power scale.
pub fn run<'h>(sys: &StokesDiracSystem<'h>, config: &SimulationConfig) -> Result<Trace> {
    config.validate()?;
    let (p, q) = sys.degrees();
    let stepper = MidpointStepper::new(sys.hodge(), p, q, config.dt)?;
    let rho = stepper.spectral_radius();
    let mut rows = vec![row(sys, 0.0, None)?];
    let mut snapshots = Vec::new();
    let snap = |i: usize, s: &StokesDiracSystem<'_>, out: &mut Vec<Snapshot>| {
        if config.stride > 0 && i.is_multiple_of(config.stride) {
            out.push(Snapshot {
                step: i,
                t: i as f64 * config.dt,
                alpha_p: s.alpha_p().clone(),
                e_q: s.e_q().clone(),
            });
        }
    };
    snap(0, sys, &mut snapshots);
    let mut cur = sys.clone();
    for i in 1..=config.steps {
        let next = stepper.step(&cur)?;
        let mid = cur.with_state(
            (cur.alpha_p() + next.alpha_p()).scaled(0.5),
            (cur.e_q() + next.e_q()).scaled(0.5),
        )?;
        let bal = mid.power_balance()?;
        let dh = (next.hamiltonian() - cur.hamiltonian()) / config.dt;
        let residual = if bal.scale > 0.0 {
            (dh - bal.boundary_term).abs() / bal.scale
        } else {
            (dh - bal.boundary_term).abs()
        };
        rows.push(row(&next, i as f64 * config.dt, Some(residual))?);
        snap(i, &next, &mut snapshots);
        cur = next;
    }
    Ok(Trace {
        p,
        q,
        dt: config.dt,
        spectral_radius: rho,
        dt_spectral_radius: config.dt * rho,
        rows,
        snapshots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{gen_mesh, Shape};
    use crate::metric::MetricStructure;

    fn hodge(shape: Shape, r: usize) -> Hodge {
        Hodge::new(MetricStructure::new(gen_mesh(shape, r).unwrap()).unwrap())
    }

    #[test]
    fn zero_state_stays_zero() {
        let h = hodge(Shape::Disk, 2);
        let sys = StokesDiracSystem::zero(&h, 1, 2).unwrap();
        let next = step_implicit_midpoint(&sys, 0.01).unwrap();
        assert_eq!((next.alpha_p().max_abs(), next.e_q().max_abs()), (0.0, 0.0));
    }

    #[test]
    fn one_step_conserves_energy_on_torus() {
        let h = hodge(Shape::Torus, 4);
        let sys = initial_system(&h, 1, 2, &InitialState::Random { seed: 3 }).unwrap();
        let next = step_implicit_midpoint(&sys, 0.01).unwrap();
        let (h0, h1) = (sys.hamiltonian(), next.hamiltonian());
        assert!((h1 - h0).abs() <= 1e-11 * h0);
        assert!(next.alpha_p() != sys.alpha_p());
    }

    #[test]
    fn step_is_linear() {
        let h = hodge(Shape::Annulus, 1);
        let sys = initial_system(&h, 1, 2, &InitialState::Random { seed: 4 }).unwrap();
        let stepper = MidpointStepper::new(&h, 1, 2, 0.05).unwrap();
        let a = -2.5;
        let scaled = sys.with_state(sys.alpha_p().scaled(a), sys.e_q().scaled(a)).unwrap();
        let (x, y) = (stepper.step(&scaled).unwrap(), stepper.step(&sys).unwrap());
        let diff = (x.alpha_p() - &y.alpha_p().scaled(a)).max_abs() + (x.e_q() - &y.e_q().scaled(a)).max_abs();
        assert!(diff <= 1e-12 * y.alpha_p().max_abs().max(1.0) * a.abs());
    }

    #[test]
    fn backward_step_inverts_forward_step() {
        let h = hodge(Shape::Disk, 2);
        let sys = initial_system(&h, 1, 2, &InitialState::Random { seed: 5 }).unwrap();
        let fwd = MidpointStepper::new(&h, 1, 2, 0.02).unwrap();
        let bwd = MidpointStepper::new(&h, 1, 2, -0.02).unwrap();
        let back = bwd.step(&fwd.step(&sys).unwrap()).unwrap();
        assert!((back.alpha_p() - sys.alpha_p()).max_abs() < 1e-12);
        assert!((back.e_q() - sys.e_q()).max_abs() < 1e-12);
    }

    #[test]
    fn bounded_mesh_tracks_boundary_power() {
        let h = hodge(Shape::Disk, 2);
        let sys = initial_system(&h, 1, 2, &InitialState::GaussianBump { center: 0, width: 0.3 }).unwrap();
        let cfg = SimulationConfig {
            steps: 50,
            stride: 10,
            ..Default::default()
        };
        let tr = run(&sys, &cfg).unwrap();
        assert_eq!(tr.rows.len(), 51);
        assert_eq!(tr.snapshots.len(), 6);
        assert!(tr.max_dhdt_residual() <= 1e-8, "{}", tr.max_dhdt_residual());
        assert!(tr.rows.iter().any(|r| r.boundary_power.abs() > 1e-8));
    }

    #[test]
    fn harmonic_seed_stays_in_class_on_torus() {
        let h = hodge(Shape::Torus, 4);
        let init = InitialState::HarmonicSeeded {
            degree: 1,
            index: 0,
            amplitude: 1.0,
        };
        let mut sys = initial_system(&h, 1, 2, &init).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let b = Cochain::random(h.metric().complex(), 0, &mut rng);
        sys = sys.with_state(sys.alpha_p().clone(), b).unwrap();
        let cfg = SimulationConfig {
            steps: 100,
            ..Default::default()
        };
        let tr = run(&sys, &cfg).unwrap();
        assert!((tr.rows[0].harm_p[0] - 1.0).abs() < 1e-10);
        assert!(tr.max_harmonic_drift() <= 1e-8);
        assert!(tr.max_relative_energy_drift() <= 1e-10);
    }

    #[test]
    fn invalid_configs() {
        let h = hodge(Shape::Disk, 1);
        let bad = InitialState::HarmonicSeeded {
            degree: 1,
            index: 0,
            amplitude: 1.0,
        };
        assert!(matches!(initial_system(&h, 1, 2, &bad), Err(Error::InvalidConfig(_))));
        let cfg = SimulationConfig {
            dt: -1.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
