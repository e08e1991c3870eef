use serde::Serialize;

use super::{BoundaryCondition, Hodge, COMPLEMENT_RTOL};
use crate::error::{Error, Result};
use crate::metric::{Cochain, MetricStructure};

/// M-norms of the four components and of the input.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentNorms {
    pub input: f64,
    pub d_alpha: f64,
    pub delta_beta: f64,
    pub delta_gamma: f64,
    pub lambda_t: f64,
}

/// `c = dα + δβ + δγ + λ_T`.
#[derive(Clone, Debug, PartialEq)]
pub struct HmfComponents {
    pub degree: usize,
    /// `d` of a zero-trace (k-1)-cochain.
    pub d_alpha: Cochain,
    /// Algebraic `δ` of a (k+1)-cochain.
    pub delta_beta: Cochain,
    /// The part of the harmonic remainder orthogonal to the Dirichlet fields.
    pub delta_gamma: Cochain,
    /// Dirichlet harmonic part.
    pub lambda_t: Cochain,
    pub norms: ComponentNorms,
    /// `‖c − Σ components‖ / ‖c‖`.
    pub reconstruction_residual: f64,
    /// M-inner products of `[d_alpha, delta_beta, delta_gamma, lambda_t]`.
    pub gram: [[f64; 4]; 4],
}

impl HmfComponents {
    pub fn components(&self) -> [&Cochain; 4] {
        [&self.d_alpha, &self.delta_beta, &self.delta_gamma, &self.lambda_t]
    }

    /// Largest off-diagonal Gram entry relative to `‖c‖²`.
    pub fn orthogonality_defect(&self) -> f64 {
        let scale = self.norms.input.powi(2);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    worst = worst.max(self.gram[i][j].abs() / scale);
                }
            }
        }
        worst
    }
}

/// Both Friedrichs splittings of a harmonic remainder.
#[derive(Clone, Debug, PartialEq)]
pub struct FriedrichsSplit {
    pub lambda_t: Cochain,
    pub delta_gamma: Cochain,
    pub lambda_n: Cochain,
    pub d_epsilon: Cochain,
    /// Relative M-norm of the part of the input lying in exact ⊕ coexact.
    pub leakage: f64,
}

fn relative(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

impl Hodge {
    fn apply(&self, p: &nalgebra::DMatrix<f64>, c: &Cochain) -> Cochain {
        self.metric().wrap(c.degree(), p * c.values())
    }

    /// Orthogonal splitting into exact (zero-trace potential), coexact
    /// (natural boundary condition), Dirichlet-harmonic and remaining harmonic parts.
    pub fn hodge_morrey_friedrichs(&self, c: &Cochain) -> Result<HmfComponents> {
        let m = self.metric();
        m.check(c)?;
        let k = c.degree();
        let p = self.projectors(k);
        let d_alpha = self.apply(&p.exact_interior, c);
        let delta_beta = self.apply(&p.coexact, c);
        let h = &(c - &d_alpha) - &delta_beta;
        let lambda_t = self.harmonic_basis(k, BoundaryCondition::Dirichlet)?.project(m, &h)?;
        let delta_gamma = &h - &lambda_t;
        let parts = [&d_alpha, &delta_beta, &delta_gamma, &lambda_t];
        let mut gram = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                gram[i][j] = m.inner_product(parts[i], parts[j])?;
            }
        }
        let input = m.norm(c);
        let sum = &(&(&d_alpha + &delta_beta) + &delta_gamma) + &lambda_t;
        let reconstruction_residual = relative(m.norm(&(c - &sum)), input);
        Ok(HmfComponents {
            degree: k,
            norms: ComponentNorms {
                input,
                d_alpha: m.norm(&d_alpha),
                delta_beta: m.norm(&delta_beta),
                delta_gamma: m.norm(&delta_gamma),
                lambda_t: m.norm(&lambda_t),
            },
            d_alpha,
            delta_beta,
            delta_gamma,
            lambda_t,
            reconstruction_residual,
            gram,
        })
    }

    /// Splits `h` as `λ_T + δγ` and as `λ_N + dε` by projection onto the
    /// Dirichlet and Neumann bases. `h` must be orthogonal to exact ⊕ coexact.
    pub fn friedrichs_split(&self, h: &Cochain) -> Result<FriedrichsSplit> {
        let m = self.metric();
        m.check(h)?;
        let k = h.degree();
        let leakage = self.complement_leakage(m, h);
        if leakage > COMPLEMENT_RTOL {
            return Err(Error::NotInHarmonicComplement(leakage));
        }
        let lambda_t = self.harmonic_basis(k, BoundaryCondition::Dirichlet)?.project(m, h)?;
        let lambda_n = self.harmonic_basis(k, BoundaryCondition::Neumann)?.project(m, h)?;
        Ok(FriedrichsSplit {
            delta_gamma: h - &lambda_t,
            d_epsilon: h - &lambda_n,
            lambda_t,
            lambda_n,
            leakage,
        })
    }

    fn complement_leakage(&self, m: &MetricStructure, h: &Cochain) -> f64 {
        let p = self.projectors(h.degree());
        let e = self.apply(&p.exact_interior, h);
        let c = self.apply(&p.coexact, h);
        relative(m.norm(&e) + m.norm(&c), m.norm(h))
    }

    /// M-projection onto `d` of all (k-1)-cochains.
    pub fn exact_part(&self, c: &Cochain) -> Result<Cochain> {
        self.metric().check(c)?;
        Ok(self.apply(&self.projectors(c.degree()).exact_full, c))
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
    fn exact_input_stays_exact() {
        let h = hodge(Shape::Disk, 3);
        let m = h.metric();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut a = Cochain::random(m.complex(), 0, &mut rng);
        for &(p, _) in m.boundary().inclusion(0) {
            let mut v = a.values().clone();
            v[p] = 0.0;
            a = m.wrap(0, v);
        }
        let c = m.exterior_derivative(&a).unwrap();
        let d = h.hodge_morrey_friedrichs(&c).unwrap();
        assert!(d.norms.delta_beta + d.norms.delta_gamma + d.norms.lambda_t < 1e-8 * d.norms.input);
        assert!((d.norms.d_alpha - d.norms.input).abs() < 1e-8 * d.norms.input);
    }

    #[test]
    fn random_annulus_cochain_splits_orthogonally() {
        let h = hodge(Shape::Annulus, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = Cochain::random(h.metric().complex(), 1, &mut rng);
        let d = h.hodge_morrey_friedrichs(&c).unwrap();
        assert!(d.reconstruction_residual < 1e-8);
        assert!(d.orthogonality_defect() < 1e-8);
        assert!(d.norms.lambda_t > 1e-3);
    }

    #[test]
    fn friedrichs_rejects_exact_input_and_reconstructs_mixtures() {
        let h = hodge(Shape::Annulus, 2);
        let m = h.metric();
        let lt = &h.harmonic_basis(1, BoundaryCondition::Dirichlet).unwrap().basis[0];
        let ln = &h.harmonic_basis(1, BoundaryCondition::Neumann).unwrap().basis[0];
        let mix = &lt.scaled(0.7) + &ln.scaled(-1.3);
        let s = h.friedrichs_split(&mix).unwrap();
        assert!(m.norm(&(&(&s.lambda_t + &s.delta_gamma) - &mix)) < 1e-8);
        assert!(m.norm(&(&(&s.lambda_n + &s.d_epsilon) - &mix)) < 1e-8);
        let s = h.friedrichs_split(ln).unwrap();
        assert!(m.norm(&s.d_epsilon) < 1e-8);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let exact = m
            .exterior_derivative(&Cochain::random(m.complex(), 0, &mut rng))
            .unwrap();
        assert!(matches!(
            h.friedrichs_split(&exact),
            Err(Error::NotInHarmonicComplement(_))
        ));
    }
}
