use serde::Serialize;

use super::complex::SimplicialComplex;
use super::geometry::simplex_volume;

/// One problem found while checking that a complex is an oriented simplicial ∂-manifold.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Finding {
    /// An (n-1)-simplex with more than two top cofaces.
    ExcessCofaces { face: Vec<usize>, cofaces: usize },
    /// Orientation propagation failed across this face.
    NonOrientable { face: Vec<usize> },
    /// The top simplices around this simplex are not connected through shared facets.
    NonManifoldLink { simplex: Vec<usize> },
    /// A vertex not referenced by any top simplex.
    IsolatedVertex { vertex: usize },
    /// A top simplex with (numerically) zero volume.
    DegenerateSimplex { simplex: Vec<usize> },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Checks pseudo-manifold structure, link connectivity, orientability and non-degeneracy.
pub fn validate_manifold(c: &SimplicialComplex) -> ValidationReport {
    let mut findings = Vec::new();
    let n = c.dimension();
    if n == 0 {
        return ValidationReport { findings };
    }
    let cofaces = c.facet_cofaces();
    for (f, cf) in cofaces.iter().enumerate() {
        if cf.len() > 2 {
            findings.push(Finding::ExcessCofaces {
                face: c.simplices(n - 1)[f].clone(),
                cofaces: cf.len(),
            });
        }
    }
    if let Some(face) = c.orientation_conflict() {
        findings.push(Finding::NonOrientable { face: face.to_vec() });
    }

    // Star of each vertex: top simplices containing it.
    let mut star: Vec<Vec<usize>> = vec![Vec::new(); c.num_simplices(0)];
    for (t, s) in c.simplices(n).iter().enumerate() {
        for &v in s {
            star[v].push(t);
        }
    }
    for (v, st) in star.iter().enumerate() {
        if st.is_empty() {
            findings.push(Finding::IsolatedVertex { vertex: v });
        }
    }

    // Link connectivity for every simplex of dimension ≤ n-2: the top simplices
    // containing it must be connected through facets that also contain it.
    for k in 0..n.saturating_sub(1) {
        for s in c.simplices(k) {
            let around: Vec<usize> = star[s[0]]
                .iter()
                .copied()
                .filter(|&t| s.iter().all(|v| c.simplices(n)[t].contains(v)))
                .collect();
            if around.len() <= 1 {
                continue;
            }
            let mut seen = vec![false; around.len()];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(i) = stack.pop() {
                for (j, &tj) in around.iter().enumerate() {
                    if seen[j] {
                        continue;
                    }
                    let ti = &c.simplices(n)[around[i]];
                    let shared = c.simplices(n)[tj].iter().filter(|v| ti.contains(v)).count();
                    if shared == n {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            if seen.iter().any(|&x| !x) {
                findings.push(Finding::NonManifoldLink { simplex: s.clone() });
            }
        }
    }

    for s in c.simplices(n) {
        let pts: Vec<&[f64]> = s.iter().map(|&v| c.vertices()[v].as_slice()).collect();
        let vol = simplex_volume(&pts);
        let scale = pts
            .iter()
            .skip(1)
            .map(|p| p.iter().zip(pts[0]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        if vol.is_nan() || vol <= 1e-12 * scale.powi(n as i32) {
            findings.push(Finding::DegenerateSimplex { simplex: s.clone() });
        }
    }
    ValidationReport { findings }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_consistent_triangles_are_valid() {
        let coords = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
        let c = SimplicialComplex::build(&[vec![0, 1, 2], vec![0, 2, 3]], &coords).unwrap();
        assert!(validate_manifold(&c).is_valid());
    }

    #[test]
    fn three_triangles_on_one_edge() {
        let coords = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.5, 1.0, 0.0],
            vec![0.5, -1.0, 0.0],
            vec![0.5, 0.0, 1.0],
        ];
        let c = SimplicialComplex::build_lenient(&[vec![0, 1, 2], vec![1, 0, 3], vec![0, 1, 4]], &coords).unwrap();
        let r = validate_manifold(&c);
        assert!(r.findings.contains(&Finding::ExcessCofaces {
            face: vec![0, 1],
            cofaces: 3
        }));
    }

    #[test]
    fn mobius_strip_is_non_orientable() {
        // Five triangles on five vertices: the minimal Möbius band.
        let tops = vec![
            vec![0, 1, 2],
            vec![1, 2, 3],
            vec![2, 3, 4],
            vec![3, 4, 0],
            vec![4, 0, 1],
        ];
        let coords: Vec<Vec<f64>> = (0..5)
            .map(|i| {
                let t = i as f64 * std::f64::consts::TAU / 5.0;
                vec![t.cos(), t.sin(), (i % 2) as f64]
            })
            .collect();
        assert!(SimplicialComplex::build(&tops, &coords).is_err());
        let c = SimplicialComplex::build_lenient(&tops, &coords).unwrap();
        let r = validate_manifold(&c);
        assert!(r.findings.iter().any(|f| matches!(f, Finding::NonOrientable { .. })));
    }

    #[test]
    fn bowtie_vertex_is_not_a_manifold() {
        let coords = vec![
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![1.0, -1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
        ];
        let c = SimplicialComplex::build(&[vec![0, 2, 1], vec![0, 3, 4]], &coords).unwrap();
        let r = validate_manifold(&c);
        assert!(r.findings.contains(&Finding::NonManifoldLink { simplex: vec![0] }));
    }
}
