use super::complex::{OrientationSource, SimplicialComplex};
use crate::error::Result;

/// The boundary of a complex, with the inclusion maps back into its parent.
///
/// `inclusion[k][j] = (parent_index, sign)` maps boundary k-simplex `j` to the
/// parent k-simplex it came from. The sign is +1 except in the boundary's top
/// degree, where it carries the induced orientation so that restricting a
/// parent cochain yields values on the oriented boundary simplices.
#[derive(Clone, Debug)]
pub struct BoundaryComplex {
    complex: SimplicialComplex,
    parent_id: u64,
    parent_vertex: Vec<usize>,
    inclusion: Vec<Vec<(usize, i8)>>,
    on_boundary: Vec<Vec<bool>>,
}

impl BoundaryComplex {
    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn is_empty(&self) -> bool {
        self.complex.is_empty()
    }

    pub fn parent_id(&self) -> u64 {
        self.parent_id
    }

    /// Parent vertex index of each boundary vertex.
    pub fn parent_vertex(&self) -> &[usize] {
        &self.parent_vertex
    }

    /// Inclusion of boundary k-simplices (k ≤ n-1) into the parent.
    pub fn inclusion(&self, k: usize) -> &[(usize, i8)] {
        self.inclusion.get(k).map_or(&[], Vec::as_slice)
    }

    /// Mask over the parent's k-simplices marking those that lie on the boundary.
    pub fn on_boundary(&self, k: usize) -> &[bool] {
        &self.on_boundary[k]
    }

    /// Parent k-simplices not on the boundary, in canonical order.
    pub fn interior_indices(&self, k: usize) -> Vec<usize> {
        self.on_boundary[k]
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| (!b).then_some(i))
            .collect()
    }

    /// Number of connected components of the boundary (via its vertex-edge graph).
    pub fn connected_components(&self) -> usize {
        let c = &self.complex;
        let nv = c.num_simplices(0);
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        if c.dimension() >= 1 {
            for e in c.simplices(1) {
                let (a, b) = (find(&mut parent, e[0]), find(&mut parent, e[1]));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        (0..nv).filter(|&v| find(&mut parent, v) == v).count()
    }
}

/// Extracts the boundary: every (n-1)-simplex with exactly one top coface,
/// together with all of its faces, oriented by the induced (outward) sign.
pub fn extract_boundary(c: &SimplicialComplex) -> Result<BoundaryComplex> {
    let n = c.dimension();
    let mut on_boundary: Vec<Vec<bool>> = (0..=n).map(|k| vec![false; c.num_simplices(k)]).collect();
    if n == 0 {
        return Ok(BoundaryComplex {
            complex: SimplicialComplex::empty(0, c.ambient_dimension()),
            parent_id: c.id(),
            parent_vertex: Vec::new(),
            inclusion: Vec::new(),
            on_boundary,
        });
    }
    let top = c.boundary(n);
    let mut count = vec![0usize; top.rows()];
    let mut sign = vec![0i8; top.rows()];
    for col in top.columns() {
        for &(i, s) in col {
            count[i] += 1;
            sign[i] = s;
        }
    }
    let facets: Vec<usize> = (0..top.rows()).filter(|&i| count[i] == 1).collect();
    if facets.is_empty() {
        return Ok(BoundaryComplex {
            complex: SimplicialComplex::empty(n - 1, c.ambient_dimension()),
            parent_id: c.id(),
            parent_vertex: Vec::new(),
            inclusion: vec![Vec::new(); n],
            on_boundary,
        });
    }

    let mut used: Vec<usize> = facets
        .iter()
        .flat_map(|&f| c.simplices(n - 1)[f].iter().copied())
        .collect();
    used.sort_unstable();
    used.dedup();
    let mut compact = vec![usize::MAX; c.num_simplices(0)];
    for (i, &v) in used.iter().enumerate() {
        compact[v] = i;
    }
    let coords: Vec<Vec<f64>> = used.iter().map(|&v| c.vertices()[v].clone()).collect();
    let tops: Vec<Vec<usize>> = facets
        .iter()
        .map(|&f| c.simplices(n - 1)[f].iter().map(|&v| compact[v]).collect())
        .collect();
    let signs: Vec<i8> = facets.iter().map(|&f| sign[f]).collect();
    let bc = SimplicialComplex::assemble(n - 1, &tops, &coords, OrientationSource::Given(signs), true)?;

    let mut inclusion = Vec::with_capacity(n);
    for (k, mask) in on_boundary.iter_mut().enumerate().take(n) {
        let inc: Vec<(usize, i8)> = bc
            .simplices(k)
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let parent: Vec<usize> = s.iter().map(|&v| used[v]).collect();
                let pi = c.index_of(&parent).expect("boundary simplex missing from parent");
                let sgn = if k == n - 1 { bc.orientation()[j] } else { 1 };
                (pi, sgn)
            })
            .collect();
        for &(pi, _) in &inc {
            mask[pi] = true;
        }
        inclusion.push(inc);
    }
    Ok(BoundaryComplex {
        complex: bc,
        parent_id: c.id(),
        parent_vertex: used,
        inclusion,
        on_boundary,
    })
}
