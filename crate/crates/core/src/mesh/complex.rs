use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Sparse integer matrix stored column by column, entries in {-1, +1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Incidence {
    rows: usize,
    columns: Vec<Vec<(usize, i8)>>,
}

impl Incidence {
    pub fn new(rows: usize, columns: Vec<Vec<(usize, i8)>>) -> Self {
        Self { rows, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[(usize, i8)] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<(usize, i8)>] {
        &self.columns
    }

    /// `self · x`, mapping column space to row space.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, s) in col {
                out[i] += f64::from(s) * x[j];
            }
        }
        out
    }

    /// `selfᵀ · y`, mapping row space to column space.
    pub fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        self.columns
            .iter()
            .map(|col| col.iter().map(|&(i, s)| f64::from(s) * y[i]).sum())
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols());
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, s) in col {
                m[(i, j)] = f64::from(s);
            }
        }
        m
    }

    /// Exact integer product `self · rhs`, returned column-wise with zero entries dropped.
    pub fn compose(&self, rhs: &Incidence) -> Vec<Vec<(usize, i64)>> {
        assert_eq!(self.cols(), rhs.rows, "incompatible shapes");
        rhs.columns
            .iter()
            .map(|col| {
                let mut acc: HashMap<usize, i64> = HashMap::new();
                for &(mid, s) in col {
                    for &(i, t) in &self.columns[mid] {
                        *acc.entry(i).or_default() += i64::from(s) * i64::from(t);
                    }
                }
                let mut v: Vec<_> = acc.into_iter().filter(|&(_, x)| x != 0).collect();
                v.sort_unstable();
                v
            })
            .collect()
    }
}

/// How top-simplex orientation signs are obtained during construction.
#[derive(Clone, Debug)]
pub(crate) enum OrientationSource {
    /// Propagate across shared faces, seeding each component with the parity of its input tuple.
    Infer,
    /// Use these signs (aligned with the input list, relative to the input tuple order).
    Given(Vec<i8>),
}

/// An oriented simplicial complex with canonical (lexicographic) simplex ordering.
///
/// Every k-simplex with k < n is oriented by its sorted vertex tuple. Top
/// simplices carry an extra sign, folded into the top boundary matrix, so a
/// top-degree cochain value refers to the oriented simplex.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    id: u64,
    dimension: usize,
    vertices: Vec<Vec<f64>>,
    simplices: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
    orientation: Vec<i8>,
    boundary: Vec<Incidence>,
    orientation_conflict: Option<Vec<usize>>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.dimension == other.dimension
            && self.vertices == other.vertices
            && self.simplices == other.simplices
            && self.orientation == other.orientation
    }
}

/// Permutation parity of sorting `tuple` (+1 even, -1 odd).
pub(crate) fn sort_parity(tuple: &[usize]) -> i8 {
    let mut sign = 1i8;
    for i in 0..tuple.len() {
        for j in i + 1..tuple.len() {
            if tuple[i] > tuple[j] {
                sign = -sign;
            }
        }
    }
    sign
}

fn subsets(tuple: &[usize], size: usize, out: &mut BTreeSet<Vec<usize>>) {
    fn rec(t: &[usize], size: usize, start: usize, cur: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        if cur.len() == size {
            out.insert(cur.clone());
            return;
        }
        for i in start..t.len() {
            if t.len() - i < size - cur.len() {
                break;
            }
            cur.push(t[i]);
            rec(t, size, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(tuple, size, 0, &mut Vec::with_capacity(size), out);
}

impl SimplicialComplex {
    /// Builds a complex from its top simplices, rejecting non-orientable input.
    pub fn build(top_simplices: &[Vec<usize>], vertex_coords: &[Vec<f64>]) -> Result<Self> {
        if top_simplices.is_empty() {
            return Err(Error::InvalidMesh("no simplices".into()));
        }
        let n = top_simplices[0].len().saturating_sub(1);
        Self::assemble(n, top_simplices, vertex_coords, OrientationSource::Infer, true)
    }

    /// Like [`build`](Self::build) but keeps the input orientation when no
    /// consistent one exists, so that validation can report the problem.
    pub fn build_lenient(top_simplices: &[Vec<usize>], vertex_coords: &[Vec<f64>]) -> Result<Self> {
        if top_simplices.is_empty() {
            return Err(Error::InvalidMesh("no simplices".into()));
        }
        let n = top_simplices[0].len().saturating_sub(1);
        Self::assemble(n, top_simplices, vertex_coords, OrientationSource::Infer, false)
    }

    pub(crate) fn assemble(
        dimension: usize,
        top_simplices: &[Vec<usize>],
        vertex_coords: &[Vec<f64>],
        source: OrientationSource,
        strict: bool,
    ) -> Result<Self> {
        let nv = vertex_coords.len();
        if let Some(d) = vertex_coords.first().map(Vec::len) {
            if vertex_coords.iter().any(|v| v.len() != d) {
                return Err(Error::InvalidMesh(
                    "vertices have inconsistent coordinate lengths".into(),
                ));
            }
            if d < dimension {
                return Err(Error::InvalidMesh(format!(
                    "ambient dimension {d} is smaller than simplex dimension {dimension}"
                )));
            }
        }
        if vertex_coords.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("vertex coordinates"));
        }

        // (sorted tuple, input sign)
        let mut tops: Vec<(Vec<usize>, i8)> = Vec::with_capacity(top_simplices.len());
        for (pos, s) in top_simplices.iter().enumerate() {
            if s.len() != dimension + 1 {
                return Err(Error::InvalidMesh(format!(
                    "simplex {s:?} has {} vertices, expected {}",
                    s.len(),
                    dimension + 1
                )));
            }
            if let Some(&bad) = s.iter().find(|&&v| v >= nv) {
                return Err(Error::DanglingVertexIndex {
                    simplex: s.clone(),
                    index: bad,
                    count: nv,
                });
            }
            let mut sorted = s.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidMesh(format!("simplex {s:?} repeats a vertex")));
            }
            let given = match &source {
                OrientationSource::Infer => 1,
                OrientationSource::Given(signs) => signs[pos],
            };
            tops.push((sorted, given * sort_parity(s)));
        }
        tops.sort();
        for w in tops.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateSimplex(w[0].0.clone()));
            }
        }

        let mut simplices: Vec<Vec<Vec<usize>>> = Vec::with_capacity(dimension + 1);
        if dimension == 0 {
            simplices.push(tops.iter().map(|t| t.0.clone()).collect());
        } else {
            simplices.push((0..nv).map(|v| vec![v]).collect());
            for k in 1..dimension {
                let mut set = BTreeSet::new();
                for (t, _) in &tops {
                    subsets(t, k + 1, &mut set);
                }
                simplices.push(set.into_iter().collect());
            }
            simplices.push(tops.iter().map(|t| t.0.clone()).collect());
        }
        let index: Vec<HashMap<Vec<usize>, usize>> = simplices
            .iter()
            .map(|list| list.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();

        let mut boundary = vec![Incidence::new(0, Vec::new())];
        for k in 1..=dimension {
            let cols = simplices[k]
                .iter()
                .map(|s| {
                    let mut col: Vec<(usize, i8)> = (0..s.len())
                        .map(|i| {
                            let mut face = s.clone();
                            face.remove(i);
                            let sign = if i % 2 == 0 { 1 } else { -1 };
                            (index[k - 1][&face], sign)
                        })
                        .collect();
                    col.sort_unstable();
                    col
                })
                .collect();
            boundary.push(Incidence::new(simplices[k - 1].len(), cols));
        }

        let supplied: Vec<i8> = tops.iter().map(|t| t.1).collect();
        let (orientation, conflict) = match (&source, dimension) {
            (_, 0) => (supplied, None),
            (OrientationSource::Infer, _) => propagate_orientation(&boundary[dimension], &supplied, true),
            (OrientationSource::Given(_), _) => propagate_orientation(&boundary[dimension], &supplied, false),
        };
        if strict {
            if let Some(face) = &conflict {
                return Err(Error::NonOrientable(simplices[dimension - 1][face[0]].clone()));
            }
        }
        if dimension > 0 {
            let top = &mut boundary[dimension];
            for (j, col) in top.columns.iter_mut().enumerate() {
                for e in col.iter_mut() {
                    e.1 *= orientation[j];
                }
            }
        }
        let orientation_conflict = conflict.map(|f| {
            if dimension > 0 {
                simplices[dimension - 1][f[0]].clone()
            } else {
                Vec::new()
            }
        });

        Ok(Self {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            dimension,
            vertices: vertex_coords.to_vec(),
            simplices,
            index,
            orientation,
            boundary,
            orientation_conflict,
        })
    }

    /// Empty complex of the given dimension (used for the boundary of a closed manifold).
    pub(crate) fn empty(dimension: usize, ambient: usize) -> Self {
        let _ = ambient;
        Self {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            dimension,
            vertices: Vec::new(),
            simplices: vec![Vec::new(); dimension + 1],
            index: vec![HashMap::new(); dimension + 1],
            orientation: Vec::new(),
            boundary: (0..=dimension).map(|_| Incidence::new(0, Vec::new())).collect(),
            orientation_conflict: None,
        }
    }

    /// Identity tag shared by clones; cochains use it to detect mixing complexes.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn ambient_dimension(&self) -> usize {
        self.vertices.first().map_or(0, Vec::len)
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn simplices(&self, k: usize) -> &[Vec<usize>] {
        &self.simplices[k]
    }

    pub fn num_simplices(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, Vec::len)
    }

    /// Simplex counts for degrees 0..=n.
    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.iter().all(Vec::is_empty)
    }

    /// Canonical index of a simplex given by any permutation of its vertices.
    pub fn index_of(&self, simplex: &[usize]) -> Option<usize> {
        let k = simplex.len().checked_sub(1)?;
        let mut s = simplex.to_vec();
        s.sort_unstable();
        self.index.get(k)?.get(&s).copied()
    }

    /// Orientation signs of the top simplices relative to their sorted tuples.
    pub fn orientation(&self) -> &[i8] {
        &self.orientation
    }

    /// Boundary matrix `∂_k` of shape (#(k-1)-simplices × #k-simplices), for 1 ≤ k ≤ n.
    pub fn boundary(&self, k: usize) -> &Incidence {
        assert!(k >= 1 && k <= self.dimension, "boundary degree {k} out of range");
        &self.boundary[k]
    }

    /// Face where orientation propagation failed, if the complex was built leniently.
    pub fn orientation_conflict(&self) -> Option<&[usize]> {
        self.orientation_conflict.as_deref()
    }

    /// Top simplices with orientation applied: the sorted tuple, with the first two
    /// vertices swapped when the sign is negative.
    pub fn oriented_top_simplices(&self) -> Vec<Vec<usize>> {
        let n = self.dimension;
        self.simplices[n]
            .iter()
            .zip(&self.orientation)
            .map(|(s, &o)| {
                let mut t = s.clone();
                if o < 0 && t.len() >= 2 {
                    t.swap(0, 1);
                }
                t
            })
            .collect()
    }

    /// For each (n-1)-simplex, the top simplices that contain it.
    pub fn facet_cofaces(&self) -> Vec<Vec<usize>> {
        let n = self.dimension;
        let mut cof = vec![Vec::new(); self.num_simplices(n.saturating_sub(1))];
        if n == 0 {
            return cof;
        }
        for (j, col) in self.boundary[n].columns().iter().enumerate() {
            for &(i, _) in col {
                cof[i].push(j);
            }
        }
        cof
    }

    /// Returns a copy with vertices relabelled by `perm` (old index `v` becomes `perm[v]`).
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        let mut coords = vec![Vec::new(); self.vertices.len()];
        for (v, c) in self.vertices.iter().enumerate() {
            coords[perm[v]] = c.clone();
        }
        let tops: Vec<Vec<usize>> = self
            .oriented_top_simplices()
            .into_iter()
            .map(|s| s.into_iter().map(|v| perm[v]).collect())
            .collect();
        Self::assemble(self.dimension, &tops, &coords, OrientationSource::Infer, true)
    }
}

/// Propagates top orientations across (n-1)-faces shared by exactly two top simplices.
///
/// Returns the signs and the first conflicting face (as a one-element vector of its index).
fn propagate_orientation(top: &Incidence, supplied: &[i8], infer: bool) -> (Vec<i8>, Option<Vec<usize>>) {
    let m = top.cols();
    let mut cofaces: Vec<Vec<(usize, i8)>> = vec![Vec::new(); top.rows()];
    for (j, col) in top.columns().iter().enumerate() {
        for &(i, s) in col {
            cofaces[i].push((j, s));
        }
    }
    if !infer {
        let conflict = cofaces.iter().enumerate().find_map(|(face, cf)| {
            (cf.len() == 2 && supplied[cf[0].0] * cf[0].1 != -supplied[cf[1].0] * cf[1].1).then(|| vec![face])
        });
        return (supplied.to_vec(), conflict);
    }
    let mut orient = vec![0i8; m];
    let mut conflict = None;
    for seed in 0..m {
        if orient[seed] != 0 {
            continue;
        }
        orient[seed] = supplied[seed];
        let mut queue = VecDeque::from([seed]);
        while let Some(t) = queue.pop_front() {
            for &(face, s) in top.column(t) {
                let cf = &cofaces[face];
                if cf.len() != 2 {
                    continue;
                }
                let &(other, so) = if cf[0].0 == t { &cf[1] } else { &cf[0] };
                let want = -orient[t] * s * so;
                if orient[other] == 0 {
                    orient[other] = want;
                    queue.push_back(other);
                } else if orient[other] != want && conflict.is_none() {
                    conflict = Some(vec![face]);
                }
            }
        }
    }
    if conflict.is_some() {
        return (supplied.to_vec(), conflict);
    }
    (orient, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> SimplicialComplex {
        SimplicialComplex::build(&[vec![0, 1, 2]], &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn single_triangle_counts_and_column_sums() {
        let c = tri();
        assert_eq!(c.counts(), vec![3, 3, 1]);
        let b1 = c.boundary(1).to_dense();
        assert_eq!(b1.shape(), (3, 3));
        for j in 0..3 {
            assert_eq!(b1.column(j).sum(), 0.0);
        }
    }

    #[test]
    fn tetrahedron_surface_is_closed_chain() {
        let tops = vec![vec![0, 1, 2], vec![0, 3, 1], vec![0, 2, 3], vec![1, 3, 2]];
        let coords = vec![
            vec![0.0; 3],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let c = SimplicialComplex::build(&tops, &coords).unwrap();
        assert_eq!(c.counts(), vec![4, 6, 4]);
        assert!(c.boundary(1).compose(c.boundary(2)).iter().all(Vec::is_empty));
        // consistent orientation: the sum of oriented triangles has zero boundary
        let ones = vec![1.0; 4];
        assert!(c.boundary(2).apply(&ones).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn rejects_bad_input() {
        let coords = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(matches!(
            SimplicialComplex::build(&[vec![0, 1, 2], vec![2, 1, 0]], &coords),
            Err(Error::DuplicateSimplex(_))
        ));
        assert!(matches!(
            SimplicialComplex::build(&[vec![0, 1, 5]], &coords),
            Err(Error::DanglingVertexIndex { index: 5, .. })
        ));
    }

    #[test]
    fn canonical_ordering_is_deterministic() {
        let coords: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let a = SimplicialComplex::build(&[vec![0, 1, 2], vec![1, 3, 2]], &coords).unwrap();
        let b = SimplicialComplex::build(&[vec![3, 2, 1], vec![2, 0, 1]], &coords).unwrap();
        assert_eq!(a.simplices(1), b.simplices(1));
        assert_eq!(a.boundary(1), b.boundary(1));
        assert_eq!(a.oriented_top_simplices().len(), 2);
    }

    #[test]
    fn parity() {
        assert_eq!(sort_parity(&[0, 1, 2]), 1);
        assert_eq!(sort_parity(&[1, 0, 2]), -1);
        assert_eq!(sort_parity(&[2, 0, 1]), 1);
    }
}
