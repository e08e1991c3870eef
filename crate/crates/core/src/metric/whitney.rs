//! Lowest-order Whitney-form mass matrices.
//!
//! The Whitney form of a k-face `[i_0 … i_k]` is
//! `k! Σ_j (-1)^j λ_{i_j} dλ_{i_0} ∧ … ∧ \widehat{dλ_{i_j}} ∧ … ∧ dλ_{i_k}`.
//! Pointwise inner products of wedges of gradients are Gram determinants, and
//! `∫_T λ_a λ_b = |T| (1 + δ_ab) / ((n+1)(n+2))`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::mesh::geometry::{barycentric_gradient_gram, simplex_volume};
use crate::mesh::SimplicialComplex;

/// All `size`-subsets of `0..n`, in lexicographic order.
pub(crate) fn local_faces(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, size, 0, &mut Vec::new(), &mut out);
    out
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn minor_det(g: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    if rows.is_empty() {
        return 1.0;
    }
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| g[(rows[i], cols[j])]).determinant()
}

/// Local mass matrix of Whitney k-forms on one simplex (faces in [`local_faces`] order).
pub fn local_mass(k: usize, gram: &DMatrix<f64>, volume: f64) -> DMatrix<f64> {
    let n = gram.nrows() - 1;
    let faces = local_faces(n + 1, k + 1);
    let lam = |a: usize, b: usize| volume * if a == b { 2.0 } else { 1.0 } / ((n + 1) * (n + 2)) as f64;
    let scale = factorial(k).powi(2);
    let mut m = DMatrix::zeros(faces.len(), faces.len());
    for (p, s) in faces.iter().enumerate() {
        for (q, t) in faces.iter().enumerate().skip(p) {
            let mut acc = 0.0;
            for (i, &si) in s.iter().enumerate() {
                let rows: Vec<usize> = s.iter().copied().filter(|&x| x != si).collect();
                for (j, &tj) in t.iter().enumerate() {
                    let cols: Vec<usize> = t.iter().copied().filter(|&x| x != tj).collect();
                    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    acc += sign * lam(si, tj) * minor_det(gram, &rows, &cols);
                }
            }
            m[(p, q)] = scale * acc;
            m[(q, p)] = scale * acc;
        }
    }
    m
}

/// Global mass matrices for degrees 0..=n.
pub fn assemble_mass(c: &SimplicialComplex) -> Result<Vec<DMatrix<f64>>> {
    let n = c.dimension();
    let mut mass: Vec<DMatrix<f64>> = (0..=n)
        .map(|k| DMatrix::zeros(c.num_simplices(k), c.num_simplices(k)))
        .collect();
    let faces: Vec<Vec<Vec<usize>>> = (0..=n).map(|k| local_faces(n + 1, k + 1)).collect();
    for top in c.simplices(n) {
        let pts: Vec<&[f64]> = top.iter().map(|&v| c.vertices()[v].as_slice()).collect();
        let vol = simplex_volume(&pts);
        let gram = barycentric_gradient_gram(&pts)
            .filter(|_| vol > 0.0)
            .ok_or_else(|| Error::InvalidMesh(format!("degenerate simplex {top:?}")))?;
        for k in 0..=n {
            let local = local_mass(k, &gram, vol);
            let global: Vec<usize> = faces[k]
                .iter()
                .map(|f| {
                    let verts: Vec<usize> = f.iter().map(|&i| top[i]).collect();
                    c.index_of(&verts).expect("face of top simplex")
                })
                .collect();
            for (p, &gp) in global.iter().enumerate() {
                for (q, &gq) in global.iter().enumerate() {
                    mass[k][(gp, gq)] += local[(p, q)];
                }
            }
        }
    }
    Ok(mass)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram_of(pts: &[&[f64]]) -> (DMatrix<f64>, f64) {
        (barycentric_gradient_gram(pts).unwrap(), simplex_volume(pts))
    }

    #[test]
    fn top_degree_mass_is_inverse_volume() {
        let tri: [&[f64]; 3] = [&[0.0, 0.0], &[2.0, 0.0], &[0.3, 1.1]];
        let (g, v) = gram_of(&tri);
        assert!((local_mass(2, &g, v)[(0, 0)] - 1.0 / v).abs() < 1e-12 / v);
        let seg: [&[f64]; 2] = [&[0.0], &[3.0]];
        let (g, v) = gram_of(&seg);
        assert!((local_mass(1, &g, v)[(0, 0)] - 1.0 / 3.0).abs() < 1e-14);
        let tet: [&[f64]; 4] = [&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.2, 0.1, 1.0]];
        let (g, v) = gram_of(&tet);
        assert!((local_mass(3, &g, v)[(0, 0)] * v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vertex_mass_row_sums_are_volume_over_n_plus_one() {
        let tri: [&[f64]; 3] = [&[0.0, 0.0], &[1.0, 0.0], &[0.0, 2.0]];
        let (g, v) = gram_of(&tri);
        let m = local_mass(0, &g, v);
        for i in 0..3 {
            assert!((m.row(i).sum() - v / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn edge_mass_matches_quadrature() {
        // Independent check: integrate the Whitney 1-forms of the reference
        // triangle with a 3-point rule exact for quadratics.
        let tri: [&[f64]; 3] = [&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]];
        let (g, v) = gram_of(&tri);
        let m = local_mass(1, &g, v);
        let grads = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
        let whitney = |e: [usize; 2], l: [f64; 3]| {
            let (a, b) = (e[0], e[1]);
            [
                l[a] * grads[b][0] - l[b] * grads[a][0],
                l[a] * grads[b][1] - l[b] * grads[a][1],
            ]
        };
        let edges = [[0, 1], [0, 2], [1, 2]];
        let qp = [
            [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
            [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
            [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
        ];
        for (p, &ep) in edges.iter().enumerate() {
            for (q, &eq) in edges.iter().enumerate() {
                let quad: f64 = qp
                    .iter()
                    .map(|&l| {
                        let (x, y) = (whitney(ep, l), whitney(eq, l));
                        (x[0] * y[0] + x[1] * y[1]) * v / 3.0
                    })
                    .sum();
                assert!((quad - m[(p, q)]).abs() < 1e-14, "({p},{q}): {quad} vs {}", m[(p, q)]);
            }
        }
    }
}
