//! Affine simplex geometry in arbitrary ambient dimension.

use nalgebra::{DMatrix, DVector};

fn edge_matrix(pts: &[&[f64]]) -> DMatrix<f64> {
    let d = pts[0].len();
    let k = pts.len() - 1;
    DMatrix::from_fn(d, k, |r, c| pts[c + 1][r] - pts[0][r])
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// k-dimensional volume of the simplex spanned by `pts` (k+1 points).
pub fn simplex_volume(pts: &[&[f64]]) -> f64 {
    if pts.len() <= 1 {
        return 1.0;
    }
    let e = edge_matrix(pts);
    let g = e.transpose() * &e;
    g.determinant().max(0.0).sqrt() / factorial(pts.len() - 1)
}

/// Inner products of the barycentric gradients, `G[i][j] = ⟨∇λ_i, ∇λ_j⟩`,
/// for a non-degenerate simplex with vertices `pts`.
pub fn barycentric_gradient_gram(pts: &[&[f64]]) -> Option<DMatrix<f64>> {
    let n = pts.len() - 1;
    if n == 0 {
        return Some(DMatrix::zeros(1, 1));
    }
    let e = edge_matrix(pts);
    let ginv = (e.transpose() * &e).try_inverse()?;
    // λ_i for i ≥ 1 has gradient coefficients e_i in the dual basis; λ_0 = 1 - Σ λ_i.
    let b = DMatrix::from_fn(n, n + 1, |r, c| match c {
        0 => -1.0,
        _ if c == r + 1 => 1.0,
        _ => 0.0,
    });
    Some(b.transpose() * ginv * b)
}

/// Circumcenter of a simplex, in ambient coordinates, and its barycentric coordinates.
pub fn circumcenter(pts: &[&[f64]]) -> Option<(Vec<f64>, Vec<f64>)> {
    let k = pts.len() - 1;
    if k == 0 {
        return Some((pts[0].to_vec(), vec![1.0]));
    }
    let e = edge_matrix(pts);
    let g = e.transpose() * &e;
    // c = x0 + E a with (E a - e_i/2)·e_i... i.e. G a = diag(G)/2
    let rhs = DVector::from_fn(k, |i, _| g[(i, i)] / 2.0);
    let a = g.lu().solve(&rhs)?;
    let mut c = pts[0].to_vec();
    for (r, cr) in c.iter_mut().enumerate() {
        *cr += (0..k).map(|j| e[(r, j)] * a[j]).sum::<f64>();
    }
    let mut bary = Vec::with_capacity(k + 1);
    bary.push(1.0 - a.sum());
    bary.extend(a.iter().copied());
    Some((c, bary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_right_triangle() {
        let p: [&[f64]; 3] = [&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]];
        assert!((simplex_volume(&p) - 0.5).abs() < 1e-15);
        let g = barycentric_gradient_gram(&p).unwrap();
        // ∇λ1 = (1,0), ∇λ2 = (0,1), ∇λ0 = (-1,-1)
        assert!((g[(0, 0)] - 2.0).abs() < 1e-14);
        assert!((g[(1, 2)]).abs() < 1e-14);
        assert!((g[(0, 1)] + 1.0).abs() < 1e-14);
        let (c, bary) = circumcenter(&p).unwrap();
        assert!((c[0] - 0.5).abs() < 1e-14 && (c[1] - 0.5).abs() < 1e-14);
        assert!(bary[0].abs() < 1e-14);
    }

    #[test]
    fn embedded_triangle_area() {
        let p: [&[f64]; 3] = [&[0.0, 0.0, 0.0], &[1.0, 0.0, 1.0], &[0.0, 2.0, 0.0]];
        assert!((simplex_volume(&p) - 2f64.sqrt()).abs() < 1e-14);
    }
}
