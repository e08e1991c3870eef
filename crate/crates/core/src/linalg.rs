//! Dense linear-algebra kernels shared by the operators.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative eigenvalue threshold below which a Laplacian eigenvalue counts as zero.
pub const KERNEL_RTOL: f64 = 1e-9;
/// Required separation factor on both sides of the kernel cutoff.
pub const KERNEL_GAP: f64 = 10.0;
/// Relative eigenvalue threshold of the pseudoinverse.
pub const PINV_RTOL: f64 = 1e-10;

pub fn cholesky(m: &DMatrix<f64>, what: &str) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(m.clone()).ok_or_else(|| Error::FactorizationFailure(format!("{what} is not positive definite")))
}

fn symmetrize(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

/// Moore-Penrose pseudoinverse of a symmetric positive semidefinite matrix.
pub fn sym_pinv(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let mut s = a.clone();
    symmetrize(&mut s);
    let eig = SymmetricEigen::new(s);
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let mut out = DMatrix::zeros(n, n);
    for (i, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam.abs() > PINV_RTOL * max {
            let v = eig.eigenvectors.column(i);
            out += (v * v.transpose()) / lam;
        }
    }
    out
}

/// M-orthonormal basis of `{x : L x = 0}` for symmetric PSD `L` and SPD `M`,
/// via the eigenvalues of `C⁻¹ L C⁻ᵀ` where `M = C Cᵀ`.
pub fn generalized_kernel(lap: &DMatrix<f64>, mass: &DMatrix<f64>, degree: usize) -> Result<Vec<DVector<f64>>> {
    let n = lap.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let chol = cholesky(mass, "mass matrix")?;
    let c = chol.l();
    let tmp = c
        .solve_lower_triangular(lap)
        .ok_or_else(|| Error::FactorizationFailure("triangular solve".into()))?;
    let mut a = c
        .solve_lower_triangular(&tmp.transpose())
        .ok_or_else(|| Error::FactorizationFailure("triangular solve".into()))?;
    symmetrize(&mut a);
    let eig = SymmetricEigen::new(a);
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let mut basis = Vec::new();
    if max == 0.0 {
        for i in 0..n {
            basis.push(eig.eigenvectors.column(i).into_owned());
        }
    } else {
        let cutoff = KERNEL_RTOL * max;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        for &i in &order {
            let lam = eig.eigenvalues[i];
            if lam > cutoff / KERNEL_GAP && lam < cutoff * KERNEL_GAP {
                return Err(Error::AmbiguousKernel {
                    degree,
                    eigenvalue: lam,
                    cutoff,
                });
            }
            if lam < cutoff {
                basis.push(eig.eigenvectors.column(i).into_owned());
            }
        }
    }
    let ct = c.transpose();
    Ok(basis
        .into_iter()
        .map(|y| fix_sign(ct.solve_upper_triangular(&y).expect("triangular solve")))
        .collect())
}

/// M-orthogonal projector onto the column space of `a`: `A (AᵀMA)⁺ AᵀM`.
pub fn range_projector(a: &DMatrix<f64>, mass: &DMatrix<f64>) -> DMatrix<f64> {
    if a.ncols() == 0 {
        return DMatrix::zeros(mass.nrows(), mass.nrows());
    }
    let ma = mass * a;
    let g = a.transpose() * &ma;
    a * sym_pinv(&g) * ma.transpose()
}

/// Re-orthonormalizes `vectors` against `mass` (Cholesky of the Gram matrix),
/// then flips each so its largest-magnitude entry is positive.
pub fn m_orthonormalize(vectors: Vec<DVector<f64>>, mass: &DMatrix<f64>) -> Result<Vec<DVector<f64>>> {
    if vectors.is_empty() {
        return Ok(vectors);
    }
    let x = DMatrix::from_columns(&vectors);
    let gram = x.transpose() * mass * &x;
    let l = cholesky(&gram, "harmonic Gram matrix")?.l();
    let q = l
        .solve_lower_triangular(&x.transpose())
        .ok_or_else(|| Error::FactorizationFailure("triangular solve".into()))?
        .transpose();
    Ok(q.column_iter().map(|c| fix_sign(c.into_owned())).collect())
}

pub(crate) fn fix_sign(mut x: DVector<f64>) -> DVector<f64> {
    let (imax, _) = x.iter().enumerate().fold(
        (0, 0.0),
        |(bi, bv), (i, &v)| {
            if v.abs() > bv + 1e-12 {
                (i, v.abs())
            } else {
                (bi, bv)
            }
        },
    );
    if !x.is_empty() && x[imax] < 0.0 {
        x.neg_mut();
    }
    x
}

/// Embeds a vector on a subset of indices into a full-length vector.
pub fn scatter(sub: &DVector<f64>, indices: &[usize], len: usize) -> DVector<f64> {
    let mut out = DVector::zeros(len);
    for (v, &i) in sub.iter().zip(indices) {
        out[i] = *v;
    }
    out
}

/// Rows and columns of `m` restricted to `rows × cols`.
pub fn submatrix(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Columns of `m` restricted to `cols`.
pub fn select_columns(m: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), cols.len(), |i, j| m[(i, cols[j])])
}
