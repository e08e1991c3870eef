//! Real Betti numbers from exact ranks of the boundary matrices.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::complex::{Incidence, SimplicialComplex};
use crate::error::{Error, Result};

/// Entries larger than this many bits abort the exact elimination.
pub const EXACT_RANK_BIT_LIMIT: u64 = 4096;

/// Relative singular-value threshold of the floating-point rank fallback.
pub const FLOAT_RANK_RTOL: f64 = 1e-10;

type SparseRow = Vec<(usize, BigInt)>;

/// Rank over ℚ by fraction-free row elimination on sparse integer rows.
///
/// Each elimination step replaces `r ← p·r − a·pivot_row` and divides the
/// result by the gcd of its entries, so every intermediate is an integer row
/// spanning the same rational row space.
pub fn exact_rank(m: &Incidence) -> Result<usize> {
    // rows of mᵀ = columns of m; rank is the same
    let mut rows: Vec<SparseRow> = m
        .columns()
        .iter()
        .map(|c| c.iter().map(|&(i, s)| (i, BigInt::from(s))).collect())
        .filter(|r: &SparseRow| !r.is_empty())
        .collect();
    let mut rank = 0;
    while !rows.is_empty() {
        // pivot: row whose leading entry has the smallest magnitude, then fewest entries
        let lead = rows.iter().map(|r| r[0].0).min().unwrap();
        let pick = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r[0].0 == lead)
            .min_by(|(_, a), (_, b)| a[0].1.abs().cmp(&b[0].1.abs()).then(a.len().cmp(&b.len())))
            .map(|(i, _)| i)
            .unwrap();
        let pivot = rows.swap_remove(pick);
        rank += 1;
        let p = pivot[0].1.clone();
        let mut next = Vec::with_capacity(rows.len());
        for r in rows.drain(..) {
            if r[0].0 != lead {
                next.push(r);
                continue;
            }
            let a = r[0].1.clone();
            let g = p.gcd(&a);
            let (pm, am) = (&p / &g, &a / &g);
            let reduced = combine(&r, &pm, &pivot, &am);
            if reduced.is_empty() {
                continue;
            }
            if let Some(big) = reduced.iter().find(|(_, x)| x.bits() > EXACT_RANK_BIT_LIMIT) {
                return Err(Error::OverflowInExactArithmetic { bits: big.1.bits() });
            }
            next.push(reduced);
        }
        rows = next;
    }
    Ok(rank)
}

/// `pm·r − am·s`, divided by the content of the result.
fn combine(r: &SparseRow, pm: &BigInt, s: &SparseRow, am: &BigInt) -> SparseRow {
    let mut out = Vec::with_capacity(r.len() + s.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < s.len() {
        let (col, val) = match (r.get(i), s.get(j)) {
            (Some(x), Some(y)) if x.0 == y.0 => {
                i += 1;
                j += 1;
                (x.0, pm * &x.1 - am * &y.1)
            }
            (Some(x), Some(y)) if x.0 < y.0 => {
                i += 1;
                (x.0, pm * &x.1)
            }
            (Some(x), None) => {
                i += 1;
                (x.0, pm * &x.1)
            }
            (_, Some(y)) => {
                j += 1;
                (y.0, -(am * &y.1))
            }
            (None, None) => unreachable!(),
        };
        if !val.is_zero() {
            out.push((col, val));
        }
    }
    let content = out.iter().fold(BigInt::zero(), |g, (_, x)| g.gcd(x));
    if !content.is_zero() && !content.is_one() {
        for e in &mut out {
            e.1 /= &content;
        }
    }
    out
}

/// Numerical rank via SVD with threshold `FLOAT_RANK_RTOL · σ_max`.
pub fn float_rank(m: &Incidence) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    let dense: DMatrix<f64> = m.to_dense();
    let sv = dense.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > FLOAT_RANK_RTOL * smax).count()
}

fn betti_with(c: &SimplicialComplex, rank: impl Fn(&Incidence) -> Result<usize>) -> Result<Vec<usize>> {
    let n = c.dimension();
    let mut ranks = vec![0usize; n + 2];
    for (k, r) in ranks.iter_mut().enumerate().take(n + 1).skip(1) {
        *r = rank(c.boundary(k))?;
    }
    Ok((0..=n).map(|k| c.num_simplices(k) - ranks[k] - ranks[k + 1]).collect())
}

/// `b_k = #k-simplices − rank ∂_k − rank ∂_{k+1}` with exact ranks.
pub fn betti_numbers(c: &SimplicialComplex) -> Result<Vec<usize>> {
    betti_with(c, exact_rank)
}

/// Floating-point fallback for meshes beyond the exact oracle.
pub fn betti_numbers_float(c: &SimplicialComplex) -> Vec<usize> {
    betti_with(c, |m| Ok(float_rank(m))).expect("float rank is infallible")
}

/// Alternating sum of simplex counts.
pub fn euler_characteristic(c: &SimplicialComplex) -> i64 {
    c.counts()
        .iter()
        .enumerate()
        .map(|(k, &n)| if k % 2 == 0 { n as i64 } else { -(n as i64) })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_small_matrices() {
        // [[1,1],[1,-1]] has rank 2 over ℚ (determinant -2)
        let m = Incidence::new(2, vec![vec![(0, 1), (1, 1)], vec![(0, 1), (1, -1)]]);
        assert_eq!(exact_rank(&m).unwrap(), 2);
        assert_eq!(float_rank(&m), 2);
        let z = Incidence::new(3, vec![vec![], vec![]]);
        assert_eq!(exact_rank(&z).unwrap(), 0);
    }

    #[test]
    fn sphere_from_literal_boundary_matrices() {
        // The 4-vertex, 6-edge, 4-triangle sphere: ranks 3 and 3.
        let tops = vec![vec![0, 1, 2], vec![0, 3, 1], vec![0, 2, 3], vec![1, 3, 2]];
        let coords = vec![
            vec![0.0; 3],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let c = SimplicialComplex::build(&tops, &coords).unwrap();
        assert_eq!(exact_rank(c.boundary(1)).unwrap(), 3);
        assert_eq!(exact_rank(c.boundary(2)).unwrap(), 3);
        assert_eq!(betti_numbers(&c).unwrap(), vec![1, 0, 1]);
        assert_eq!(euler_characteristic(&c), 2);
    }
}
