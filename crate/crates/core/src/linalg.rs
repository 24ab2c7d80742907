//! Exact and floating-point rank and kernel computations.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Default relative tolerance for floating-point rank.
pub const DEFAULT_TOL_REL: f64 = 1e-9;

/// Clears denominators row by row so elimination can run over integers.
fn integer_rows(rows: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
        })
        .collect()
}

/// Exact rank by fraction-free (Bareiss) elimination.
pub fn rank_exact(rows: &[Vec<BigRational>]) -> usize {
    let mut m = integer_rows(rows);
    let height = m.len();
    let width = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut previous = BigInt::one();
    for col in 0..width {
        let Some(pivot) = (rank..height).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let (top, bottom) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in bottom.iter_mut() {
            let factor = row[col].clone();
            for j in col + 1..width {
                row[j] = (&pivot_row[col] * &row[j] - &factor * &pivot_row[j]) / &previous;
            }
            row[col] = BigInt::zero();
        }
        previous = pivot_row[col].clone();
        rank += 1;
        if rank == height {
            break;
        }
    }
    rank
}

/// Reduced row echelon form over the rationals; returns the pivot columns.
fn rref(rows: &mut [Vec<BigRational>], width: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let factor = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &factor * p;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

/// Exact rank by rational row reduction; slower than [`rank_exact`].
pub fn rank_rref(rows: &[Vec<BigRational>]) -> usize {
    let width = rows.first().map_or(0, Vec::len);
    rref(&mut rows.to_vec(), width).len()
}

/// A basis of the right kernel, one vector per free column.
pub fn kernel_exact(rows: &[Vec<BigRational>], width: usize) -> Vec<Vec<BigRational>> {
    let mut reduced = rows.to_vec();
    let pivots = rref(&mut reduced, width);
    let free: Vec<usize> = (0..width).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); width];
            v[f] = BigRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -reduced[r][f].clone();
            }
            v
        })
        .collect()
}

pub fn to_float_matrix(rows: &[Vec<BigRational>], width: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), width, |i, j| crate::surfaces::to_f64(&rows[i][j]))
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Number of singular values above `tol_rel` times the largest.
pub fn rank_float(m: &DMatrix<f64>, tol_rel: f64) -> usize {
    let sv = singular_values(m);
    let Some(&largest) = sv.first() else {
        return 0;
    };
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol_rel * largest).count()
}

/// Orthonormal right singular vectors for the `dim` smallest singular
/// values. The matrix is padded with zero rows to be at least square so
/// the full right singular basis is available.
pub fn kernel_float(m: &DMatrix<f64>, dim: usize) -> Vec<DVector<f64>> {
    let cols = m.ncols();
    if dim == 0 || cols == 0 {
        return Vec::new();
    }
    let padded = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    (cols - dim.min(cols)..cols).map(|i| v_t.row(i).transpose()).collect()
}

/// Minimum-norm least-squares solution of `m x = b`.
pub fn least_squares(m: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let largest = singular_values(m).first().copied().unwrap_or(0.0);
    let svd = m.clone().svd(true, true);
    svd.solve(b, DEFAULT_TOL_REL * largest.max(f64::MIN_POSITIVE))
        .expect("both singular bases were computed")
}
