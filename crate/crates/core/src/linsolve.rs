//! Gaussian elimination over ℚ(π).

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinearSolveError {
    #[error("singular system: no pivot in column {column}")]
    Singular { column: usize },
    #[error("dimension mismatch: {rows}x{cols} matrix with right-hand side of length {rhs}")]
    Dimension { rows: usize, cols: usize, rhs: usize },
}

/// Solves `a · x = b` exactly for square `a` (row-major).
///
/// Pivots on the first nonzero entry of each column; all arithmetic is exact,
/// so no magnitude-based pivoting is needed. Zero entries below a pivot are
/// skipped, which makes upper-triangular systems cost one back substitution.
pub fn solve(mut a: Vec<Vec<Scalar>>, mut b: Vec<Scalar>) -> Result<Vec<Scalar>, LinearSolveError> {
    let n = a.len();
    if b.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(LinearSolveError::Dimension {
            rows: n,
            cols: a.first().map_or(0, Vec::len),
            rhs: b.len(),
        });
    }
    for col in 0..n {
        let pivot_row = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(LinearSolveError::Singular { column: col })?;
        if pivot_row != col {
            a.swap(pivot_row, col);
            b.swap(pivot_row, col);
        }
        let pivot = a[col][col].clone();
        let pivot_row = a[col].clone();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].checked_div(&pivot).expect("pivot is nonzero");
            for (entry, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                *entry = &*entry - &(&factor * p);
            }
            let delta = &factor * &b[col];
            b[r] = &b[r] - &delta;
        }
    }
    let mut x = vec![Scalar::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for c in row + 1..n {
            if !a[row][c].is_zero() {
                acc = &acc - &(&a[row][c] * &x[c]);
            }
        }
        x[row] = acc.checked_div(&a[row][row]).expect("pivot is nonzero");
    }
    Ok(x)
}
