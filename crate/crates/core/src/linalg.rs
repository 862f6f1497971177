//! Small dense solves (at most 5x5) via nalgebra's partially pivoted LU.

use nalgebra::{DMatrix, DVector};

use crate::tolerances;
use crate::{Error, Result};

pub(crate) fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solve `rows · x = rhs`. Fails when the matrix is singular or its condition number
/// exceeds [`tolerances::MAX_CONDITION`].
pub(crate) fn solve(rows: &[Vec<f64>], rhs: &[f64], what: &str) -> Result<Vec<f64>> {
    let n = rhs.len();
    debug_assert!(rows.len() == n && rows.iter().all(|r| r.len() == n));
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let condition = condition_number(&m);
    if !condition.is_finite() || condition > tolerances::MAX_CONDITION {
        return Err(Error::Singular(format!("{what}: condition number {condition:.3e}")));
    }
    let x = m
        .lu()
        .solve(&DVector::from_column_slice(rhs))
        .ok_or_else(|| Error::Singular(what.to_string()))?;
    Ok(x.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_and_reports_condition() {
        let x = solve(&[vec![2.0, 0.0], vec![0.0, 0.5]], &[4.0, 1.0], "diag").unwrap();
        assert!((x[0] - 2.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]);
        assert!((condition_number(&m) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_singular() {
        let r = solve(&[vec![1.0, 2.0], vec![2.0, 4.0]], &[1.0, 2.0], "rank one");
        assert!(matches!(r, Err(Error::Singular(_))));
    }
}
