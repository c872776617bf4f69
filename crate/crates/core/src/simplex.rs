//! Dense phase-one simplex for small feasibility problems `A λ = b, λ ≥ 0`.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;

/// Searches for `λ ≥ 0` with `A λ = b`. Returns `Ok(Some(λ))` when the
/// phase-one optimum (sum of artificial variables) is at most `tol`,
/// `Ok(None)` otherwise. Pivoting follows Bland's rule, so the method
/// terminates without cycling.
pub fn find_feasible(a: &[Vec<f64>], b: &[f64], tol: f64) -> Result<Option<Vec<f64>>> {
    let m = a.len();
    if m != b.len() {
        return Err(Error::LinearProgram(format!("{} rows but {} right-hand sides", m, b.len())));
    }
    let n = a.first().map_or(0, |r| r.len());
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::LinearProgram("ragged constraint matrix".into()));
    }
    let cols = n + m;
    // Tableau rows: [A | I | b] with b made non-negative.
    let mut t: Vec<Vec<f64>> = Vec::with_capacity(m);
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; cols + 1];
        for j in 0..n {
            row[j] = sign * a[i][j];
        }
        row[n + i] = 1.0;
        row[cols] = sign * b[i];
        t.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Reduced costs of the phase-one objective (minimize the artificial sum).
    let mut z = vec![0.0; cols + 1];
    for row in &t {
        for j in 0..n {
            z[j] -= row[j];
        }
        z[cols] -= row[cols];
    }

    let max_iter = 50 * (cols + 1);
    for _ in 0..max_iter {
        let Some(enter) = (0..cols).find(|&j| z[j] < -PIVOT_EPS) else {
            let objective = -z[cols];
            if objective > tol {
                return Ok(None);
            }
            let mut lambda = vec![0.0; n];
            for (i, &bv) in basis.iter().enumerate() {
                if bv < n {
                    lambda[bv] = t[i][cols].max(0.0);
                }
            }
            return Ok(Some(lambda));
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][enter] > PIVOT_EPS {
                let ratio = t[i][cols] / t[i][enter];
                let better = ratio < best - PIVOT_EPS
                    || (ratio <= best + PIVOT_EPS && leave.is_some_and(|l| basis[i] < basis[l]));
                if leave.is_none() || better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            return Err(Error::LinearProgram("phase-one objective unbounded".into()));
        };
        let piv = t[r][enter];
        for v in t[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && row[enter] != 0.0 {
                let f = row[enter];
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
        let f = z[enter];
        for (v, p) in z.iter_mut().zip(&pivot_row) {
            *v -= f * p;
        }
        basis[r] = enter;
    }
    Err(Error::LinearProgram("iteration cap reached".into()))
}
