//! Singular values of the degree-normalized table and the connectivity
//! test for non-decomposability.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::table::ContingencyTable;

#[derive(Clone, Copy, Debug)]
pub struct SvdConfig {
    pub max_sweeps: usize,
    /// Values may overshoot `[0, 1]` by at most this much before clamping.
    pub range_tol: f64,
}

impl Default for SvdConfig {
    fn default() -> Self {
        Self {
            max_sweeps: 60,
            range_tol: 1e-9,
        }
    }
}

/// Singular values of a dense matrix via one-sided (Hestenes) Jacobi,
/// sorted non-increasing. Returns `min(rows, cols)` values.
pub fn jacobi_singular_values(matrix: &[Vec<f64>], max_sweeps: usize) -> Result<Vec<f64>> {
    let m = matrix.len();
    let n = matrix.first().map_or(0, Vec::len);
    // Orthogonalize the shorter dimension: columns are stored contiguously.
    let cols: Vec<Vec<f64>> = if n <= m {
        (0..n).map(|j| (0..m).map(|i| matrix[i][j]).collect()).collect()
    } else {
        matrix.to_vec()
    };
    let mut cols = cols;
    let p = cols.len();
    let eps = f64::EPSILON * p.max(4) as f64;
    let mut converged = p < 2;
    for _ in 0..max_sweeps {
        if converged {
            break;
        }
        let mut rotated = false;
        for j in 0..p {
            for k in (j + 1)..p {
                let (alpha, beta, gamma) = cols[j].iter().zip(&cols[k]).fold((0.0, 0.0, 0.0), |(a, b, g), (x, y)| {
                    (a + x * x, b + y * y, g + x * y)
                });
                if gamma == 0.0 || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(k);
                for (x, y) in left[j].iter_mut().zip(right[0].iter_mut()) {
                    let (xo, yo) = (*x, *y);
                    *x = c * xo - s * yo;
                    *y = s * xo + c * yo;
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure { sweeps: max_sweeps });
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().fold(0.0, |acc, v| acc + v * v).sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Singular values of the normalized table, clamped to `[0, 1]`.
pub fn singular_values(t: &ContingencyTable) -> Result<Vec<f64>> {
    singular_values_with(t, &SvdConfig::default())
}

pub fn singular_values_with(t: &ContingencyTable, cfg: &SvdConfig) -> Result<Vec<f64>> {
    let sv = jacobi_singular_values(&t.normalized_matrix(), cfg.max_sweeps)?;
    sv.into_iter()
        .map(|s| {
            if s > 1.0 + cfg.range_tol || s < -cfg.range_tol {
                Err(Error::SpectralRange { value: s })
            } else {
                Ok(s.clamp(0.0, 1.0))
            }
        })
        .collect()
}

/// True iff the bipartite graph on rows and columns with an edge for every
/// nonzero entry is connected.
pub fn is_non_decomposable(t: &ContingencyTable) -> bool {
    let (m, n) = (t.rows(), t.cols());
    let mut seen_row = vec![false; m];
    let mut seen_col = vec![false; n];
    let mut queue = VecDeque::new();
    seen_row[0] = true;
    queue.push_back((true, 0usize));
    let mut reached = 1;
    while let Some((is_row, v)) = queue.pop_front() {
        if is_row {
            for j in 0..n {
                if !seen_col[j] && t.get(v, j) != 0.0 {
                    seen_col[j] = true;
                    reached += 1;
                    queue.push_back((false, j));
                }
            }
        } else {
            for i in 0..m {
                if !seen_row[i] && t.get(i, v) != 0.0 {
                    seen_row[i] = true;
                    reached += 1;
                    queue.push_back((true, i));
                }
            }
        }
    }
    reached == m + n
}
