//! Dense column-major thin matrices and a rank-revealing minimal-norm
//! least-squares solver.
//!
//! The solver runs Householder QR with column pivoting on the n-by-m input
//! (m is small, a dozen at most). When the numerical rank r falls below m it
//! completes a minimal-norm solution by a second, unpivoted QR factorization
//! of the transposed leading r rows of R, i.e. a complete orthogonal
//! decomposition. This stays robust on the degenerate inputs the steppers
//! produce (zero f-columns, repeated states, nearly parallel columns) without
//! needing an SVD.

use crate::error::{Error, Result};
use crate::linalg::Vector;

/// Dense n-by-m matrix stored column-major; built for m much smaller than n.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseThinMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseThinMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseThinMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Stacks the given vectors as columns; all must share one length.
    pub fn from_columns(columns: &[Vector]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vector::len);
        for c in columns {
            if c.len() != rows {
                return Err(Error::DimensionMismatch {
                    context: "matrix from columns",
                    expected: rows,
                    actual: c.len(),
                });
            }
        }
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            data.extend_from_slice(c.as_slice());
        }
        Ok(DenseThinMatrix {
            rows,
            cols: columns.len(),
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    fn swap_columns(&mut self, a: usize, b: usize) {
        for r in 0..self.rows {
            self.data.swap(a * self.rows + r, b * self.rows + r);
        }
    }

    /// `A x`, accumulated column by column.
    pub fn matvec(&self, x: &Vector) -> Result<Vector> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "dense matvec",
                expected: self.cols,
                actual: x.len(),
            });
        }
        let mut y = Vector::zeros(self.rows);
        for j in 0..self.cols {
            let xj = x[j];
            let col = self.col(j);
            for i in 0..self.rows {
                y[i] += col[i] * xj;
            }
        }
        Ok(y)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn max_column_norm(&self) -> f64 {
        (0..self.cols)
            .map(|j| self.col(j).iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

/// Outcome of [`least_squares_min_norm`].
#[derive(Clone, Debug)]
pub struct LeastSquaresResult {
    /// The minimizer; among all minimizers, the one of smallest 2-norm.
    pub gamma: Vector,
    /// `||W gamma - g||_2`, recomputed from the original data.
    pub residual_norm: f64,
    /// Numerical rank of `W` at the tolerance used.
    pub rank: usize,
}

/// Minimal-norm solution of `min ||W gamma - g||_2`.
///
/// `rank_tol` is an absolute threshold on the pivoted R diagonal; `None`
/// selects `eps * max(n, m) * (largest column norm of W)`.
pub fn least_squares_min_norm(
    w: &DenseThinMatrix,
    g: &Vector,
    rank_tol: Option<f64>,
) -> Result<LeastSquaresResult> {
    let n = w.rows();
    let m = w.cols();
    if g.len() != n {
        return Err(Error::DimensionMismatch {
            context: "least squares",
            expected: n,
            actual: g.len(),
        });
    }
    if !w.is_finite() || !g.is_finite() {
        return Err(Error::NonFinite {
            context: "least squares",
        });
    }
    let tol = rank_tol
        .unwrap_or_else(|| f64::EPSILON * n.max(m) as f64 * w.max_column_norm())
        .max(0.0);

    let mut a = w.clone();
    let mut qtg = g.clone();
    let mut perm: Vec<usize> = (0..m).collect();
    let steps = n.min(m);
    let mut done = 0usize;

    for i in 0..steps {
        // pivot on the column with the largest remaining sub-column norm,
        // recomputed exactly (m is tiny, downdating is not worth the risk)
        let mut best = i;
        let mut best_norm2 = subcolumn_norm2(&a, i, i);
        for j in i + 1..m {
            let nj = subcolumn_norm2(&a, i, j);
            if nj > best_norm2 {
                best = j;
                best_norm2 = nj;
            }
        }
        if best_norm2 == 0.0 {
            break;
        }
        if best != i {
            a.swap_columns(i, best);
            perm.swap(i, best);
        }

        // Householder vector for the sub-column a[i.., i]
        let norm = best_norm2.sqrt();
        let alpha = if a.get(i, i) >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a.col(i)[i..].to_vec();
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        a.set(i, i, alpha);
        for r in i + 1..n {
            a.set(r, i, 0.0);
        }
        if vtv > 0.0 {
            for j in i + 1..m {
                apply_reflector(&v, vtv, &mut a.col_mut(j)[i..]);
            }
            apply_reflector(&v, vtv, &mut qtg.as_mut_slice()[i..]);
        }
        done = i + 1;
    }

    // numerical rank: leading diagonal magnitudes above the threshold
    let mut rank = 0usize;
    while rank < done && a.get(rank, rank).abs() > tol {
        rank += 1;
    }

    let mut gamma = Vector::zeros(m);
    if rank == m {
        // full column rank: plain back substitution
        let mut x = vec![0.0; m];
        for i in (0..m).rev() {
            let mut s = qtg[i];
            for j in i + 1..m {
                s -= a.get(i, j) * x[j];
            }
            x[i] = s / a.get(i, i);
        }
        for j in 0..m {
            gamma[perm[j]] = x[j];
        }
    } else if rank > 0 {
        // minimal-norm completion: QR of the transposed leading rank rows
        let mut tt = DenseThinMatrix::zeros(m, rank);
        for i in 0..rank {
            for j in 0..m {
                tt.set(j, i, a.get(i, j));
            }
        }
        let mut t_reflectors: Vec<Vec<f64>> = Vec::with_capacity(rank);
        for i in 0..rank {
            let norm = subcolumn_norm2(&tt, i, i).sqrt();
            let alpha = if tt.get(i, i) >= 0.0 { -norm } else { norm };
            let mut v: Vec<f64> = tt.col(i)[i..].to_vec();
            v[0] -= alpha;
            let vtv: f64 = v.iter().map(|x| x * x).sum();
            tt.set(i, i, alpha);
            for r in i + 1..m {
                tt.set(r, i, 0.0);
            }
            if vtv > 0.0 {
                for j in i + 1..rank {
                    apply_reflector(&v, vtv, &mut tt.col_mut(j)[i..]);
                }
            }
            t_reflectors.push(v);
        }
        // T = R2^T Q2^T; forward-solve R2^T u = Q^T g, then map back through Q2
        let mut u = vec![0.0; m];
        for i in 0..rank {
            let mut s = qtg[i];
            for j in 0..i {
                s -= tt.get(j, i) * u[j];
            }
            u[i] = s / tt.get(i, i);
        }
        for (i, v) in t_reflectors.iter().enumerate().rev() {
            let vtv: f64 = v.iter().map(|x| x * x).sum();
            if vtv > 0.0 {
                apply_reflector(v, vtv, &mut u[i..]);
            }
        }
        for j in 0..m {
            gamma[perm[j]] = u[j];
        }
    }

    let residual_norm = w.matvec(&gamma)?.sub(g).norm2();
    Ok(LeastSquaresResult {
        gamma,
        residual_norm,
        rank,
    })
}

fn subcolumn_norm2(a: &DenseThinMatrix, from_row: usize, j: usize) -> f64 {
    a.col(j)[from_row..].iter().map(|v| v * v).sum()
}

/// `x -= (2 v^T x / v^T v) v` on the slice the reflector acts on.
fn apply_reflector(v: &[f64], vtv: f64, x: &mut [f64]) {
    let dot: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    let s = 2.0 * dot / vtv;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= s * vi;
    }
}
