//! Stiff linear test problems `y' = A(t) y + b(t)` with known exact solutions.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{SparseMatrixCsc, Vector};

enum MatrixSource {
    Constant(Arc<SparseMatrixCsc>),
    TimeDependent(Box<dyn Fn(f64) -> SparseMatrixCsc + Send + Sync>),
}

/// A linear non-autonomous system `y' = A(t) y + b(t)`, with an optional
/// exact solution for error measurement and starting values.
///
/// `matrix_at` must keep a fixed sparsity pattern across `t`; constant-matrix
/// problems share one stored instance.
pub struct LinearProblem {
    n: usize,
    matrix: MatrixSource,
    forcing: Box<dyn Fn(f64) -> Vector + Send + Sync>,
    exact: Option<Box<dyn Fn(f64) -> Vector + Send + Sync>>,
}

impl LinearProblem {
    /// Problem with a constant matrix.
    pub fn constant(
        matrix: SparseMatrixCsc,
        forcing: impl Fn(f64) -> Vector + Send + Sync + 'static,
        exact: Option<Box<dyn Fn(f64) -> Vector + Send + Sync>>,
    ) -> Self {
        LinearProblem {
            n: matrix.dim(),
            matrix: MatrixSource::Constant(Arc::new(matrix)),
            forcing: Box::new(forcing),
            exact,
        }
    }

    /// Problem whose matrix is rebuilt at every requested time.
    pub fn time_dependent(
        n: usize,
        matrix: impl Fn(f64) -> SparseMatrixCsc + Send + Sync + 'static,
        forcing: impl Fn(f64) -> Vector + Send + Sync + 'static,
        exact: Option<Box<dyn Fn(f64) -> Vector + Send + Sync>>,
    ) -> Self {
        LinearProblem {
            n,
            matrix: MatrixSource::TimeDependent(Box::new(matrix)),
            forcing: Box::new(forcing),
            exact,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_autonomous_matrix(&self) -> bool {
        matches!(self.matrix, MatrixSource::Constant(_))
    }

    pub fn matrix_at(&self, t: f64) -> Arc<SparseMatrixCsc> {
        match &self.matrix {
            MatrixSource::Constant(a) => Arc::clone(a),
            MatrixSource::TimeDependent(f) => Arc::new(f(t)),
        }
    }

    pub fn forcing_at(&self, t: f64) -> Vector {
        (self.forcing)(t)
    }

    pub fn exact_at(&self, t: f64) -> Option<Vector> {
        self.exact.as_ref().map(|f| f(t))
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Right-hand side `f(t, y) = A(t) y + b(t)`.
    pub fn f_at(&self, t: f64, y: &Vector) -> Result<Vector> {
        let mut f = self.matrix_at(t).matvec(y)?;
        f.axpy(1.0, &self.forcing_at(t));
        Ok(f)
    }
}

/// Spectrum of the diagonal stiff model problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EigenvalueSpec {
    /// `n` eigenvalues equally spaced on `[-lambda_max, 0]`, endpoints included,
    /// ordered from 0 downwards.
    Uniform { lambda_max: f64, n: usize },
    /// `lambda_i = -10^(m_i)` with `m_i` equispaced on `[m_lo, m_hi]`,
    /// endpoints included.
    LogSpaced { m_lo: f64, m_hi: f64, n: usize },
}

impl EigenvalueSpec {
    pub fn lambdas(&self) -> Result<Vec<f64>> {
        match *self {
            EigenvalueSpec::Uniform { lambda_max, n } => {
                if n < 2 || !(lambda_max > 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "uniform spectrum needs n >= 2 and lambda_max > 0 (got n = {n}, lambda_max = {lambda_max})"
                    )));
                }
                let step = lambda_max / (n - 1) as f64;
                Ok((0..n).map(|i| -(i as f64) * step).collect())
            }
            EigenvalueSpec::LogSpaced { m_lo, m_hi, n } => {
                if n < 2 || !(m_hi > m_lo) {
                    return Err(Error::InvalidInput(format!(
                        "log-spaced spectrum needs n >= 2 and m_hi > m_lo (got n = {n}, [{m_lo}, {m_hi}])"
                    )));
                }
                let step = (m_hi - m_lo) / (n - 1) as f64;
                Ok((0..n)
                    .map(|i| -(10f64.powf(m_lo + i as f64 * step)))
                    .collect())
            }
        }
    }
}

/// Diagonal matrix with the given entries, stored with an explicit diagonal
/// (zeros included) so the pattern does not depend on the values.
pub fn diagonal_matrix(lambdas: &[f64]) -> SparseMatrixCsc {
    let n = lambdas.len();
    let triplets: Vec<(usize, usize, f64)> = lambdas
        .iter()
        .enumerate()
        .map(|(i, &l)| (i, i, l))
        .collect();
    SparseMatrixCsc::from_triplets(n, &triplets).expect("diagonal pattern is always valid")
}

fn diagonal_exact_component(lambda: f64, t: f64) -> f64 {
    // y(t) = e^(lambda t) + t * expm1(lambda t)/(lambda t); the expm1 form
    // avoids the catastrophic cancellation of (1 + 1/lambda) e^(lambda t) - 1/lambda
    // when |lambda| is tiny
    let x = lambda * t;
    if x == 0.0 {
        1.0 + t
    } else {
        x.exp() + t * (x.exp_m1() / x)
    }
}

/// The stiff model system `y_i' = lambda_i y_i + 1`, `y_i(0) = 1`, with its
/// exact solution attached.
pub fn diagonal_test_problem(spec: EigenvalueSpec) -> Result<LinearProblem> {
    let lambdas = spec.lambdas()?;
    let n = lambdas.len();
    let a = diagonal_matrix(&lambdas);
    let exact_lambdas = lambdas;
    let exact = move |t: f64| {
        Vector::from_fn(exact_lambdas.len(), |i| {
            diagonal_exact_component(exact_lambdas[i], t)
        })
    };
    Ok(LinearProblem::constant(
        a,
        move |_t| Vector::from(vec![1.0; n]),
        Some(Box::new(exact)),
    ))
}

/// The trivial system `y' = 0` (A and b both zero), used by the
/// zero-stability checks.
pub fn zero_problem(n: usize) -> LinearProblem {
    LinearProblem::constant(SparseMatrixCsc::zero(n), move |_t| Vector::zeros(n), None)
}

/// Method-of-lines discretization of the 2D heat equation on the unit square
/// with homogeneous Dirichlet boundaries and a manufactured exact solution.
///
/// The five-point stencil on the uniform interior grid `(x_i, y_j) = (ih, jh)`,
/// `h = 1/(N+1)`, gives an `N^2`-dimensional system with matrix bandwidth `N`
/// (column-stacked unknowns: `(i, j)` maps to `(j-1)N + (i-1)`). The forcing is
/// constructed so that `w_ij(t) = p(t) q_ij` solves the semidiscrete system
/// exactly, with `p(t) = 1 + cos(t)` and
/// `q_ij = exp(x_i + y_j) sin(2 pi x_i) sin(3 pi y_j)`.
pub fn heat2d_problem(grid: usize) -> Result<LinearProblem> {
    if grid < 2 {
        return Err(Error::InvalidInput(format!(
            "heat2d grid must satisfy N >= 2 (got {grid})"
        )));
    }
    let n_side = grid;
    let n = n_side * n_side;
    let h = 1.0 / (n_side as f64 + 1.0);
    let h2_inv = 1.0 / (h * h);

    let idx = move |i: usize, j: usize| (j - 1) * n_side + (i - 1);

    let mut triplets = Vec::with_capacity(5 * n);
    for j in 1..=n_side {
        for i in 1..=n_side {
            let row = idx(i, j);
            triplets.push((row, row, -4.0 * h2_inv));
            if i > 1 {
                triplets.push((row, idx(i - 1, j), h2_inv));
            }
            if i < n_side {
                triplets.push((row, idx(i + 1, j), h2_inv));
            }
            if j > 1 {
                triplets.push((row, idx(i, j - 1), h2_inv));
            }
            if j < n_side {
                triplets.push((row, idx(i, j + 1), h2_inv));
            }
        }
    }
    let a = SparseMatrixCsc::from_triplets(n, &triplets)?;

    // q on the interior grid and its five-point stencil sum (zero outside)
    let mut q = vec![0.0; n];
    for j in 1..=n_side {
        for i in 1..=n_side {
            let x = i as f64 * h;
            let y = j as f64 * h;
            q[idx(i, j)] = (x + y).exp()
                * (2.0 * std::f64::consts::PI * x).sin()
                * (3.0 * std::f64::consts::PI * y).sin();
        }
    }
    let mut stencil_q = vec![0.0; n];
    for j in 1..=n_side {
        for i in 1..=n_side {
            let at = |ii: usize, jj: usize| -> f64 {
                if ii >= 1 && ii <= n_side && jj >= 1 && jj <= n_side {
                    q[idx(ii, jj)]
                } else {
                    0.0
                }
            };
            stencil_q[idx(i, j)] =
                at(i, j + 1) + at(i, j.wrapping_sub(1)) + at(i + 1, j) + at(i.wrapping_sub(1), j)
                    - 4.0 * q[idx(i, j)];
        }
    }

    let q_forcing = q.clone();
    let sq_forcing = stencil_q;
    let forcing = move |t: f64| {
        let p = 1.0 + t.cos();
        let dp = -t.sin();
        Vector::from_fn(n, |m| dp * q_forcing[m] - p * h2_inv * sq_forcing[m])
    };
    let q_exact = q;
    let exact = move |t: f64| {
        let p = 1.0 + t.cos();
        Vector::from_fn(n, |m| p * q_exact[m])
    };

    Ok(LinearProblem::constant(a, forcing, Some(Box::new(exact))))
}
