//! Band storage and banded LU with partial pivoting.
//!
//! Row interchanges widen the upper bandwidth from u to l + u, so the
//! factorization workspace carries l extra superdiagonals (the usual
//! band-LU layout). One factorization then serves any number of solves.

use crate::error::{Error, Result};
use crate::linalg::{SparseMatrixCsc, Vector};

/// Square banded matrix with lower bandwidth `lower` and upper bandwidth
/// `upper`; entries outside the band are implicitly zero.
#[derive(Clone, Debug)]
pub struct BandedMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    // entry (i, j) at data[j * (lower + upper + 1) + (upper + i - j)]
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        BandedMatrix {
            n,
            lower,
            upper,
            data: vec![0.0; n * (lower + upper + 1)],
        }
    }

    /// Builds `scale * A + diag_shift * I` from a sparse matrix, with
    /// bandwidths taken from the sparsity pattern of `A`.
    pub fn from_scaled_csc(a: &SparseMatrixCsc, scale: f64, diag_shift: f64) -> Self {
        let n = a.dim();
        let (lower, upper) = a.bandwidths();
        let mut banded = BandedMatrix::zeros(n, lower, upper);
        for j in 0..n {
            for (i, v) in a.col(j) {
                *banded.entry_mut(i, j) += scale * v;
            }
        }
        for i in 0..n {
            *banded.entry_mut(i, i) += diag_shift;
        }
        banded
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.lower, self.upper)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i + self.upper < j || j + self.lower < i {
            return 0.0;
        }
        self.data[j * (self.lower + self.upper + 1) + (self.upper + i - j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        *self.entry_mut(i, j) = v;
    }

    fn entry_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        assert!(
            i + self.upper >= j && j + self.lower >= i,
            "entry ({i}, {j}) outside band"
        );
        &mut self.data[j * (self.lower + self.upper + 1) + (self.upper + i - j)]
    }

    /// LU factorization with partial pivoting inside the band.
    pub fn factor(&self) -> Result<BandedFactorization> {
        let n = self.n;
        let l = self.lower;
        let kv = self.lower + self.upper; // upper bandwidth after fill
        let stride = 2 * self.lower + self.upper + 1;
        let mut f = BandedFactorization {
            n,
            lower: l,
            fill_upper: kv,
            stride,
            data: vec![0.0; n * stride],
            pivots: (0..n).collect(),
        };
        for j in 0..n {
            let lo = j.saturating_sub(self.upper);
            let hi = (j + l).min(n - 1);
            for i in lo..=hi {
                *f.at_mut(i, j) = self.get(i, j);
            }
        }

        for j in 0..n {
            let row_end = (j + l).min(n - 1);
            let mut ip = j;
            let mut best = f.at(j, j).abs();
            for i in j + 1..=row_end {
                let m = f.at(i, j).abs();
                if m > best {
                    ip = i;
                    best = m;
                }
            }
            if best == 0.0 {
                return Err(Error::SingularMatrix { column: j });
            }
            f.pivots[j] = ip;
            if ip != j {
                let col_end = (j + kv).min(n - 1);
                for c in j..=col_end {
                    let a = f.at(j, c);
                    let b = f.at(ip, c);
                    *f.at_mut(j, c) = b;
                    *f.at_mut(ip, c) = a;
                }
            }
            let piv = f.at(j, j);
            for i in j + 1..=row_end {
                let m = f.at(i, j) / piv;
                *f.at_mut(i, j) = m;
                if m != 0.0 {
                    let col_end = (j + kv).min(n - 1);
                    for c in j + 1..=col_end {
                        let u = f.at(j, c);
                        *f.at_mut(i, c) -= m * u;
                    }
                }
            }
        }
        Ok(f)
    }
}

/// Factored form of a banded matrix; supports repeated solves.
#[derive(Clone, Debug)]
pub struct BandedFactorization {
    n: usize,
    lower: usize,
    fill_upper: usize,
    stride: usize,
    data: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedFactorization {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.stride + (self.fill_upper + i - j)]
    }

    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[j * self.stride + (self.fill_upper + i - j)]
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b` by forward elimination and backsubstitution.
    pub fn solve(&self, b: &Vector) -> Result<Vector> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch {
                context: "banded solve",
                expected: self.n,
                actual: b.len(),
            });
        }
        let n = self.n;
        let mut x = b.clone();
        for j in 0..n {
            let p = self.pivots[j];
            if p != j {
                let t = x[j];
                x[j] = x[p];
                x[p] = t;
            }
            let xj = x[j];
            if xj != 0.0 {
                for i in j + 1..=(j + self.lower).min(n - 1) {
                    x[i] -= self.at(i, j) * xj;
                }
            }
        }
        for j in (0..n).rev() {
            let mut s = x[j];
            for c in j + 1..=(j + self.fill_upper).min(n - 1) {
                s -= self.at(j, c) * x[c];
            }
            x[j] = s / self.at(j, j);
        }
        Ok(x)
    }
}
