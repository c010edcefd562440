//! Envelope (skyline) Cholesky factorization for sparse SPD matrices.
//!
//! Row `i` of the factor is stored densely from its first nonzero column up
//! to the diagonal, so both storage and work scale with the profile of the
//! matrix rather than with `n^2`.

use crate::error::{Error, Result};
use crate::flops;
use crate::sparse::{MatVec, RowMatrix, XlnMatrix};

#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    n: usize,
    first: Vec<usize>,
    start: Vec<usize>,
    l: Vec<f64>,
}

impl EnvelopeCholesky {
    /// Factors the symmetric matrix given by its lower-triangle entries;
    /// upper-triangle entries are ignored and duplicates are summed.
    pub fn from_triplets(n: usize, t: &[(usize, usize, f64)]) -> Result<Self> {
        crate::sparse::check_triplets(n, n, t)?;
        let mut first: Vec<usize> = (0..n).collect();
        for &(r, c, _) in t {
            if c <= r {
                first[r] = first[r].min(c);
            }
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut l = vec![0.0; start[n]];
        for &(r, c, v) in t {
            if c <= r {
                l[start[r] + c - first[r]] += v;
            }
        }
        let mut f = EnvelopeCholesky { n, first, start, l };
        f.factor()?;
        Ok(f)
    }

    pub fn from_row(a: &RowMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: a.ncols(),
            });
        }
        Self::from_triplets(a.nrows(), &a.triplets())
    }

    pub fn from_xln(a: &XlnMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: a.ncols(),
            });
        }
        Self::from_triplets(a.nrows(), &a.triplets())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored factor entries.
    pub fn profile(&self) -> usize {
        self.l.len()
    }

    fn factor(&mut self) -> Result<()> {
        let mut count = 0usize;
        for i in 0..self.n {
            let fi = self.first[i];
            let si = self.start[i];
            for j in fi..i {
                let fj = self.first[j];
                let sj = self.start[j];
                let k0 = fi.max(fj);
                let mut s = self.l[si + j - fi];
                for k in k0..j {
                    s -= self.l[si + k - fi] * self.l[sj + k - fj];
                }
                count += j - k0;
                self.l[si + j - fi] = s / self.l[sj + j - fj];
            }
            let mut d = self.l[si + i - fi];
            for k in fi..i {
                d -= self.l[si + k - fi].powi(2);
            }
            count += i - fi;
            flops::div(i - fi);
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: i, value: d });
            }
            self.l[si + i - fi] = d.sqrt();
            flops::add(1);
        }
        flops::mul_add(count);
        Ok(())
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: b.len(),
            });
        }
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        Ok(x)
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        // forward: L y = b, row oriented
        for i in 0..self.n {
            let fi = self.first[i];
            let si = self.start[i];
            let mut s = x[i];
            for k in fi..i {
                s -= self.l[si + k - fi] * x[k];
            }
            x[i] = s / self.l[si + i - fi];
        }
        // backward: L' x = y, column oriented over the rows of L
        for i in (0..self.n).rev() {
            let fi = self.first[i];
            let si = self.start[i];
            x[i] /= self.l[si + i - fi];
            let xi = x[i];
            for k in fi..i {
                x[k] -= self.l[si + k - fi] * xi;
            }
        }
        flops::mul_add(2 * (self.l.len() - self.n));
        flops::div(2 * self.n);
    }
}

/// Solves `A x = b` for a sparse SPD matrix.
pub fn direct_solve(a: &impl MatVecTriplets, b: &[f64]) -> Result<Vec<f64>> {
    EnvelopeCholesky::from_triplets(a.nrows(), &a.lower_triplets())?.solve(b)
}

/// Matrices that can hand their entries to the factorization.
pub trait MatVecTriplets: MatVec {
    fn lower_triplets(&self) -> Vec<(usize, usize, f64)>;
}

impl MatVecTriplets for RowMatrix {
    fn lower_triplets(&self) -> Vec<(usize, usize, f64)> {
        self.triplets().into_iter().filter(|t| t.1 <= t.0).collect()
    }
}

impl MatVecTriplets for XlnMatrix {
    fn lower_triplets(&self) -> Vec<(usize, usize, f64)> {
        self.triplets().into_iter().filter(|t| t.1 <= t.0).collect()
    }
}
