use super::{check_triplets, fmt_one_based, fmt_values, MatVec};
use crate::error::{Error, Result};
use crate::flops;

/// Compressed storage along one "major" dimension; shared by COL and ROW.
#[derive(Debug, Clone, PartialEq)]
struct Compressed {
    nmajor: usize,
    nminor: usize,
    ptr: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl Compressed {
    /// Entries `(major, minor, value)`. Duplicates are summed in input order;
    /// entries are sorted by minor index within each major slot.
    fn from_entries(nmajor: usize, nminor: usize, entries: &[(usize, usize, f64)]) -> Self {
        let mut order: Vec<usize> = (0..entries.len()).collect();
        order.sort_by_key(|&k| (entries[k].0, entries[k].1));
        let mut ptr = vec![0usize; nmajor + 1];
        let mut idx = Vec::with_capacity(entries.len());
        let mut val: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for k in order {
            let (maj, min, v) = entries[k];
            if last == Some((maj, min)) {
                *val.last_mut().unwrap() += v;
                continue;
            }
            last = Some((maj, min));
            idx.push(min);
            val.push(v);
            ptr[maj + 1] += 1;
        }
        for m in 0..nmajor {
            ptr[m + 1] += ptr[m];
        }
        Compressed {
            nmajor,
            nminor,
            ptr,
            idx,
            val,
        }
    }

    fn empty(nmajor: usize, nminor: usize) -> Self {
        Compressed {
            nmajor,
            nminor,
            ptr: vec![0; nmajor + 1],
            idx: Vec::new(),
            val: Vec::new(),
        }
    }

    #[inline]
    fn slot(&self, m: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.ptr[m]..self.ptr[m + 1];
        self.idx[r.clone()].iter().copied().zip(self.val[r].iter().copied())
    }

    /// y[major] = sum over slot of val * x[minor]
    fn gather(&self, x: &[f64], y: &mut [f64]) {
        for m in 0..self.nmajor {
            let mut s = 0.0;
            for (i, v) in self.slot(m) {
                s += v * x[i];
            }
            y[m] = s;
        }
        flops::mul_add(self.idx.len());
    }

    /// y[major] += sum over slot of val * x[minor]
    fn gather_add(&self, x: &[f64], y: &mut [f64]) {
        for m in 0..self.nmajor {
            let mut s = 0.0;
            for (i, v) in self.slot(m) {
                s += v * x[i];
            }
            y[m] += s;
        }
        flops::mul_add(self.idx.len());
    }

    /// y[major] -= sum over slot of val * x[minor]
    fn gather_sub(&self, x: &[f64], y: &mut [f64]) {
        for m in 0..self.nmajor {
            let mut s = 0.0;
            for (i, v) in self.slot(m) {
                s += v * x[i];
            }
            y[m] -= s;
        }
        flops::mul_add(self.idx.len());
    }

    /// y[minor] -= val * x[major]
    fn scatter_sub(&self, x: &[f64], y: &mut [f64]) {
        for m in 0..self.nmajor {
            let xm = x[m];
            for (i, v) in self.slot(m) {
                y[i] -= v * xm;
            }
        }
        flops::mul_add(self.idx.len());
    }

    /// y[minor] += val * x[major]
    fn scatter_add(&self, x: &[f64], y: &mut [f64]) {
        for m in 0..self.nmajor {
            let xm = x[m];
            for (i, v) in self.slot(m) {
                y[i] += v * xm;
            }
        }
        flops::mul_add(self.idx.len());
    }

    fn dump(&self) -> String {
        format!(
            "A = {}\nIA = {}\nJA = {}\n",
            fmt_values(&self.val),
            fmt_one_based(&self.ptr),
            fmt_one_based(&self.idx)
        )
    }
}

/// Compressed column matrix: values arranged column by column, `ia` holds
/// column starts (length `ncols + 1`) and `ja` the row of each value.
#[derive(Debug, Clone, PartialEq)]
pub struct ColMatrix(Compressed);

/// Compressed row matrix, the transpose layout of [`ColMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct RowMatrix(Compressed);

impl ColMatrix {
    pub fn from_triplets(nrows: usize, ncols: usize, t: &[(usize, usize, f64)]) -> Result<Self> {
        check_triplets(nrows, ncols, t)?;
        let e: Vec<_> = t.iter().map(|&(r, c, v)| (c, r, v)).collect();
        Ok(ColMatrix(Compressed::from_entries(ncols, nrows, &e)))
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        ColMatrix(Compressed::empty(ncols, nrows))
    }

    pub fn nnz(&self) -> usize {
        self.0.idx.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0.val
    }

    /// Column starts (0-based).
    pub fn ia(&self) -> &[usize] {
        &self.0.ptr
    }

    /// Row index of each stored value (0-based).
    pub fn ja(&self) -> &[usize] {
        &self.0.idx
    }

    /// `(row, value)` pairs of column `c`.
    pub fn col(&self, c: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.0.slot(c)
    }

    /// `y += A x`.
    pub fn matvec_add(&self, x: &[f64], y: &mut [f64]) {
        self.0.scatter_add(x, y);
    }

    /// `y += Aᵀ x`.
    pub fn matvec_t_add(&self, x: &[f64], y: &mut [f64]) {
        self.0.gather_add(x, y);
    }

    /// `y -= A x`.
    pub fn matvec_sub(&self, x: &[f64], y: &mut [f64]) {
        self.0.scatter_sub(x, y);
    }

    pub fn col_nnz(&self, c: usize) -> usize {
        self.0.ptr[c + 1] - self.0.ptr[c]
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.0.nmajor)
            .flat_map(|c| self.col(c).map(move |(r, v)| (r, c, v)))
            .collect()
    }

    /// `y = Aᵀ x`.
    pub fn matvec_t(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.0.nminor {
            return Err(Error::DimensionMismatch {
                expected: self.0.nminor,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.0.nmajor];
        self.0.gather(x, &mut y);
        Ok(y)
    }

    /// Integer words used by the index arrays: `nZ + nC + 1`.
    pub fn index_words(&self) -> usize {
        self.0.idx.len() + self.0.ptr.len()
    }

    pub fn to_row(&self) -> RowMatrix {
        RowMatrix::from_triplets(self.nrows(), self.ncols(), &self.triplets())
            .expect("indices already validated")
    }

    pub fn dump(&self) -> String {
        self.0.dump()
    }
}

impl RowMatrix {
    pub fn from_triplets(nrows: usize, ncols: usize, t: &[(usize, usize, f64)]) -> Result<Self> {
        check_triplets(nrows, ncols, t)?;
        Ok(RowMatrix(Compressed::from_entries(nrows, ncols, t)))
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        RowMatrix(Compressed::empty(nrows, ncols))
    }

    pub fn identity(n: usize) -> Self {
        let t: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, n, &t).unwrap()
    }

    pub fn nnz(&self) -> usize {
        self.0.idx.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0.val
    }

    /// Row starts (0-based).
    pub fn ia(&self) -> &[usize] {
        &self.0.ptr
    }

    /// Column index of each stored value (0-based).
    pub fn ja(&self) -> &[usize] {
        &self.0.idx
    }

    /// `(col, value)` pairs of row `r`.
    #[inline]
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.0.slot(r)
    }

    /// `y += A x`.
    pub fn matvec_add(&self, x: &[f64], y: &mut [f64]) {
        self.0.gather_add(x, y);
    }

    /// `y -= A x`.
    pub fn matvec_sub(&self, x: &[f64], y: &mut [f64]) {
        self.0.gather_sub(x, y);
    }

    pub fn row_nnz(&self, r: usize) -> usize {
        self.0.ptr[r + 1] - self.0.ptr[r]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).filter(|&(j, _)| j == c).map(|(_, v)| v).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows().min(self.ncols()))
            .map(|i| self.get(i, i))
            .collect()
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.0.nmajor)
            .flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v)))
            .collect()
    }

    /// `y += Aᵀ x`.
    pub fn matvec_t_add(&self, x: &[f64], y: &mut [f64]) {
        self.0.scatter_add(x, y);
    }

    /// `y = Aᵀ x`.
    pub fn matvec_t(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.0.nmajor {
            return Err(Error::DimensionMismatch {
                expected: self.0.nmajor,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.0.nminor];
        self.0.scatter_add(x, &mut y);
        Ok(y)
    }

    pub fn index_words(&self) -> usize {
        self.0.idx.len() + self.0.ptr.len()
    }

    pub fn to_col(&self) -> ColMatrix {
        ColMatrix::from_triplets(self.nrows(), self.ncols(), &self.triplets())
            .expect("indices already validated")
    }

    pub fn transpose(&self) -> RowMatrix {
        let t: Vec<_> = self.triplets().into_iter().map(|(r, c, v)| (c, r, v)).collect();
        RowMatrix::from_triplets(self.ncols(), self.nrows(), &t).unwrap()
    }

    pub fn dump(&self) -> String {
        self.0.dump()
    }
}

impl MatVec for ColMatrix {
    fn nrows(&self) -> usize {
        self.0.nminor
    }
    fn ncols(&self) -> usize {
        self.0.nmajor
    }
    fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        self.0.scatter_add(x, y);
    }
}

impl MatVec for RowMatrix {
    fn nrows(&self) -> usize {
        self.0.nmajor
    }
    fn ncols(&self) -> usize {
        self.0.nminor
    }
    fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        self.0.gather(x, y);
    }
}
