use std::collections::BTreeMap;

use super::{fmt_one_based, fmt_values, MatVec, XlnMatrix};
use crate::error::{Error, Result};
use crate::flops;

/// Diagonal-row-column matrix.
///
/// `ad` is the full diagonal, `au` the strict upper triangle by rows and `al`
/// the strict lower triangle by columns. Both triangles share `ia`/`ja`: for
/// row `i`, `au[ia[i]..ia[i+1]]` sits in columns `ja[..]`, and the mirrored
/// lower entries of column `i` sit in rows `ja[..]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DrcMatrix {
    n: usize,
    ad: Vec<f64>,
    au: Vec<f64>,
    al: Vec<f64>,
    ia: Vec<usize>,
    ja: Vec<usize>,
}

impl DrcMatrix {
    /// Builds from triplets, summing duplicates. Fails unless the strict
    /// upper pattern is the transpose of the strict lower pattern.
    pub fn from_triplets(n: usize, t: &[(usize, usize, f64)]) -> Result<Self> {
        super::check_triplets(n, n, t)?;
        let mut ad = vec![0.0; n];
        let mut upper: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut lower: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(r, c, v) in t {
            match r.cmp(&c) {
                std::cmp::Ordering::Equal => ad[r] += v,
                std::cmp::Ordering::Less => *upper.entry((r, c)).or_insert(0.0) += v,
                // keyed by (column, row) so it lines up with the upper entry
                std::cmp::Ordering::Greater => *lower.entry((c, r)).or_insert(0.0) += v,
            }
        }
        if upper.len() != lower.len() || upper.keys().zip(lower.keys()).any(|(a, b)| a != b) {
            let bad = upper
                .keys()
                .find(|k| !lower.contains_key(k))
                .map(|&(r, c)| (r, c))
                .or_else(|| lower.keys().find(|k| !upper.contains_key(k)).map(|&(c, r)| (r, c)));
            return Err(Error::FormatViolation(format!(
                "not structurally symmetric (unmatched entry {bad:?})"
            )));
        }
        let mut ia = vec![0usize; n + 1];
        let mut ja = Vec::with_capacity(upper.len());
        let mut au = Vec::with_capacity(upper.len());
        let mut al = Vec::with_capacity(upper.len());
        for ((&(r, c), &u), &l) in upper.iter().zip(lower.values()) {
            ia[r + 1] += 1;
            ja.push(c);
            au.push(u);
            al.push(l);
        }
        for i in 0..n {
            ia[i + 1] += ia[i];
        }
        Ok(DrcMatrix { n, ad, au, al, ia, ja })
    }

    pub fn from_xln(a: &XlnMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::FormatViolation("DRC requires a square matrix".into()));
        }
        Self::from_triplets(a.nrows(), &a.triplets())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diag(&self) -> &[f64] {
        &self.ad
    }

    pub fn upper(&self) -> &[f64] {
        &self.au
    }

    pub fn lower(&self) -> &[f64] {
        &self.al
    }

    pub fn ia(&self) -> &[usize] {
        &self.ia
    }

    pub fn ja(&self) -> &[usize] {
        &self.ja
    }

    /// Stored nonzeros, counting the full diagonal.
    pub fn nnz(&self) -> usize {
        self.n + 2 * self.ja.len()
    }

    /// `(col, value)` of the strict upper part of row `i`.
    #[inline]
    pub fn upper_row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.ia[i]..self.ia[i + 1];
        self.ja[r.clone()].iter().copied().zip(self.au[r].iter().copied())
    }

    /// `(row, value)` of the strict lower part of column `i`.
    #[inline]
    pub fn lower_col(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.ia[i]..self.ia[i + 1];
        self.ja[r.clone()].iter().copied().zip(self.al[r].iter().copied())
    }

    /// Entries in row-major order.
    pub fn to_triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut t = Vec::with_capacity(self.nnz());
        for i in 0..self.n {
            t.push((i, i, self.ad[i]));
            for (c, v) in self.upper_row(i) {
                t.push((i, c, v));
            }
            for (r, v) in self.lower_col(i) {
                t.push((r, i, v));
            }
        }
        t.sort_by_key(|e| (e.0, e.1));
        t
    }

    /// `y += (U + L) x`, the off-diagonal part only.
    pub fn offdiag_matvec_add(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let xi = x[i];
            let mut s = 0.0;
            for k in self.ia[i]..self.ia[i + 1] {
                let j = self.ja[k];
                s += self.au[k] * x[j];
                y[j] += self.al[k] * xi;
            }
            y[i] += s;
        }
        flops::mul_add(2 * self.ja.len());
    }

    /// Integer plus floating words used by the storage.
    pub fn storage_words(&self) -> usize {
        self.ia.len() + self.ja.len() + self.ad.len() + self.au.len() + self.al.len()
    }

    pub fn dump(&self) -> String {
        format!(
            "AD = {}\nAU = {}\nAL = {}\nIA = {}\nJA = {}\n",
            fmt_values(&self.ad),
            fmt_values(&self.au),
            fmt_values(&self.al),
            fmt_one_based(&self.ia),
            fmt_one_based(&self.ja)
        )
    }
}

impl MatVec for DrcMatrix {
    fn nrows(&self) -> usize {
        self.n
    }
    fn ncols(&self) -> usize {
        self.n
    }
    fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            y[i] = self.ad[i] * x[i];
        }
        flops::mul(self.n);
        self.offdiag_matvec_add(x, y);
    }
}
