use super::{check_triplets, ColMatrix, DrcMatrix, MatVec, RowMatrix};
use crate::error::{Error, Result};
use crate::flops;

const NIL: usize = usize::MAX;

#[derive(Debug, Clone)]
struct Link {
    row: usize,
    col: usize,
    val: f64,
    next_in_row: usize,
    next_in_col: usize,
}

/// Orthogonal linked-list matrix.
///
/// Links live in an arena; `ip[r]` / `jp[c]` point at the first link of row
/// `r` / column `c`, and each link carries the handles of the next link in its
/// row and in its column. Lists are unsorted and new links are pushed at the
/// head. Explicit zeros are kept once inserted.
#[derive(Debug, Clone)]
pub struct XlnMatrix {
    nrows: usize,
    ncols: usize,
    links: Vec<Link>,
    ip: Vec<usize>,
    jp: Vec<usize>,
    free: Vec<usize>,
    nnz: usize,
}

pub struct RowIter<'a> {
    m: &'a XlnMatrix,
    at: usize,
}

impl Iterator for RowIter<'_> {
    type Item = (usize, f64);
    #[inline]
    fn next(&mut self) -> Option<(usize, f64)> {
        if self.at == NIL {
            return None;
        }
        let l = &self.m.links[self.at];
        self.at = l.next_in_row;
        Some((l.col, l.val))
    }
}

pub struct ColIter<'a> {
    m: &'a XlnMatrix,
    at: usize,
}

impl Iterator for ColIter<'_> {
    type Item = (usize, f64);
    #[inline]
    fn next(&mut self) -> Option<(usize, f64)> {
        if self.at == NIL {
            return None;
        }
        let l = &self.m.links[self.at];
        self.at = l.next_in_col;
        Some((l.row, l.val))
    }
}

impl XlnMatrix {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        XlnMatrix {
            nrows,
            ncols,
            links: Vec::new(),
            ip: vec![NIL; nrows],
            jp: vec![NIL; ncols],
            free: Vec::new(),
            nnz: 0,
        }
    }

    pub fn from_triplets(nrows: usize, ncols: usize, t: &[(usize, usize, f64)]) -> Result<Self> {
        check_triplets(nrows, ncols, t)?;
        let mut m = XlnMatrix::new(nrows, ncols);
        for &(r, c, v) in t {
            m.add_unchecked(r, c, v);
        }
        Ok(m)
    }

    pub fn from_row(a: &RowMatrix) -> Self {
        XlnMatrix::from_triplets(a.nrows(), a.ncols(), &a.triplets()).expect("valid indices")
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.nnz
    }

    /// Adds `value` to entry `(row, col)`, creating the link if needed.
    pub fn insert_add(&mut self, row: usize, col: usize, value: f64) -> Result<()> {
        if row >= self.nrows || col >= self.ncols {
            return Err(Error::IndexOutOfRange {
                row,
                col,
                nrows: self.nrows,
                ncols: self.ncols,
            });
        }
        self.add_unchecked(row, col, value);
        Ok(())
    }

    fn find(&self, row: usize, col: usize) -> usize {
        let mut at = self.ip[row];
        while at != NIL {
            if self.links[at].col == col {
                return at;
            }
            at = self.links[at].next_in_row;
        }
        NIL
    }

    pub(crate) fn add_unchecked(&mut self, row: usize, col: usize, value: f64) {
        let at = self.find(row, col);
        if at != NIL {
            self.links[at].val += value;
            return;
        }
        let link = Link {
            row,
            col,
            val: value,
            next_in_row: self.ip[row],
            next_in_col: self.jp[col],
        };
        let h = match self.free.pop() {
            Some(h) => {
                self.links[h] = link;
                h
            }
            None => {
                self.links.push(link);
                self.links.len() - 1
            }
        };
        self.ip[row] = h;
        self.jp[col] = h;
        self.nnz += 1;
    }

    /// Stored value at `(row, col)`, zero when absent.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        let at = self.find(row, col);
        if at == NIL {
            0.0
        } else {
            self.links[at].val
        }
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.find(row, col) != NIL
    }

    pub fn row_iter(&self, r: usize) -> RowIter<'_> {
        RowIter {
            m: self,
            at: self.ip[r],
        }
    }

    pub fn col_iter(&self, c: usize) -> ColIter<'_> {
        ColIter {
            m: self,
            at: self.jp[c],
        }
    }

    /// All entries in row-traversal order.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.nrows)
            .flat_map(|r| self.row_iter(r).map(move |(c, v)| (r, c, v)))
            .collect()
    }

    /// All entries in column-traversal order.
    pub fn triplets_by_col(&self) -> Vec<(usize, usize, f64)> {
        (0..self.ncols)
            .flat_map(|c| self.col_iter(c).map(move |(r, v)| (r, c, v)))
            .collect()
    }

    pub fn to_row(&self) -> RowMatrix {
        RowMatrix::from_triplets(self.nrows, self.ncols, &self.triplets()).unwrap()
    }

    pub fn to_col(&self) -> ColMatrix {
        ColMatrix::from_triplets(self.nrows, self.ncols, &self.triplets()).unwrap()
    }

    pub fn to_drc(&self) -> Result<DrcMatrix> {
        DrcMatrix::from_xln(self)
    }

    /// Removes the link at `(row, col)` from its column list; the caller
    /// is responsible for the row list.
    fn unsplice_from_col(&mut self, h: usize) {
        let col = self.links[h].col;
        let next = self.links[h].next_in_col;
        if self.jp[col] == h {
            self.jp[col] = next;
            return;
        }
        let mut at = self.jp[col];
        while at != NIL {
            if self.links[at].next_in_col == h {
                self.links[at].next_in_col = next;
                return;
            }
            at = self.links[at].next_in_col;
        }
        unreachable!("link missing from its column list");
    }

    fn unsplice_from_row(&mut self, h: usize) {
        let row = self.links[h].row;
        let next = self.links[h].next_in_row;
        if self.ip[row] == h {
            self.ip[row] = next;
            return;
        }
        let mut at = self.ip[row];
        while at != NIL {
            if self.links[at].next_in_row == h {
                self.links[at].next_in_row = next;
                return;
            }
            at = self.links[at].next_in_row;
        }
        unreachable!("link missing from its row list");
    }

    /// Unsplices every link with row or column `>= keep` and shrinks the
    /// matrix to `keep x keep`. Returns the removed entries.
    pub(crate) fn truncate(&mut self, keep: usize) -> Vec<(usize, usize, f64)> {
        let mut removed = Vec::new();
        // rows >= keep: take the whole row list, unsplicing each link from its column
        for r in keep..self.nrows {
            let mut at = self.ip[r];
            while at != NIL {
                let next = self.links[at].next_in_row;
                let l = &self.links[at];
                removed.push((l.row, l.col, l.val));
                self.unsplice_from_col(at);
                self.free.push(at);
                self.nnz -= 1;
                at = next;
            }
            self.ip[r] = NIL;
        }
        // remaining links in columns >= keep have rows < keep
        for c in keep..self.ncols {
            let mut at = self.jp[c];
            while at != NIL {
                let next = self.links[at].next_in_col;
                let l = &self.links[at];
                removed.push((l.row, l.col, l.val));
                self.unsplice_from_row(at);
                self.free.push(at);
                self.nnz -= 1;
                at = next;
            }
            self.jp[c] = NIL;
        }
        self.ip.truncate(keep);
        self.jp.truncate(keep);
        self.nrows = keep;
        self.ncols = keep;
        removed
    }
}

impl MatVec for XlnMatrix {
    fn nrows(&self) -> usize {
        self.nrows
    }
    fn ncols(&self) -> usize {
        self.ncols
    }
    fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            *yr = self.row_iter(r).map(|(c, v)| v * x[c]).sum();
        }
        flops::mul_add(self.nnz);
    }
}

/// Strips the fine blocks off a square XLN matrix.
///
/// Links with row or column `>= n_coarse` are removed from `a` and
/// redistributed into `A12` (COL), `A21` (ROW) and `A22` (DRC); afterwards `a`
/// holds only its leading `n_coarse x n_coarse` block.
pub fn strip_blocks(a: &mut XlnMatrix, n_coarse: usize) -> Result<(ColMatrix, RowMatrix, DrcMatrix)> {
    let n = a.nrows;
    if a.ncols != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ncols,
        });
    }
    if n_coarse >= n {
        return Err(Error::InvalidArgument(format!(
            "n_coarse = {n_coarse} must be below the dimension {n}"
        )));
    }
    let nf = n - n_coarse;
    let removed = a.truncate(n_coarse);
    let mut t12 = Vec::new();
    let mut t21 = Vec::new();
    let mut t22 = Vec::new();
    for (r, c, v) in removed {
        match (r < n_coarse, c < n_coarse) {
            (true, false) => t12.push((r, c - n_coarse, v)),
            (false, true) => t21.push((r - n_coarse, c, v)),
            (false, false) => t22.push((r - n_coarse, c - n_coarse, v)),
            (true, true) => unreachable!(),
        }
    }
    let a12 = ColMatrix::from_triplets(n_coarse, nf, &t12)?;
    let a21 = RowMatrix::from_triplets(nf, n_coarse, &t21)?;
    let a22 = DrcMatrix::from_triplets(nf, &t22)?;
    Ok((a12, a21, a22))
}
