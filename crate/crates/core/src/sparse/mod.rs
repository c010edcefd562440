//! Sparse matrix storage schemes and the kernels built on them.
//!
//! Four formats are provided:
//!
//! * [`ColMatrix`]: compressed column (COL).
//! * [`RowMatrix`]: compressed row (ROW), the transpose layout of COL.
//! * [`DrcMatrix`]: diagonal-row-column, square and structurally symmetric;
//!   the diagonal is dense, the strict upper triangle is row-compressed, the
//!   strict lower triangle is column-compressed, and both triangles share one
//!   pair of index arrays.
//! * [`XlnMatrix`]: orthogonal linked lists, the only dynamically fillable
//!   format. Every nonzero is threaded into both its row list and its column
//!   list so the matrix can be walked either way.
//!
//! Indices are 0-based internally. The `dump` methods print 1-based arrays.

mod compressed;
mod drc;
mod products;
mod xln;

pub use compressed::{ColMatrix, RowMatrix};
pub use drc::DrcMatrix;
pub use products::{
    collect_left_col, collect_left_row, collect_right_col, collect_right_row, xln_mul_col_accum,
    xln_mul_row_accum, xln_mul_rowt_accum, xln_mul_rowt_row_accum, Update,
};
pub(crate) use products::apply_updates;
pub use xln::{strip_blocks, XlnMatrix};

use crate::error::{Error, Result};

/// Matrix-vector products shared by every storage format.
pub trait MatVec {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;

    /// `y = A x`. Slices must already have matching lengths.
    fn matvec_into(&self, x: &[f64], y: &mut [f64]);

    fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ncols() {
            return Err(Error::DimensionMismatch {
                expected: self.ncols(),
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.nrows()];
        self.matvec_into(x, &mut y);
        Ok(y)
    }
}

pub(crate) fn check_triplets(nrows: usize, ncols: usize, t: &[(usize, usize, f64)]) -> Result<()> {
    for &(r, c, _) in t {
        if r >= nrows || c >= ncols {
            return Err(Error::IndexOutOfRange {
                row: r,
                col: c,
                nrows,
                ncols,
            });
        }
    }
    Ok(())
}

pub(crate) fn fmt_values(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("[{}]", items.join(", "))
}

pub(crate) fn fmt_one_based(v: &[usize]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{}", x + 1)).collect();
    format!("[{}]", items.join(", "))
}
