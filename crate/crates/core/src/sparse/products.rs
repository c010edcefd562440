//! In-place accumulation of XLN products with sparse change-of-basis blocks.
//!
//! Every kernel keeps its outer loop over the (small) dimension of the block
//! being applied, then the nonzeros of that column/row of the block, then the
//! matching column/row of the XLN matrix. Contributions are collected first
//! and applied afterwards, so each product reads the matrix as it was before
//! the update.

use super::{ColMatrix, MatVec, RowMatrix, XlnMatrix};
use crate::error::{Error, Result};
use crate::flops;

/// Pending `(row, col, value)` contributions.
pub type Update = Vec<(usize, usize, f64)>;

/// Collects `A[:, dst + c] += A[:, src + r] * K[r, c]`.
pub fn collect_right_col(a: &XlnMatrix, k: &ColMatrix, src: usize, dst: usize, out: &mut Update) {
    let before = out.len();
    for c in 0..k.ncols() {
        for (r, kv) in k.col(c) {
            for (i, av) in a.col_iter(src + r) {
                out.push((i, dst + c, av * kv));
            }
        }
    }
    flops::mul_add(out.len() - before);
}

/// Same product as [`collect_right_col`] with `K` stored by rows; the outer
/// loop runs over the rows of `K`.
pub fn collect_right_row(a: &XlnMatrix, k: &RowMatrix, src: usize, dst: usize, out: &mut Update) {
    let before = out.len();
    for r in 0..k.nrows() {
        for (c, kv) in k.row(r) {
            for (i, av) in a.col_iter(src + r) {
                out.push((i, dst + c, av * kv));
            }
        }
    }
    flops::mul_add(out.len() - before);
}

/// Collects `A[dst + c, :] += K[r, c] * A[src + r, :]`, i.e. `Kᵀ A` on rows.
pub fn collect_left_col(a: &XlnMatrix, k: &ColMatrix, src: usize, dst: usize, out: &mut Update) {
    let before = out.len();
    for c in 0..k.ncols() {
        for (r, kv) in k.col(c) {
            for (j, av) in a.row_iter(src + r) {
                out.push((dst + c, j, kv * av));
            }
        }
    }
    flops::mul_add(out.len() - before);
}

/// Same product as [`collect_left_col`] with `K` stored by rows. Only
/// columns below `col_limit` are produced.
pub fn collect_left_row(
    a: &XlnMatrix,
    k: &RowMatrix,
    src: usize,
    dst: usize,
    col_limit: usize,
    out: &mut Update,
) {
    let before = out.len();
    for r in 0..k.nrows() {
        for (c, kv) in k.row(r) {
            for (j, av) in a.row_iter(src + r) {
                if j < col_limit {
                    out.push((dst + c, j, kv * av));
                }
            }
        }
    }
    flops::mul_add(out.len() - before);
}

pub(crate) fn apply_updates(a: &mut XlnMatrix, updates: Update) {
    for (r, c, v) in updates {
        a.add_unchecked(r, c, v);
    }
}

fn check_block(a: &XlnMatrix, src_end: usize, dst_end: usize) -> Result<()> {
    let n = a.ncols().min(a.nrows());
    for end in [src_end, dst_end] {
        if end > n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: end,
            });
        }
    }
    Ok(())
}

/// `A[:, dst..] += A[:, src..] K` for a column-stored block `K`.
pub fn xln_mul_col_accum(a: &mut XlnMatrix, k: &ColMatrix, src: usize, dst: usize) -> Result<()> {
    check_block(a, src + k.nrows(), dst + k.ncols())?;
    let mut u = Update::new();
    collect_right_col(a, k, src, dst, &mut u);
    apply_updates(a, u);
    Ok(())
}

/// `A[:, dst..] += A[:, src..] K` for a row-stored block `K`.
pub fn xln_mul_row_accum(a: &mut XlnMatrix, k: &RowMatrix, src: usize, dst: usize) -> Result<()> {
    check_block(a, src + k.nrows(), dst + k.ncols())?;
    let mut u = Update::new();
    collect_right_row(a, k, src, dst, &mut u);
    apply_updates(a, u);
    Ok(())
}

/// `A[dst.., :] += Kᵀ A[src.., :]` for a column-stored block `K`.
pub fn xln_mul_rowt_accum(a: &mut XlnMatrix, k: &ColMatrix, src: usize, dst: usize) -> Result<()> {
    check_block(a, src + k.nrows(), dst + k.ncols())?;
    let mut u = Update::new();
    collect_left_col(a, k, src, dst, &mut u);
    apply_updates(a, u);
    Ok(())
}

/// `A[dst.., :] += Kᵀ A[src.., :]` for a row-stored block `K`.
pub fn xln_mul_rowt_row_accum(
    a: &mut XlnMatrix,
    k: &RowMatrix,
    src: usize,
    dst: usize,
) -> Result<()> {
    check_block(a, src + k.nrows(), dst + k.ncols())?;
    let mut u = Update::new();
    collect_left_row(a, k, src, dst, usize::MAX, &mut u);
    apply_updates(a, u);
    Ok(())
}
