//! Point smoothers on a full level matrix (optionally restricted to an
//! index set) and on the fine block of a transformed level matrix.

use crate::error::{Error, Result};
use crate::flops;
use crate::sparse::{DrcMatrix, MatVec, RowMatrix};

/// Smoother selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmootherKey {
    /// Forward Gauss-Seidel in ascending index order, then backward in
    /// descending order.
    Sgs,
    /// One undamped Jacobi sweep.
    Jacobi,
}

impl std::str::FromStr for SmootherKey {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sgs" => Ok(SmootherKey::Sgs),
            "jacobi" => Ok(SmootherKey::Jacobi),
            _ => Err(Error::InvalidArgument(format!("unknown smoother {s:?}"))),
        }
    }
}

/// Diagonal of a square row matrix; a zero entry is a singular smoother.
pub fn checked_diagonal(a: &RowMatrix) -> Result<Vec<f64>> {
    let d = a.diagonal();
    match d.iter().position(|&v| v == 0.0) {
        Some(i) => Err(Error::SingularSmoother(i)),
        None => Ok(d),
    }
}

fn relax_row(a: &RowMatrix, diag: &[f64], u: &mut [f64], f: &[f64], i: usize) {
    let mut s = f[i];
    for (j, v) in a.row(i) {
        if j != i {
            s -= v * u[j];
        }
    }
    u[i] = s / diag[i];
    flops::mul_add(a.row_nnz(i));
    flops::div(1);
}

/// One smoothing step on `A u = f` over the rows in `set` (all rows when
/// `set` is `None`); entries outside the set are left unchanged.
pub fn smooth_rows(
    a: &RowMatrix,
    diag: &[f64],
    u: &mut [f64],
    f: &[f64],
    key: SmootherKey,
    set: Option<&[usize]>,
) {
    let n = a.nrows();
    match key {
        SmootherKey::Sgs => match set {
            None => {
                (0..n).for_each(|i| relax_row(a, diag, u, f, i));
                (0..n).rev().for_each(|i| relax_row(a, diag, u, f, i));
            }
            Some(s) => {
                s.iter().for_each(|&i| relax_row(a, diag, u, f, i));
                s.iter().rev().for_each(|&i| relax_row(a, diag, u, f, i));
            }
        },
        SmootherKey::Jacobi => {
            let rows: Vec<usize> = match set {
                None => (0..n).collect(),
                Some(s) => s.to_vec(),
            };
            let mut corr = Vec::with_capacity(rows.len());
            for &i in &rows {
                let r: f64 = f[i] - a.row(i).map(|(j, v)| v * u[j]).sum::<f64>();
                corr.push(r / diag[i]);
                flops::mul_add(a.row_nnz(i));
                flops::div(1);
            }
            for (&i, c) in rows.iter().zip(corr) {
                u[i] += c;
            }
            flops::add(rows.len());
        }
    }
}

/// Checks the fine-block diagonal.
pub fn check_drc_diagonal(a: &DrcMatrix) -> Result<()> {
    match a.diag().iter().position(|&v| v == 0.0) {
        Some(i) => Err(Error::SingularSmoother(i)),
        None => Ok(()),
    }
}

/// One smoothing step on `A22 u = f` for a fine block in DRC storage.
///
/// The strict upper triangle is stored by rows and the strict lower triangle
/// by columns, so the forward sweep first forms `f - U u` and then scatters
/// each new value down its lower column; the backward sweep forms `f - L u`
/// and then walks the upper rows.
pub fn smooth_drc(a: &DrcMatrix, u: &mut [f64], f: &[f64], key: SmootherKey) {
    let n = a.n();
    let d = a.diag();
    let nnz_off = (a.nnz() - n) / 2;
    match key {
        SmootherKey::Sgs => {
            let mut r = f.to_vec();
            for (i, ri) in r.iter_mut().enumerate() {
                for (j, v) in a.upper_row(i) {
                    *ri -= v * u[j];
                }
            }
            for i in 0..n {
                u[i] = r[i] / d[i];
                let ui = u[i];
                for (k, v) in a.lower_col(i) {
                    r[k] -= v * ui;
                }
            }
            let mut r = f.to_vec();
            for i in 0..n {
                let ui = u[i];
                for (k, v) in a.lower_col(i) {
                    r[k] -= v * ui;
                }
            }
            for i in (0..n).rev() {
                let mut s = r[i];
                for (j, v) in a.upper_row(i) {
                    s -= v * u[j];
                }
                u[i] = s / d[i];
            }
            flops::mul_add(4 * nnz_off);
            flops::div(2 * n);
        }
        SmootherKey::Jacobi => {
            let au = a.matvec(u).expect("fine block dimensions");
            for i in 0..n {
                u[i] += (f[i] - au[i]) / d[i];
            }
            flops::add(2 * n);
            flops::div(n);
        }
    }
}
