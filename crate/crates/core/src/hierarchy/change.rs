use std::collections::BTreeMap;

use super::Prolongation;
use crate::error::{Error, Result};
use crate::flops;
use crate::sparse::{
    collect_left_col, collect_left_row, collect_right_col, collect_right_row, ColMatrix, MatVec,
    RowMatrix, Update, XlnMatrix,
};

/// How `inv[M11]` is approximated when building the wavelet-modified basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stabilizer {
    /// Undamped Jacobi iterations from a zero initial guess.
    Jacobi(usize),
    /// Symmetric Gauss-Seidel sweeps over the support of the right-hand side
    /// and its immediate neighbours.
    GaussSeidel(usize),
}

impl Default for Stabilizer {
    fn default() -> Self {
        Stabilizer::Jacobi(2)
    }
}

/// Blocks of `K = G - I` for `G = [[I, K12], [K21, I + K22]]`.
#[derive(Debug, Clone)]
pub struct ChangeOfBasis {
    pub k21: RowMatrix,
    pub k12: ColMatrix,
    pub k22: ColMatrix,
}

impl ChangeOfBasis {
    /// Hierarchical basis: `K21` is the prolongation tail, the rest is zero.
    pub fn hb(p: &Prolongation) -> Self {
        let (nc, nf) = (p.n_coarse(), p.n_fine());
        ChangeOfBasis {
            k21: p.tail().clone(),
            k12: ColMatrix::zeros(nc, nf),
            k22: ColMatrix::zeros(nf, nf),
        }
    }

    /// Wavelet-modified hierarchical basis.
    ///
    /// `m_hb` is the level mass matrix after the HB transform. Each column of
    /// `K12 = -inv[M11] M12` is computed by a local sparse iteration, and
    /// `K22 = K21 K12`.
    pub fn wmhb(p: &Prolongation, m_hb: &XlnMatrix, stabilizer: Stabilizer) -> Result<Self> {
        let (nc, nf) = (p.n_coarse(), p.n_fine());
        let mut t12 = Vec::new();
        for c in 0..nf {
            let b: BTreeMap<usize, f64> = m_hb
                .col_iter(nc + c)
                .filter(|&(r, _)| r < nc)
                .collect();
            let x = match stabilizer {
                Stabilizer::Jacobi(steps) => local_jacobi(m_hb, nc, &b, steps)?,
                Stabilizer::GaussSeidel(sweeps) => local_sgs(m_hb, nc, &b, sweeps)?,
            };
            t12.extend(x.into_iter().filter(|&(_, v)| v != 0.0).map(|(r, v)| (r, c, -v)));
        }
        let k12 = ColMatrix::from_triplets(nc, nf, &t12)?;
        // K22[:, c] = sum_r K12[r, c] * K21[:, r], with K21 columns read from P
        let mut t22 = Vec::new();
        for c in 0..nf {
            for (r, kv) in k12.col(c) {
                for (i, pv) in p.p().col(r).filter(|&(i, _)| i >= nc) {
                    t22.push((i - nc, c, pv * kv));
                }
            }
        }
        flops::mul_add(t22.len());
        let k22 = ColMatrix::from_triplets(nf, nf, &t22)?;
        Ok(ChangeOfBasis {
            k21: p.tail().clone(),
            k12,
            k22,
        })
    }

    pub fn n_coarse(&self) -> usize {
        self.k21.ncols()
    }

    pub fn n_fine(&self) -> usize {
        self.k21.nrows()
    }

    pub fn is_hb(&self) -> bool {
        self.k12.nnz() == 0 && self.k22.nnz() == 0
    }

    /// `u = G u`, i.e. `u + S u` with `S = K`.
    pub fn apply_g(&self, u: &mut [f64]) {
        let nc = self.n_coarse();
        let (top, tail) = u.split_at_mut(nc);
        let mut dtail = vec![0.0; tail.len()];
        self.k21.matvec_add(top, &mut dtail);
        if !self.is_hb() {
            self.k22.matvec_add(tail, &mut dtail);
            self.k12.matvec_add(tail, top);
        }
        tail.iter_mut().zip(&dtail).for_each(|(a, b)| *a += b);
        flops::add(dtail.len());
    }

    /// `f = Gᵀ f`, i.e. `f + Sᵀ f`.
    pub fn apply_gt(&self, f: &mut [f64]) {
        let nc = self.n_coarse();
        let (top, tail) = f.split_at_mut(nc);
        let mut dtail = vec![0.0; tail.len()];
        if !self.is_hb() {
            self.k12.matvec_t_add(top, &mut dtail);
            self.k22.matvec_t_add(tail, &mut dtail);
        }
        self.k21.matvec_t_add(tail, top);
        tail.iter_mut().zip(&dtail).for_each(|(a, b)| *a += b);
        flops::add(dtail.len());
    }

    /// Dense `G` for tests and small diagnostics.
    pub fn dense_g(&self) -> Vec<Vec<f64>> {
        let nc = self.n_coarse();
        let n = nc + self.n_fine();
        let mut g = vec![vec![0.0; n]; n];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        for (r, c, v) in self.k21.triplets() {
            g[nc + r][c] += v;
        }
        for (r, c, v) in self.k12.triplets() {
            g[r][nc + c] += v;
        }
        for (r, c, v) in self.k22.triplets() {
            g[nc + r][nc + c] += v;
        }
        g
    }
}

fn diag(m: &XlnMatrix, i: usize) -> Result<f64> {
    let d = m.get(i, i);
    if d == 0.0 {
        return Err(Error::SingularSmoother(i));
    }
    Ok(d)
}

/// `steps` Jacobi iterations on `M11 x = b` from `x = 0`, touching only the
/// rows reachable from the support of `b`.
fn local_jacobi(
    m: &XlnMatrix,
    nc: usize,
    b: &BTreeMap<usize, f64>,
    steps: usize,
) -> Result<BTreeMap<usize, f64>> {
    let mut x: BTreeMap<usize, f64> = BTreeMap::new();
    for _ in 0..steps {
        // r = b - M11 x on the support of b and of M11 x
        let mut r = b.clone();
        let mut work = 0;
        for (&j, &xj) in &x {
            for (i, v) in m.col_iter(j).filter(|&(i, _)| i < nc) {
                *r.entry(i).or_insert(0.0) -= v * xj;
                work += 1;
            }
        }
        flops::mul_add(work);
        for (i, ri) in r {
            let d = diag(m, i)?;
            *x.entry(i).or_insert(0.0) += ri / d;
        }
        flops::div(x.len());
        flops::add(x.len());
    }
    Ok(x)
}

/// `sweeps` symmetric Gauss-Seidel sweeps on `M11 x = b` from `x = 0`,
/// restricted to the support of `b` and its neighbours in `M11`.
fn local_sgs(
    m: &XlnMatrix,
    nc: usize,
    b: &BTreeMap<usize, f64>,
    sweeps: usize,
) -> Result<BTreeMap<usize, f64>> {
    let mut set: Vec<usize> = b.keys().copied().collect();
    for &j in b.keys() {
        set.extend(m.col_iter(j).map(|(i, _)| i).filter(|&i| i < nc));
    }
    set.sort_unstable();
    set.dedup();
    let mut x: BTreeMap<usize, f64> = set.iter().map(|&i| (i, 0.0)).collect();
    let relax = |i: usize, x: &mut BTreeMap<usize, f64>| -> Result<()> {
        let mut s = b.get(&i).copied().unwrap_or(0.0);
        let mut work = 0;
        for (j, v) in m.row_iter(i) {
            if j != i {
                if let Some(xj) = x.get(&j) {
                    s -= v * xj;
                    work += 1;
                }
            }
        }
        flops::mul_add(work);
        flops::div(1);
        x.insert(i, s / diag(m, i)?);
        Ok(())
    };
    for _ in 0..sweeps {
        for &i in &set {
            relax(i, &mut x)?;
        }
        for &i in set.iter().rev() {
            relax(i, &mut x)?;
        }
    }
    Ok(x)
}

/// Replaces the level matrix held in `a` by `Gᵀ A G` in place.
///
/// Step one accumulates `A K` into `A`, step two accumulates `Kᵀ A`. With
/// `coarse_only` set, step two produces only the columns of the coarse block,
/// which is enough to read off `A11 = Pᵀ A P`.
pub fn transform(a: &mut XlnMatrix, cob: &ChangeOfBasis, coarse_only: bool) {
    let nc = cob.n_coarse();
    let mut up = Update::new();
    collect_right_row(a, &cob.k21, nc, 0, &mut up);
    if !cob.is_hb() {
        collect_right_col(a, &cob.k12, 0, nc, &mut up);
        collect_right_col(a, &cob.k22, nc, nc, &mut up);
    }
    crate::sparse::apply_updates(a, up);
    let mut up = Update::new();
    let limit = if coarse_only { nc } else { usize::MAX };
    collect_left_row(a, &cob.k21, nc, 0, limit, &mut up);
    if !cob.is_hb() && !coarse_only {
        collect_left_col(a, &cob.k12, 0, nc, &mut up);
        collect_left_col(a, &cob.k22, nc, nc, &mut up);
    }
    crate::sparse::apply_updates(a, up);
}
