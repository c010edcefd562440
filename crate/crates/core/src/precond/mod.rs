//! Multilevel preconditioners: multiplicative and additive cycles over a
//! [`Hierarchy`], plus the textbook BPX and additive HB operators written
//! directly as sums over levels.

mod smoother;

pub use smoother::{checked_diagonal, check_drc_diagonal, smooth_drc, smooth_rows, SmootherKey};

use crate::error::{Error, Result};
use crate::flops;
use crate::hierarchy::{Basis, Hierarchy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Nodal multigrid smoothing every DOF of each level.
    Mg,
    /// Nodal multigrid smoothing only the 1-ring of the fine DOF.
    Bpx,
    /// Hierarchical basis; smoothing on the fine block only.
    Hbmg,
    /// Wavelet-modified hierarchical basis.
    Wmhbmg,
}

impl Family {
    pub fn basis(self) -> Basis {
        match self {
            Family::Mg | Family::Bpx => Basis::Nodal,
            Family::Hbmg => Basis::Hb,
            Family::Wmhbmg => Basis::Wmhb,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Multiplicative,
    Additive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodConfig {
    pub family: Family,
    pub mode: Mode,
    pub smoother: SmootherKey,
    /// Direct solve on the coarsest level; identity otherwise.
    pub exact_coarse: bool,
}

impl MethodConfig {
    pub fn new(family: Family, mode: Mode) -> Self {
        MethodConfig {
            family,
            mode,
            smoother: SmootherKey::Sgs,
            exact_coarse: true,
        }
    }
}

/// A cycle bound to a hierarchy.
pub struct Preconditioner<'h> {
    h: &'h Hierarchy,
    config: MethodConfig,
    /// Diagonals of the full level matrices (nodal families only).
    diags: Vec<Vec<f64>>,
}

impl<'h> Preconditioner<'h> {
    pub fn new(h: &'h Hierarchy, config: MethodConfig) -> Result<Self> {
        if h.basis() != config.family.basis() {
            return Err(Error::State(format!(
                "{:?} needs a {:?} hierarchy, got {:?}",
                config.family,
                config.family.basis(),
                h.basis()
            )));
        }
        let mut diags = Vec::new();
        if h.basis() == Basis::Nodal {
            for j in 0..h.nlevels() {
                diags.push(checked_diagonal(h.full_matrix(j).expect("nodal hierarchy"))?);
            }
        } else {
            for j in 1..h.nlevels() {
                check_drc_diagonal(&h.blocks(j).expect("block hierarchy").a22)?;
            }
        }
        Ok(Preconditioner { h, config, diags })
    }

    pub fn config(&self) -> MethodConfig {
        self.config
    }

    pub fn hierarchy(&self) -> &Hierarchy {
        self.h
    }

    /// Applies the configured cycle on the finest level.
    pub fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        let top = self.h.finest();
        if r.len() != self.h.ndof(top) {
            return Err(Error::DimensionMismatch {
                expected: self.h.ndof(top),
                got: r.len(),
            });
        }
        Ok(match self.config.mode {
            Mode::Multiplicative => self.multiplicative(r, top),
            Mode::Additive => self.additive(r, top),
        })
    }

    fn coarse(&self, b: &[f64]) -> Vec<f64> {
        if self.config.exact_coarse {
            let mut u = b.to_vec();
            self.h.coarse_solver().solve_in_place(&mut u);
            u
        } else {
            b.to_vec()
        }
    }

    fn oner_set(&self, lev: usize) -> Option<&[usize]> {
        match self.config.family {
            Family::Bpx => Some(self.h.oner(lev)),
            _ => None,
        }
    }

    /// One V-cycle on level `lev` with zero initial guess.
    pub fn multiplicative(&self, b: &[f64], lev: usize) -> Vec<f64> {
        if lev == 0 {
            return self.coarse(b);
        }
        let key = self.config.smoother;
        let p = self.h.prolongation(lev);
        let nc = p.n_coarse();
        match self.config.family {
            Family::Hbmg | Family::Wmhbmg => {
                let cob = self.h.change_of_basis(lev);
                let blk = self.h.blocks(lev).expect("block hierarchy");
                let mut f = b.to_vec();
                cob.apply_gt(&mut f);
                let mut u = vec![0.0; b.len()];
                smooth_drc(&blk.a22, &mut u[nc..], &f[nc..], key);
                blk.a12.matvec_sub(&u[nc..], &mut f[..nc]);
                let uc = self.multiplicative(&f[..nc], lev - 1);
                u[..nc].copy_from_slice(&uc);
                blk.a21.matvec_sub(&uc, &mut f[nc..]);
                smooth_drc(&blk.a22, &mut u[nc..], &f[nc..], key);
                cob.apply_g(&mut u);
                u
            }
            Family::Mg | Family::Bpx => {
                let a = self.h.full_matrix(lev).expect("nodal hierarchy");
                let diag = &self.diags[lev];
                let set = self.oner_set(lev);
                let mut d = vec![0.0; b.len()];
                smooth_rows(a, diag, &mut d, b, key, set);
                let mut f = b.to_vec();
                match set {
                    // A(:, ONER) d(ONER) through the rows of the symmetric A
                    Some(s) => {
                        for &c in s {
                            let dc = d[c];
                            for (r, v) in a.row(c) {
                                f[r] -= v * dc;
                            }
                            flops::mul_add(a.row_nnz(c));
                        }
                    }
                    None => a.matvec_sub(&d, &mut f),
                }
                let fc = p.restrict(&f);
                let uc = self.multiplicative(&fc, lev - 1);
                let mut u = p.prolongate(&uc);
                add_correction(&mut u, &d, set);
                smooth_rows(a, diag, &mut u, b, key, set);
                u
            }
        }
    }

    /// One additive sweep over levels `0..=lev`.
    pub fn additive(&self, f: &[f64], lev: usize) -> Vec<f64> {
        if lev == 0 {
            return self.coarse(f);
        }
        let key = self.config.smoother;
        let p = self.h.prolongation(lev);
        let nc = p.n_coarse();
        match self.config.family {
            Family::Hbmg | Family::Wmhbmg => {
                let cob = self.h.change_of_basis(lev);
                let blk = self.h.blocks(lev).expect("block hierarchy");
                let mut f = f.to_vec();
                cob.apply_gt(&mut f);
                let mut u = vec![0.0; f.len()];
                smooth_drc(&blk.a22, &mut u[nc..], &f[nc..], key);
                let uc = self.additive(&f[..nc], lev - 1);
                u[..nc].copy_from_slice(&uc);
                cob.apply_g(&mut u);
                u
            }
            Family::Mg | Family::Bpx => {
                let a = self.h.full_matrix(lev).expect("nodal hierarchy");
                let set = self.oner_set(lev);
                let mut d = vec![0.0; f.len()];
                smooth_rows(a, &self.diags[lev], &mut d, f, key, set);
                let fc = p.restrict(f);
                let uc = self.additive(&fc, lev - 1);
                let mut u = p.prolongate(&uc);
                add_correction(&mut u, &d, set);
                u
            }
        }
    }
}

fn add_correction(u: &mut [f64], d: &[f64], set: Option<&[usize]>) {
    match set {
        Some(s) => {
            for &i in s {
                u[i] += d[i];
            }
            flops::add(s.len());
        }
        None => {
            u.iter_mut().zip(d).for_each(|(a, b)| *a += b);
            flops::add(u.len());
        }
    }
}

/// Classical BPX, `sum_j P_j S_j P_jᵀ f` with `P_j` the composite
/// prolongation from level `j` to the finest level and `S_j` Jacobi scaling
/// by the diagonal of the level matrix (the coarsest level included).
pub fn bpx_classical_apply(h: &Hierarchy, f: &[f64]) -> Result<Vec<f64>> {
    if h.basis() != Basis::Nodal {
        return Err(Error::State("classical BPX needs a nodal hierarchy".into()));
    }
    let top = h.finest();
    let mut fs = vec![f.to_vec()];
    for j in (1..=top).rev() {
        let next = h.prolongation(j).restrict(fs.last().unwrap());
        fs.push(next);
    }
    fs.reverse();
    let mut u: Vec<f64> = Vec::new();
    for (j, fj) in fs.iter().enumerate() {
        let diag = checked_diagonal(h.full_matrix(j).expect("nodal hierarchy"))?;
        let s: Vec<f64> = fj.iter().zip(&diag).map(|(a, b)| a / b).collect();
        flops::div(s.len());
        u = if j == 0 {
            s
        } else {
            let mut v = h.prolongation(j).prolongate(&u);
            v.iter_mut().zip(&s).for_each(|(a, b)| *a += b);
            flops::add(v.len());
            v
        };
    }
    Ok(u)
}

/// Additive hierarchical basis preconditioner written as
/// `sum_j H_j S_j H_jᵀ + H_0 A_0⁻¹ H_0ᵀ`, where `H_j` injects the fine DOF of
/// level `j` and prolongates them to the finest level, and `S_j` is the
/// smoother on the fine block of level `j`.
pub fn hb_additive_apply(h: &Hierarchy, f: &[f64], key: SmootherKey) -> Result<Vec<f64>> {
    if h.basis() != Basis::Hb {
        return Err(Error::State("additive HB needs an HB hierarchy".into()));
    }
    let top = h.finest();
    // restrictions of f to every level
    let mut fs = vec![f.to_vec()];
    for j in (1..=top).rev() {
        let next = h.prolongation(j).restrict(fs.last().unwrap());
        fs.push(next);
    }
    fs.reverse();
    let lift = |mut v: Vec<f64>, from: usize| {
        for k in from + 1..=top {
            v = h.prolongation(k).prolongate(&v);
        }
        v
    };
    let mut u = lift(h.coarse_solver().solve(&fs[0])?, 0);
    for j in 1..=top {
        let nc = h.ndof(j - 1);
        let a22 = &h.blocks(j).expect("block hierarchy").a22;
        let mut v = vec![0.0; h.ndof(j)];
        smooth_drc(a22, &mut v[nc..], &fs[j][nc..], key);
        for (a, b) in u.iter_mut().zip(lift(v, j)) {
            *a += b;
        }
    }
    Ok(u)
}

/// Dense operator of a linear map given by its action, column by column.
pub fn dense_operator(n: usize, mut apply: impl FnMut(&[f64]) -> Vec<f64>) -> Vec<Vec<f64>> {
    let mut cols = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        cols.push(apply(&e));
    }
    (0..n).map(|r| (0..n).map(|c| cols[c][r]).collect()).collect()
}
