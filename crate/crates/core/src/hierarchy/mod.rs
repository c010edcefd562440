//! Multilevel hierarchies: prolongations, change-of-basis operators and the
//! per-level matrices used by the preconditioners.
//!
//! A [`Basis::Nodal`] hierarchy keeps the full Galerkin matrix of every
//! level. The hierarchical bases ([`Basis::Hb`], [`Basis::Wmhb`]) instead
//! transform the finest matrix level by level in XLN storage and keep only
//! the stripped fine blocks, so their storage is linear in the finest DOF
//! count.

mod change;
mod prolongation;

use std::collections::BTreeSet;

pub use change::{transform, ChangeOfBasis, Stabilizer};
pub use prolongation::Prolongation;

use crate::assembly::DofMap;
use crate::error::{Error, Result};
use crate::flops::{self, FlopCounter};
use crate::mesh::Mesh;
use crate::solver::EnvelopeCholesky;
use crate::sparse::{strip_blocks, ColMatrix, DrcMatrix, MatVec, RowMatrix, XlnMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Nodal,
    Hb,
    Wmhb,
}

/// Fine blocks of a transformed level matrix.
#[derive(Debug, Clone)]
pub struct LevelBlocks {
    pub a12: ColMatrix,
    pub a21: RowMatrix,
    pub a22: DrcMatrix,
}

#[derive(Debug, Clone)]
pub struct Hierarchy {
    basis: Basis,
    ndof: Vec<usize>,
    prolongations: Vec<Prolongation>,
    changes: Vec<ChangeOfBasis>,
    blocks: Vec<LevelBlocks>,
    full: Vec<RowMatrix>,
    oner: Vec<Vec<usize>>,
    coarse: RowMatrix,
    coarse_solver: EnvelopeCholesky,
    setup_flops: FlopCounter,
}

/// Prolongations onto levels `1..nlevels` of `mesh`.
pub fn build_prolongations(mesh: &Mesh) -> Result<Vec<Prolongation>> {
    let maps: Vec<DofMap> = (0..mesh.nlevels()).map(|j| DofMap::new(mesh, j)).collect();
    (1..mesh.nlevels())
        .map(|j| Prolongation::build(mesh, j, &maps[j - 1], &maps[j]))
        .collect()
}

/// Sorted union over fine rows `r >= n_coarse` of the columns of row `r`,
/// together with the fine indices themselves.
pub fn one_ring(a: &RowMatrix, n_coarse: usize) -> Vec<usize> {
    let mut set: BTreeSet<usize> = (n_coarse..a.nrows()).collect();
    for r in n_coarse..a.nrows() {
        set.extend(a.row(r).map(|(c, _)| c));
    }
    set.into_iter().collect()
}

fn one_ring_blocks(b: &LevelBlocks, n_coarse: usize) -> Vec<usize> {
    let nf = b.a21.nrows();
    let mut set: BTreeSet<usize> = (n_coarse..n_coarse + nf).collect();
    for r in 0..nf {
        set.extend(b.a21.row(r).map(|(c, _)| c));
    }
    set.into_iter().collect()
}

impl Hierarchy {
    /// Builds the hierarchy for the finest-level stiffness matrix `a` of
    /// `mesh`. The WMHB basis also needs the finest mass matrix `m`.
    pub fn build(
        mesh: &Mesh,
        a: &XlnMatrix,
        m: Option<&XlnMatrix>,
        basis: Basis,
        stabilizer: Stabilizer,
    ) -> Result<Self> {
        let prolongations = build_prolongations(mesh)?;
        let mut ndof: Vec<usize> = prolongations.iter().map(|p| p.n_coarse()).collect();
        ndof.push(DofMap::new(mesh, mesh.finest()).ndof());
        let nfinest = *ndof.last().unwrap();
        if a.nrows() != nfinest || a.ncols() != nfinest {
            return Err(Error::DimensionMismatch {
                expected: nfinest,
                got: a.nrows(),
            });
        }
        let mut m = match (basis, m) {
            (Basis::Wmhb, None) => {
                return Err(Error::InvalidArgument("the WMHB basis needs the mass matrix".into()))
            }
            (Basis::Wmhb, Some(m)) if m.nrows() != nfinest => {
                return Err(Error::DimensionMismatch {
                    expected: nfinest,
                    got: m.nrows(),
                })
            }
            (Basis::Wmhb, Some(m)) => Some(m.clone()),
            _ => None,
        };

        let (built, setup_flops) = flops::measure(|| -> Result<_> {
            let nlev = ndof.len();
            let mut a = a.clone();
            let mut changes = Vec::with_capacity(nlev - 1);
            let mut blocks = Vec::with_capacity(nlev - 1);
            let mut full = Vec::new();
            let mut oner = Vec::with_capacity(nlev - 1);
            for j in (1..nlev).rev() {
                let p = &prolongations[j - 1];
                let nc = p.n_coarse();
                let hb = ChangeOfBasis::hb(p);
                match basis {
                    Basis::Nodal => {
                        let aj = a.to_row();
                        oner.push(one_ring(&aj, nc));
                        full.push(aj);
                        transform(&mut a, &hb, true);
                        a.truncate(nc);
                        changes.push(hb);
                    }
                    Basis::Hb | Basis::Wmhb => {
                        let cob = match m.as_mut() {
                            Some(m) => {
                                transform(m, &hb, false);
                                let c = ChangeOfBasis::wmhb(p, m, stabilizer)?;
                                m.truncate(nc);
                                c
                            }
                            None => hb,
                        };
                        transform(&mut a, &cob, false);
                        let b = if p.n_fine() == 0 {
                            LevelBlocks {
                                a12: ColMatrix::zeros(nc, 0),
                                a21: RowMatrix::zeros(0, nc),
                                a22: DrcMatrix::from_triplets(0, &[])?,
                            }
                        } else {
                            let (a12, a21, a22) = strip_blocks(&mut a, nc)?;
                            LevelBlocks { a12, a21, a22 }
                        };
                        oner.push(one_ring_blocks(&b, nc));
                        blocks.push(b);
                        changes.push(cob);
                    }
                }
            }
            let coarse = a.to_row();
            let coarse_solver = EnvelopeCholesky::from_row(&coarse)?;
            if basis == Basis::Nodal {
                full.push(coarse.clone());
                full.reverse();
            }
            changes.reverse();
            blocks.reverse();
            oner.reverse();
            Ok((changes, blocks, full, oner, coarse, coarse_solver))
        });
        let (changes, blocks, full, oner, coarse, coarse_solver) = built?;
        Ok(Hierarchy {
            basis,
            ndof,
            prolongations,
            changes,
            blocks,
            full,
            oner,
            coarse,
            coarse_solver,
            setup_flops,
        })
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn nlevels(&self) -> usize {
        self.ndof.len()
    }

    pub fn finest(&self) -> usize {
        self.ndof.len() - 1
    }

    /// DOF count of level `j`.
    pub fn ndof(&self, j: usize) -> usize {
        self.ndof[j]
    }

    /// Prolongation onto level `j >= 1`.
    pub fn prolongation(&self, j: usize) -> &Prolongation {
        &self.prolongations[j - 1]
    }

    /// Change of basis of level `j >= 1`.
    pub fn change_of_basis(&self, j: usize) -> &ChangeOfBasis {
        &self.changes[j - 1]
    }

    /// Stripped blocks of level `j >= 1`; `None` for the nodal basis.
    pub fn blocks(&self, j: usize) -> Option<&LevelBlocks> {
        self.blocks.get(j - 1)
    }

    /// Full Galerkin matrix of level `j`; `None` unless the basis is nodal.
    pub fn full_matrix(&self, j: usize) -> Option<&RowMatrix> {
        self.full.get(j)
    }

    /// 1-ring of the fine DOF of level `j >= 1`.
    pub fn oner(&self, j: usize) -> &[usize] {
        &self.oner[j - 1]
    }

    pub fn coarse_matrix(&self) -> &RowMatrix {
        &self.coarse
    }

    pub fn coarse_solver(&self) -> &EnvelopeCholesky {
        &self.coarse_solver
    }

    /// Flops spent building the hierarchy (transforms, stabilizers and the
    /// coarse factorization).
    pub fn setup_flops(&self) -> FlopCounter {
        self.setup_flops
    }

    /// Stored matrix entries over all block levels plus the fine DOF counts.
    pub fn block_storage(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| b.a12.nnz() + b.a21.nnz() + b.a22.nnz() + b.a21.nrows())
            .sum()
    }

    /// Per-level block sizes as CSV:
    /// `level,n_coarse,n_fine,nnz_A12,nnz_A21,nnz_A22,oner_size`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io {
            path: "<hierarchy csv>".into(),
            msg: e.to_string(),
        };
        w.write_record(["level", "n_coarse", "n_fine", "nnz_A12", "nnz_A21", "nnz_A22", "oner_size"])
            .map_err(io)?;
        for j in 1..self.nlevels() {
            let nc = self.ndof[j - 1];
            let nf = self.ndof[j] - nc;
            let (n12, n21, n22) = match (self.blocks(j), self.full_matrix(j)) {
                (Some(b), _) => (b.a12.nnz(), b.a21.nnz(), b.a22.nnz()),
                (None, Some(a)) => {
                    let mut n = (0, 0, 0);
                    for (r, c, _) in a.triplets() {
                        match (r < nc, c < nc) {
                            (true, false) => n.0 += 1,
                            (false, true) => n.1 += 1,
                            (false, false) => n.2 += 1,
                            _ => {}
                        }
                    }
                    n
                }
                (None, None) => unreachable!("every level has blocks or a full matrix"),
            };
            let rec = [j, nc, nf, n12, n21, n22, self.oner(j).len()].map(|v| v.to_string());
            w.write_record(&rec).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io {
            path: "<hierarchy csv>".into(),
            msg: e.to_string(),
        })?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Coefficients on the finest level of basis function `dof` of level `j`.
    ///
    /// For the nodal basis this is the prolongated hat function; for the
    /// hierarchical bases it is column `dof` of `G_j`, prolongated upward.
    pub fn basis_function(&self, j: usize, dof: usize) -> Result<Vec<f64>> {
        if j >= self.nlevels() || dof >= self.ndof[j] {
            return Err(Error::InvalidArgument(format!(
                "no basis function {dof} on level {j}"
            )));
        }
        let mut v = vec![0.0; self.ndof[j]];
        v[dof] = 1.0;
        if j > 0 && self.basis != Basis::Nodal {
            self.change_of_basis(j).apply_g(&mut v);
        }
        for k in j + 1..self.nlevels() {
            v = self.prolongation(k).prolongate(&v);
        }
        Ok(v)
    }
}
