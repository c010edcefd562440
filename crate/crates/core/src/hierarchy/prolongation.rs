use crate::assembly::DofMap;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::sparse::{ColMatrix, MatVec, RowMatrix};

/// Linear interpolation from level `j - 1` to level `j`.
///
/// With coarse-first numbering the leading `n_coarse` rows form the identity,
/// so only the trailing rows (the tail) carry information.
#[derive(Debug, Clone)]
pub struct Prolongation {
    p: ColMatrix,
    tail: RowMatrix,
    n_coarse: usize,
}

impl Prolongation {
    /// Builds the prolongation onto `level` of `mesh`.
    pub fn build(mesh: &Mesh, level: usize, coarse: &DofMap, fine: &DofMap) -> Result<Self> {
        if level == 0 || level >= mesh.nlevels() {
            return Err(Error::InvalidArgument(format!(
                "prolongation onto level {level} of a {}-level mesh",
                mesh.nlevels()
            )));
        }
        let nc = coarse.ndof();
        let nf = fine.ndof();
        if nf < nc {
            return Err(Error::Numbering("fine level has fewer DOF than coarse".into()));
        }
        for d in 0..nc {
            if fine.vertex(d) != coarse.vertex(d) {
                return Err(Error::Numbering(format!(
                    "coarse DOF {d} is not a prefix of the fine numbering"
                )));
            }
        }
        let mut t = Vec::with_capacity(2 * (nf - nc));
        for r in nc..nf {
            let v = &mesh.vertices()[fine.vertex(r)];
            let parents = match (v.level == level, v.parents) {
                (true, Some(p)) => p,
                _ => {
                    return Err(Error::Numbering(format!(
                        "fine DOF {r} is not a new midpoint of level {level}"
                    )))
                }
            };
            for p in parents {
                if let Some(c) = coarse.dof(p) {
                    t.push((r - nc, c, 0.5));
                }
            }
        }
        let tail = RowMatrix::from_triplets(nf - nc, nc, &t)?;
        Ok(Self::from_tail(tail))
    }

    /// Prolongation whose trailing rows are `tail`.
    pub fn from_tail(tail: RowMatrix) -> Self {
        let nc = tail.ncols();
        let mut t: Vec<_> = (0..nc).map(|i| (i, i, 1.0)).collect();
        t.extend(tail.triplets().into_iter().map(|(r, c, v)| (r + nc, c, v)));
        let p = ColMatrix::from_triplets(nc + tail.nrows(), nc, &t).expect("indices in range");
        Prolongation {
            p,
            tail,
            n_coarse: nc,
        }
    }

    pub fn p(&self) -> &ColMatrix {
        &self.p
    }

    /// Trailing `n_fine` rows of `P`.
    pub fn tail(&self) -> &RowMatrix {
        &self.tail
    }

    pub fn n_coarse(&self) -> usize {
        self.n_coarse
    }

    /// Number of DOF introduced on this level.
    pub fn n_fine(&self) -> usize {
        self.tail.nrows()
    }

    pub fn n(&self) -> usize {
        self.n_coarse + self.n_fine()
    }

    /// `P u`.
    pub fn prolongate(&self, u: &[f64]) -> Vec<f64> {
        let mut out = u.to_vec();
        out.resize(self.n(), 0.0);
        self.tail.matvec_into(u, &mut out[self.n_coarse..]);
        out
    }

    /// `Pᵀ f`.
    pub fn restrict(&self, f: &[f64]) -> Vec<f64> {
        let mut out = f[..self.n_coarse].to_vec();
        self.tail.matvec_t_add(&f[self.n_coarse..], &mut out);
        out
    }
}
