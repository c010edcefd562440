//! Dense reference implementations shared by the integration tests.
//!
//! Everything here works on plain `Vec<Vec<f64>>` matrices and is written
//! for clarity, not speed. The multilevel cycles are rebuilt from the finest
//! matrices and the prolongations alone, so they check the sparse code
//! paths independently.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;

use mlprec::assembly::{assemble, AssembledSystem, DofMap, ProblemSpec};
use mlprec::hierarchy::{build_prolongations, Basis};
use mlprec::mesh::{unit_square_mesh, Experiment, Mesh, RefineRule};
use mlprec::precond::{Family, Mode, SmootherKey};
use rand::Rng;

pub type Dense = Vec<Vec<f64>>;

pub fn zeros(n: usize, m: usize) -> Dense {
    vec![vec![0.0; m]; n]
}

pub fn identity(n: usize) -> Dense {
    let mut d = zeros(n, n);
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    d
}

pub fn from_triplets(n: usize, m: usize, t: &[(usize, usize, f64)]) -> Dense {
    let mut d = zeros(n, m);
    for &(r, c, v) in t {
        d[r][c] += v;
    }
    d
}

pub fn mul(a: &Dense, b: &Dense) -> Dense {
    let m = if b.is_empty() { 0 } else { b[0].len() };
    let mut c = zeros(a.len(), m);
    for (i, row) in a.iter().enumerate() {
        for (l, &v) in row.iter().enumerate() {
            if v != 0.0 {
                for j in 0..m {
                    c[i][j] += v * b[l][j];
                }
            }
        }
    }
    c
}

pub fn transpose(a: &Dense) -> Dense {
    let m = if a.is_empty() { 0 } else { a[0].len() };
    (0..m).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

pub fn add(a: &Dense, b: &Dense) -> Dense {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect())
        .collect()
}

pub fn block(a: &Dense, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Dense {
    a[rows].iter().map(|r| r[cols.clone()].to_vec()).collect()
}

pub fn matvec(a: &Dense, x: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting.
pub fn solve(a: &Dense, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m = a.clone();
    let mut x = b.to_vec();
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))
            .unwrap();
        m.swap(k, piv);
        x.swap(k, piv);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            if f != 0.0 {
                for j in k..n {
                    m[i][j] -= f * m[k][j];
                }
                x[i] -= f * x[k];
            }
        }
    }
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| m[k][j] * x[j]).sum();
        x[k] = (x[k] - s) / m[k][k];
    }
    x
}

fn max_abs<'a>(v: impl Iterator<Item = &'a f64>) -> f64 {
    v.fold(0.0f64, |m, x| m.max(x.abs()))
}

/// `max |x - y| / max |y|`, or the absolute difference when `y` vanishes.
pub fn rel_diff(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "length mismatch");
    let d = max_abs(x.iter().zip(y).map(|(a, b)| a - b).collect::<Vec<_>>().iter());
    let s = max_abs(y.iter());
    if s > 0.0 {
        d / s
    } else {
        d
    }
}

pub fn rel_diff_mat(x: &Dense, y: &Dense) -> f64 {
    assert_eq!(x.len(), y.len(), "row count mismatch");
    let fx: Vec<f64> = x.iter().flatten().copied().collect();
    let fy: Vec<f64> = y.iter().flatten().copied().collect();
    rel_diff(&fx, &fy)
}

/// One smoothing step on `a u = f` over `set` (ascending), mirroring the
/// textbook definitions: symmetric Gauss-Seidel is a forward sweep followed
/// by a backward sweep, Jacobi is one simultaneous undamped update.
pub fn smooth(a: &Dense, u: &mut [f64], f: &[f64], key: SmootherKey, set: &[usize]) {
    let relax = |u: &mut [f64], i: usize| {
        let s: f64 = (0..u.len()).filter(|&k| k != i).map(|k| a[i][k] * u[k]).sum();
        u[i] = (f[i] - s) / a[i][i];
    };
    match key {
        SmootherKey::Sgs => {
            set.iter().for_each(|&i| relax(u, i));
            set.iter().rev().for_each(|&i| relax(u, i));
        }
        SmootherKey::Jacobi => {
            let corr: Vec<f64> = set
                .iter()
                .map(|&i| (f[i] - dot(&a[i], u)) / a[i][i])
                .collect();
            for (&i, c) in set.iter().zip(corr) {
                u[i] += c;
            }
        }
    }
}

/// One level of the dense hierarchy.
pub struct DenseLevel {
    /// Level matrix in the nodal basis.
    pub a: Dense,
    /// Prolongation onto this level (absent on level 0).
    pub p: Option<Dense>,
    /// Change of basis onto this level (block bases only).
    pub g: Option<Dense>,
    /// `Gᵀ A G` (block bases only).
    pub ahat: Option<Dense>,
    pub nc: usize,
    /// Fine indices and every index coupled to one of them.
    pub oner: Vec<usize>,
}

pub struct DenseHierarchy {
    pub basis: Basis,
    pub levels: Vec<DenseLevel>,
}

/// Columns of `K12 = -inv[M11] M12` after `steps` undamped Jacobi
/// iterations from zero.
pub fn jacobi_k12(m11: &Dense, m12: &Dense, steps: usize) -> Dense {
    let (nc, nf) = (m12.len(), if m12.is_empty() { 0 } else { m12[0].len() });
    let mut x = zeros(nc, nf);
    for _ in 0..steps {
        let mx = mul(m11, &x);
        for i in 0..nc {
            for c in 0..nf {
                x[i][c] += (m12[i][c] - mx[i][c]) / m11[i][i];
            }
        }
    }
    x.iter().map(|r| r.iter().map(|v| -v).collect()).collect()
}

fn boolean_galerkin(pat: &[Vec<bool>], p: &Dense) -> Vec<Vec<bool>> {
    let nc = p[0].len();
    let mut out = vec![vec![false; nc]; nc];
    for (k, row) in pat.iter().enumerate() {
        for (l, &on) in row.iter().enumerate() {
            if !on {
                continue;
            }
            for r in (0..nc).filter(|&r| p[k][r] != 0.0) {
                for s in (0..nc).filter(|&s| p[l][s] != 0.0) {
                    out[r][s] = true;
                }
            }
        }
    }
    out
}

impl DenseHierarchy {
    /// Builds the dense hierarchy from the finest stiffness matrix `a`, its
    /// structural pattern, the finest mass matrix `m` and the prolongations
    /// `ps[j - 1]` onto level `j`.
    pub fn build(
        a: Dense,
        pattern: Vec<Vec<bool>>,
        m: Dense,
        ps: &[Dense],
        basis: Basis,
        jacobi_steps: usize,
    ) -> Self {
        let top = ps.len();
        let (mut a, mut pat, mut m) = (a, pattern, m);
        let mut levels = Vec::new();
        for j in (1..=top).rev() {
            let p = &ps[j - 1];
            let (n, nc) = (p.len(), p[0].len());
            let oner: Vec<usize> = {
                let mut s: BTreeSet<usize> = (nc..n).collect();
                for r in nc..n {
                    s.extend((0..n).filter(|&c| pat[r][c]));
                }
                s.into_iter().collect()
            };
            let mut ghb = identity(n);
            for r in nc..n {
                ghb[r][..nc].copy_from_slice(&p[r]);
            }
            let (g, ahat) = match basis {
                Basis::Nodal => (None, None),
                Basis::Hb => {
                    let ahat = mul(&transpose(&ghb), &mul(&a, &ghb));
                    (Some(ghb), Some(ahat))
                }
                Basis::Wmhb => {
                    let mhb = mul(&transpose(&ghb), &mul(&m, &ghb));
                    let k12 = jacobi_k12(&block(&mhb, 0..nc, 0..nc), &block(&mhb, 0..nc, nc..n), jacobi_steps);
                    let k22 = mul(&block(p, nc..n, 0..nc), &k12);
                    let mut g = ghb.clone();
                    for r in 0..nc {
                        g[r][nc..].copy_from_slice(&k12[r]);
                    }
                    for r in nc..n {
                        for c in nc..n {
                            g[r][c] += k22[r - nc][c - nc];
                        }
                    }
                    m = block(&mhb, 0..nc, 0..nc);
                    let ahat = mul(&transpose(&g), &mul(&a, &g));
                    (Some(g), Some(ahat))
                }
            };
            let next = mul(&transpose(p), &mul(&a, p));
            pat = boolean_galerkin(&pat, p);
            levels.push(DenseLevel {
                a: std::mem::replace(&mut a, next),
                p: Some(p.clone()),
                g,
                ahat,
                nc,
                oner,
            });
        }
        levels.push(DenseLevel {
            a,
            p: None,
            g: None,
            ahat: None,
            nc: 0,
            oner: Vec::new(),
        });
        levels.reverse();
        DenseHierarchy { basis, levels }
    }

    pub fn finest(&self) -> usize {
        self.levels.len() - 1
    }

    fn set(&self, family: Family, j: usize) -> Vec<usize> {
        match family {
            Family::Bpx => self.levels[j].oner.clone(),
            _ => (0..self.levels[j].a.len()).collect(),
        }
    }

    pub fn apply(&self, family: Family, mode: Mode, key: SmootherKey, r: &[f64]) -> Vec<f64> {
        let top = self.finest();
        match mode {
            Mode::Multiplicative => self.multiplicative(family, key, r, top),
            Mode::Additive => self.additive(family, key, r, top),
        }
    }

    fn split(&self, j: usize) -> (usize, Dense, Dense, Dense) {
        let l = &self.levels[j];
        let ahat = l.ahat.as_ref().unwrap();
        let n = ahat.len();
        (
            l.nc,
            block(ahat, 0..l.nc, l.nc..n),
            block(ahat, l.nc..n, 0..l.nc),
            block(ahat, l.nc..n, l.nc..n),
        )
    }

    pub fn multiplicative(&self, family: Family, key: SmootherKey, b: &[f64], j: usize) -> Vec<f64> {
        let l = &self.levels[j];
        if j == 0 {
            return solve(&l.a, b);
        }
        match self.basis {
            Basis::Nodal => {
                let p = l.p.as_ref().unwrap();
                let set = self.set(family, j);
                let mut d = vec![0.0; b.len()];
                smooth(&l.a, &mut d, b, key, &set);
                let ad = matvec(&l.a, &d);
                let f: Vec<f64> = b.iter().zip(&ad).map(|(x, y)| x - y).collect();
                let uc = self.multiplicative(family, key, &matvec(&transpose(p), &f), j - 1);
                let mut u = matvec(p, &uc);
                u.iter_mut().zip(&d).for_each(|(x, y)| *x += y);
                smooth(&l.a, &mut u, b, key, &set);
                u
            }
            Basis::Hb | Basis::Wmhb => {
                let g = l.g.as_ref().unwrap();
                let (nc, a12, a21, a22) = self.split(j);
                let f = matvec(&transpose(g), b);
                let (f1, f2) = f.split_at(nc);
                let all: Vec<usize> = (0..a22.len()).collect();
                let mut u2 = vec![0.0; f2.len()];
                smooth(&a22, &mut u2, f2, key, &all);
                let t = matvec(&a12, &u2);
                let f1: Vec<f64> = f1.iter().zip(&t).map(|(x, y)| x - y).collect();
                let uc = self.multiplicative(family, key, &f1, j - 1);
                let t = matvec(&a21, &uc);
                let f2: Vec<f64> = f2.iter().zip(&t).map(|(x, y)| x - y).collect();
                smooth(&a22, &mut u2, &f2, key, &all);
                let u: Vec<f64> = uc.into_iter().chain(u2).collect();
                matvec(g, &u)
            }
        }
    }

    pub fn additive(&self, family: Family, key: SmootherKey, f: &[f64], j: usize) -> Vec<f64> {
        let l = &self.levels[j];
        if j == 0 {
            return solve(&l.a, f);
        }
        match self.basis {
            Basis::Nodal => {
                let p = l.p.as_ref().unwrap();
                let mut d = vec![0.0; f.len()];
                smooth(&l.a, &mut d, f, key, &self.set(family, j));
                let uc = self.additive(family, key, &matvec(&transpose(p), f), j - 1);
                let mut u = matvec(p, &uc);
                u.iter_mut().zip(&d).for_each(|(x, y)| *x += y);
                u
            }
            Basis::Hb | Basis::Wmhb => {
                let g = l.g.as_ref().unwrap();
                let (nc, _, _, a22) = self.split(j);
                let f = matvec(&transpose(g), f);
                let all: Vec<usize> = (0..a22.len()).collect();
                let mut u2 = vec![0.0; f.len() - nc];
                smooth(&a22, &mut u2, &f[nc..], key, &all);
                let u1 = self.additive(family, key, &f[..nc], j - 1);
                let u: Vec<f64> = u1.into_iter().chain(u2).collect();
                matvec(g, &u)
            }
        }
    }

    /// Composite prolongation from level `j` to the finest level.
    pub fn composite(&self, j: usize) -> Dense {
        let mut q = identity(self.levels[self.finest()].a.len());
        for k in (j + 1..=self.finest()).rev() {
            q = mul(&q, self.levels[k].p.as_ref().unwrap());
        }
        q
    }

    /// `sum_j Q_j D_j⁻¹ Q_jᵀ f` over all levels.
    pub fn classical_bpx(&self, f: &[f64]) -> Vec<f64> {
        let mut u = vec![0.0; f.len()];
        for j in 0..=self.finest() {
            let q = self.composite(j);
            let fj = matvec(&transpose(&q), f);
            let a = &self.levels[j].a;
            let s: Vec<f64> = fj.iter().enumerate().map(|(i, v)| v / a[i][i]).collect();
            u.iter_mut().zip(matvec(&q, &s)).for_each(|(x, y)| *x += y);
        }
        u
    }

    /// `Q_0 A_0⁻¹ Q_0ᵀ f + sum_j Q_j [0; S_j (Q_jᵀ f)_fine]`.
    pub fn classical_hb(&self, f: &[f64], key: SmootherKey) -> Vec<f64> {
        let q0 = self.composite(0);
        let mut u = matvec(&q0, &solve(&self.levels[0].a, &matvec(&transpose(&q0), f)));
        for j in 1..=self.finest() {
            let q = self.composite(j);
            let fj = matvec(&transpose(&q), f);
            let (nc, _, _, a22) = self.split(j);
            let all: Vec<usize> = (0..a22.len()).collect();
            let mut v = vec![0.0; fj.len()];
            smooth(&a22, &mut v[nc..], &fj[nc..], key, &all);
            u.iter_mut().zip(matvec(&q, &v)).for_each(|(x, y)| *x += y);
        }
        u
    }
}

/// Dense hierarchy for an assembled system on `mesh`.
pub fn dense_hierarchy(mesh: &Mesh, sys: &AssembledSystem, basis: Basis) -> DenseHierarchy {
    let n = sys.ndof();
    let ps: Vec<Dense> = build_prolongations(mesh)
        .unwrap()
        .iter()
        .map(|p| from_triplets(p.n(), p.n_coarse(), &p.p().triplets()))
        .collect();
    let mut pattern = vec![vec![false; n]; n];
    for (r, c, _) in sys.a.triplets() {
        pattern[r][c] = true;
    }
    DenseHierarchy::build(
        from_triplets(n, n, &sys.a.triplets()),
        pattern,
        from_triplets(n, n, &sys.m.triplets()),
        &ps,
        basis,
        2,
    )
}

/// Random locally refined mesh with at most `max_dof` DOF on its finest
/// level and at least two levels.
pub fn random_mesh(rng: &mut impl Rng, max_dof: usize) -> Mesh {
    let exp = if rng.gen_bool(0.5) { Experiment::I } else { Experiment::II };
    let rule = if rng.gen_bool(0.5) { RefineRule::RedGreen } else { RefineRule::Bisection };
    let mut mesh = unit_square_mesh(rng.gen_range(2..=3)).unwrap().classify_boundary(exp);
    let passes = rng.gen_range(1..=3);
    for pass in 0..passes {
        let leaves = mesh.leaves(mesh.finest()).to_vec();
        let mut marked: BTreeSet<usize> = leaves.iter().copied().filter(|_| rng.gen_bool(0.3)).collect();
        if marked.is_empty() || (pass == 0 && rng.gen_bool(0.3)) {
            marked = [leaves[rng.gen_range(0..leaves.len())]].into();
        }
        let next = mesh.refine_with(&marked, rule).unwrap();
        if DofMap::new(&next, next.finest()).ndof() > max_dof {
            if mesh.nlevels() == 1 {
                let one = [leaves[rng.gen_range(0..leaves.len())]].into();
                mesh = mesh.refine_with(&one, rule).unwrap();
            }
            break;
        }
        mesh = next;
    }
    mesh
}

pub fn system(mesh: &Mesh) -> AssembledSystem {
    assemble(mesh, mesh.finest(), &ProblemSpec::manufactured()).unwrap()
}

pub fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn random_triplets(rng: &mut impl Rng, n: usize, m: usize, fill: f64) -> Vec<(usize, usize, f64)> {
    let mut t = Vec::new();
    for i in 0..n {
        for j in 0..m {
            if rng.gen_bool(fill) {
                t.push((i, j, rng.gen_range(-1.0..1.0)));
            }
        }
    }
    t
}
