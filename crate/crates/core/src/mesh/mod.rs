//! Triangulations of the unit square with red-green local refinement.
//!
//! A [`Mesh`] keeps every simplex ever created in one arena together with the
//! leaf set of each refinement level. Vertices are numbered coarse-first:
//! everything created at level `j` comes after everything created before it.

mod io;
mod refine;

pub use refine::RefineRule;

use std::collections::BTreeSet;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryClass {
    Interior = 0,
    Dirichlet = 1,
    Neumann = 2,
}

impl BoundaryClass {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(BoundaryClass::Interior),
            1 => Some(BoundaryClass::Dirichlet),
            2 => Some(BoundaryClass::Neumann),
            _ => None,
        }
    }
}

/// The two boundary partitions of the unit square used by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    /// Dirichlet on `y = 0` and `y = 1` (closed), Neumann on the open sides `x = 0`, `x = 1`.
    I,
    /// Neumann on the whole boundary.
    II,
}

impl Experiment {
    pub fn classify(self, x: f64, y: f64) -> BoundaryClass {
        let on_bottom_top = y == 0.0 || y == 1.0;
        let on_left_right = x == 0.0 || x == 1.0;
        if !on_bottom_top && !on_left_right {
            return BoundaryClass::Interior;
        }
        match self {
            Experiment::I if on_bottom_top => BoundaryClass::Dirichlet,
            Experiment::I => BoundaryClass::Neumann,
            Experiment::II => BoundaryClass::Neumann,
        }
    }

    /// Radius of the refinement arc.
    pub fn arc_radius(self) -> f64 {
        match self {
            Experiment::I => 0.25,
            Experiment::II => 0.05,
        }
    }
}

impl std::str::FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "i" | "1" => Ok(Experiment::I),
            "II" | "ii" | "2" => Ok(Experiment::II),
            _ => Err(Error::InvalidArgument(format!("unknown experiment set {s:?}"))),
        }
    }
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Experiment::I => write!(f, "I"),
            Experiment::II => write!(f, "II"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub x: f64,
    pub y: f64,
    pub bc: BoundaryClass,
    /// Refinement level that created the vertex.
    pub level: usize,
    /// Endpoints of the edge this vertex bisects, if any.
    pub parents: Option<[usize; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplexKind {
    Root = 0,
    Red = 1,
    Green = 2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    /// Counterclockwise vertex indices.
    pub vertices: [usize; 3],
    /// Level at which the simplex was created.
    pub level: usize,
    pub kind: SimplexKind,
    /// Arena index of the parent simplex.
    pub parent: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Vertex>,
    simplices: Vec<Simplex>,
    leaves: Vec<Vec<usize>>,
    level_offsets: Vec<usize>,
    partition: Option<Experiment>,
}

/// Builds the `n x n` grid of the unit square, each cell split along its
/// `(0,0)-(1,1)` diagonal. Boundary vertices start out Dirichlet.
pub fn unit_square_mesh(n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidArgument("grid subdivision must be >= 1".into()));
    }
    let h = n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            let (x, y) = (i as f64 / h, j as f64 / h);
            let boundary = i == 0 || j == 0 || i == n || j == n;
            vertices.push(Vertex {
                x,
                y,
                bc: if boundary {
                    BoundaryClass::Dirichlet
                } else {
                    BoundaryClass::Interior
                },
                level: 0,
                parents: None,
            });
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut simplices = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10, v01, v11) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
            for vertices in [[v00, v10, v11], [v00, v11, v01]] {
                simplices.push(Simplex {
                    vertices,
                    level: 0,
                    kind: SimplexKind::Root,
                    parent: None,
                });
            }
        }
    }
    let leaves = vec![(0..simplices.len()).collect()];
    Ok(Mesh {
        vertices,
        simplices,
        leaves,
        level_offsets: vec![0],
        partition: None,
    })
}

impl Mesh {
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    /// Number of levels (the initial mesh is level 0).
    pub fn nlevels(&self) -> usize {
        self.leaves.len()
    }

    pub fn finest(&self) -> usize {
        self.leaves.len() - 1
    }

    pub fn partition(&self) -> Option<Experiment> {
        self.partition
    }

    /// Arena indices of the simplices forming level `level`.
    pub fn leaves(&self, level: usize) -> &[usize] {
        &self.leaves[level]
    }

    /// First vertex index created at each level.
    pub fn level_offsets(&self) -> &[usize] {
        &self.level_offsets
    }

    /// Number of vertices present at `level`.
    pub fn vertex_count(&self, level: usize) -> usize {
        self.level_offsets
            .get(level + 1)
            .copied()
            .unwrap_or(self.vertices.len())
    }

    pub fn signed_area(&self, s: &Simplex) -> f64 {
        let [a, b, c] = s.vertices.map(|i| &self.vertices[i]);
        0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
    }

    /// Sets boundary classes from the experiment's partition.
    pub fn classify_boundary(mut self, experiment: Experiment) -> Mesh {
        for v in &mut self.vertices {
            v.bc = experiment.classify(v.x, v.y);
        }
        self.partition = Some(experiment);
        self
    }

    /// Finest-level simplices whose closure meets the quarter circle of the
    /// given radius centred at the origin.
    pub fn mark_by_arc(&self, radius: f64) -> Result<BTreeSet<usize>> {
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::InvalidArgument(format!("arc radius {radius} must be positive")));
        }
        let mut marked = BTreeSet::new();
        for &s in self.leaves(self.finest()) {
            let pts = self.simplices[s].vertices.map(|i| (self.vertices[i].x, self.vertices[i].y));
            let (lo, hi) = distance_range(pts);
            if lo <= radius && radius <= hi {
                marked.insert(s);
            }
        }
        Ok(marked)
    }

    /// Edges of level `level` that carry a vertex in their interior.
    pub fn hanging_nodes(&self, level: usize) -> Vec<(usize, [usize; 2])> {
        let mut present = vec![false; self.vertices.len()];
        for &s in self.leaves(level) {
            for v in self.simplices[s].vertices {
                present[v] = true;
            }
        }
        let mut edges = BTreeSet::new();
        for &s in self.leaves(level) {
            let v = self.simplices[s].vertices;
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        let mut out = Vec::new();
        for (vi, p) in self.vertices.iter().enumerate() {
            if !present[vi] {
                continue;
            }
            for &(a, b) in &edges {
                if a == vi || b == vi {
                    continue;
                }
                let (pa, pb) = (&self.vertices[a], &self.vertices[b]);
                let cross = (pb.x - pa.x) * (p.y - pa.y) - (pb.y - pa.y) * (p.x - pa.x);
                let dot = (p.x - pa.x) * (pb.x - pa.x) + (p.y - pa.y) * (pb.y - pa.y);
                let len2 = (pb.x - pa.x).powi(2) + (pb.y - pa.y).powi(2);
                if cross.abs() <= 1e-14 * len2.sqrt() && dot > 0.0 && dot < len2 {
                    out.push((vi, [a, b]));
                }
            }
        }
        out
    }

    /// True when every interior edge of `level` is shared by exactly two
    /// simplices and every other edge lies on the boundary.
    pub fn is_conforming(&self, level: usize) -> bool {
        let mut count = std::collections::HashMap::new();
        for &s in self.leaves(level) {
            let v = self.simplices[s].vertices;
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_insert(0usize) += 1;
            }
        }
        count.iter().all(|(&(a, b), &n)| match n {
            2 => true,
            1 => self.on_common_side(a, b),
            _ => false,
        })
    }

    pub(crate) fn on_common_side(&self, a: usize, b: usize) -> bool {
        let (p, q) = (&self.vertices[a], &self.vertices[b]);
        (p.x == 0.0 && q.x == 0.0)
            || (p.x == 1.0 && q.x == 1.0)
            || (p.y == 0.0 && q.y == 0.0)
            || (p.y == 1.0 && q.y == 1.0)
    }
}

/// Minimum and maximum distance from the origin over a closed triangle.
fn distance_range(p: [(f64, f64); 3]) -> (f64, f64) {
    let hi = p.iter().map(|&(x, y)| x.hypot(y)).fold(0.0, f64::max);
    if contains_origin(p) {
        return (0.0, hi);
    }
    let mut lo = f64::INFINITY;
    for k in 0..3 {
        let (a, b) = (p[k], p[(k + 1) % 3]);
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let len2 = dx * dx + dy * dy;
        let t = if len2 > 0.0 {
            (-(a.0 * dx + a.1 * dy) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        lo = lo.min((a.0 + t * dx).hypot(a.1 + t * dy));
    }
    (lo, hi)
}

fn contains_origin(p: [(f64, f64); 3]) -> bool {
    // (b - a) x (0 - a) for each edge
    let side = |a: (f64, f64), b: (f64, f64)| a.0 * (b.1 - a.1) - a.1 * (b.0 - a.0);
    let s = [side(p[0], p[1]), side(p[1], p[2]), side(p[2], p[0])];
    s.iter().all(|&v| v >= 0.0) || s.iter().all(|&v| v <= 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts() {
        let m = unit_square_mesh(1).unwrap();
        assert_eq!((m.simplices().len(), m.vertices().len()), (2, 4));
        let m = unit_square_mesh(4).unwrap();
        assert_eq!((m.simplices().len(), m.vertices().len()), (32, 25));
        assert!(unit_square_mesh(0).is_err());
        assert!(m.simplices().iter().all(|s| m.signed_area(s) > 0.0));
    }

    #[test]
    fn three_by_three_experiment_one_has_eight_dof() {
        let m = unit_square_mesh(3).unwrap().classify_boundary(Experiment::I);
        assert_eq!(m.vertices().len(), 16);
        let dof = m.vertices().iter().filter(|v| v.bc != BoundaryClass::Dirichlet).count();
        assert_eq!(dof, 8);
    }

    #[test]
    fn boundary_classes() {
        assert_eq!(Experiment::I.classify(0.0, 0.0), BoundaryClass::Dirichlet);
        assert_eq!(Experiment::I.classify(0.0, 0.5), BoundaryClass::Neumann);
        assert_eq!(Experiment::I.classify(1.0, 1.0), BoundaryClass::Dirichlet);
        assert_eq!(Experiment::II.classify(0.0, 0.0), BoundaryClass::Neumann);
        for e in [Experiment::I, Experiment::II] {
            assert_eq!(e.classify(0.5, 0.5), BoundaryClass::Interior);
        }
    }

    #[test]
    fn arc_outside_square_marks_nothing() {
        let m = unit_square_mesh(4).unwrap();
        assert!(m.mark_by_arc(1.5).unwrap().is_empty());
        assert!(m.mark_by_arc(0.0).is_err());
    }

    #[test]
    fn distance_range_with_origin_vertex() {
        let (lo, hi) = distance_range([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]);
        assert_eq!(lo, 0.0);
        assert_eq!(hi, 1.0);
        let (lo, _) = distance_range([(1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert!((lo - 0.5f64.sqrt()).abs() < 1e-15);
    }
}
