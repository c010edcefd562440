use std::collections::{BTreeSet, HashMap};

use super::{BoundaryClass, Mesh, Simplex, SimplexKind, Vertex};
use crate::error::{Error, Result};

/// How marked simplices are subdivided. Closure always restores conformity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefineRule {
    /// Marked simplices are quadrisected. A neighbour with two or more
    /// hanging nodes is quadrisected too; one with a single hanging node is
    /// bisected toward it.
    RedGreen,
    /// Marked simplices are bisected across their longest edge. A neighbour
    /// with a hanging node gets its own longest edge bisected first, so
    /// every subdivision is a sequence of longest-edge-first bisections.
    Bisection,
}

type Edge = (usize, usize);

fn key(a: usize, b: usize) -> Edge {
    (a.min(b), a.max(b))
}

struct Pass<'m> {
    mesh: &'m Mesh,
    level: usize,
    vertices: Vec<Vertex>,
    mid: HashMap<Edge, usize>,
}

impl Pass<'_> {
    fn split(&mut self, a: usize, b: usize) -> bool {
        let k = key(a, b);
        if self.mid.contains_key(&k) {
            return false;
        }
        let (pa, pb) = (&self.vertices[k.0], &self.vertices[k.1]);
        let (x, y) = (0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y));
        let bc = if self.mesh.on_common_side(k.0, k.1) {
            match self.mesh.partition {
                Some(e) => e.classify(x, y),
                None => BoundaryClass::Dirichlet,
            }
        } else {
            BoundaryClass::Interior
        };
        self.vertices.push(Vertex {
            x,
            y,
            bc,
            level: self.level,
            parents: Some([k.0, k.1]),
        });
        self.mid.insert(k, self.vertices.len() - 1);
        true
    }

    fn is_split(&self, a: usize, b: usize) -> bool {
        self.mid.contains_key(&key(a, b))
    }

    fn midpoint(&self, a: usize, b: usize) -> usize {
        self.mid[&key(a, b)]
    }

    /// Local index k of the longest edge (v[k], v[k+1]); ties go to the lowest k.
    fn longest_edge(&self, v: [usize; 3]) -> usize {
        let len2 = |a: usize, b: usize| {
            let (p, q) = (&self.vertices[a], &self.vertices[b]);
            (p.x - q.x).powi(2) + (p.y - q.y).powi(2)
        };
        let mut best = 0;
        for k in 1..3 {
            if len2(v[k], v[(k + 1) % 3]) > len2(v[best], v[(best + 1) % 3]) {
                best = k;
            }
        }
        best
    }

    fn split_count(&self, v: [usize; 3]) -> usize {
        (0..3).filter(|&k| self.is_split(v[k], v[(k + 1) % 3])).count()
    }
}

struct Builder {
    simplices: Vec<Simplex>,
    leaves: Vec<usize>,
    level: usize,
}

impl Builder {
    fn push(&mut self, vertices: [usize; 3], kind: SimplexKind, parent: usize, leaf: bool) -> usize {
        self.simplices.push(Simplex {
            vertices,
            level: self.level,
            kind,
            parent: Some(parent),
        });
        let id = self.simplices.len() - 1;
        if leaf {
            self.leaves.push(id);
        }
        id
    }

    /// Bisects simplex `s` across local edge `k`; returns the two children.
    fn bisect(&mut self, pass: &Pass, s: usize, k: usize, leaf: bool) -> [usize; 2] {
        let v = self.simplices[s].vertices;
        let (a, b, c) = (v[k], v[(k + 1) % 3], v[(k + 2) % 3]);
        let m = pass.midpoint(a, b);
        [
            self.push([a, m, c], SimplexKind::Green, s, leaf),
            self.push([m, b, c], SimplexKind::Green, s, leaf),
        ]
    }

    fn red(&mut self, pass: &Pass, s: usize) {
        let [a, b, c] = self.simplices[s].vertices;
        let (ab, bc, ca) = (pass.midpoint(a, b), pass.midpoint(b, c), pass.midpoint(c, a));
        for v in [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]] {
            self.push(v, SimplexKind::Red, s, true);
        }
    }

    /// Recursive longest-edge bisection until no child carries a split edge.
    fn bisect_all(&mut self, pass: &Pass, s: usize) {
        let v = self.simplices[s].vertices;
        if pass.split_count(v) == 0 {
            self.leaves.push(s);
            return;
        }
        let k = pass.longest_edge(v);
        debug_assert!(pass.is_split(v[k], v[(k + 1) % 3]));
        for child in self.bisect(pass, s, k, false) {
            self.bisect_all(pass, child);
        }
    }
}

impl Mesh {
    /// Red-green refinement of the marked finest-level simplices.
    pub fn refine(&self, marked: &BTreeSet<usize>) -> Result<Mesh> {
        self.refine_with(marked, RefineRule::RedGreen)
    }

    /// Refines the marked finest-level simplices, appending one level.
    /// An empty marked set returns the mesh unchanged.
    pub fn refine_with(&self, marked: &BTreeSet<usize>, rule: RefineRule) -> Result<Mesh> {
        let finest = self.finest();
        let leaves = self.leaves(finest);
        let leaf_set: BTreeSet<usize> = leaves.iter().copied().collect();
        if let Some(bad) = marked.iter().find(|s| !leaf_set.contains(s)) {
            return Err(Error::InvalidArgument(format!(
                "simplex {bad} is not on the finest level"
            )));
        }
        if marked.is_empty() {
            return Ok(self.clone());
        }
        let mut pass = Pass {
            mesh: self,
            level: finest + 1,
            vertices: self.vertices.clone(),
            mid: HashMap::new(),
        };
        for &s in marked {
            let v = self.simplices[s].vertices;
            match rule {
                RefineRule::RedGreen => {
                    for k in 0..3 {
                        pass.split(v[k], v[(k + 1) % 3]);
                    }
                }
                RefineRule::Bisection => {
                    let k = pass.longest_edge(v);
                    pass.split(v[k], v[(k + 1) % 3]);
                }
            }
        }
        // closure
        loop {
            let mut changed = false;
            for &s in leaves {
                let v = self.simplices[s].vertices;
                let n = pass.split_count(v);
                match rule {
                    RefineRule::RedGreen if n == 2 => {
                        for k in 0..3 {
                            changed |= pass.split(v[k], v[(k + 1) % 3]);
                        }
                    }
                    RefineRule::Bisection if n >= 1 => {
                        let k = pass.longest_edge(v);
                        changed |= pass.split(v[k], v[(k + 1) % 3]);
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }

        let mut b = Builder {
            simplices: self.simplices.clone(),
            leaves: Vec::with_capacity(leaves.len() * 2),
            level: finest + 1,
        };
        for &s in leaves {
            let v = self.simplices[s].vertices;
            match (rule, pass.split_count(v)) {
                (_, 0) => b.leaves.push(s),
                (RefineRule::RedGreen, 1) => {
                    let k = (0..3).find(|&k| pass.is_split(v[k], v[(k + 1) % 3])).unwrap();
                    b.bisect(&pass, s, k, true);
                }
                (RefineRule::RedGreen, 3) => b.red(&pass, s),
                (RefineRule::RedGreen, _) => unreachable!("closure leaves no two-split simplex"),
                (RefineRule::Bisection, _) => b.bisect_all(&pass, s),
            }
        }
        let mut level_offsets = self.level_offsets.clone();
        level_offsets.push(self.vertices.len());
        let mut all_leaves = self.leaves.clone();
        all_leaves.push(b.leaves);
        Ok(Mesh {
            vertices: pass.vertices,
            simplices: b.simplices,
            leaves: all_leaves,
            level_offsets,
            partition: self.partition,
        })
    }
}
