//! Plain-text mesh format.
//!
//! ```text
//! dim 2 nv <count> ns <count>
//! v <x> <y> <bc:0|1|2> <level>
//! s <i0> <i1> <i2> <level> <kind:0|1|2>
//! ```
//!
//! All simplices ever created are written; leaf sets, parent simplices and
//! vertex parents are recovered on import.

use std::collections::HashMap;
use std::fmt::Write;

use super::{BoundaryClass, Experiment, Mesh, Simplex, SimplexKind, Vertex};
use crate::error::{Error, Result};

impl Mesh {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "dim 2 nv {} ns {}", self.vertices.len(), self.simplices.len()).unwrap();
        for v in &self.vertices {
            writeln!(s, "v {:?} {:?} {} {}", v.x, v.y, v.bc.code(), v.level).unwrap();
        }
        for t in &self.simplices {
            let [a, b, c] = t.vertices;
            writeln!(s, "s {a} {b} {c} {} {}", t.level, t.kind as u8).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Mesh> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let perr = |line: usize, msg: &str| Error::Parse {
            line: line + 1,
            msg: msg.to_string(),
        };
        let (hl, header) = lines.next().ok_or_else(|| perr(0, "empty input"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 6 || h[0] != "dim" || h[1] != "2" || h[2] != "nv" || h[4] != "ns" {
            return Err(perr(hl, "expected `dim 2 nv <count> ns <count>`"));
        }
        let nv: usize = h[3].parse().map_err(|_| perr(hl, "bad vertex count"))?;
        let ns: usize = h[5].parse().map_err(|_| perr(hl, "bad simplex count"))?;

        let mut vertices = Vec::with_capacity(nv);
        let mut simplices = Vec::with_capacity(ns);
        for (ln, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            match f.first() {
                Some(&"v") if f.len() == 5 => {
                    let x: f64 = f[1].parse().map_err(|_| perr(ln, "bad x"))?;
                    let y: f64 = f[2].parse().map_err(|_| perr(ln, "bad y"))?;
                    let bc = f[3]
                        .parse::<u8>()
                        .ok()
                        .and_then(BoundaryClass::from_code)
                        .ok_or_else(|| perr(ln, "bad boundary class"))?;
                    let level: usize = f[4].parse().map_err(|_| perr(ln, "bad level"))?;
                    vertices.push(Vertex {
                        x,
                        y,
                        bc,
                        level,
                        parents: None,
                    });
                }
                Some(&"s") if f.len() == 6 => {
                    let mut idx = [0usize; 3];
                    for k in 0..3 {
                        idx[k] = f[1 + k].parse().map_err(|_| perr(ln, "bad vertex index"))?;
                        if idx[k] >= nv {
                            return Err(perr(ln, "vertex index out of range"));
                        }
                    }
                    let level: usize = f[4].parse().map_err(|_| perr(ln, "bad level"))?;
                    let kind = match f[5] {
                        "0" => SimplexKind::Root,
                        "1" => SimplexKind::Red,
                        "2" => SimplexKind::Green,
                        _ => return Err(perr(ln, "bad simplex kind")),
                    };
                    simplices.push(Simplex {
                        vertices: idx,
                        level,
                        kind,
                        parent: None,
                    });
                }
                _ => return Err(perr(ln, "unrecognised record")),
            }
        }
        if vertices.len() != nv || simplices.len() != ns {
            return Err(perr(hl, "record counts do not match header"));
        }
        rebuild(vertices, simplices)
    }
}

fn rebuild(mut vertices: Vec<Vertex>, mut simplices: Vec<Simplex>) -> Result<Mesh> {
    let nlevels = vertices.iter().map(|v| v.level).max().unwrap_or(0).max(
        simplices.iter().map(|s| s.level).max().unwrap_or(0),
    ) + 1;
    if vertices.windows(2).any(|w| w[0].level > w[1].level) {
        return Err(Error::Numbering("vertices are not numbered coarse-first".into()));
    }
    let mut level_offsets = vec![0usize; nlevels];
    for (j, off) in level_offsets.iter_mut().enumerate() {
        *off = vertices.iter().position(|v| v.level >= j).unwrap_or(vertices.len());
    }

    // parents: a simplex created at level j > 0 lies inside a level j-1 leaf,
    // or (for multi-step bisection) inside a same-level simplex that is not a leaf.
    let contains = |outer: &Simplex, inner: &Simplex, v: &[Vertex]| {
        let c = inner.vertices.iter().fold((0.0, 0.0), |acc, &i| {
            (acc.0 + v[i].x / 3.0, acc.1 + v[i].y / 3.0)
        });
        let p = outer.vertices.map(|i| (v[i].x, v[i].y));
        (0..3).all(|k| {
            let (a, b) = (p[k], p[(k + 1) % 3]);
            (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0) > 0.0
        })
    };
    let area = |s: &Simplex, v: &[Vertex]| {
        let [a, b, c] = s.vertices.map(|i| &v[i]);
        0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
    };
    let mut leaves: Vec<Vec<usize>> = Vec::with_capacity(nlevels);
    leaves.push(
        (0..simplices.len())
            .filter(|&s| simplices[s].level == 0)
            .collect(),
    );
    for j in 1..nlevels {
        let prev = leaves[j - 1].clone();
        let created: Vec<usize> = (0..simplices.len()).filter(|&s| simplices[s].level == j).collect();
        let mut candidates = prev.clone();
        candidates.extend(&created);
        let mut has_child = vec![false; simplices.len()];
        for &s in &created {
            // smallest containing simplex strictly larger than s
            let a_s = area(&simplices[s], &vertices);
            let parent = candidates
                .iter()
                .copied()
                .filter(|&p| p != s && area(&simplices[p], &vertices) > a_s * (1.0 + 1e-9))
                .filter(|&p| contains(&simplices[p], &simplices[s], &vertices))
                .min_by(|&p, &q| {
                    area(&simplices[p], &vertices)
                        .partial_cmp(&area(&simplices[q], &vertices))
                        .unwrap()
                })
                .ok_or_else(|| Error::Numbering(format!("simplex {s} has no parent")))?;
            simplices[s].parent = Some(parent);
            has_child[parent] = true;
        }
        let mut next: Vec<usize> = candidates.into_iter().filter(|&s| !has_child[s]).collect();
        next.sort_unstable();
        leaves.push(next);
    }

    // vertex parents: midpoint of an edge of a previous-level leaf
    let key = |x: f64, y: f64| (x.to_bits(), y.to_bits());
    for j in 1..nlevels {
        let mut mids: HashMap<(u64, u64), [usize; 2]> = HashMap::new();
        for &s in &leaves[j - 1] {
            let v = simplices[s].vertices;
            for k in 0..3 {
                let (a, b) = (v[k].min(v[(k + 1) % 3]), v[k].max(v[(k + 1) % 3]));
                let (x, y) = (
                    0.5 * (vertices[a].x + vertices[b].x),
                    0.5 * (vertices[a].y + vertices[b].y),
                );
                mids.insert(key(x, y), [a, b]);
            }
        }
        for v in vertices.iter_mut().filter(|v| v.level == j) {
            v.parents = Some(*mids.get(&key(v.x, v.y)).ok_or_else(|| {
                Error::Numbering(format!("vertex ({}, {}) is not an edge midpoint", v.x, v.y))
            })?);
        }
    }

    let boundary: Vec<&Vertex> = vertices
        .iter()
        .filter(|v| v.bc != BoundaryClass::Interior)
        .collect();
    let partition = if boundary.iter().all(|v| v.bc == BoundaryClass::Dirichlet) {
        None
    } else if boundary.iter().all(|v| v.bc == BoundaryClass::Neumann) {
        Some(Experiment::II)
    } else {
        Some(Experiment::I)
    };
    Ok(Mesh {
        vertices,
        simplices,
        leaves,
        level_offsets,
        partition,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{unit_square_mesh, Experiment, RefineRule};
    use super::*;

    #[test]
    fn round_trip_preserves_levels() {
        for rule in [RefineRule::RedGreen, RefineRule::Bisection] {
            let mut m = unit_square_mesh(3).unwrap().classify_boundary(Experiment::I);
            for _ in 0..3 {
                let marked = m.mark_by_arc(0.25).unwrap();
                m = m.refine_with(&marked, rule).unwrap();
            }
            let text = m.to_text();
            let back = Mesh::from_text(&text).unwrap();
            assert_eq!(back.vertices(), m.vertices());
            assert_eq!(back.nlevels(), m.nlevels());
            for j in 0..m.nlevels() {
                let mut a = m.leaves(j).to_vec();
                a.sort_unstable();
                assert_eq!(back.leaves(j), &a[..]);
            }
            assert_eq!(back.partition(), Some(Experiment::I));
            assert_eq!(back.to_text(), text);
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(Mesh::from_text("").is_err());
        assert!(Mesh::from_text("dim 3 nv 0 ns 0").is_err());
        assert!(Mesh::from_text("dim 2 nv 1 ns 0\nv 0 0 7 0\n").is_err());
        assert!(Mesh::from_text("dim 2 nv 1 ns 0\n").is_err());
    }
}
