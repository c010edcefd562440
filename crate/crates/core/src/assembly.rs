//! Linear finite element assembly for `-div(p grad u) + q u = f` on a mesh
//! level, with homogeneous Dirichlet conditions eliminated and natural
//! Neumann data `n . (p grad u) = g`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mesh::{BoundaryClass, Mesh};
use crate::sparse::{MatVec, XlnMatrix};

type ScalarField = Box<dyn Fn(f64, f64) -> f64>;

/// Coefficients and data of the model problem.
pub struct ProblemSpec {
    /// Symmetric positive definite diffusion tensor.
    pub p: Box<dyn Fn(f64, f64) -> [[f64; 2]; 2]>,
    pub q: ScalarField,
    pub f: ScalarField,
    /// Flux `g(x, y, nx, ny)` on Neumann edges with outward normal `(nx, ny)`.
    pub g: Box<dyn Fn(f64, f64, f64, f64) -> f64>,
    pub u_exact: Option<ScalarField>,
}

impl ProblemSpec {
    /// `p = I`, `q = 1`, data manufactured from `u = sin(pi x) sin(pi y)`.
    pub fn manufactured() -> Self {
        ProblemSpec {
            p: Box::new(|_, _| [[1.0, 0.0], [0.0, 1.0]]),
            q: Box::new(|_, _| 1.0),
            f: Box::new(manufactured_source),
            g: Box::new(manufactured_flux),
            u_exact: Some(Box::new(|x, y| (PI * x).sin() * (PI * y).sin())),
        }
    }
}

/// `(2 pi^2 + 1) sin(pi x) sin(pi y)`.
pub fn manufactured_source(x: f64, y: f64) -> f64 {
    (2.0 * PI * PI + 1.0) * (PI * x).sin() * (PI * y).sin()
}

/// `n . grad u` for `u = sin(pi x) sin(pi y)`.
pub fn manufactured_flux(x: f64, y: f64, nx: f64, ny: f64) -> f64 {
    let ux = PI * (PI * x).cos() * (PI * y).sin();
    let uy = PI * (PI * x).sin() * (PI * y).cos();
    nx * ux + ny * uy
}

/// Vertex to DOF numbering. DOF are the non-Dirichlet vertices taken in
/// vertex order, so the numbering on a coarser level is a prefix of the
/// numbering on a finer one.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    vertex_to_dof: Vec<Option<usize>>,
    dof_to_vertex: Vec<usize>,
}

impl DofMap {
    pub fn new(mesh: &Mesh, level: usize) -> Self {
        let nv = mesh.vertex_count(level);
        let mut vertex_to_dof = vec![None; nv];
        let mut dof_to_vertex = Vec::new();
        for (v, vert) in mesh.vertices()[..nv].iter().enumerate() {
            if vert.bc != BoundaryClass::Dirichlet {
                vertex_to_dof[v] = Some(dof_to_vertex.len());
                dof_to_vertex.push(v);
            }
        }
        DofMap {
            vertex_to_dof,
            dof_to_vertex,
        }
    }

    pub fn ndof(&self) -> usize {
        self.dof_to_vertex.len()
    }

    pub fn nvertices(&self) -> usize {
        self.vertex_to_dof.len()
    }

    pub fn dof(&self, vertex: usize) -> Option<usize> {
        self.vertex_to_dof.get(vertex).copied().flatten()
    }

    pub fn vertex(&self, dof: usize) -> usize {
        self.dof_to_vertex[dof]
    }
}

pub struct AssembledSystem {
    pub a: XlnMatrix,
    pub m: XlnMatrix,
    pub b: Vec<f64>,
    pub dof_map: DofMap,
}

impl AssembledSystem {
    pub fn ndof(&self) -> usize {
        self.dof_map.ndof()
    }
}

/// Element stiffness (`p` term plus `q` mass term) and mass matrices of a
/// linear triangle, coefficients frozen at the centroid.
fn element_matrices(
    xy: [(f64, f64); 3],
    p: [[f64; 2]; 2],
    q: f64,
) -> ([[f64; 3]; 3], [[f64; 3]; 3], f64) {
    let area = 0.5 * ((xy[1].0 - xy[0].0) * (xy[2].1 - xy[0].1) - (xy[2].0 - xy[0].0) * (xy[1].1 - xy[0].1));
    // grad phi_i = (y_j - y_k, x_k - x_j) / (2 area)
    let mut grad = [[0.0; 2]; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        grad[i] = [(xy[j].1 - xy[k].1) / (2.0 * area), (xy[k].0 - xy[j].0) / (2.0 * area)];
    }
    let mut ke = [[0.0; 3]; 3];
    let mut me = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let pg = [
                p[0][0] * grad[j][0] + p[0][1] * grad[j][1],
                p[1][0] * grad[j][0] + p[1][1] * grad[j][1],
            ];
            let mass = area / 12.0 * if i == j { 2.0 } else { 1.0 };
            me[i][j] = mass;
            ke[i][j] = area * (grad[i][0] * pg[0] + grad[i][1] * pg[1]) + q * mass;
        }
    }
    (ke, me, area)
}

/// Outward normal of the unit-square side containing both points.
fn outward_normal(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    if a.0 == 0.0 && b.0 == 0.0 {
        (-1.0, 0.0)
    } else if a.0 == 1.0 && b.0 == 1.0 {
        (1.0, 0.0)
    } else if a.1 == 0.0 && b.1 == 0.0 {
        (0.0, -1.0)
    } else {
        (0.0, 1.0)
    }
}

fn is_neumann_edge(mesh: &Mesh, a: usize, b: usize) -> bool {
    if !mesh.on_common_side(a, b) {
        return false;
    }
    let (va, vb) = (&mesh.vertices()[a], &mesh.vertices()[b]);
    match mesh.partition() {
        Some(e) => e.classify(0.5 * (va.x + vb.x), 0.5 * (va.y + vb.y)) == BoundaryClass::Neumann,
        None => va.bc == BoundaryClass::Neumann && vb.bc == BoundaryClass::Neumann,
    }
}

/// Assembles the reduced system on the leaf simplices of `level`.
pub fn assemble(mesh: &Mesh, level: usize, spec: &ProblemSpec) -> Result<AssembledSystem> {
    if level >= mesh.nlevels() {
        return Err(Error::InvalidArgument(format!(
            "level {level} does not exist (mesh has {} levels)",
            mesh.nlevels()
        )));
    }
    let dof_map = DofMap::new(mesh, level);
    let n = dof_map.ndof();
    let mut a = XlnMatrix::new(n, n);
    let mut m = XlnMatrix::new(n, n);
    let mut b = vec![0.0; n];
    let verts = mesh.vertices();
    let half_gauss = 0.5 / 3f64.sqrt();

    for &s in mesh.leaves(level) {
        let simplex = &mesh.simplices()[s];
        let vid = simplex.vertices;
        let xy = vid.map(|v| (verts[v].x, verts[v].y));
        let area = mesh.signed_area(simplex);
        if area <= 0.0 {
            return Err(Error::DegenerateSimplex { index: s, area });
        }
        let (cx, cy) = (
            (xy[0].0 + xy[1].0 + xy[2].0) / 3.0,
            (xy[0].1 + xy[1].1 + xy[2].1) / 3.0,
        );
        let (ke, me, _) = element_matrices(xy, (spec.p)(cx, cy), (spec.q)(cx, cy));
        let dofs = vid.map(|v| dof_map.dof(v));
        // load: edge-midpoint rule, phi_i is 1/2 at the two midpoints of its edges
        let fm: [f64; 3] = std::array::from_fn(|k| {
            let (p, q) = (xy[k], xy[(k + 1) % 3]);
            (spec.f)(0.5 * (p.0 + q.0), 0.5 * (p.1 + q.1))
        });
        for i in 0..3 {
            let Some(r) = dofs[i] else { continue };
            // midpoints of edges (i, i+1) and (i+2, i)
            b[r] += area / 6.0 * (fm[i] + fm[(i + 2) % 3]);
            for j in 0..3 {
                let Some(c) = dofs[j] else { continue };
                a.add_unchecked(r, c, ke[i][j]);
                m.add_unchecked(r, c, me[i][j]);
            }
        }
        for k in 0..3 {
            let (va, vb) = (vid[k], vid[(k + 1) % 3]);
            if !is_neumann_edge(mesh, va, vb) {
                continue;
            }
            let (pa, pb) = (xy[k], xy[(k + 1) % 3]);
            let len = (pb.0 - pa.0).hypot(pb.1 - pa.1);
            let (nx, ny) = outward_normal(pa, pb);
            for t in [0.5 - half_gauss, 0.5 + half_gauss] {
                let (x, y) = (pa.0 + t * (pb.0 - pa.0), pa.1 + t * (pb.1 - pa.1));
                let g = (spec.g)(x, y, nx, ny) * len * 0.5;
                if let Some(r) = dofs[k] {
                    b[r] += g * (1.0 - t);
                }
                if let Some(r) = dofs[(k + 1) % 3] {
                    b[r] += g * t;
                }
            }
        }
    }
    Ok(AssembledSystem { a, m, b, dof_map })
}

/// `sqrt(v' A v)`.
pub fn energy_norm(a: &impl MatVec, v: &[f64]) -> Result<f64> {
    let av = a.matvec(v)?;
    let q: f64 = av.iter().zip(v).map(|(x, y)| x * y).sum();
    if q < -1e-12 {
        return Err(Error::SpdViolation(q));
    }
    Ok(q.max(0.0).sqrt())
}
