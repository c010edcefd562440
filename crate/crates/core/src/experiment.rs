//! Experiment driver: refines the model meshes level by level, runs every
//! method on each level and collects iteration and flop tables.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::assembly::{assemble, ProblemSpec};
use crate::error::{Error, Result};
use crate::hierarchy::{Basis, Hierarchy, Stabilizer};
use crate::mesh::{unit_square_mesh, BoundaryClass, Experiment, Mesh, RefineRule};
use crate::precond::{Family, MethodConfig, Mode, Preconditioner, SmootherKey};
use crate::solver::{pcg, stationary_solve, EnvelopeCholesky, SolveOptions, SolveReport};
use crate::flops;

/// The twelve solver configurations of the iteration tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Mg,
    MBpx,
    Hbmg,
    Wmhbmg,
    PcgMg,
    PcgMBpx,
    PcgHbmg,
    PcgWmhbmg,
    PcgAMg,
    PcgBpx,
    PcgHb,
    PcgWmhb,
}

impl Method {
    pub const ALL: [Method; 12] = [
        Method::Mg,
        Method::MBpx,
        Method::Hbmg,
        Method::Wmhbmg,
        Method::PcgMg,
        Method::PcgMBpx,
        Method::PcgHbmg,
        Method::PcgWmhbmg,
        Method::PcgAMg,
        Method::PcgBpx,
        Method::PcgHb,
        Method::PcgWmhb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Mg => "MG",
            Method::MBpx => "M.BPX",
            Method::Hbmg => "HBMG",
            Method::Wmhbmg => "WMHBMG",
            Method::PcgMg => "PCG-MG",
            Method::PcgMBpx => "PCG-M.BPX",
            Method::PcgHbmg => "PCG-HBMG",
            Method::PcgWmhbmg => "PCG-WMHBMG",
            Method::PcgAMg => "PCG-A.MG",
            Method::PcgBpx => "PCG-BPX",
            Method::PcgHb => "PCG-HB",
            Method::PcgWmhb => "PCG-WMHB",
        }
    }

    pub fn family(self) -> Family {
        match self {
            Method::Mg | Method::PcgMg | Method::PcgAMg => Family::Mg,
            Method::MBpx | Method::PcgMBpx | Method::PcgBpx => Family::Bpx,
            Method::Hbmg | Method::PcgHbmg | Method::PcgHb => Family::Hbmg,
            Method::Wmhbmg | Method::PcgWmhbmg | Method::PcgWmhb => Family::Wmhbmg,
        }
    }

    pub fn mode(self) -> Mode {
        match self {
            Method::PcgAMg | Method::PcgBpx | Method::PcgHb | Method::PcgWmhb => Mode::Additive,
            _ => Mode::Multiplicative,
        }
    }

    /// Whether the cycle is used as a PCG preconditioner rather than as a
    /// stationary iteration.
    pub fn uses_pcg(self) -> bool {
        !matches!(self, Method::Mg | Method::MBpx | Method::Hbmg | Method::Wmhbmg)
    }

    /// Parses `all` or a comma-separated list of method names.
    pub fn parse_list(s: &str) -> Result<Vec<Method>> {
        if s.trim() == "all" {
            return Ok(Method::ALL.to_vec());
        }
        let mut out: Vec<Method> = Vec::new();
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            let m: Method = name.parse()?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidArgument("no methods given".into()));
        }
        out.sort();
        Ok(out)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub set: Experiment,
    /// Number of mesh levels; level 1 is the initial grid.
    pub levels: usize,
    pub arc_radius: f64,
    /// Subdivisions per side of the initial grid.
    pub initial_grid: usize,
    pub rule: RefineRule,
    pub methods: Vec<Method>,
    pub smoother: SmootherKey,
    pub jacobi_steps: usize,
    pub options: SolveOptions,
}

impl ExperimentPlan {
    /// Defaults of the two experiment sets: 8 levels of red-green refinement
    /// from a 3x3 grid for set I, 14 levels of bisection refinement from a
    /// 16x16 grid for set II.
    pub fn new(set: Experiment) -> Self {
        let (levels, grid, rule) = match set {
            Experiment::I => (8, 3, RefineRule::RedGreen),
            Experiment::II => (14, 16, RefineRule::Bisection),
        };
        ExperimentPlan {
            set,
            levels,
            arc_radius: set.arc_radius(),
            initial_grid: grid,
            rule,
            methods: Method::ALL.to_vec(),
            smoother: SmootherKey::Sgs,
            jacobi_steps: 2,
            options: SolveOptions::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.levels == 0 {
            return Err(Error::InvalidArgument("at least one level is required".into()));
        }
        if self.arc_radius.is_nan() || self.arc_radius <= 0.0 {
            return Err(Error::InvalidArgument("arc radius must be positive".into()));
        }
        Ok(())
    }

    pub fn initial_mesh(&self) -> Result<Mesh> {
        Ok(unit_square_mesh(self.initial_grid)?.classify_boundary(self.set))
    }

    /// Refines `mesh` once along the arc.
    pub fn refine(&self, mesh: &Mesh) -> Result<Mesh> {
        let marked = mesh.mark_by_arc(self.arc_radius)?;
        mesh.refine_with(&marked, self.rule)
    }

    /// Mesh with `levels` levels.
    pub fn mesh(&self, levels: usize) -> Result<Mesh> {
        let mut m = self.initial_mesh()?;
        for _ in 1..levels {
            m = self.refine(&m)?;
        }
        Ok(m)
    }
}

/// Results of one level of an experiment.
#[derive(Debug, Clone)]
pub struct LevelResult {
    pub level: usize,
    pub nodes: usize,
    pub dof: usize,
    pub reports: BTreeMap<Method, SolveReport>,
}

/// Runs every method of the plan on levels `1..=plan.levels`.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<Vec<LevelResult>> {
    plan.validate()?;
    let spec = ProblemSpec::manufactured();
    let mut mesh = plan.initial_mesh()?;
    let mut results = Vec::with_capacity(plan.levels);
    for level in 1..=plan.levels {
        if level > 1 {
            mesh = plan.refine(&mesh)?;
        }
        results.push(run_level(plan, &spec, &mesh, level)?);
    }
    Ok(results)
}

fn run_level(plan: &ExperimentPlan, spec: &ProblemSpec, mesh: &Mesh, level: usize) -> Result<LevelResult> {
    let sys = assemble(mesh, mesh.finest(), spec)?;
    let a = sys.a.to_row();
    let u_ref = flops::uncounted(|| EnvelopeCholesky::from_row(&a)?.solve(&sys.b))?;
    let stab = Stabilizer::Jacobi(plan.jacobi_steps);
    let mut hierarchies: BTreeMap<u8, Hierarchy> = BTreeMap::new();
    let mut reports = BTreeMap::new();
    for &method in &plan.methods {
        let wrap = |e: Error| Error::Experiment {
            method: method.name().to_string(),
            level,
            source: Box::new(e),
        };
        let basis = method.family().basis();
        let h = match hierarchies.entry(basis as u8) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(Hierarchy::build(mesh, &sys.a, Some(&sys.m), basis, stab).map_err(wrap)?),
        };
        let h = &*h;
        let config = MethodConfig {
            smoother: plan.smoother,
            ..MethodConfig::new(method.family(), method.mode())
        };
        let b = Preconditioner::new(h, config).map_err(wrap)?;
        let apply = |r: &[f64]| b.apply(r);
        let mut rep = if method.uses_pcg() {
            pcg(&a, &sys.b, apply, &u_ref, plan.options)
        } else {
            stationary_solve(&a, &sys.b, apply, &u_ref, plan.options)
        }
        .map_err(wrap)?;
        rep.flops_setup = h.setup_flops().total();
        rep.solution = Vec::new();
        reports.insert(method, rep);
    }
    Ok(LevelResult {
        level,
        nodes: mesh.vertices().len(),
        dof: sys.ndof(),
        reports,
    })
}

/// A table with one row per method and one column per level.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<String>)>,
}

impl Table {
    pub fn new(levels: usize) -> Self {
        Table {
            columns: (1..=levels).map(|l| format!("L{l}")).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let err = |e: csv::Error| Error::Io {
            path: "<csv>".into(),
            msg: e.to_string(),
        };
        let mut header = vec!["method".to_string()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header).map_err(err)?;
        for (name, vals) in &self.rows {
            let mut rec = vec![name.clone()];
            rec.extend(vals.iter().cloned());
            w.write_record(&rec).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io {
            path: "<csv>".into(),
            msg: e.to_string(),
        })?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let err = |e: csv::Error| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        };
        let header = r.headers().map_err(err)?.clone();
        if header.get(0) != Some("method") {
            return Err(Error::Parse {
                line: 1,
                msg: "first column must be `method`".into(),
            });
        }
        let columns = header.iter().skip(1).map(String::from).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(err)?;
            let name = rec.get(0).unwrap_or_default().to_string();
            rows.push((name, rec.iter().skip(1).map(String::from).collect()));
        }
        Ok(Table { columns, rows })
    }

    /// Values of the row labelled `name`, parsed as numbers.
    pub fn row(&self, name: &str) -> Option<Vec<f64>> {
        self.rows
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.iter().map(|s| s.parse().unwrap_or(f64::NAN)).collect())
    }
}

/// The CSV tables written by `mlprec run`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tables {
    pub iterations: Table,
    pub flops_single_cycle: Table,
    pub flops_setup: Table,
    pub dof: Table,
    pub condition: Table,
}

impl Tables {
    pub fn files(&self) -> [(&'static str, &Table); 5] {
        [
            ("iterations.csv", &self.iterations),
            ("flops_single_cycle.csv", &self.flops_single_cycle),
            ("flops_setup.csv", &self.flops_setup),
            ("dof.csv", &self.dof),
            ("condition.csv", &self.condition),
        ]
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.display().to_string(),
            msg: e.to_string(),
        })?;
        for (name, table) in self.files() {
            let path = dir.join(name);
            std::fs::write(&path, table.to_csv()?).map_err(|e| Error::Io {
                path: path.display().to_string(),
                msg: e.to_string(),
            })?;
        }
        Ok(())
    }
}

/// Arranges per-level results into tables. Every table ends with the
/// `Nodes` and `DOF` rows.
pub fn emit_tables(methods: &[Method], results: &[LevelResult]) -> Tables {
    let levels = results.len();
    let row = |m: Method, f: &dyn Fn(&SolveReport) -> String| -> (String, Vec<String>) {
        let vals = results
            .iter()
            .map(|r| r.reports.get(&m).map(f).unwrap_or_default())
            .collect();
        (m.name().to_string(), vals)
    };
    let footer = [
        ("Nodes".to_string(), results.iter().map(|r| r.nodes.to_string()).collect()),
        ("DOF".to_string(), results.iter().map(|r| r.dof.to_string()).collect()),
    ];
    let table = |f: &dyn Fn(&SolveReport) -> String, filter: &dyn Fn(Method) -> bool| {
        let mut t = Table::new(levels);
        t.rows = methods.iter().filter(|&&m| filter(m)).map(|&m| row(m, f)).collect();
        t.rows.extend(footer.iter().cloned());
        t
    };
    let all = |_: Method| true;
    Tables {
        iterations: table(&|r| r.iterations.to_string(), &all),
        flops_single_cycle: table(&|r| r.flops_per_iteration.to_string(), &all),
        flops_setup: table(&|r| r.flops_setup.to_string(), &all),
        dof: table(&|_| String::new(), &|_| false),
        condition: table(
            &|r| r.cond_estimate.map(|c| format!("{c:.6}")).unwrap_or_default(),
            &|m: Method| m.uses_pcg(),
        ),
    }
}

/// Basis function selection for export.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Nodal,
    Hb,
    WmhbGs,
    WmhbJac,
}

impl std::str::FromStr for BasisKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nodal" => Ok(BasisKind::Nodal),
            "hb" => Ok(BasisKind::Hb),
            "wmhb-gs" => Ok(BasisKind::WmhbGs),
            "wmhb-jac" => Ok(BasisKind::WmhbJac),
            _ => Err(Error::InvalidArgument(format!("unknown basis {s:?}"))),
        }
    }
}

/// `(x, y, value)` of basis function `dof` of mesh level `level` (0-based)
/// at every vertex of the finest level of `mesh`. Dirichlet vertices carry 0.
///
/// `steps` is the number of stabilizer iterations for the wavelet bases.
pub fn export_basis_function(
    mesh: &Mesh,
    level: usize,
    dof: usize,
    kind: BasisKind,
    steps: usize,
) -> Result<Vec<(f64, f64, f64)>> {
    if level >= mesh.nlevels() {
        return Err(Error::InvalidArgument(format!(
            "level {} does not exist (mesh has {} levels)",
            level + 1,
            mesh.nlevels()
        )));
    }
    let sys = assemble(mesh, mesh.finest(), &ProblemSpec::manufactured())?;
    let (basis, stab) = match kind {
        BasisKind::Nodal => (Basis::Nodal, Stabilizer::default()),
        BasisKind::Hb => (Basis::Hb, Stabilizer::default()),
        BasisKind::WmhbGs => (Basis::Wmhb, Stabilizer::GaussSeidel(steps)),
        BasisKind::WmhbJac => (Basis::Wmhb, Stabilizer::Jacobi(steps)),
    };
    let h = Hierarchy::build(mesh, &sys.a, Some(&sys.m), basis, stab)?;
    if dof >= h.ndof(level) {
        return Err(Error::InvalidArgument(format!(
            "DOF {dof} does not exist on level {} ({} DOF)",
            level + 1,
            h.ndof(level)
        )));
    }
    if basis != Basis::Nodal && level > 0 && dof < h.ndof(level - 1) {
        return Err(Error::InvalidArgument(format!(
            "DOF {dof} is not a fine DOF of level {} (fine DOF start at {})",
            level + 1,
            h.ndof(level - 1)
        )));
    }
    let values = h.basis_function(level, dof)?;
    Ok(mesh
        .vertices()
        .iter()
        .enumerate()
        .map(|(v, p)| {
            let val = match sys.dof_map.dof(v) {
                Some(d) => values[d],
                None => {
                    debug_assert_eq!(p.bc, BoundaryClass::Dirichlet);
                    0.0
                }
            };
            (p.x, p.y, val)
        })
        .collect())
}

/// Writes `x,y,value` rows.
pub fn basis_csv(points: &[(f64, f64, f64)]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let err = |e: csv::Error| Error::Io {
        path: "<csv>".into(),
        msg: e.to_string(),
    };
    w.write_record(["x", "y", "value"]).map_err(err)?;
    for &(x, y, v) in points {
        w.write_record([x.to_string(), y.to_string(), v.to_string()])
            .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io {
        path: "<csv>".into(),
        msg: e.to_string(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
