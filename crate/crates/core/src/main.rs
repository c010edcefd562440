use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mlprec::experiment::{
    basis_csv, emit_tables, export_basis_function, run_experiment, BasisKind, ExperimentPlan, Method,
};
use mlprec::mesh::Experiment;
use mlprec::precond::SmootherKey;
use mlprec::{Error, Result};

#[derive(Parser)]
#[command(name = "mlprec", about = "Multilevel preconditioners on locally refined meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment set and write the iteration and flop tables.
    Run {
        #[arg(long, value_parser = parse::<Experiment>)]
        set: Experiment,
        /// Number of mesh levels (defaults: 8 for set I, 14 for set II).
        #[arg(long)]
        levels: Option<usize>,
        /// `all` or a comma-separated list such as `MG,PCG-BPX`.
        #[arg(long, default_value = "all")]
        methods: String,
        #[arg(long)]
        out: PathBuf,
        /// Subdivisions per side of the initial grid.
        #[arg(long)]
        grid: Option<usize>,
        /// Refinement arc radius.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value = "sgs", value_parser = parse::<SmootherKey>)]
        smoother: SmootherKey,
        /// Jacobi iterations used to build the wavelet-modified basis.
        #[arg(long, default_value_t = 2)]
        jacobi_steps: usize,
    },
    /// Export one basis function sampled at the mesh vertices as `x,y,value`.
    Basis {
        /// Mesh level of the basis function (1 is the initial grid).
        #[arg(long)]
        level: usize,
        /// DOF index on that level (0-based).
        #[arg(long)]
        dof: usize,
        #[arg(long, value_parser = parse::<BasisKind>)]
        basis: BasisKind,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "I", value_parser = parse::<Experiment>)]
        set: Experiment,
        /// Levels of the sampling mesh (defaults to `--level`).
        #[arg(long)]
        levels: Option<usize>,
        /// Stabilizer iterations (defaults: 1 Gauss-Seidel sweep, 2 Jacobi steps).
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Write a refined mesh in the plain-text mesh format.
    Mesh {
        #[arg(long)]
        export: PathBuf,
        #[arg(long, default_value = "I", value_parser = parse::<Experiment>)]
        set: Experiment,
        #[arg(long)]
        levels: Option<usize>,
    },
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn write(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            set,
            levels,
            methods,
            out,
            grid,
            radius,
            smoother,
            jacobi_steps,
        } => {
            let mut plan = ExperimentPlan::new(set);
            plan.methods = Method::parse_list(&methods)?;
            plan.levels = levels.unwrap_or(plan.levels);
            plan.initial_grid = grid.unwrap_or(plan.initial_grid);
            plan.arc_radius = radius.unwrap_or(plan.arc_radius);
            plan.smoother = smoother;
            plan.jacobi_steps = jacobi_steps;
            let results = run_experiment(&plan)?;
            let tables = emit_tables(&plan.methods, &results);
            tables.write(&out)?;
            print!("{}", tables.iterations.to_csv()?);
            Ok(())
        }
        Command::Basis {
            level,
            dof,
            basis,
            out,
            set,
            levels,
            steps,
        } => {
            if level == 0 {
                return Err(Error::InvalidArgument("levels are numbered from 1".into()));
            }
            let plan = ExperimentPlan::new(set);
            let mesh = plan.mesh(levels.unwrap_or(level).max(level))?;
            let steps = steps.unwrap_or(match basis {
                BasisKind::WmhbJac => 2,
                _ => 1,
            });
            let points = export_basis_function(&mesh, level - 1, dof, basis, steps)?;
            write(&out, &basis_csv(&points)?)
        }
        Command::Mesh { export, set, levels } => {
            let plan = ExperimentPlan::new(set);
            let mesh = plan.mesh(levels.unwrap_or(plan.levels))?;
            write(&export, &mesh.to_text())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
