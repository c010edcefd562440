//! Stationary multilevel iteration and preconditioned conjugate gradients.
//!
//! Both solvers stop on the energy norm of the algebraic error against a
//! reference solution. Error and residual norms are instrumentation and are
//! not included in the flop counts.

use crate::assembly::energy_norm;
use crate::error::{Error, Result};
use crate::flops;
use crate::sparse::MatVec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Energy-norm error tolerance.
    pub tol: f64,
    pub max_iterations: usize,
    /// Abort once the error exceeds this multiple of the initial error.
    pub divergence_factor: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-7,
            max_iterations: 500,
            divergence_factor: 10.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub converged: bool,
    /// Flops of one complete iteration (the first one).
    pub flops_per_iteration: u64,
    /// Flops of the preconditioner setup, filled in by the caller.
    pub flops_setup: u64,
    /// Euclidean residual norm after each iteration.
    pub residual_history: Vec<f64>,
    /// Energy-norm error after each iteration.
    pub error_history: Vec<f64>,
    /// Lanczos estimate of the condition number of the preconditioned
    /// operator (PCG only).
    pub cond_estimate: Option<f64>,
    pub solution: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    flops::mul_add(a.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn error_norm(a: &impl MatVec, u: &[f64], u_ref: &[f64]) -> Result<f64> {
    flops::uncounted(|| {
        let e: Vec<f64> = u.iter().zip(u_ref).map(|(x, y)| x - y).collect();
        energy_norm(a, &e)
    })
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn check_dims(a: &impl MatVec, b: &[f64], u_ref: &[f64]) -> Result<()> {
    for len in [b.len(), u_ref.len(), a.ncols()] {
        if len != a.nrows() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: len,
            });
        }
    }
    Ok(())
}

/// `u <- u + B (b - A u)` from `u = 0` until the energy error drops below
/// the tolerance.
pub fn stationary_solve(
    a: &impl MatVec,
    b: &[f64],
    mut cycle: impl FnMut(&[f64]) -> Result<Vec<f64>>,
    u_ref: &[f64],
    opts: SolveOptions,
) -> Result<SolveReport> {
    check_dims(a, b, u_ref)?;
    let n = b.len();
    let mut u = vec![0.0; n];
    let e0 = error_norm(a, &u, u_ref)?;
    let mut rep = SolveReport::default();
    if e0 < opts.tol {
        rep.converged = true;
        rep.solution = u;
        return Ok(rep);
    }
    for k in 1..=opts.max_iterations {
        let (res, count) = flops::measure(|| -> Result<f64> {
            let mut r = a.matvec(&u)?;
            r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
            flops::add(n);
            let rnorm = flops::uncounted(|| l2(&r));
            let c = cycle(&r)?;
            u.iter_mut().zip(&c).for_each(|(ui, ci)| *ui += ci);
            flops::add(n);
            Ok(rnorm)
        });
        rep.residual_history.push(res?);
        if k == 1 {
            rep.flops_per_iteration = count.total();
        }
        let err = error_norm(a, &u, u_ref)?;
        rep.error_history.push(err);
        rep.iterations = k;
        if err < opts.tol {
            rep.converged = true;
            break;
        }
        if err > opts.divergence_factor * e0 || !err.is_finite() {
            return Err(Error::Divergence {
                iteration: k,
                error: err,
                initial: e0,
            });
        }
    }
    rep.solution = u;
    Ok(rep)
}

/// Preconditioned conjugate gradients from `u = 0`.
pub fn pcg(
    a: &impl MatVec,
    b: &[f64],
    mut precond: impl FnMut(&[f64]) -> Result<Vec<f64>>,
    u_ref: &[f64],
    opts: SolveOptions,
) -> Result<SolveReport> {
    check_dims(a, b, u_ref)?;
    let n = b.len();
    let mut u = vec![0.0; n];
    let e0 = error_norm(a, &u, u_ref)?;
    let mut rep = SolveReport::default();
    if e0 < opts.tol {
        rep.converged = true;
        rep.cond_estimate = Some(1.0);
        rep.solution = u;
        return Ok(rep);
    }
    let mut r = b.to_vec();
    let mut z = precond(&r)?;
    let mut rz = dot(&r, &z);
    if rz <= 0.0 {
        return Err(Error::IndefinitePreconditioner(rz));
    }
    let mut p = z.clone();
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    for k in 1..=opts.max_iterations {
        let (step, count) = flops::measure(|| -> Result<Option<f64>> {
            let q = a.matvec(&p)?;
            let alpha = rz / dot(&p, &q);
            flops::div(1);
            for i in 0..n {
                u[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            flops::mul_add(2 * n);
            alphas.push(alpha);
            let err = error_norm(a, &u, u_ref)?;
            if err < opts.tol {
                return Ok(Some(err));
            }
            z = precond(&r)?;
            let rz_new = dot(&r, &z);
            if rz_new <= 0.0 {
                return Err(Error::IndefinitePreconditioner(rz_new));
            }
            let beta = rz_new / rz;
            flops::div(1);
            betas.push(beta);
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
            flops::mul_add(n);
            Ok(None)
        });
        let done = step?;
        if k == 1 {
            rep.flops_per_iteration = count.total();
        }
        rep.iterations = k;
        rep.residual_history.push(l2(&r));
        let err = match done {
            Some(e) => e,
            None => error_norm(a, &u, u_ref)?,
        };
        rep.error_history.push(err);
        if done.is_some() {
            rep.converged = true;
            break;
        }
        if err > opts.divergence_factor * e0 || !err.is_finite() {
            return Err(Error::Divergence {
                iteration: k,
                error: err,
                initial: e0,
            });
        }
    }
    // the last step before convergence skips the preconditioner, so its
    // flops are measured on a full iteration only when one was completed
    if rep.iterations == 1 && rep.converged {
        rep.flops_per_iteration += flops::measure(|| precond(&r).map(|z| dot(&r, &z))).1.total();
    }
    rep.cond_estimate = Some(lanczos_condition(&alphas, &betas));
    rep.solution = u;
    Ok(rep)
}

/// Condition number of the Lanczos tridiagonal built from PCG coefficients.
pub fn lanczos_condition(alphas: &[f64], betas: &[f64]) -> f64 {
    let k = alphas.len();
    if k == 0 {
        return 1.0;
    }
    let mut t = nalgebra::DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = 1.0 / alphas[i];
        if i > 0 {
            t[(i, i)] += betas[i - 1] / alphas[i - 1];
            let off = betas[i - 1].sqrt() / alphas[i - 1];
            t[(i, i - 1)] = off;
            t[(i - 1, i)] = off;
        }
    }
    let eig = t.symmetric_eigen().eigenvalues;
    let max = eig.iter().copied().fold(f64::MIN, f64::max);
    let min = eig.iter().copied().fold(f64::MAX, f64::min);
    max / min
}
