//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance`. Criteria listed in
//! `DOCUMENTED_FAILURES` are reported as FAIL without failing the run; the
//! README explains why they fail. Any other failure exits with status 1.

mod common;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use common::*;
use mlprec::experiment::{run_experiment, ExperimentPlan, LevelResult, Method};
use mlprec::hierarchy::{build_prolongations, transform, Basis, ChangeOfBasis, Hierarchy, Stabilizer};
use mlprec::mesh::Experiment;
use mlprec::precond::{
    bpx_classical_apply, hb_additive_apply, Family, MethodConfig, Mode, Preconditioner, SmootherKey,
};
use mlprec::sparse::{
    strip_blocks, xln_mul_col_accum, xln_mul_row_accum, xln_mul_rowt_accum, xln_mul_rowt_row_accum,
    ColMatrix, MatVec, RowMatrix, XlnMatrix,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Criteria that are known to fail with this implementation.
const DOCUMENTED_FAILURES: &[u32] = &[6, 7];

const FAMILIES: [Family; 4] = [Family::Mg, Family::Bpx, Family::Hbmg, Family::Wmhbmg];

struct Outcome {
    id: u32,
    pass: bool,
    detail: String,
    secs: f64,
}

fn timed(id: u32, limit: Option<f64>, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let t = Instant::now();
    let (pass, mut detail) = f();
    let secs = t.elapsed().as_secs_f64();
    let in_time = limit.is_none_or(|l| secs < l);
    if let Some(l) = limit {
        detail.push_str(&format!("; runtime {secs:.2} s (limit {l} s)"));
    }
    Outcome {
        id,
        pass: pass && in_time,
        detail,
        secs,
    }
}

fn golden_example() -> Vec<(usize, usize, f64)> {
    let rows: [&[(usize, f64)]; 5] = [
        &[(0, 1.), (1, 2.)],
        &[(0, 3.), (1, 4.), (2, 5.), (4, 6.)],
        &[(1, 7.), (2, 8.)],
        &[(3, 9.), (4, 10.)],
        &[(1, 11.), (3, 12.), (4, 13.)],
    ];
    rows.iter()
        .enumerate()
        .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
        .collect()
}

fn criterion_1() -> (bool, String) {
    let t = golden_example();
    let col = ColMatrix::from_triplets(5, 5, &t).unwrap().dump();
    let row = RowMatrix::from_triplets(5, 5, &t).unwrap().dump();
    let mut xln = XlnMatrix::new(5, 5);
    for &(r, c, v) in &t {
        xln.insert_add(r, c, v).unwrap();
    }
    let drc = xln.to_drc().unwrap().dump();
    let want_col = "A = [1, 3, 2, 4, 7, 11, 5, 8, 9, 12, 6, 10, 13]\n\
                    IA = [1, 3, 7, 9, 11, 14]\n\
                    JA = [1, 2, 1, 2, 3, 5, 2, 3, 4, 5, 2, 4, 5]\n";
    let want_row = "A = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13]\n\
                    IA = [1, 3, 7, 9, 11, 14]\n\
                    JA = [1, 2, 1, 2, 3, 5, 2, 3, 4, 5, 2, 4, 5]\n";
    let want_drc = "AD = [1, 4, 8, 9, 13]\nAU = [2, 5, 6, 10]\nAL = [3, 7, 11, 12]\n\
                    IA = [1, 2, 4, 4, 5, 5]\nJA = [2, 3, 5, 5]\n";
    let mut by_row = xln.triplets();
    let mut by_col = xln.triplets_by_col();
    by_row.sort_by_key(|t| (t.0, t.1));
    by_col.sort_by_key(|t| (t.0, t.1));
    let checks = [
        ("COL", col == want_col),
        ("ROW", row == want_row),
        ("DRC", drc == want_drc),
        ("XLN", by_row == t && by_col == t),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    (
        failed.is_empty(),
        if failed.is_empty() {
            "COL, ROW, DRC dumps byte-identical; XLN row and column traversals agree".into()
        } else {
            format!("mismatch in {failed:?}")
        },
    )
}

/// Worst relative deviation of every sparse kernel from its dense oracle on
/// one random instance.
fn oracle_instance(rng: &mut StdRng) -> BTreeMap<&'static str, f64> {
    let mut worst: BTreeMap<&'static str, f64> = BTreeMap::new();
    let mut note = |k: &'static str, v: f64| {
        let e = worst.entry(k).or_insert(0.0);
        *e = e.max(v);
    };

    // products and strip on a random square matrix
    let n = rng.gen_range(2..=30);
    let nc = rng.gen_range(1..n);
    let nf = n - nc;
    let t = random_triplets(rng, n, n, 0.25);
    let ad = from_triplets(n, n, &t);
    let k12t = random_triplets(rng, nc, nf, 0.25);
    let k21t = random_triplets(rng, nf, nc, 0.25);
    let embed = |k: &Dense, r0: usize, c0: usize| {
        let mut e = zeros(n, n);
        for (r, row) in k.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                e[r0 + r][c0 + c] = *v;
            }
        }
        e
    };
    let k12 = embed(&from_triplets(nc, nf, &k12t), 0, nc);
    let k21 = embed(&from_triplets(nf, nc, &k21t), nc, 0);
    let got = |f: &dyn Fn(&mut XlnMatrix)| {
        let mut a = XlnMatrix::from_triplets(n, n, &t).unwrap();
        f(&mut a);
        from_triplets(n, n, &a.triplets())
    };
    let k12c = ColMatrix::from_triplets(nc, nf, &k12t).unwrap();
    let k21r = RowMatrix::from_triplets(nf, nc, &k21t).unwrap();
    note(
        "xln products",
        rel_diff_mat(&got(&|a| xln_mul_col_accum(a, &k12c, 0, nc).unwrap()), &add(&ad, &mul(&ad, &k12))),
    );
    note(
        "xln products",
        rel_diff_mat(
            &got(&|a| xln_mul_rowt_accum(a, &k12c, 0, nc).unwrap()),
            &add(&ad, &mul(&transpose(&k12), &ad)),
        ),
    );
    note(
        "xln products",
        rel_diff_mat(&got(&|a| xln_mul_row_accum(a, &k21r, nc, 0).unwrap()), &add(&ad, &mul(&ad, &k21))),
    );
    note(
        "xln products",
        rel_diff_mat(
            &got(&|a| xln_mul_rowt_row_accum(a, &k21r, nc, 0).unwrap()),
            &add(&ad, &mul(&transpose(&k21), &ad)),
        ),
    );
    // strip_blocks needs a structurally symmetric matrix with a full diagonal
    let mut ts = t.clone();
    ts.extend(t.iter().map(|&(r, c, _)| (c, r, rng.gen_range(-1.0..1.0))));
    ts.extend((0..n).map(|i| (i, i, 1.0 + rng.gen::<f64>())));
    let sd = from_triplets(n, n, &ts);
    let mut a = XlnMatrix::from_triplets(n, n, &ts).unwrap();
    let (a12, a21, a22) = strip_blocks(&mut a, nc).unwrap();
    note("strip_blocks", rel_diff_mat(&from_triplets(nc, nc, &a.triplets()), &block(&sd, 0..nc, 0..nc)));
    note("strip_blocks", rel_diff_mat(&from_triplets(nc, nf, &a12.triplets()), &block(&sd, 0..nc, nc..n)));
    note("strip_blocks", rel_diff_mat(&from_triplets(nf, nc, &a21.triplets()), &block(&sd, nc..n, 0..nc)));
    note("strip_blocks", rel_diff_mat(&from_triplets(nf, nf, &a22.to_triplets()), &block(&sd, nc..n, nc..n)));

    // change of basis and preconditioners on a random refined mesh
    let mesh = random_mesh(rng, 30);
    let sys = system(&mesh);
    let n = sys.ndof();
    let ps = build_prolongations(&mesh).unwrap();
    let p = ps.last().unwrap();
    let nc = p.n_coarse();
    let pd = from_triplets(p.n(), nc, &p.p().triplets());
    let a_fine = from_triplets(n, n, &sys.a.triplets());
    let m_fine = from_triplets(n, n, &sys.m.triplets());
    let mut ghb = identity(n);
    for r in nc..n {
        ghb[r][..nc].copy_from_slice(&pd[r]);
    }
    let hb = ChangeOfBasis::hb(p);
    let mut a = sys.a.clone();
    transform(&mut a, &hb, false);
    let want = mul(&transpose(&ghb), &mul(&a_fine, &ghb));
    note("change of basis (hb)", rel_diff_mat(&from_triplets(n, n, &a.triplets()), &want));

    let mut m = sys.m.clone();
    transform(&mut m, &hb, false);
    let mhb = mul(&transpose(&ghb), &mul(&m_fine, &ghb));
    note("change of basis (hb)", rel_diff_mat(&from_triplets(n, n, &m.triplets()), &mhb));
    let wm = ChangeOfBasis::wmhb(p, &m, Stabilizer::Jacobi(2)).unwrap();
    let k12 = jacobi_k12(&block(&mhb, 0..nc, 0..nc), &block(&mhb, 0..nc, nc..n), 2);
    let mut g = ghb.clone();
    for r in 0..nc {
        g[r][nc..].copy_from_slice(&k12[r]);
    }
    let k22 = mul(&block(&pd, nc..n, 0..nc), &k12);
    for r in nc..n {
        for c in nc..n {
            g[r][c] += k22[r - nc][c - nc];
        }
    }
    note("change of basis (wmhb)", rel_diff_mat(&wm.dense_g(), &g));
    let mut a = sys.a.clone();
    transform(&mut a, &wm, false);
    let want = mul(&transpose(&g), &mul(&a_fine, &g));
    note("change of basis (wmhb)", rel_diff_mat(&from_triplets(n, n, &a.triplets()), &want));

    for fam in FAMILIES {
        let basis = fam.basis();
        let h = Hierarchy::build(&mesh, &sys.a, Some(&sys.m), basis, Stabilizer::default()).unwrap();
        let dh = dense_hierarchy(&mesh, &sys, basis);
        for mode in [Mode::Multiplicative, Mode::Additive] {
            for key in [SmootherKey::Sgs, SmootherKey::Jacobi] {
                let config = MethodConfig {
                    smoother: key,
                    ..MethodConfig::new(fam, mode)
                };
                let b = Preconditioner::new(&h, config).unwrap();
                let r = random_vec(rng, n);
                note("preconditioners", rel_diff(&b.apply(&r).unwrap(), &dh.apply(fam, mode, key, &r)));
            }
        }
        let r = random_vec(rng, n);
        match basis {
            Basis::Nodal => note("preconditioners", rel_diff(&bpx_classical_apply(&h, &r).unwrap(), &dh.classical_bpx(&r))),
            Basis::Hb => {
                for key in [SmootherKey::Sgs, SmootherKey::Jacobi] {
                    note(
                        "preconditioners",
                        rel_diff(&hb_additive_apply(&h, &r, key).unwrap(), &dh.classical_hb(&r, key)),
                    );
                }
            }
            Basis::Wmhb => {}
        }
    }
    worst
}

fn criterion_2() -> (bool, String) {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut worst: BTreeMap<&'static str, f64> = BTreeMap::new();
    for _ in 0..200 {
        for (k, v) in oracle_instance(&mut rng) {
            let e = worst.entry(k).or_insert(0.0);
            *e = e.max(v);
        }
    }
    let pass = worst.values().all(|&v| v <= 1e-12);
    let detail: Vec<String> = worst.iter().map(|(k, v)| format!("{k} {v:.1e}")).collect();
    (pass, format!("200 instances, worst relative error: {}", detail.join(", ")))
}

/// Entry `(r, c)` of `Pᵀ A P` from sparse products.
fn galerkin_entry(a: &RowMatrix, p: &ColMatrix, r: usize, c: usize) -> f64 {
    let mut pc = vec![0.0; p.nrows()];
    for (i, v) in p.col(c) {
        pc[i] = v;
    }
    let apc = a.matvec(&pc).unwrap();
    p.col(r).map(|(i, v)| v * apc[i]).sum()
}

fn criterion_3() -> (bool, String) {
    let plan = ExperimentPlan::new(Experiment::I);
    let mesh = plan.mesh(plan.levels).unwrap();
    let sys = system(&mesh);
    let ps = build_prolongations(&mesh).unwrap();
    let mut rng = StdRng::seed_from_u64(3);
    let mut a = sys.a.clone();
    let mut worst = 0.0f64;
    let mut checked = Vec::new();
    for j in (1..mesh.nlevels()).rev() {
        let p = &ps[j - 1];
        let nc = p.n_coarse();
        let before = a.to_row();
        let scale = before.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        transform(&mut a, &ChangeOfBasis::hb(p), false);
        let coarse = from_triplets(nc, nc, &a.triplets().into_iter().filter(|t| t.0 < nc && t.1 < nc).collect::<Vec<_>>());
        if p.n() <= 200 {
            let ad = from_triplets(p.n(), p.n(), &before.triplets());
            let pd = from_triplets(p.n(), nc, &p.p().triplets());
            let want = mul(&transpose(&pd), &mul(&ad, &pd));
            for (gr, wr) in coarse.iter().zip(&want) {
                for (g, w) in gr.iter().zip(wr) {
                    worst = worst.max((g - w).abs() / scale);
                }
            }
            checked.push(format!("L{j}:dense"));
        } else {
            for _ in 0..200 {
                let (r, c) = (rng.gen_range(0..nc), rng.gen_range(0..nc));
                let w = galerkin_entry(&before, p.p(), r, c);
                worst = worst.max((coarse[r][c] - w).abs() / scale);
            }
            checked.push(format!("L{j}:sampled"));
        }
        // continue with the coarse block, exactly as the hierarchy does
        let (_, _, _) = strip_blocks(&mut a, nc).unwrap();
    }
    (
        worst <= 1e-12,
        format!("transforms onto {} checked, worst |A11 - PᵀAP| / max|A| = {worst:.1e}", checked.join(" ")),
    )
}

struct Runs {
    set1: Vec<LevelResult>,
    set2: Vec<LevelResult>,
    secs1: f64,
    secs2: f64,
}

fn iterations(res: &[LevelResult], m: Method) -> Vec<usize> {
    res.iter().map(|l| l.reports[&m].iterations).collect()
}

fn plateau(res: &[LevelResult], m: Method, reference_final: usize) -> (bool, String) {
    let it = iterations(res, m);
    let last3 = &it[it.len() - 3..];
    let spread = last3.iter().max().unwrap() - last3.iter().min().unwrap();
    let fin = *it.last().unwrap();
    let ok = spread <= 2 && fin <= 2 * reference_final;
    (ok, format!("{} {:?} (reference {reference_final})", m.name(), last3))
}

/// Nondecreasing from level 3 to the final level with a final count above
/// the level-3 count.
fn growth(res: &[LevelResult], m: Method) -> (bool, String) {
    let it = iterations(res, m);
    let tail = &it[2..];
    let ok = tail.windows(2).all(|w| w[1] >= w[0]) && tail.last() > tail.first();
    let strict = tail.windows(2).all(|w| w[1] > w[0]);
    (
        ok,
        format!("{} {}->{}{}", m.name(), tail[0], tail[tail.len() - 1], if strict { "" } else { " (with ties)" }),
    )
}

fn table_shape(res: &[LevelResult], finals: &[(Method, usize)]) -> (bool, Vec<String>) {
    let mut ok = true;
    let mut notes = Vec::new();
    let ones = Method::ALL.iter().all(|&m| res[0].reports[&m].iterations == 1);
    ok &= ones;
    notes.push(format!("level 1 all one iteration: {ones}"));
    let mut bad = Vec::new();
    for &(m, f) in finals {
        let (p, s) = plateau(res, m, f);
        ok &= p;
        if !p {
            bad.push(s);
        }
    }
    notes.push(if bad.is_empty() {
        format!("{} plateau methods within bounds", finals.len())
    } else {
        format!("plateau violations: {}", bad.join(", "))
    });
    for m in [Method::Hbmg, Method::PcgHb] {
        let (p, s) = growth(res, m);
        ok &= p;
        notes.push(format!("growth {s}: {p}"));
    }
    (ok, notes)
}

fn criterion_4(runs: &Runs) -> (bool, String) {
    let finals = [
        (Method::Mg, 6),
        (Method::MBpx, 6),
        (Method::Wmhbmg, 17),
        (Method::PcgMg, 5),
        (Method::PcgMBpx, 5),
        (Method::PcgWmhbmg, 9),
        (Method::PcgBpx, 18),
        (Method::PcgWmhb, 21),
    ];
    let (ok, notes) = table_shape(&runs.set1, &finals);
    let in_time = runs.secs1 < 60.0;
    (
        ok && in_time,
        format!("{}; experiment runtime {:.2} s (limit 60 s)", notes.join("; "), runs.secs1),
    )
}

fn criterion_5(runs: &Runs) -> (bool, String) {
    let finals = [
        (Method::Mg, 4),
        (Method::MBpx, 5),
        (Method::Wmhbmg, 15),
        (Method::PcgMg, 3),
        (Method::PcgMBpx, 4),
        (Method::PcgWmhbmg, 8),
        (Method::PcgBpx, 21),
        (Method::PcgWmhb, 23),
    ];
    let (ok, mut notes) = table_shape(&runs.set2, &finals);
    let dof: Vec<usize> = runs.set2.iter().map(|l| l.dof).collect();
    let mut frac: Vec<f64> = dof.windows(2).map(|w| (w[1] - w[0]) as f64 / w[1] as f64).collect();
    frac.sort_by(f64::total_cmp);
    let median = if frac.len() % 2 == 1 {
        frac[frac.len() / 2]
    } else {
        0.5 * (frac[frac.len() / 2 - 1] + frac[frac.len() / 2])
    };
    notes.push(format!("median new-DOF fraction {:.1}%", 100.0 * median));
    (ok && median <= 0.2, notes.join("; "))
}

/// Least-squares slope and intercept of `y` against `x`.
fn fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn criterion_6(runs: &Runs) -> (bool, String) {
    let res = &runs.set2;
    let last = &res[res.len() - 8..];
    let dof: Vec<f64> = last.iter().map(|l| l.dof as f64).collect();
    let flops = |m: Method| -> Vec<f64> { last.iter().map(|l| l.reports[&m].flops_per_iteration as f64).collect() };
    let logd: Vec<f64> = dof.iter().map(|d| d.ln()).collect();
    let mut ok = true;
    let mut notes = Vec::new();
    for m in [Method::Hbmg, Method::Wmhbmg, Method::PcgBpx, Method::PcgWmhb] {
        let logf: Vec<f64> = flops(m).iter().map(|f| f.ln()).collect();
        let (e, _) = fit(&logd, &logf);
        let p = (0.9..=1.15).contains(&e);
        ok &= p;
        notes.push(format!("{} exponent {e:.2}{}", m.name(), if p { "" } else { " (outside [0.9, 1.15])" }));
    }
    let (slope, icpt) = fit(&dof, &flops(Method::Wmhbmg));
    let n_final = *dof.last().unwrap();
    let predicted = icpt + slope * n_final;
    let mg = *flops(Method::Mg).last().unwrap();
    let ratio = mg / predicted;
    ok &= ratio >= 1.25;
    notes.push(format!("MG final / WMHBMG linear fit = {ratio:.2}"));
    (ok, notes.join("; "))
}

fn kappa(res: &[LevelResult], m: Method) -> (f64, f64) {
    let k = |l: &LevelResult| l.reports[&m].cond_estimate.unwrap_or(f64::NAN);
    (k(&res[2]), k(res.last().unwrap()))
}

fn criterion_7(runs: &Runs) -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, res) in [("I", &runs.set1), ("II", &runs.set2)] {
        for m in [Method::PcgBpx, Method::PcgWmhb] {
            let (k3, kf) = kappa(res, m);
            let p = kf <= 2.0 * k3;
            ok &= p;
            notes.push(format!("set {name} {} {k3:.2}->{kf:.2} ({})", m.name(), if p { "bounded" } else { "exceeds 2x" }));
        }
        let (k3, kf) = kappa(res, Method::PcgHb);
        let p = kf >= 1.5 * k3;
        ok &= p;
        notes.push(format!("set {name} PCG-HB {k3:.2}->{kf:.2} ({})", if p { "grows" } else { "below 1.5x" }));
    }
    (ok, notes.join("; "))
}

type Operator<'a> = Box<dyn Fn(&[f64]) -> Vec<f64> + 'a>;

fn criterion_8() -> (bool, String) {
    let mut rng = StdRng::seed_from_u64(8);
    let mut worst_sym = 0.0f64;
    let mut min_pos = f64::INFINITY;
    let mut count = 0;
    for (exp, levels) in [(Experiment::I, 5), (Experiment::II, 4)] {
        let plan = ExperimentPlan::new(exp);
        let mesh = plan.mesh(levels).unwrap();
        let sys = system(&mesh);
        let n = sys.ndof();
        let hs: Vec<(Family, Hierarchy)> = FAMILIES
            .iter()
            .map(|&f| (f, Hierarchy::build(&mesh, &sys.a, Some(&sys.m), f.basis(), Stabilizer::default()).unwrap()))
            .collect();
        let mut ops: Vec<(String, Operator)> = Vec::new();
        for (fam, h) in &hs {
            for key in [SmootherKey::Sgs, SmootherKey::Jacobi] {
                let config = MethodConfig {
                    smoother: key,
                    ..MethodConfig::new(*fam, Mode::Additive)
                };
                let b = Preconditioner::new(h, config).unwrap();
                ops.push((format!("{fam:?}/{key:?}"), Box::new(move |r: &[f64]| b.apply(r).unwrap())));
            }
            match fam {
                Family::Mg => ops.push(("classical BPX".into(), Box::new(|r: &[f64]| bpx_classical_apply(h, r).unwrap()))),
                Family::Hbmg => ops.push((
                    "classical HB".into(),
                    Box::new(|r: &[f64]| hb_additive_apply(h, r, SmootherKey::Sgs).unwrap()),
                )),
                _ => {}
            }
        }
        for (_, op) in &ops {
            for _ in 0..100 {
                let x = random_vec(&mut rng, n);
                let y = random_vec(&mut rng, n);
                let (bx, by) = (op(&x), op(&y));
                let scale = (dot(&bx, &bx) * dot(&y, &y)).sqrt().max((dot(&by, &by) * dot(&x, &x)).sqrt());
                worst_sym = worst_sym.max((dot(&bx, &y) - dot(&x, &by)).abs() / scale);
                min_pos = min_pos.min(dot(&bx, &x) / (dot(&bx, &bx) * dot(&x, &x)).sqrt());
                count += 1;
            }
        }
    }
    (
        worst_sym <= 1e-12 && min_pos > 0.0,
        format!("{count} checks, worst relative asymmetry {worst_sym:.1e}, min <Bx,x>/(|Bx||x|) {min_pos:.2e}"),
    )
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn criterion_9() -> (bool, String) {
    let base = std::env::temp_dir().join(format!("mlprec-acceptance-{}", std::process::id()));
    let dirs: Vec<PathBuf> = ["a", "b"].iter().map(|s| base.join(s)).collect();
    for d in &dirs {
        let status = Command::new(env!("CARGO_BIN_EXE_mlprec"))
            .args(["run", "--set", "I", "--out"])
            .arg(d)
            .output()
            .expect("mlprec binary runs");
        if !status.status.success() {
            return (false, format!("mlprec run failed: {}", String::from_utf8_lossy(&status.stderr)));
        }
    }
    let (a, b) = (read_dir_sorted(&dirs[0]), read_dir_sorted(&dirs[1]));
    let _ = std::fs::remove_dir_all(&base);
    let names: Vec<&str> = a.iter().map(|f| f.0.as_str()).collect();
    (
        !a.is_empty() && a == b,
        format!("{} files compared: {}", a.len(), names.join(", ")),
    )
}

fn main() {
    let mut out = vec![
        timed(1, Some(1.0), criterion_1),
        timed(2, Some(30.0), criterion_2),
        timed(3, None, criterion_3),
    ];

    let t = Instant::now();
    let set1 = run_experiment(&ExperimentPlan::new(Experiment::I)).expect("experiment set I");
    let secs1 = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let set2 = run_experiment(&ExperimentPlan::new(Experiment::II)).expect("experiment set II");
    let secs2 = t.elapsed().as_secs_f64();
    let runs = Runs { set1, set2, secs1, secs2 };

    out.push(timed(4, None, || criterion_4(&runs)));
    out.push(timed(5, None, || criterion_5(&runs)));
    let mut c6 = timed(6, None, || criterion_6(&runs));
    c6.pass &= runs.secs2 < 120.0;
    c6.detail.push_str(&format!("; experiment runtime {:.2} s (limit 120 s)", runs.secs2));
    out.push(c6);
    out.push(timed(7, None, || criterion_7(&runs)));
    out.push(timed(8, None, criterion_8));
    out.push(timed(9, None, criterion_9));

    println!();
    for o in &out {
        let tag = match (o.pass, DOCUMENTED_FAILURES.contains(&o.id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (documented)",
            (false, false) => "FAIL",
        };
        println!("criterion {}: {tag} [{:.2} s] {}", o.id, o.secs, o.detail);
    }
    let unexpected: Vec<u32> = out
        .iter()
        .filter(|o| !o.pass && !DOCUMENTED_FAILURES.contains(&o.id))
        .map(|o| o.id)
        .collect();
    if !unexpected.is_empty() {
        eprintln!("undocumented acceptance failures: {unexpected:?}");
        std::process::exit(1);
    }
}
