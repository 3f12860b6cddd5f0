//! Acceptance suite: one check per criterion, each printing a single
//! PASS/FAIL line with the measured quantities. Runs without the libtest
//! harness so the lines always appear; exits non-zero if any check fails.

use std::path::Path;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use v3h::dataset::{apply_missing, generate_synthetic, SyntheticSpec};
use v3h::experiment::{cell_seed, run_experiment, DataSource, ExperimentConfig, Method};
use v3h::graph::GraphLaplacian;
use v3h::metrics::{accuracy, nmi, purity};
use v3h::norms::{eta_norm, eta_prox, prox_objective, tau_gradient, tau_norm, EtaNormParams, TauNormParams};
use v3h::solver::{fit, Hyperparams, Initialization, Solver, StepScratch};

struct Outcome {
    pass: bool,
    detail: String,
}

fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.random_range(lo.log10()..hi.log10()))
}

fn blob_spec() -> SyntheticSpec {
    SyntheticSpec { n: 120, c: 3, dims: vec![10, 10, 10], sep: 10.0, noise: 0.5 }
}

/// Independent singular values through nalgebra's own SVD.
fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = [0.0f64; 4];
    for k in 0..20 {
        let rows = rng.random_range(2..7);
        let cols = rng.random_range(2..7);
        let rank = 1 + k % rows.min(cols);
        let e = gaussian(rows, cols, &mut rng);
        let fro2 = e.norm_squared();
        let l21: f64 = e.row_iter().map(|r| r.norm()).sum();
        let big = tau_norm(&e, &TauNormParams::new(1e4).unwrap());
        let small = tau_norm(&e, &TauNormParams::new(1e-6).unwrap());
        worst[0] = worst[0].max((big - fro2).abs() / fro2);
        worst[1] = worst[1].max((small - l21).abs() / l21);

        let m = gaussian(rows, rank, &mut rng) * gaussian(rank, cols, &mut rng);
        let sigma = singular_values(&m);
        let nuclear: f64 = sigma.iter().sum();
        let true_rank = sigma.iter().filter(|&&s| s > 1e-10).count() as f64;
        let large = eta_norm(&m, &EtaNormParams::uniform(1e6).unwrap()).unwrap();
        let tiny = eta_norm(&m, &EtaNormParams::uniform(1e-8).unwrap()).unwrap();
        worst[2] = worst[2].max((large - nuclear).abs() / nuclear);
        worst[3] = worst[3].max((tiny - true_rank).abs());
    }
    Outcome {
        pass: worst[0] < 1e-3 && worst[1] < 1e-3 && worst[2] < 1e-3 && worst[3] < 1e-4,
        detail: format!(
            "max rel err tau->fro2 {:.2e}, tau->L21 {:.2e}, eta->nuclear {:.2e}; max abs err eta->rank {:.2e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    }
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for k in 0..100 {
        let rows = rng.random_range(2..8);
        let cols = rng.random_range(1..6);
        let mut e = gaussian(rows, cols, &mut rng);
        // every other matrix gets one or two exact zero rows
        if k % 2 == 0 {
            e.row_mut(rng.random_range(0..rows)).fill(0.0);
            e.row_mut(rng.random_range(0..rows)).fill(0.0);
        }
        let p = TauNormParams::new(log_uniform(&mut rng, 1e-2, 1e2)).unwrap();
        let g = tau_gradient(&e, &p);
        let mut fd = DMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let mut up = e.clone();
                let mut dn = e.clone();
                up[(i, j)] += h;
                dn[(i, j)] -= h;
                fd[(i, j)] = (tau_norm(&up, &p) - tau_norm(&dn, &p)) / (2.0 * h);
            }
        }
        let scale = g.norm().max(f64::MIN_POSITIVE);
        worst = worst.max((&fd - &g).norm() / scale);
    }
    Outcome { pass: worst < 1e-5, detail: format!("max relative gradient error over 100 matrices {worst:.2e}") }
}

/// Grid minimizer of `h(s) + (ω/2)(s − a)²` on `[0, 2a]` with the given step.
fn grid_minimizer(a: f64, eta: f64, omega: f64, step: f64) -> f64 {
    let steps = (2.0 * a / step).ceil() as usize;
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..=steps {
        let s = (k as f64 * step).min(2.0 * a);
        let f = (eta + 1.0) * s / (eta + s) + 0.5 * omega * (s - a) * (s - a);
        if f < best.0 {
            best = (f, s);
        }
    }
    best.1
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    let mut objective_violations = 0;
    for _ in 0..50 {
        let size = rng.random_range(1..6);
        let sigma: Vec<f64> = (0..size).map(|_| rng.random_range(0.05..5.0)).collect();
        let eta = log_uniform(&mut rng, 1e-3, 1.0);
        let omega = log_uniform(&mut rng, 1.0, 100.0);
        let params = EtaNormParams::uniform(eta).unwrap();
        let a = DMatrix::from_diagonal(&DVector::from_vec(sigma.clone()));
        let out = eta_prox(&a, &params, omega).unwrap();
        let result: Vec<f64> = (0..size).map(|i| out[(i, i)]).collect();
        for (i, &s) in sigma.iter().enumerate() {
            worst = worst.max((result[i] - grid_minimizer(s, eta, omega, 1e-4)).abs());
        }
        let off_diagonal = (0..size).flat_map(|i| (0..size).map(move |j| (i, j))).filter(|(i, j)| i != j);
        for (i, j) in off_diagonal {
            worst = worst.max(out[(i, j)].abs());
        }
        if prox_objective(&result, &sigma, &params, omega) > prox_objective(&sigma, &sigma, &params, omega) + 1e-12 {
            objective_violations += 1;
        }
    }
    Outcome {
        pass: worst < 2e-4 && objective_violations == 0,
        detail: format!("max |prox − grid| {worst:.2e}; objective above start in {objective_violations}/50"),
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst_z = 0.0f64;
    let mut worst_trace = 0.0f64;
    let mut worst_orth = 0.0f64;
    for k in 0..20 {
        let n = rng.random_range(8..31);
        let c = rng.random_range(2..4);
        let spec = SyntheticSpec { n: n.max(5 * c), c, dims: vec![rng.random_range(2..6), rng.random_range(2..6)], sep: 3.0, noise: 1.0 };
        let n = spec.n;
        let data = apply_missing(&generate_synthetic(&spec, k).unwrap(), rng.random_range(0.0..0.4), k).unwrap();
        let params = Hyperparams {
            alpha: log_uniform(&mut rng, 1e-3, 1.0),
            beta: log_uniform(&mut rng, 1e-4, 1.0),
            gamma: log_uniform(&mut rng, 1e-2, 1.0),
            p: rng.random_range(0.5..2.0),
            init: Initialization::Random,
            seed: k,
            ..Hyperparams::default()
        };
        let solver = Solver::new(&data, &params).unwrap();
        let mut s = solver.init_state().unwrap();
        s.omega = log_uniform(&mut rng, 1e-2, 1e2);
        s.m = gaussian(n, n, &mut rng);
        for v in 0..2 {
            let (d, m) = solver.data().view(v).shape();
            s.n[v] = gaussian(n, n, &mut rng).abs();
            s.e[v] = gaussian(d, m, &mut rng);
            s.c1[v] = gaussian(d, m, &mut rng);
            s.c2[v] = gaussian(n, n, &mut rng);
        }
        for v in 0..2 {
            solver.update_z(&mut s, v).unwrap();
            // gradient of the representation subproblem, assembled here from the data
            let x = solver.data().view(v);
            let w = solver.data().index(v);
            let coupling = w.gather(&(&s.m - &s.n[v] * params.p - &s.c2[v] / s.omega));
            let fit_term = x.transpose() * (x - x * &s.z[v] - &s.e[v] + &s.c1[v] / s.omega);
            let grad = &s.z[v] - &coupling - &fit_term;
            let scale = s.z[v].norm() + coupling.norm() + (x.transpose() * (x - &s.e[v] + &s.c1[v] / s.omega)).norm();
            worst_z = worst_z.max(grad.norm() / scale);
        }
        for v in 0..2 {
            solver.update_f(&mut s, v).unwrap();
            let lap = GraphLaplacian::from_variation(&s.n[v]).laplacian;
            let a = lap * params.alpha - &s.h * s.h.transpose() * params.gamma;
            let a = (&a + a.transpose()) * 0.5;
            let mut eig: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
            eig.sort_by(f64::total_cmp);
            let expected: f64 = eig[..c].iter().sum();
            let f = &s.f[v];
            worst_trace = worst_trace.max(((f.transpose() * &a * f).trace() - expected).abs());
            worst_orth = worst_orth.max((f.transpose() * f - DMatrix::identity(c, c)).amax());
        }
        solver.update_h(&mut s).unwrap();
        let mut g = DMatrix::zeros(n, n);
        for f in &s.f {
            g += f * f.transpose() * params.gamma;
        }
        let mut eig: Vec<f64> = g.clone().symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(|a, b| b.total_cmp(a));
        let expected: f64 = eig[..c].iter().sum();
        worst_trace = worst_trace.max(((s.h.transpose() * &g * &s.h).trace() - expected).abs());
        worst_orth = worst_orth.max((s.h.transpose() * &s.h - DMatrix::identity(c, c)).amax());
    }
    Outcome {
        pass: worst_z < 1e-6 && worst_trace < 1e-8 && worst_orth < 1e-10,
        detail: format!(
            "max relative Z-gradient {worst_z:.2e}; max |trace − eigen sum| {worst_trace:.2e}; max orthonormality error {worst_orth:.2e}"
        ),
    }
}

fn criterion_5() -> Outcome {
    let data = generate_synthetic(&blob_spec(), 5).unwrap();
    let mut masks = 0;
    let mut bad_masks = 0;
    for per in [0.0, 0.1, 0.2, 0.3, 0.4, 0.5] {
        for r in 0..5 {
            let inc = apply_missing(&data, per, cell_seed(5, per, r)).unwrap();
            for w in inc.indices() {
                masks += 1;
                let dense = w.to_dense();
                if &dense * dense.transpose() != DMatrix::identity(w.len(), w.len()) {
                    bad_masks += 1;
                }
            }
        }
    }

    let mut steps = 0;
    let mut bad_steps = 0;
    for per in [0.1, 0.5] {
        let inc = apply_missing(&data, per, 9).unwrap();
        let solver = Solver::new(&inc, &Hyperparams::default()).unwrap();
        let mut s = solver.init_state().unwrap();
        let mut scratch = StepScratch::default();
        for _ in 0..15 {
            for v in 0..inc.n_views() {
                solver.update_z(&mut s, v).unwrap();
                solver.update_n_zeta(&mut s, v, &mut scratch).unwrap();
                steps += 1;
                let nv = &s.n[v];
                if nv.iter().any(|&x| x < 0.0) || (0..nv.nrows()).any(|i| nv[(i, i)] != 0.0) {
                    bad_steps += 1;
                }
                solver.update_e(&mut s, v, &mut scratch).unwrap();
                solver.update_f(&mut s, v).unwrap();
                solver.update_multipliers(&mut s, v);
            }
            solver.update_m(&mut s).unwrap();
            solver.update_h(&mut s).unwrap();
        }
    }
    Outcome {
        pass: bad_masks == 0 && bad_steps == 0,
        detail: format!("W·Wᵀ ≠ I in {bad_masks}/{masks} masks; N constraint violated in {bad_steps}/{steps} variation steps"),
    }
}

fn criterion_6() -> Outcome {
    let data = generate_synthetic(&blob_spec(), 6).unwrap();
    let pers = [0.1, 0.3, 0.5];
    let mut lines = Vec::new();
    let mut all_converged = true;
    let mut finals = Vec::new();
    for per in pers {
        let inc = apply_missing(&data, per, cell_seed(6, per, 0)).unwrap();
        // run the full 50 iterations; the first iteration whose relative
        // change drops below 1e-4 is where a tol = 1e-4 run would stop
        let params = Hyperparams { max_iter: 50, tol: f64::MIN_POSITIVE, ..Hyperparams::default() };
        let result = fit(&inc, &params).unwrap();
        let hit = result.trace.records.iter().find(|r| r.relative_change.is_some_and(|c| c < 1e-4)).map(|r| r.iteration);
        all_converged &= hit.is_some();
        let last = result.trace.last().unwrap();
        finals.push((last.iteration, last.objective_ratio));
        lines.push(format!(
            "per {per}: first rel. change < 1e-4 at {}, ratio@{} = {:.4e}",
            hit.map_or("never".to_string(), |i| format!("iteration {i}")),
            last.iteration,
            last.objective_ratio
        ));
    }
    let same_length = finals.iter().all(|f| f.0 == finals[0].0);
    let ordered = same_length && finals[2].1 >= finals[1].1 && finals[1].1 >= finals[0].1;
    Outcome {
        pass: all_converged && ordered,
        detail: format!("{}; ordering obj(0.5) ≥ obj(0.3) ≥ obj(0.1): {}", lines.join("; "), ordered),
    }
}

fn criterion_7() -> Outcome {
    let mut sums = [0.0f64; 3]; // v3h acc @0, v3h acc @0.5, v3h nmi @0.5
    let mut ck_nmi = 0.0;
    let seeds = 5;
    for seed in 0..seeds {
        let config = ExperimentConfig {
            methods: vec![Method::V3h, Method::Ck],
            per_grid: vec![0.0, 0.5],
            repeats: 1,
            seed,
            ..ExperimentConfig::new(DataSource::Synthetic(blob_spec()))
        };
        let report = run_experiment(&config).unwrap();
        for r in &report.records {
            match (r.method, r.per == 0.0) {
                (Method::V3h, true) => sums[0] += r.acc,
                (Method::V3h, false) => {
                    sums[1] += r.acc;
                    sums[2] += r.nmi;
                }
                (Method::Ck, false) => ck_nmi += r.nmi,
                _ => {}
            }
        }
    }
    let n = seeds as f64;
    let (acc0, acc5, nmi5, ck5) = (sums[0] / n, sums[1] / n, sums[2] / n, ck_nmi / n);
    Outcome {
        pass: acc0 >= 0.90 && acc5 >= 0.75 && nmi5 >= ck5 - 0.05,
        detail: format!(
            "V3H mean ACC {acc0:.4} at PER 0, {acc5:.4} at PER 0.5; mean NMI at PER 0.5: V3H {nmi5:.4}, CK {ck5:.4}"
        ),
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut mismatches = 0;
    let mut identity_failures = 0;
    for _ in 0..100 {
        let c = rng.random_range(1..=6);
        let n = rng.random_range(c..40);
        let pred: Vec<usize> = (0..n).map(|_| rng.random_range(0..c)).collect();
        let truth: Vec<usize> = (0..n).map(|_| rng.random_range(0..c)).collect();
        let best = permutations(c)
            .iter()
            .map(|perm| pred.iter().zip(&truth).filter(|(p, t)| perm[**p] == **t).count())
            .max()
            .unwrap();
        if (accuracy(&pred, &truth).unwrap() - best as f64 / n as f64).abs() > 1e-12 {
            mismatches += 1;
        }
        let distinct = {
            let mut t = truth.clone();
            t.sort_unstable();
            t.dedup();
            t.len()
        };
        let same = [accuracy(&truth, &truth), purity(&truth, &truth), if distinct >= 2 { nmi(&truth, &truth) } else { Ok(1.0) }];
        if same.iter().any(|m| m.as_ref().map_or(true, |v| (v - 1.0).abs() > 1e-12)) {
            identity_failures += 1;
        }
    }
    let hand = accuracy(&[0, 1, 0, 1], &[0, 0, 1, 1]).unwrap() == 0.5
        && nmi(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap() == 0.0
        && purity(&[0, 0, 0, 0], &[0, 0, 1, 1]).unwrap() == 0.5;
    Outcome {
        pass: mismatches == 0 && identity_failures == 0 && hand,
        detail: format!(
            "Hungarian vs brute force mismatches {mismatches}/100; identity failures {identity_failures}; hand cases exact: {hand}"
        ),
    }
}

/// results.csv with the trailing wall-time column removed.
fn results_without_time(dir: &Path) -> String {
    std::fs::read_to_string(dir.join("results.csv"))
        .unwrap()
        .lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

fn criterion_9() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let base = ExperimentConfig {
        per_grid: vec![0.0, 0.3],
        repeats: 2,
        seed: 9,
        ..ExperimentConfig::new(DataSource::Synthetic(blob_spec()))
    };
    for dir in [a.path(), b.path()] {
        run_experiment(&ExperimentConfig { out_dir: Some(dir.to_path_buf()), ..base.clone() }).unwrap();
    }
    let (ra, rb) = (results_without_time(a.path()), results_without_time(b.path()));
    let summaries_equal = std::fs::read(a.path().join("summary.json")).unwrap()
        == std::fs::read(b.path().join("summary.json")).unwrap();
    Outcome {
        pass: ra == rb && summaries_equal,
        detail: format!(
            "{} result rows; results.csv identical (wall time excluded): {}; summary.json identical: {}",
            ra.lines().count() - 1,
            ra == rb,
            summaries_equal
        ),
    }
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 9] = [
        (1, "norm limits", Duration::from_secs(5), criterion_1),
        (2, "row-penalty gradient identity", Duration::from_secs(10), criterion_2),
        (3, "rank-surrogate prox vs grid search", Duration::from_secs(30), criterion_3),
        (4, "block-step stationarity", Duration::from_secs(60), criterion_4),
        (5, "constraint structure", Duration::from_secs(60), criterion_5),
        (6, "convergence and objective ordering", Duration::from_secs(60), criterion_6),
        (7, "end-to-end clustering", Duration::from_secs(180), criterion_7),
        (8, "metrics oracle", Duration::from_secs(5), criterion_8),
        (9, "determinism", Duration::from_secs(120), criterion_9),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (id, name, limit, check) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        let pass = outcome.pass && in_time;
        println!(
            "criterion {id} ({name}): {} — {} [{:.2}s, limit {}s{}]",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            limit.as_secs(),
            if in_time { "" } else { ", EXCEEDED" }
        );
        if !pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("acceptance: {} criteria failed: {failed:?}", failed.len());
        std::process::exit(1);
    }
    println!("acceptance: all criteria passed");
}
