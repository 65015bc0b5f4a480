//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::path::PathBuf;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regretls::estimators::{cls_solve, crls_solve, ls_solve, rls_robust, rls_solve, rrls_solve, scls_solve, srls_solve};
use regretls::experiment::{
    gen_instance, run_sweep, run_trials, write_sweep_csv, write_trials_csv, ExperimentConfig, SweepRow,
};
use regretls::gradients::{
    expand_structured, g_value, grad_g_a, grad_g_y, grad_h_a, grad_h_y, grad_struct_alpha, grad_struct_beta, h_value,
};
use regretls::lmi::{LmiBlock, LmiProblem};
use regretls::oracle::{
    expansion_for, regret_exact, regret_exact_structured, regret_linearized, regret_linearized_structured,
    worst_case_ub, worst_case_ub_structured, PerturbationSample, SampleMode, StructuredSample,
};
use regretls::sdp::{solve, SolveStatus, SolverConfig};
use regretls::{Method, ProblemInstance, StructuredProblem, UnstructuredProblem};

use common::{fd_matrix, fd_vector, rel_err, rng};

type Verdict = (bool, String);

fn config(name: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    ExperimentConfig::from_json(&text).unwrap()
}

fn log_uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (r.random_range(lo.ln()..hi.ln())).exp()
}

// 1. Analytic gradients against central differences.
fn gradient_suite() -> Verdict {
    let start = Instant::now();
    let mut r = rng(101);
    let mut worst = [0.0f64; 6];
    for _ in 0..100 {
        let n = r.random_range(1..=5);
        let m = r.random_range(n..=8);
        let mu = log_uniform(&mut r, 0.05, 10.0);
        let a = common::well_conditioned(&mut r, m, n);
        let y = common::uniform_vector(&mut r, m);
        let ha = 1e-6 * (1.0 + a.norm());
        let hy = 1e-6 * (1.0 + y.norm());

        let g = grad_g_a(&a, &y).unwrap();
        let fd = fd_matrix(&a, ha, |t| g_value(t, &y).unwrap());
        worst[0] = worst[0].max(rel_err((fd - &g).norm(), g.norm()));
        let g = grad_g_y(&a, &y).unwrap();
        let fd = fd_vector(&y, hy, |t| g_value(&a, t).unwrap());
        worst[1] = worst[1].max(rel_err((fd - &g).norm(), g.norm()));
        let g = grad_h_a(&a, &y, mu).unwrap();
        let fd = fd_matrix(&a, ha, |t| h_value(t, &y, mu).unwrap());
        worst[2] = worst[2].max(rel_err((fd - &g).norm(), g.norm()));
        let g = grad_h_y(&a, &y, mu).unwrap();
        let fd = fd_vector(&y, hy, |t| h_value(&a, t, mu).unwrap());
        worst[3] = worst[3].max(rel_err((fd - &g).norm(), g.norm()));

        let np = r.random_range(1..=4);
        let ba: Vec<_> = (0..np).map(|_| common::uniform_matrix(&mut r, m, n)).collect();
        let by: Vec<_> = (0..np).map(|_| common::uniform_vector(&mut r, m)).collect();
        let sp = StructuredProblem::new(a.clone(), y.clone(), ba, by, 0.1, 0.1, false).unwrap();
        let zero = DVector::zeros(np);
        let ga = DVector::from_fn(np, |i, _| grad_struct_alpha(&sp, i).unwrap());
        let fd = fd_vector(&zero, ha, |al| g_value(&(&sp.a + sp.delta_a(al)), &sp.y).unwrap());
        worst[4] = worst[4].max(rel_err((fd - &ga).norm(), ga.norm()));
        let gb = DVector::from_fn(np, |i, _| grad_struct_beta(&sp, i).unwrap());
        let fd = fd_vector(&zero, hy, |be| g_value(&sp.a, &(&sp.y + sp.delta_y(be))).unwrap());
        worst[5] = worst[5].max(rel_err((fd - &gb).norm(), gb.norm()));
    }
    let secs = start.elapsed().as_secs_f64();
    let max = worst.iter().copied().fold(0.0, f64::max);
    (
        max <= 1e-6 && secs < 10.0,
        format!(
            "max rel err dg/dA {:.1e}, dg/dy {:.1e}, dh/dA {:.1e}, dh/dy {:.1e}, alpha {:.1e}, beta {:.1e}; {secs:.2}s",
            worst[0], worst[1], worst[2], worst[3], worst[4], worst[5]
        ),
    )
}

// 2. The linearization error is second order.
fn richardson() -> Verdict {
    let mut r = rng(202);
    let (s1, s2) = (1e-3, 5e-4);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for mode in 0..3 {
        for _ in 0..50 {
            let ratio = match mode {
                0 | 1 => {
                    let p = if mode == 0 {
                        common::unstructured(&mut r, 5, 3, 0.0)
                    } else {
                        {
                        let mu = log_uniform(&mut r, 0.05, 10.0);
                        common::regularized(&mut r, 5, 3, 0.0, mu)
                    }
                    };
                    let e = expansion_for(&p).unwrap();
                    let x = common::uniform_vector(&mut r, 3);
                    let da = common::uniform_matrix(&mut r, 5, 3);
                    let dy = common::uniform_vector(&mut r, 5);
                    let norm = (da.norm_squared() + dy.norm_squared()).sqrt();
                    let gap = |s: f64| {
                        let smp = PerturbationSample {
                            delta_a: &da * (s / norm),
                            delta_y: &dy * (s / norm),
                            rho_h: s,
                            rho_y: s,
                        };
                        (regret_exact(&p, &x, &smp).unwrap() - regret_linearized(&e, &p, &x, &smp)).abs()
                    };
                    gap(s1) / gap(s2)
                }
                _ => {
                    let p = common::structured(&mut r, 5, 3, 3, 0.0, false);
                    let e = expand_structured(&p).unwrap();
                    let x = common::uniform_vector(&mut r, 3);
                    let al = common::uniform_vector(&mut r, 3);
                    let be = common::uniform_vector(&mut r, 3);
                    let norm = (al.norm_squared() + be.norm_squared()).sqrt();
                    let gap = |s: f64| {
                        let smp = StructuredSample {
                            alpha: &al * (s / norm),
                            beta: &be * (s / norm),
                            rho_h: s,
                            rho_b: s,
                        };
                        (regret_exact_structured(&p, &x, &smp).unwrap()
                            - regret_linearized_structured(&e, &p, &x, &smp))
                        .abs()
                    };
                    gap(s1) / gap(s2)
                }
            };
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    (
        lo >= 3.5 && hi <= 4.5,
        format!("halving ratios in [{lo:.4}, {hi:.4}] over 150 instances"),
    )
}

fn one_var(blocks: Vec<LmiBlock>) -> LmiProblem {
    let mut l = LmiProblem::new(vec!["z".into()], DVector::from_element(1, 1.0));
    l.blocks = blocks;
    l
}

/// Random LMI with a known interior point and a dual-feasible objective.
fn planted_lmi(r: &mut ChaCha8Rng) -> (LmiProblem, DVector<f64>) {
    let nv = r.random_range(2..=5);
    let nblocks = r.random_range(1..=3);
    let mut lmi = LmiProblem::new((0..nv).map(|k| format!("z{k}")).collect(), DVector::zeros(nv));
    let z0 = common::uniform_vector(r, nv);
    let mut c = DVector::zeros(nv);
    for _ in 0..nblocks {
        let s = r.random_range(2..=10);
        let coeffs: Vec<DMatrix<f64>> = (0..nv)
            .map(|_| {
                let g = common::uniform_matrix(r, s, s);
                (&g + g.transpose()) * 0.5
            })
            .collect();
        let g = common::uniform_matrix(r, s, s);
        let mut constant = g.transpose() * g + DMatrix::identity(s, s) * 0.1;
        for (k, f) in coeffs.iter().enumerate() {
            constant -= f * z0[k];
        }
        // c_k = <W, F_k> for W > 0 keeps the problem bounded below.
        let w = common::uniform_matrix(r, s, s);
        let w = w.transpose() * w + DMatrix::identity(s, s) * 0.1;
        for (k, f) in coeffs.iter().enumerate() {
            c[k] += w.dot(f);
        }
        lmi.push_block(LmiBlock { constant, coeffs });
    }
    lmi.objective = c;
    lmi.hint = Some(z0.clone());
    (lmi, z0)
}

// 3. Closed forms and planted random LMIs.
fn sdp_solver() -> Verdict {
    let cfg = SolverConfig::default();
    // [[z, 1], [1, z]] >= 0 gives z >= 1.
    let arrow_block = LmiBlock {
        constant: DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
        coeffs: vec![DMatrix::identity(2, 2)],
    };
    let arrow = solve(&one_var(vec![arrow_block]), &cfg).unwrap();
    let scalar = |c0: f64, c1: f64| LmiBlock {
        constant: DMatrix::from_element(1, 1, c0),
        coeffs: vec![DMatrix::from_element(1, 1, c1)],
    };
    let interval = solve(&one_var(vec![scalar(-2.0, 1.0), scalar(5.0, -1.0)]), &cfg).unwrap();
    let e1 = (arrow.objective_value - 1.0).abs();
    let e2 = (interval.z_star[0] - 2.0).abs();

    let mut r = rng(303);
    let mut worst_excess = f64::NEG_INFINITY;
    let mut slowest: f64 = 0.0;
    let mut all_optimal = true;
    let mut max_order = 0;
    for _ in 0..20 {
        let (lmi, z0) = planted_lmi(&mut r);
        max_order = max_order.max(lmi.order());
        let t = Instant::now();
        let sol = solve(&lmi, &cfg).unwrap();
        slowest = slowest.max(t.elapsed().as_secs_f64());
        all_optimal &= sol.status == SolveStatus::Optimal && sol.min_eig >= -1e-8;
        // 10^4 feasible samples: segments from the planted point outwards.
        let mut found = 0;
        let scale = 1.0 + (&sol.z_star - &z0).norm();
        while found < 10_000 {
            let base = if found % 2 == 0 { &z0 } else { &sol.z_star };
            let d = common::uniform_vector(&mut r, lmi.num_vars()) * (scale * r.random_range(0.0..1.5));
            let z = base + d;
            if lmi.min_eig_at(&z) >= 0.0 {
                found += 1;
                worst_excess = worst_excess.max(sol.objective_value - lmi.objective_value(&z));
            }
        }
    }
    let pass = e1 <= 1e-7 && e2 <= 1e-7 && all_optimal && worst_excess <= 1e-6 && slowest < 1.0;
    (
        pass,
        format!(
            "arrow err {e1:.1e}, interval err {e2:.1e}; 20 planted LMIs (order <= {max_order}): \
             max(obj* - sampled obj) = {worst_excess:.1e}, slowest solve {slowest:.3}s"
        ),
    )
}

// 4. Sampled linearized regret never exceeds the LMI bound at the estimate.
fn s_procedure_soundness() -> Verdict {
    let mut r = rng(404);
    let mut detail = Vec::new();
    let mut pass = true;
    for builder in ["unstructured", "regularized", "untied", "tied"] {
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..20 {
            let n = r.random_range(2..=3);
            let m = r.random_range(n + 1..=6);
            let rho = r.random_range(0.1..0.5);
            let mut srng = ChaCha8Rng::seed_from_u64(r.random());
            match builder {
                "unstructured" | "regularized" => {
                    let p = if builder == "unstructured" {
                        common::unstructured(&mut r, m, n, rho)
                    } else {
                        {
                        let mu = log_uniform(&mut r, 0.05, 10.0);
                        common::regularized(&mut r, m, n, rho, mu)
                    }
                    };
                    let est = if p.mu.is_some() { crls_solve(&p) } else { cls_solve(&p) }.unwrap();
                    let bound = est.regret_bound.unwrap();
                    let e = expansion_for(&p).unwrap();
                    for k in 0..10_000 {
                        let mode = if k % 2 == 0 { SampleMode::Boundary } else { SampleMode::Uniform };
                        let s = PerturbationSample::draw(&p, mode, &mut srng);
                        worst = worst.max(regret_linearized(&e, &p, &est.x_hat, &s) - bound);
                    }
                }
                _ => {
                    let np = r.random_range(1..=4);
                    let p = common::structured(&mut r, m, n, np, rho, builder == "tied");
                    let est = scls_solve(&p).unwrap();
                    let bound = est.regret_bound.unwrap();
                    let e = expand_structured(&p).unwrap();
                    for k in 0..10_000 {
                        let mode = if k % 2 == 0 { SampleMode::Boundary } else { SampleMode::Uniform };
                        let s = StructuredSample::draw(&p, mode, &mut srng);
                        worst = worst.max(regret_linearized_structured(&e, &p, &est.x_hat, &s) - bound);
                    }
                }
            }
        }
        pass &= worst <= 1e-6;
        detail.push(format!("{builder}: max excess {worst:.2e}"));
    }
    (pass, detail.join(", "))
}

// 5. Zero radius gives back the classical estimators.
fn zero_radius_collapse() -> Verdict {
    let mut r = rng(505);
    let mut worst = [0.0f64; 5];
    for _ in 0..20 {
        let n = r.random_range(1..=4);
        let m = r.random_range(n..=7);
        let mu = log_uniform(&mut r, 0.05, 10.0);
        let p = common::unstructured(&mut r, m, n, 0.0);
        let ls = ls_solve(&p.a, &p.y).unwrap().x_hat;
        let ridge = rls_solve(&p.a, &p.y, mu).unwrap().x_hat;
        let reg = UnstructuredProblem { mu: Some(mu), ..p.clone() };
        worst[0] = worst[0].max((cls_solve(&p).unwrap().x_hat - &ls).norm());
        worst[1] = worst[1].max((crls_solve(&reg).unwrap().x_hat - &ridge).norm());
        worst[3] = worst[3].max((rls_robust(&p).unwrap().x_hat - &ls).norm());
        worst[4] = worst[4].max((rrls_solve(&reg).unwrap().x_hat - &ridge).norm());
        for tied in [false, true] {
            let sp = StructuredProblem { a: p.a.clone(), y: p.y.clone(), ..common::structured(&mut r, m, n, 2, 0.0, tied) };
            worst[2] = worst[2].max((scls_solve(&sp).unwrap().x_hat - &ls).norm());
        }
    }
    let max = worst.iter().copied().fold(0.0, f64::max);
    (
        max <= 1e-6,
        format!(
            "max ||x - x_classical||: c-ls {:.1e}, c-rls {:.1e}, sc-ls {:.1e}, r-ls {:.1e}, r-rls {:.1e}",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    )
}

fn random_candidates(r: &mut ChaCha8Rng, center: &DVector<f64>) -> Vec<DVector<f64>> {
    let n = center.len();
    let mut out = Vec::with_capacity(100);
    for k in 0..100 {
        let d = common::uniform_vector(r, n);
        out.push(if k < 50 {
            center + d * (0.1 * (1.0 + center.norm()))
        } else {
            d * 2.0
        });
    }
    out
}

// 6. The minimax estimate has the smallest bound among the candidates.
fn minimax_dominance() -> Verdict {
    let mut r = rng(606);
    let baseline_mu = 0.1;
    let mut detail = Vec::new();
    let mut pass = true;
    for mode in ["unstructured", "regularized", "structured"] {
        let mut worst = f64::NEG_INFINITY;
        for i in 0..20 {
            let rho = r.random_range(0.1..0.5);
            let (x_hat, ub, baselines): (DVector<f64>, Box<dyn Fn(&DVector<f64>) -> f64>, Vec<DVector<f64>>) = match mode {
                "unstructured" | "regularized" => {
                    let p = if mode == "unstructured" {
                        common::unstructured(&mut r, 5, 3, rho)
                    } else {
                        {
                        let mu = log_uniform(&mut r, 0.05, 10.0);
                        common::regularized(&mut r, 5, 3, rho, mu)
                    }
                    };
                    let mu = p.mu.unwrap_or(baseline_mu);
                    let plain = UnstructuredProblem { mu: None, ..p.clone() };
                    let mut base = vec![
                        ls_solve(&p.a, &p.y).unwrap().x_hat,
                        rls_solve(&p.a, &p.y, mu).unwrap().x_hat,
                        rls_robust(&plain).unwrap().x_hat,
                    ];
                    let x_hat = if p.mu.is_some() {
                        base.push(rrls_solve(&p).unwrap().x_hat);
                        crls_solve(&p).unwrap().x_hat
                    } else {
                        cls_solve(&p).unwrap().x_hat
                    };
                    (x_hat, Box::new(move |x: &DVector<f64>| worst_case_ub(&p, x).unwrap()), base)
                }
                _ => {
                    let p = common::structured(&mut r, 5, 3, 3, rho, i % 2 == 0);
                    let plain = UnstructuredProblem::new(p.a.clone(), p.y.clone(), p.rho_h, p.beta_radius()).unwrap();
                    let mut base = vec![
                        ls_solve(&p.a, &p.y).unwrap().x_hat,
                        rls_solve(&p.a, &p.y, baseline_mu).unwrap().x_hat,
                        rls_robust(&plain).unwrap().x_hat,
                    ];
                    if p.tied {
                        base.push(srls_solve(&p).unwrap().x_hat);
                    }
                    let x_hat = scls_solve(&p).unwrap().x_hat;
                    (x_hat, Box::new(move |x: &DVector<f64>| worst_case_ub_structured(&p, x).unwrap()), base)
                }
            };
            let best = ub(&x_hat);
            let mut cands = baselines;
            cands.extend(random_candidates(&mut r, &x_hat));
            for c in &cands {
                worst = worst.max(best - ub(c));
            }
        }
        pass &= worst <= 1e-6;
        detail.push(format!("{mode}: max ub(x_hat) - ub(x') = {worst:.2e}"));
    }
    (pass, detail.join(", "))
}

fn summary_line(run: &regretls::experiment::TrialRun, methods: &[Method]) -> String {
    methods
        .iter()
        .map(|&m| {
            let s = run.method(m).unwrap();
            format!("{m} mean {:.4} max {:.4}", s.mean_error, s.max_error)
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn trials_csv(cfg: &ExperimentConfig) -> (regretls::experiment::TrialRun, Vec<u8>) {
    let run = run_trials(cfg).unwrap();
    let mut buf = Vec::new();
    write_trials_csv(&run.rows, &mut buf).unwrap();
    (run, buf)
}

fn sweep_csv(cfg: &ExperimentConfig) -> (Vec<SweepRow>, Vec<u8>) {
    let rows = run_sweep(cfg).unwrap();
    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf).unwrap();
    (rows, buf)
}

// 7. Sorted-error experiment, unstructured.
fn experiment_1(csv: &mut Vec<(String, Vec<u8>)>) -> Verdict {
    let start = Instant::now();
    let cfg = config("exp1.json");
    let (run, bytes) = trials_csv(&cfg);
    let secs = start.elapsed().as_secs_f64();
    csv.push(("exp1".into(), bytes));
    let get = |m| run.method(m).unwrap();
    let (ls, c, rob) = (get(Method::LeastSquares), get(Method::MinimaxRegret), get(Method::RobustLs));
    let pass = run.summary.estimator_errors.is_empty()
        && ls.trials == 200
        && rob.max_error < c.max_error
        && c.max_error < ls.max_error
        && c.mean_error < ls.mean_error
        && c.mean_error < rob.mean_error
        && secs < 120.0;
    (
        pass,
        format!(
            "seed {}: {}; {secs:.1}s",
            cfg.seed,
            summary_line(&run, &[Method::LeastSquares, Method::MinimaxRegret, Method::RobustLs])
        ),
    )
}

// 8. Average error over the rho grid.
fn experiment_2(csv: &mut Vec<(String, Vec<u8>)>) -> Verdict {
    let start = Instant::now();
    let cfg = config("exp2.json");
    let (rows, bytes) = sweep_csv(&cfg);
    let secs = start.elapsed().as_secs_f64();
    csv.push(("exp2".into(), bytes));
    let grid = cfg.sweep.as_ref().unwrap().grid();
    let mut pass = secs < 600.0 && grid.len() == 7;
    let mut margins = Vec::new();
    for rho in &grid {
        let at: Vec<&SweepRow> = rows.iter().filter(|r| r.rho == *rho).collect();
        let c = at.iter().find(|r| r.method == Method::MinimaxRegret).unwrap();
        let rest = at
            .iter()
            .filter(|r| r.method != Method::MinimaxRegret)
            .map(|r| r.mean_error)
            .fold(f64::INFINITY, f64::min);
        pass &= c.mean_error < rest && c.trials == 200;
        margins.push(format!("{rho:.2}:{:.4}", rest - c.mean_error));
    }
    (
        pass,
        format!("next-best mean minus c-ls mean per rho [{}]; {secs:.1}s", margins.join(" ")),
    )
}

// 9. Structured (Toeplitz) experiment.
fn experiment_3(csv: &mut Vec<(String, Vec<u8>)>) -> Verdict {
    let cfg = config("exp3.json");
    let (run, bytes) = trials_csv(&cfg);
    csv.push(("exp3".into(), bytes));
    let get = |m| run.method(m).unwrap();
    let (ls, sc, sr) = (get(Method::LeastSquares), get(Method::StructuredRegret), get(Method::StructuredRobustLs));
    let pass = run.summary.estimator_errors.is_empty()
        && sr.max_error < sc.max_error
        && sr.max_error < ls.max_error
        && sc.mean_error < ls.mean_error
        && sc.mean_error < sr.mean_error;
    (
        pass,
        format!(
            "seed {}: {}",
            cfg.seed,
            summary_line(&run, &[Method::LeastSquares, Method::StructuredRegret, Method::StructuredRobustLs])
        ),
    )
}

// 10. Regularized experiment: dominance of the bound, averages reported only.
fn experiment_4(csv: &mut Vec<(String, Vec<u8>)>) -> Verdict {
    let start = Instant::now();
    let cfg = config("exp4.json");
    let (run, bytes) = trials_csv(&cfg);
    csv.push(("exp4".into(), bytes));
    let ProblemInstance::Unstructured(p) = gen_instance(&cfg, cfg.seed).unwrap() else {
        unreachable!("regularized config")
    };
    let est = |m: Method| {
        run.estimates
            .iter()
            .find(|(k, _)| *k == m)
            .and_then(|(_, e)| e.as_ref().ok())
            .map(|e| e.x_hat.clone())
            .unwrap()
    };
    let ub_c = worst_case_ub(&p, &est(Method::MinimaxRegretRidge)).unwrap();
    let ub_rls = worst_case_ub(&p, &est(Method::Ridge)).unwrap();
    let ub_rrls = worst_case_ub(&p, &est(Method::RobustRidge)).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = run.summary.estimator_errors.is_empty()
        && ub_c <= ub_rls + 1e-6
        && ub_c <= ub_rrls + 1e-6
        && run.method(Method::Ridge).unwrap().trials == 1000
        && secs < 600.0;
    (
        pass,
        format!(
            "ub c-rls {ub_c:.6}, rls {ub_rls:.6}, r-rls {ub_rrls:.6}; averages (not asserted): {}; {secs:.1}s",
            summary_line(&run, &[Method::Ridge, Method::MinimaxRegretRidge, Method::RobustRidge])
        ),
    )
}

// 11. Replays are byte-identical.
fn determinism(first: &[(String, Vec<u8>)]) -> Verdict {
    let mut same = Vec::new();
    let mut pass = first.len() == 4;
    for (name, bytes) in first {
        let again = match name.as_str() {
            "exp2" => sweep_csv(&config("exp2.json")).1,
            other => trials_csv(&config(&format!("{other}.json"))).1,
        };
        let ok = &again == bytes;
        pass &= ok;
        same.push(format!("{name} {}", if ok { "identical" } else { "DIFFERS" }));
    }
    (pass, format!("{} ({} bytes total)", same.join(", "), first.iter().map(|(_, b)| b.len()).sum::<usize>()))
}

fn main() {
    let mut csv = Vec::new();
    let mut results: Vec<(usize, &str, Verdict, f64)> = Vec::new();
    let mut record = |id: usize, name: &'static str, f: &mut dyn FnMut() -> Verdict| {
        let t = Instant::now();
        let v = f();
        results.push((id, name, v, t.elapsed().as_secs_f64()));
        let (id, name, (ok, detail), secs) = results.last().unwrap();
        println!("{} [{id}] {name}: {detail} ({secs:.1}s)", if *ok { "PASS" } else { "FAIL" });
    };
    record(1, "gradient suite", &mut gradient_suite);
    record(2, "linearization order", &mut richardson);
    record(3, "sdp solver", &mut sdp_solver);
    record(4, "s-procedure soundness", &mut s_procedure_soundness);
    record(5, "zero-radius collapse", &mut zero_radius_collapse);
    record(6, "minimax dominance", &mut minimax_dominance);
    record(7, "experiment 1 ordering", &mut || experiment_1(&mut csv));
    record(8, "experiment 2 ordering", &mut || experiment_2(&mut csv));
    record(9, "experiment 3 ordering", &mut || experiment_3(&mut csv));
    record(10, "experiment 4 dominance", &mut || experiment_4(&mut csv));
    record(11, "determinism", &mut || determinism(&csv));

    let failed: Vec<usize> = results.iter().filter(|r| !r.2 .0).map(|r| r.0).collect();
    println!(
        "acceptance: {} of {} criteria passed",
        results.len() - failed.len(),
        results.len()
    );
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
