//! Quick invariant battery behind `regretls selftest`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::estimators::{cls_solve, ls_solve};
use crate::experiment::{run_trials, ExperimentConfig, ProblemMode};
use crate::gradients::{g_value, grad_g_a, grad_h_a, h_value};
use crate::lmi::{BlockBuilder, LmiProblem};
use crate::oracle::{expansion_for, regret_linearized, worst_case_lb, worst_case_ub, PerturbationSample, SampleMode};
use crate::problem::UnstructuredProblem;
use crate::sdp::{solve, SolverConfig};
use crate::Method;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn random_problem(rng: &mut ChaCha8Rng, rho: f64) -> UnstructuredProblem {
    let a = DMatrix::from_fn(5, 3, |_, _| rng.random_range(-1.0..1.0));
    let y = DVector::from_fn(5, |_, _| rng.random_range(-1.0..1.0));
    UnstructuredProblem::new(a, y, rho, rho).expect("valid random problem")
}

fn fd_rel_error(a: &DMatrix<f64>, analytic: &DMatrix<f64>, f: &dyn Fn(&DMatrix<f64>) -> f64) -> f64 {
    let h = 1e-6 * (1.0 + a.norm());
    let mut fd = DMatrix::zeros(a.nrows(), a.ncols());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let (mut up, mut dn) = (a.clone(), a.clone());
            up[(i, j)] += h;
            dn[(i, j)] -= h;
            fd[(i, j)] = (f(&up) - f(&dn)) / (2.0 * h);
        }
    }
    (fd - analytic).norm() / analytic.norm().max(1e-3)
}

fn gradients(rng: &mut ChaCha8Rng) -> Check {
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let p = random_problem(rng, 0.0);
        let y = p.y.clone();
        let ga = grad_g_a(&p.a, &y).expect("full rank");
        worst = worst.max(fd_rel_error(&p.a, &ga, &|a| g_value(a, &y).unwrap_or(f64::NAN)));
        let ha = grad_h_a(&p.a, &y, 0.5).expect("ridge");
        worst = worst.max(fd_rel_error(&p.a, &ha, &|a| h_value(a, &y, 0.5).unwrap_or(f64::NAN)));
    }
    check("gradients vs finite differences", worst <= 1e-6, format!("max relative error {worst:.2e}"))
}

fn closed_forms() -> Check {
    let mut b = BlockBuilder::new(2, 1);
    b.coeff(0, 0, 0, 1.0);
    b.coeff(0, 1, 1, 1.0);
    b.constant(0, 1, 1.0);
    let mut l = LmiProblem::new(vec!["z".into()], DVector::from_element(1, 1.0));
    l.push_block(b.finish());
    match solve(&l, &SolverConfig::default()) {
        Ok(s) => {
            let err = (s.objective_value - 1.0).abs();
            check("arrow LMI optimum", err <= 1e-7, format!("|lambda* - 1| = {err:.2e}"))
        }
        Err(e) => check("arrow LMI optimum", false, e.to_string()),
    }
}

fn collapse(rng: &mut ChaCha8Rng) -> Check {
    let p = random_problem(rng, 0.0);
    let run = || -> crate::Result<f64> {
        let c = cls_solve(&p)?;
        let l = ls_solve(&p.a, &p.y)?;
        Ok((c.x_hat - l.x_hat).norm())
    };
    match run() {
        Ok(d) => check("zero radius: c-ls equals ls", d <= 1e-6, format!("||diff|| = {d:.2e}")),
        Err(e) => check("zero radius: c-ls equals ls", false, e.to_string()),
    }
}

fn soundness_and_sandwich(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_gap = f64::NEG_INFINITY;
    let mut failure = None;
    for k in 0..3 {
        let p = random_problem(rng, 0.3);
        let mut step = || -> crate::Result<(f64, f64)> {
            let est = cls_solve(&p)?;
            let bound = est.regret_bound.unwrap_or(f64::NAN);
            let e = expansion_for(&p)?;
            let mut srng = ChaCha8Rng::seed_from_u64(1000 + k);
            let mut excess = f64::NEG_INFINITY;
            for _ in 0..1000 {
                let s = PerturbationSample::draw(&p, SampleMode::Boundary, &mut srng);
                excess = excess.max(regret_linearized(&e, &p, &est.x_hat, &s) - bound);
            }
            let x = DVector::from_fn(3, |_, _| rng.random_range(-1.0..1.0));
            let gap = worst_case_lb(&p, &x, 500, k)? - worst_case_ub(&p, &x)?;
            Ok((excess, gap))
        };
        match step() {
            Ok((e, g)) => {
                worst_excess = worst_excess.max(e);
                worst_gap = worst_gap.max(g);
            }
            Err(e) => failure = Some(e.to_string()),
        }
    }
    if let Some(f) = failure {
        return vec![check("regret bound soundness", false, f)];
    }
    vec![
        check(
            "regret bound soundness",
            worst_excess <= 1e-6,
            format!("max sampled regret - bound = {worst_excess:.2e}"),
        ),
        check(
            "lower bound <= upper bound",
            worst_gap <= 1e-6,
            format!("max lb - ub = {worst_gap:.2e}"),
        ),
    ]
}

fn determinism() -> Check {
    let cfg = ExperimentConfig {
        mode: ProblemMode::Unstructured,
        m: 5,
        n: 3,
        trials: 10,
        rho_h: 0.4,
        rho_y: 0.4,
        mu: None,
        sweep: None,
        structured_spec: None,
        methods: vec![Method::LeastSquares, Method::MinimaxRegret],
        seed: 3,
        sample_mode: SampleMode::Uniform,
    };
    match (run_trials(&cfg), run_trials(&cfg)) {
        (Ok(a), Ok(b)) => check("trial replay", a.rows == b.rows, format!("{} rows", a.rows.len())),
        (Err(e), _) | (_, Err(e)) => check("trial replay", false, e.to_string()),
    }
}

/// Runs every check; never panics on numerical trouble, it reports it.
pub fn run_selftest() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut out = vec![gradients(&mut rng), closed_forms(), collapse(&mut rng)];
    out.extend(soundness_and_sandwich(&mut rng));
    out.push(determinism());
    out
}

#[cfg(test)]
mod tests {
    #[test]
    fn selftest_passes() {
        for c in super::run_selftest() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
