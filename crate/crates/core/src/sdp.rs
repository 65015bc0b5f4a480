//! Dense log-det barrier method for inequality-form SDPs.
//!
//! Each centering step is a damped Newton step on
//! `t c^T z - log det F(z)`: full steps once the Newton decrement is below
//! 1/4, otherwise the self-concordant damping `1/(1 + decrement)`, then
//! backtracking if round-off still lands outside the cone.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::lmi::{LmiBlock, LmiProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    MaxIterations,
    Infeasible,
    NumericalFailure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub tol_gap: f64,
    pub barrier_growth: f64,
    pub max_outer: usize,
    pub max_newton: usize,
    pub line_search_shrink: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_gap: 1e-7,
            barrier_growth: 10.0,
            max_outer: 60,
            max_newton: 500,
            line_search_shrink: 0.5,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.tol_gap > 0.0
            && self.barrier_growth > 1.0
            && self.max_outer > 0
            && self.max_newton > 0
            && self.line_search_shrink > 0.0
            && self.line_search_shrink < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("bad solver config {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    pub z_star: DVector<f64>,
    pub objective_value: f64,
    pub status: SolveStatus,
    /// Total Newton steps.
    pub iterations: usize,
    pub min_eig: f64,
    pub gap_estimate: f64,
    /// Objective after each completed centering.
    pub objective_history: Vec<f64>,
}

impl SdpSolution {
    /// Turns a non-optimal status into an error.
    pub fn require_optimal(self) -> Result<Self> {
        if self.status == SolveStatus::Optimal {
            Ok(self)
        } else {
            Err(Error::Solver {
                status: self.status,
                iterations: self.iterations,
                objective: self.objective_value,
            })
        }
    }
}

/// Anything that can solve an inequality-form SDP.
pub trait SdpSolver {
    fn solve(&self, lmi: &LmiProblem) -> Result<SdpSolution>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BarrierSolver {
    pub config: SolverConfig,
}

impl SdpSolver for BarrierSolver {
    fn solve(&self, lmi: &LmiProblem) -> Result<SdpSolution> {
        solve(lmi, &self.config)
    }
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(s: &DMatrix<f64>) -> f64 {
    if s.nrows() == 0 {
        return f64::INFINITY;
    }
    if s.nrows() == 1 {
        return s[(0, 0)];
    }
    SymmetricEigen::new(s.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

const NEWTON_TOL: f64 = 1e-10;
/// A centering that runs out of steps or stalls with a decrement below this
/// is close enough to the central path to keep going.
const NEAR_CENTRAL: f64 = 1e-4;
const STRICT_MARGIN: f64 = 1e-10;

struct Barrier<'a> {
    blocks: &'a [LmiBlock],
    /// Variables with a nonzero coefficient in each block.
    active: Vec<Vec<usize>>,
    nv: usize,
}

struct Step {
    grad: DVector<f64>,
    hess: DMatrix<f64>,
}

impl<'a> Barrier<'a> {
    fn new(lmi: &'a LmiProblem) -> Self {
        let active = lmi
            .blocks
            .iter()
            .map(|b| {
                (0..lmi.num_vars())
                    .filter(|&k| b.coeffs[k].iter().any(|v| *v != 0.0))
                    .collect()
            })
            .collect();
        Self {
            blocks: &lmi.blocks,
            active,
            nv: lmi.num_vars(),
        }
    }

    /// Cholesky factors of every block, or `None` outside the open cone.
    fn factor(&self, z: &DVector<f64>) -> Option<Vec<DMatrix<f64>>> {
        self.blocks
            .iter()
            .map(|b| b.eval(z).cholesky().map(|c| c.l()))
            .collect()
    }

    fn log_det(factors: &[DMatrix<f64>]) -> f64 {
        factors
            .iter()
            .map(|l| l.diagonal().iter().map(|d| d.ln()).sum::<f64>() * 2.0)
            .sum()
    }

    /// Gradient and Hessian of `-log det F(z)`.
    fn derivatives(&self, factors: &[DMatrix<f64>]) -> Step {
        let mut grad = DVector::zeros(self.nv);
        let mut hess = DMatrix::zeros(self.nv, self.nv);
        for ((b, l), act) in self.blocks.iter().zip(factors).zip(&self.active) {
            // G_k = L^{-1} F_k L^{-T}
            let g: Vec<DMatrix<f64>> = act
                .iter()
                .map(|&k| {
                    let half = l.solve_lower_triangular(&b.coeffs[k]).expect("nonsingular factor");
                    l.solve_lower_triangular(&half.transpose()).expect("nonsingular factor")
                })
                .collect();
            for (i, &k) in act.iter().enumerate() {
                grad[k] -= g[i].trace();
                for (j, &q) in act.iter().enumerate().take(i + 1) {
                    let v = g[i].dot(&g[j]);
                    hess[(k, q)] += v;
                    if k != q {
                        hess[(q, k)] += v;
                    }
                }
            }
        }
        Step { grad, hess }
    }
}

fn newton_direction(hess: &DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(c) = hess.clone().cholesky() {
        return Some(c.solve(&(-g)));
    }
    let ridge = 1e-12 * hess.diagonal().amax().max(1e-300);
    let shifted = hess + DMatrix::identity(hess.nrows(), hess.ncols()) * ridge;
    shifted.cholesky().map(|c| c.solve(&(-g)))
}

enum Centering {
    Done,
    Stalled,
    Exhausted,
}

/// Shared barrier loop. `stop` is checked after every Newton step and lets
/// phase I quit as soon as it has found an interior point.
fn barrier_loop(
    lmi: &LmiProblem,
    cfg: &SolverConfig,
    z0: DVector<f64>,
    stop: &dyn Fn(&DVector<f64>) -> bool,
) -> SdpSolution {
    let bar = Barrier::new(lmi);
    let c = &lmi.objective;
    let nu = lmi.order() as f64;
    let mut z = z0;
    let mut iterations = 0;
    let mut history = Vec::new();

    let finish = |z: DVector<f64>, status, iterations, gap, history| {
        let min_eig = lmi.min_eig_at(&z);
        SdpSolution {
            objective_value: lmi.objective_value(&z),
            z_star: z,
            status,
            iterations,
            min_eig,
            gap_estimate: gap,
            objective_history: history,
        }
    };

    let Some(f0) = bar.factor(&z) else {
        return finish(z, SolveStatus::NumericalFailure, 0, f64::INFINITY, history);
    };
    let mut t = initial_t(c, &bar.derivatives(&f0), nu);

    for _outer in 0..cfg.max_outer {
        let outcome = center(&bar, c, t, cfg, &mut z, &mut iterations, stop);
        history.push(lmi.objective_value(&z));
        if stop(&z) {
            return finish(z, SolveStatus::Optimal, iterations, nu / t, history);
        }
        match outcome {
            Centering::Done | Centering::Stalled => {}
            Centering::Exhausted => {
                return finish(z, SolveStatus::MaxIterations, iterations, nu / t, history)
            }
        }
        if nu / t <= cfg.tol_gap {
            return finish(z, SolveStatus::Optimal, iterations, nu / t, history);
        }
        if matches!(outcome, Centering::Stalled) && nu / t <= cfg.tol_gap.sqrt() {
            // Round-off floor reached well inside the cone; report the bound we have.
            return finish(z, SolveStatus::NumericalFailure, iterations, nu / t, history);
        }
        if z.amax() > 1e12 {
            return finish(z, SolveStatus::NumericalFailure, iterations, nu / t, history);
        }
        t *= cfg.barrier_growth;
    }
    finish(z, SolveStatus::MaxIterations, iterations, nu / t, history)
}

/// Chooses `t` so the starting point is as close to central as possible.
fn initial_t(c: &DVector<f64>, d: &Step, nu: f64) -> f64 {
    let fallback = 1.0;
    let Some(ch) = d.hess.clone().cholesky() else {
        return fallback;
    };
    let hc = ch.solve(c);
    let denom = c.dot(&hc);
    if !(denom > 0.0) {
        return fallback;
    }
    let t = -d.grad.dot(&hc) / denom;
    if t.is_finite() && t > 0.0 {
        t.clamp(1e-3, 1e3 * nu.max(1.0))
    } else {
        fallback
    }
}

fn center(
    bar: &Barrier,
    c: &DVector<f64>,
    t: f64,
    cfg: &SolverConfig,
    z: &mut DVector<f64>,
    iterations: &mut usize,
    stop: &dyn Fn(&DVector<f64>) -> bool,
) -> Centering {
    let mut dec2 = f64::INFINITY;
    for _ in 0..cfg.max_newton {
        let Some(factors) = bar.factor(z) else {
            return Centering::Stalled;
        };
        let d = bar.derivatives(&factors);
        let g = c * t + &d.grad;
        let Some(dir) = newton_direction(&d.hess, &g) else {
            return Centering::Stalled;
        };
        dec2 = -g.dot(&dir);
        if !dec2.is_finite() {
            return Centering::Stalled;
        }
        if dec2 / 2.0 <= NEWTON_TOL {
            return Centering::Done;
        }
        let dec = dec2.max(0.0).sqrt();
        let mut step = if dec < 0.25 { 1.0 } else { 1.0 / (1.0 + dec) };
        let phi0 = t * c.dot(z) - Barrier::log_det(&factors);
        let accepted = loop {
            let trial = &*z + &dir * step;
            if let Some(f) = bar.factor(&trial) {
                let phi = t * c.dot(&trial) - Barrier::log_det(&f);
                // Round-off tolerance on the decrease test; the damped step
                // provably decreases phi in exact arithmetic.
                if phi <= phi0 + 1e-12 * phi0.abs().max(1.0) {
                    break Some(trial);
                }
            }
            step *= cfg.line_search_shrink;
            if step < 1e-16 {
                break None;
            }
        };
        *iterations += 1;
        match accepted {
            Some(next) => *z = next,
            None if dec2 <= NEAR_CENTRAL => return Centering::Done,
            None => return Centering::Stalled,
        }
        if stop(z) {
            return Centering::Done;
        }
    }
    if dec2 <= NEAR_CENTRAL {
        Centering::Done
    } else {
        Centering::Exhausted
    }
}

/// Minimizes the objective of `lmi`. Errors only for malformed or infeasible
/// problems; iteration trouble is reported through [`SdpSolution::status`].
pub fn solve(lmi: &LmiProblem, cfg: &SolverConfig) -> Result<SdpSolution> {
    cfg.validate()?;
    lmi.validate()?;
    for k in 0..lmi.num_vars() {
        if lmi.blocks.iter().all(|b| b.coeffs[k].iter().all(|v| *v == 0.0)) {
            return Err(Error::invalid(format!(
                "variable {} appears in no constraint",
                lmi.var_names[k]
            )));
        }
    }
    let z0 = find_strictly_feasible(lmi, None, cfg)?;
    Ok(barrier_loop(lmi, cfg, z0, &|_| false))
}

/// Returns a point with every block positive definite: the explicit hint,
/// else the builder hint, else a phase-I solve.
pub fn find_strictly_feasible(
    lmi: &LmiProblem,
    hint: Option<&DVector<f64>>,
    cfg: &SolverConfig,
) -> Result<DVector<f64>> {
    lmi.validate()?;
    let nv = lmi.num_vars();
    for h in hint.into_iter().chain(lmi.hint.as_ref()) {
        if h.len() == nv && lmi.min_eig_at(h) > STRICT_MARGIN {
            return Ok(h.clone());
        }
    }
    let start = hint
        .or(lmi.hint.as_ref())
        .filter(|h| h.len() == nv)
        .cloned()
        .unwrap_or_else(|| DVector::zeros(nv));
    phase_one(lmi, start, cfg)
}

/// `max s` subject to `F(z) - s I >= 0` and `||z|| <= R`.
fn phase_one(lmi: &LmiProblem, start: DVector<f64>, cfg: &SolverConfig) -> Result<DVector<f64>> {
    let nv = lmi.num_vars();
    let sv = nv;
    let radius = 1e6 * (1.0 + start.norm());

    let mut names = lmi.var_names.clone();
    names.push("phase_one_margin".into());
    let mut c = DVector::zeros(nv + 1);
    c[sv] = -1.0;
    let mut aux = LmiProblem::new(names, c);
    for b in &lmi.blocks {
        let s = b.size();
        let mut coeffs = b.coeffs.clone();
        coeffs.push(-DMatrix::identity(s, s));
        aux.push_block(LmiBlock {
            constant: b.constant.clone(),
            coeffs,
        });
    }
    // Arrow block [[R I, z], [z^T, R]] keeps the search bounded.
    let mut constant = DMatrix::identity(nv + 1, nv + 1) * radius;
    constant[(nv, nv)] = radius;
    let mut coeffs = vec![DMatrix::zeros(nv + 1, nv + 1); nv + 1];
    for (k, f) in coeffs.iter_mut().enumerate().take(nv) {
        f[(k, nv)] = 1.0;
        f[(nv, k)] = 1.0;
    }
    aux.push_block(LmiBlock { constant, coeffs });

    let mut z0 = DVector::zeros(nv + 1);
    z0.rows_mut(0, nv).copy_from(&start);
    z0[sv] = lmi.min_eig_at(&start) - 1.0;

    let found = |z: &DVector<f64>| z[sv] > 0.0 && lmi.min_eig_at(&z.rows(0, nv).into_owned()) > STRICT_MARGIN;
    let sol = barrier_loop(&aux, cfg, z0, &found);
    let z = sol.z_star.rows(0, nv).into_owned();
    if found(&sol.z_star) {
        Ok(z)
    } else {
        Err(Error::Infeasible {
            margin: sol.z_star[sv],
        })
    }
}
