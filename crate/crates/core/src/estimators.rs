//! Estimators: the three regret-minimax methods and the baselines they are
//! compared against.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ensure_finite, ensure_finite_vec, pinv, solve_psd_vec};
use crate::lmi::{build_corollary, build_rls_robust, build_rrls, build_srls, build_thm1, build_thm2, build_thm3, LmiProblem};
use crate::problem::{check_mu, StructuredProblem, UnstructuredProblem};
use crate::sdp::{BarrierSolver, SdpSolution, SdpSolver, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "ls")]
    LeastSquares,
    #[serde(rename = "rls")]
    Ridge,
    #[serde(rename = "c-ls")]
    MinimaxRegret,
    #[serde(rename = "c-rls")]
    MinimaxRegretRidge,
    #[serde(rename = "sc-ls")]
    StructuredRegret,
    #[serde(rename = "r-ls")]
    RobustLs,
    #[serde(rename = "sr-ls")]
    StructuredRobustLs,
    #[serde(rename = "r-rls")]
    RobustRidge,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::LeastSquares,
        Method::Ridge,
        Method::MinimaxRegret,
        Method::MinimaxRegretRidge,
        Method::StructuredRegret,
        Method::RobustLs,
        Method::StructuredRobustLs,
        Method::RobustRidge,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::LeastSquares => "ls",
            Method::Ridge => "rls",
            Method::MinimaxRegret => "c-ls",
            Method::MinimaxRegretRidge => "c-rls",
            Method::StructuredRegret => "sc-ls",
            Method::RobustLs => "r-ls",
            Method::StructuredRobustLs => "sr-ls",
            Method::RobustRidge => "r-rls",
        }
    }

    /// Methods that return a regret bound.
    pub fn is_minimax(self) -> bool {
        matches!(
            self,
            Method::MinimaxRegret | Method::MinimaxRegretRidge | Method::StructuredRegret
        )
    }

    pub fn needs_mu(self) -> bool {
        matches!(self, Method::Ridge | Method::MinimaxRegretRidge | Method::RobustRidge)
    }

    pub fn needs_structure(self) -> bool {
        matches!(self, Method::StructuredRegret | Method::StructuredRobustLs)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| Error::Config(format!("unknown method tag {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub iterations: usize,
    pub status: SolveStatus,
    pub min_eig: f64,
    /// Optimal value of the underlying program.
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub x_hat: DVector<f64>,
    pub method: Method,
    /// `lambda*` for minimax methods, `None` otherwise.
    pub regret_bound: Option<f64>,
    /// Present for SDP-backed methods.
    pub diagnostics: Option<Diagnostics>,
}

impl Estimate {
    fn closed_form(x_hat: DVector<f64>, method: Method) -> Self {
        Self {
            x_hat,
            method,
            regret_bound: None,
            diagnostics: None,
        }
    }
}

fn run_sdp(lmi: &LmiProblem, n: usize, method: Method, solver: &dyn SdpSolver) -> Result<Estimate> {
    let sol: SdpSolution = solver.solve(lmi)?.require_optimal()?;
    let x_hat = sol.z_star.rows(0, n).into_owned();
    if !x_hat.iter().all(|v| v.is_finite()) {
        return Err(Error::Solver {
            status: SolveStatus::NumericalFailure,
            iterations: sol.iterations,
            objective: sol.objective_value,
        });
    }
    Ok(Estimate {
        x_hat,
        method,
        regret_bound: method.is_minimax().then_some(sol.objective_value),
        diagnostics: Some(Diagnostics {
            iterations: sol.iterations,
            status: sol.status,
            min_eig: sol.min_eig,
            objective: sol.objective_value,
        }),
    })
}

fn default_solver() -> BarrierSolver {
    BarrierSolver::default()
}

pub fn cls_solve(p: &UnstructuredProblem) -> Result<Estimate> {
    cls_solve_with(p, &default_solver())
}

pub fn cls_solve_with(p: &UnstructuredProblem, solver: &dyn SdpSolver) -> Result<Estimate> {
    run_sdp(&build_thm1(p)?, p.n(), Method::MinimaxRegret, solver)
}

pub fn crls_solve(p: &UnstructuredProblem) -> Result<Estimate> {
    crls_solve_with(p, &default_solver())
}

pub fn crls_solve_with(p: &UnstructuredProblem, solver: &dyn SdpSolver) -> Result<Estimate> {
    run_sdp(&build_thm2(p)?, p.n(), Method::MinimaxRegretRidge, solver)
}

pub fn scls_solve(p: &StructuredProblem) -> Result<Estimate> {
    scls_solve_with(p, &default_solver())
}

pub fn scls_solve_with(p: &StructuredProblem, solver: &dyn SdpSolver) -> Result<Estimate> {
    let lmi = if p.tied {
        build_corollary(p)?
    } else {
        build_thm3(p)?
    };
    run_sdp(&lmi, p.n(), Method::StructuredRegret, solver)
}

fn check_data(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<()> {
    ensure_finite(a, "A")?;
    ensure_finite_vec(y, "y")?;
    if a.nrows() != y.len() || a.nrows() < a.ncols() || a.ncols() == 0 {
        return Err(Error::invalid(format!(
            "need m x n A with m >= n >= 1 and matching y, got {}x{} and {}",
            a.nrows(),
            a.ncols(),
            y.len()
        )));
    }
    Ok(())
}

/// `x = A^+ y`
pub fn ls_solve(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<Estimate> {
    check_data(a, y)?;
    Ok(Estimate::closed_form(pinv(a)? * y, Method::LeastSquares))
}

/// `x = (A^T A + mu I)^{-1} A^T y`
pub fn rls_solve(a: &DMatrix<f64>, y: &DVector<f64>, mu: f64) -> Result<Estimate> {
    check_data(a, y)?;
    let mu = check_mu(mu)?;
    let n = a.ncols();
    let g = a.transpose() * a + DMatrix::identity(n, n) * mu;
    let x = solve_psd_vec(&g, &(a.transpose() * y))?;
    Ok(Estimate::closed_form(x, Method::Ridge))
}

/// Worst-case residual estimator: `min ||Ax - y|| + rho_h ||x|| + rho_y`.
pub fn rls_robust(p: &UnstructuredProblem) -> Result<Estimate> {
    rls_robust_with(p, &default_solver())
}

pub fn rls_robust_with(p: &UnstructuredProblem, solver: &dyn SdpSolver) -> Result<Estimate> {
    if p.mu.is_some() {
        return Err(Error::InvalidParameter(
            "r-LS takes no mu; use r-RLS for the regularized baseline".into(),
        ));
    }
    let mut e = run_sdp(&build_rls_robust(p)?, p.n(), Method::RobustLs, solver)?;
    if let Some(d) = e.diagnostics.as_mut() {
        d.objective += p.rho_y;
    }
    Ok(e)
}

/// Worst-case residual over the tied structured ball.
pub fn srls_solve(p: &StructuredProblem) -> Result<Estimate> {
    srls_solve_with(p, &default_solver())
}

pub fn srls_solve_with(p: &StructuredProblem, solver: &dyn SdpSolver) -> Result<Estimate> {
    run_sdp(&build_srls(p)?, p.n(), Method::StructuredRobustLs, solver)
}

/// `min (||Ax - y|| + rho_h ||x|| + rho_y)^2 + mu ||x||^2`
pub fn rrls_solve(p: &UnstructuredProblem) -> Result<Estimate> {
    rrls_solve_with(p, &default_solver())
}

pub fn rrls_solve_with(p: &UnstructuredProblem, solver: &dyn SdpSolver) -> Result<Estimate> {
    run_sdp(&build_rrls(p)?, p.n(), Method::RobustRidge, solver)
}

/// Either kind of problem, for method dispatch.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemInstance {
    Unstructured(UnstructuredProblem),
    Structured(StructuredProblem),
}

impl ProblemInstance {
    pub fn nominal(&self) -> (&DMatrix<f64>, &DVector<f64>) {
        match self {
            ProblemInstance::Unstructured(p) => (&p.a, &p.y),
            ProblemInstance::Structured(p) => (&p.a, &p.y),
        }
    }
}

/// Runs `method` on `inst`. Ridge-type methods on a structured instance use
/// `mu`; they are rejected if it is absent.
pub fn estimate(method: Method, inst: &ProblemInstance, mu: Option<f64>) -> Result<Estimate> {
    estimate_with(method, inst, mu, &default_solver())
}

pub fn estimate_with(
    method: Method,
    inst: &ProblemInstance,
    mu: Option<f64>,
    solver: &dyn SdpSolver,
) -> Result<Estimate> {
    let (a, y) = inst.nominal();
    let need_mu = || -> Result<f64> {
        mu.or(match inst {
            ProblemInstance::Unstructured(p) => p.mu,
            ProblemInstance::Structured(_) => None,
        })
        .ok_or_else(|| Error::InvalidParameter(format!("{method} needs mu")))
    };
    match (method, inst) {
        (Method::LeastSquares, _) => ls_solve(a, y),
        (Method::Ridge, _) => rls_solve(a, y, need_mu()?),
        (Method::MinimaxRegret, ProblemInstance::Unstructured(p)) => {
            cls_solve_with(&UnstructuredProblem { mu: None, ..p.clone() }, solver)
        }
        (Method::RobustLs, ProblemInstance::Unstructured(p)) => {
            rls_robust_with(&UnstructuredProblem { mu: None, ..p.clone() }, solver)
        }
        (Method::MinimaxRegretRidge, ProblemInstance::Unstructured(p)) => crls_solve_with(
            &UnstructuredProblem {
                mu: Some(need_mu()?),
                ..p.clone()
            },
            solver,
        ),
        (Method::RobustRidge, ProblemInstance::Unstructured(p)) => rrls_solve_with(
            &UnstructuredProblem {
                mu: Some(need_mu()?),
                ..p.clone()
            },
            solver,
        ),
        (Method::StructuredRegret, ProblemInstance::Structured(p)) => scls_solve_with(p, solver),
        (Method::StructuredRobustLs, ProblemInstance::Structured(p)) => srls_solve_with(p, solver),
        (m, ProblemInstance::Structured(_)) => Err(Error::InvalidParameter(format!(
            "{m} is not defined for structured problems"
        ))),
        (m, ProblemInstance::Unstructured(_)) => Err(Error::InvalidParameter(format!(
            "{m} needs a structured problem"
        ))),
    }
}
