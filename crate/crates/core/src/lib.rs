//! Minimax-regret least squares under bounded data uncertainty.
//!
//! The estimators minimize the worst-case gap between an estimate's squared
//! residual and the best residual attainable had the perturbation been known,
//! using a first-order expansion of that best residual and an LMI relaxation
//! of the inner maximization. The LMIs are solved by a small dense barrier
//! method in [`sdp`].

pub mod error;
pub mod estimators;
pub mod experiment;
pub mod gradients;
pub mod linalg;
pub mod lmi;
pub mod oracle;
pub mod problem;
pub mod sdp;
pub mod selftest;

pub use error::{Error, Result};
pub use estimators::{Estimate, Method, ProblemInstance};
pub use problem::{StructuredProblem, UnstructuredProblem};
pub use sdp::{BarrierSolver, SdpSolution, SdpSolver, SolveStatus, SolverConfig};
