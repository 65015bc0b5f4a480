//! Gradients of the optimal-cost functions and the first-order regret expansion.
//!
//! Two cost functions appear:
//!
//! * `g(A, y) = y^T (I - A A^+) y`, the smallest attainable squared residual;
//! * `h(A, y) = y^T (I + A A^T / mu)^{-1} y`, the optimal ridge cost.
//!
//! The expansions pack the gradients into the coefficients consumed by the LMI
//! builders. The LMIs read linear terms as symmetrized pairs `c^T d + d^T c`,
//! so each stored coefficient is half of the corresponding gradient; with that
//! scaling, `2 c^T vec_rows(dA) + 2 b^T dy` is exactly the first-order change
//! of the cost.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{frob_inner, pinv, projector_perp, require_full_column_rank, solve_psd, vec_rows};
use crate::problem::{check_mu, StructuredProblem};

/// First-order model of `g` (or `h`) around the nominal data.
#[derive(Debug, Clone)]
pub struct RegretExpansion {
    /// Optimal nominal cost.
    pub eta: f64,
    /// `vec_rows(grad_a) / 2`
    pub c_vec: DVector<f64>,
    /// `grad_y / 2`
    pub b_vec: DVector<f64>,
    pub grad_a: DMatrix<f64>,
    pub grad_y: DVector<f64>,
}

impl RegretExpansion {
    fn from_gradients(eta: f64, grad_a: DMatrix<f64>, grad_y: DVector<f64>) -> Self {
        Self {
            eta,
            c_vec: vec_rows(&grad_a) * 0.5,
            b_vec: &grad_y * 0.5,
            grad_a,
            grad_y,
        }
    }

    /// `eta + <grad_a, dA> + grad_y^T dy`
    pub fn linear_model(&self, delta_a: &DMatrix<f64>, delta_y: &DVector<f64>) -> f64 {
        self.eta + frob_inner(&self.grad_a, delta_a) + self.grad_y.dot(delta_y)
    }
}

/// First-order model of `g(A(alpha), y(beta))` in the structure coefficients.
#[derive(Debug, Clone)]
pub struct StructuredExpansion {
    pub eta: f64,
    /// `dg/dalpha` at zero.
    pub grad_alpha: DVector<f64>,
    /// `dg/dbeta` at zero.
    pub grad_beta: DVector<f64>,
    /// `grad_alpha / 2`
    pub b_alpha: DVector<f64>,
    /// `grad_beta / 2`
    pub c_beta: DVector<f64>,
}

impl StructuredExpansion {
    /// Halved coefficient on `alpha` when `beta = alpha`.
    pub fn tied_coefficient(&self) -> DVector<f64> {
        &self.b_alpha + &self.c_beta
    }

    pub fn linear_model(&self, alpha: &DVector<f64>, beta: &DVector<f64>) -> f64 {
        self.eta + self.grad_alpha.dot(alpha) + self.grad_beta.dot(beta)
    }
}

fn check_pair(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<()> {
    if y.len() != a.nrows() {
        return Err(Error::invalid(format!(
            "y has length {}, A has {} rows",
            y.len(),
            a.nrows()
        )));
    }
    Ok(())
}

/// `g(A, y) = y^T (I - A A^+) y`.
pub fn g_value(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<f64> {
    check_pair(a, y)?;
    let p = projector_perp(a)?;
    Ok(y.dot(&(p * y)))
}

fn ridge_kernel(a: &DMatrix<f64>, mu: f64) -> DMatrix<f64> {
    let m = a.nrows();
    DMatrix::identity(m, m) + (a * a.transpose()) / mu
}

/// `h(A, y) = y^T (I + A A^T / mu)^{-1} y`.
pub fn h_value(a: &DMatrix<f64>, y: &DVector<f64>, mu: f64) -> Result<f64> {
    check_pair(a, y)?;
    let mu = check_mu(mu)?;
    let k = ridge_kernel(a, mu);
    let w = solve_psd(&k, &DMatrix::from_column_slice(y.len(), 1, y.as_slice()))?;
    Ok(y.dot(&w.column(0)))
}

struct LsParts {
    /// `P_A y`
    resid_proj: DVector<f64>,
    /// `A^+ y`
    coeffs: DVector<f64>,
}

fn ls_parts(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<LsParts> {
    check_pair(a, y)?;
    require_full_column_rank(a)?;
    let pinv = pinv(a)?;
    let proj = projector_perp(a)?;
    Ok(LsParts {
        resid_proj: proj * y,
        coeffs: pinv * y,
    })
}

/// `dg/dA = -2 (I - A A^+) y y^T A (A^T A)^{-1} = -2 (P_A y)(A^+ y)^T`.
pub fn grad_g_a(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<DMatrix<f64>> {
    let parts = ls_parts(a, y)?;
    Ok(parts.resid_proj * parts.coeffs.transpose() * -2.0)
}

/// `dg/dy = 2 P_A y`.
pub fn grad_g_y(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let parts = ls_parts(a, y)?;
    Ok(parts.resid_proj * 2.0)
}

/// `dh/dA = -(2/mu) K^{-1} y y^T K^{-1} A` with `K = I + A A^T / mu`.
pub fn grad_h_a(a: &DMatrix<f64>, y: &DVector<f64>, mu: f64) -> Result<DMatrix<f64>> {
    check_pair(a, y)?;
    let mu = check_mu(mu)?;
    let w = solve_psd(&ridge_kernel(a, mu), &DMatrix::from_column_slice(y.len(), 1, y.as_slice()))?;
    let w = w.column(0).into_owned();
    Ok(&w * (w.transpose() * a) * (-2.0 / mu))
}

/// `dh/dy = 2 K^{-1} y`.
pub fn grad_h_y(a: &DMatrix<f64>, y: &DVector<f64>, mu: f64) -> Result<DVector<f64>> {
    check_pair(a, y)?;
    let mu = check_mu(mu)?;
    let w = solve_psd(&ridge_kernel(a, mu), &DMatrix::from_column_slice(y.len(), 1, y.as_slice()))?;
    Ok(w.column(0) * 2.0)
}

fn check_index(p: &StructuredProblem, i: usize) -> Result<()> {
    if i >= p.p() {
        return Err(Error::invalid(format!("basis index {i} out of range (p = {})", p.p())));
    }
    Ok(())
}

/// `dg/dalpha_i` at zero: `-2 y^T P_A A_i A^+ y`.
pub fn grad_struct_alpha(p: &StructuredProblem, i: usize) -> Result<f64> {
    check_index(p, i)?;
    let parts = ls_parts(&p.a, &p.y)?;
    Ok(-2.0 * parts.resid_proj.dot(&(&p.basis_a[i] * &parts.coeffs)))
}

/// `dg/dbeta_i` at zero: `2 y^T P_A y_i`.
pub fn grad_struct_beta(p: &StructuredProblem, i: usize) -> Result<f64> {
    check_index(p, i)?;
    let parts = ls_parts(&p.a, &p.y)?;
    Ok(2.0 * parts.resid_proj.dot(&p.basis_y[i]))
}

pub fn expand_unstructured(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<RegretExpansion> {
    let parts = ls_parts(a, y)?;
    let eta = y.dot(&parts.resid_proj);
    let grad_a = &parts.resid_proj * parts.coeffs.transpose() * -2.0;
    let grad_y = &parts.resid_proj * 2.0;
    Ok(RegretExpansion::from_gradients(eta, grad_a, grad_y))
}

pub fn expand_regularized(a: &DMatrix<f64>, y: &DVector<f64>, mu: f64) -> Result<RegretExpansion> {
    check_pair(a, y)?;
    let mu = check_mu(mu)?;
    let w = solve_psd(&ridge_kernel(a, mu), &DMatrix::from_column_slice(y.len(), 1, y.as_slice()))?;
    let w = w.column(0).into_owned();
    let eta = y.dot(&w);
    let grad_a = &w * (w.transpose() * a) * (-2.0 / mu);
    let grad_y = &w * 2.0;
    Ok(RegretExpansion::from_gradients(eta, grad_a, grad_y))
}

pub fn expand_structured(p: &StructuredProblem) -> Result<StructuredExpansion> {
    let parts = ls_parts(&p.a, &p.y)?;
    let eta = p.y.dot(&parts.resid_proj);
    let grad_alpha = DVector::from_iterator(
        p.p(),
        p.basis_a
            .iter()
            .map(|ai| -2.0 * parts.resid_proj.dot(&(ai * &parts.coeffs))),
    );
    let grad_beta = DVector::from_iterator(
        p.p(),
        p.basis_y.iter().map(|yi| 2.0 * parts.resid_proj.dot(yi)),
    );
    Ok(StructuredExpansion {
        eta,
        b_alpha: &grad_alpha * 0.5,
        c_beta: &grad_beta * 0.5,
        grad_alpha,
        grad_beta,
    })
}
