//! Inequality-form SDPs and the builders for every LMI used by the estimators.
//!
//! A problem is `minimize c^T z` subject to `F_b(z) = F_b0 + sum_k z_k F_bk >= 0`
//! for each diagonal block `b`. The regret builders order their decision
//! vector as `(x_1..x_n, tau, theta, lambda)`; the tied (corollary) form has no
//! `theta`.
//!
//! Each builder also returns a strictly feasible starting point in `hint`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gradients::{expand_regularized, expand_structured, expand_unstructured, RegretExpansion, StructuredExpansion};
use crate::linalg::{cholesky, pinv, require_full_column_rank};
use crate::problem::{StructuredProblem, UnstructuredProblem};

/// One diagonal block of the constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct LmiBlock {
    pub constant: DMatrix<f64>,
    /// One symmetric matrix per decision variable.
    pub coeffs: Vec<DMatrix<f64>>,
}

impl LmiBlock {
    pub fn size(&self) -> usize {
        self.constant.nrows()
    }

    pub fn eval(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let mut out = self.constant.clone();
        for (k, f) in self.coeffs.iter().enumerate() {
            if z[k] != 0.0 {
                out += f * z[k];
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmiProblem {
    pub var_names: Vec<String>,
    pub objective: DVector<f64>,
    /// Added to `objective^T z`; nonzero only after [`LmiProblem::fix_vars`].
    pub objective_offset: f64,
    pub blocks: Vec<LmiBlock>,
    pub hint: Option<DVector<f64>>,
}

impl LmiProblem {
    pub fn new(var_names: Vec<String>, objective: DVector<f64>) -> Self {
        Self {
            var_names,
            objective,
            objective_offset: 0.0,
            blocks: Vec::new(),
            hint: None,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(LmiBlock::size).collect()
    }

    /// Total order of the block-diagonal constraint.
    pub fn order(&self) -> usize {
        self.blocks.iter().map(LmiBlock::size).sum()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.var_names.iter().position(|v| v == name)
    }

    pub fn objective_value(&self, z: &DVector<f64>) -> f64 {
        self.objective.dot(z) + self.objective_offset
    }

    pub fn eval_blocks(&self, z: &DVector<f64>) -> Vec<DMatrix<f64>> {
        self.blocks.iter().map(|b| b.eval(z)).collect()
    }

    /// `F(z)` assembled as one block-diagonal matrix.
    pub fn eval(&self, z: &DVector<f64>) -> DMatrix<f64> {
        block_diag(&self.eval_blocks(z))
    }

    /// `F0` as one block-diagonal matrix.
    pub fn f0(&self) -> DMatrix<f64> {
        block_diag(&self.blocks.iter().map(|b| b.constant.clone()).collect::<Vec<_>>())
    }

    /// `F_k` as one block-diagonal matrix.
    pub fn coefficient(&self, k: usize) -> DMatrix<f64> {
        block_diag(&self.blocks.iter().map(|b| b.coeffs[k].clone()).collect::<Vec<_>>())
    }

    /// Smallest eigenvalue of `F(z)` over all blocks.
    pub fn min_eig_at(&self, z: &DVector<f64>) -> f64 {
        self.blocks
            .iter()
            .map(|b| crate::sdp::min_eigenvalue(&b.eval(z)))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn push_block(&mut self, block: LmiBlock) {
        self.blocks.push(block);
    }

    /// Appends `||r(z)|| <= z[bound_var]` as the arrow block `[[t I, r], [r^T, t]]`.
    pub fn push_soc_epigraph(&mut self, r: &AffineVector, bound_var: usize) {
        self.blocks.push(build_soc_epigraph(r, bound_var, self.num_vars()));
    }

    /// Substitutes fixed values for some variables and drops them.
    pub fn fix_vars(&self, fixed: &[(usize, f64)]) -> LmiProblem {
        let nv = self.num_vars();
        let mut is_fixed = vec![None; nv];
        for &(k, v) in fixed {
            is_fixed[k] = Some(v);
        }
        let keep: Vec<usize> = (0..nv).filter(|&k| is_fixed[k].is_none()).collect();
        let mut offset = self.objective_offset;
        for &(k, v) in fixed {
            offset += self.objective[k] * v;
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let mut constant = b.constant.clone();
                for &(k, v) in fixed {
                    constant += &b.coeffs[k] * v;
                }
                LmiBlock {
                    constant,
                    coeffs: keep.iter().map(|&k| b.coeffs[k].clone()).collect(),
                }
            })
            .collect();
        let hint = self.hint.as_ref().and_then(|h| {
            let consistent = fixed.iter().all(|&(k, v)| (h[k] - v).abs() <= 1e-12 * (1.0 + v.abs()));
            consistent.then(|| DVector::from_iterator(keep.len(), keep.iter().map(|&k| h[k])))
        });
        LmiProblem {
            var_names: keep.iter().map(|&k| self.var_names[k].clone()).collect(),
            objective: DVector::from_iterator(keep.len(), keep.iter().map(|&k| self.objective[k])),
            objective_offset: offset,
            blocks,
            hint,
        }
    }

    /// Checks dimensions and symmetry of every coefficient.
    pub fn validate(&self) -> Result<()> {
        let nv = self.num_vars();
        if self.objective.len() != nv {
            return Err(Error::invalid("objective length differs from variable count"));
        }
        if self.blocks.is_empty() {
            return Err(Error::invalid("LMI has no blocks"));
        }
        for (bi, b) in self.blocks.iter().enumerate() {
            let s = b.size();
            if b.constant.ncols() != s || b.coeffs.len() != nv {
                return Err(Error::invalid(format!("block {bi} is malformed")));
            }
            for m in std::iter::once(&b.constant).chain(&b.coeffs) {
                if m.shape() != (s, s) {
                    return Err(Error::invalid(format!("block {bi} has a mis-sized matrix")));
                }
                if !m.iter().all(|v| v.is_finite()) || (m - m.transpose()).amax() > 1e-12 * (1.0 + m.amax()) {
                    return Err(Error::invalid(format!("block {bi} has a non-symmetric or non-finite matrix")));
                }
            }
        }
        if let Some(h) = &self.hint {
            if h.len() != nv {
                return Err(Error::invalid("hint length differs from variable count"));
            }
        }
        Ok(())
    }
}

fn block_diag(parts: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n: usize = parts.iter().map(|p| p.nrows()).sum();
    let mut out = DMatrix::zeros(n, n);
    let mut at = 0;
    for p in parts {
        let s = p.nrows();
        out.view_mut((at, at), (s, s)).copy_from(p);
        at += s;
    }
    out
}

/// `r(z) = constant + linear * z`
#[derive(Debug, Clone)]
pub struct AffineVector {
    pub constant: DVector<f64>,
    pub linear: DMatrix<f64>,
}

impl AffineVector {
    pub fn eval(&self, z: &DVector<f64>) -> DVector<f64> {
        &self.constant + &self.linear * z
    }
}

/// Builds the arrow block `[[t I, r(z)], [r(z)^T, t]]` with `t = z[bound_var]`,
/// which is PSD exactly when `||r(z)|| <= t`.
pub fn build_soc_epigraph(r: &AffineVector, bound_var: usize, num_vars: usize) -> LmiBlock {
    let len = r.constant.len();
    assert_eq!(r.linear.shape(), (len, num_vars), "affine map shape");
    let mut b = BlockBuilder::new(len + 1, num_vars);
    for i in 0..=len {
        b.coeff(bound_var, i, i, 1.0);
    }
    for i in 0..len {
        b.constant(i, len, r.constant[i]);
        for k in 0..num_vars {
            if r.linear[(i, k)] != 0.0 {
                b.coeff(k, i, len, r.linear[(i, k)]);
            }
        }
    }
    b.finish()
}

/// Accumulates a symmetric block entry by entry; every write is mirrored.
pub(crate) struct BlockBuilder {
    constant: DMatrix<f64>,
    coeffs: Vec<DMatrix<f64>>,
}

impl BlockBuilder {
    pub(crate) fn new(size: usize, num_vars: usize) -> Self {
        Self {
            constant: DMatrix::zeros(size, size),
            coeffs: vec![DMatrix::zeros(size, size); num_vars],
        }
    }

    pub(crate) fn constant(&mut self, i: usize, j: usize, v: f64) {
        self.constant[(i, j)] += v;
        if i != j {
            self.constant[(j, i)] += v;
        }
    }

    pub(crate) fn coeff(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.coeffs[k][(i, j)] += v;
        if i != j {
            self.coeffs[k][(j, i)] += v;
        }
    }

    pub(crate) fn finish(self) -> LmiBlock {
        LmiBlock {
            constant: self.constant,
            coeffs: self.coeffs,
        }
    }
}

fn scalar_block(var: usize, num_vars: usize) -> LmiBlock {
    let mut b = BlockBuilder::new(1, num_vars);
    b.coeff(var, 0, 0, 1.0);
    b.finish()
}

fn regret_var_names(n: usize, with_theta: bool) -> Vec<String> {
    let mut names: Vec<String> = (1..=n).map(|j| format!("x{j}")).collect();
    names.push("tau".into());
    if with_theta {
        names.push("theta".into());
    }
    names.push("lambda".into());
    names
}

fn lambda_objective(num_vars: usize) -> DVector<f64> {
    let mut c = DVector::zeros(num_vars);
    c[num_vars - 1] = 1.0;
    c
}

/// Writes `(A x - y)` into row 0 against rows `res..res+m`.
fn put_residual(b: &mut BlockBuilder, a: &DMatrix<f64>, y: &DVector<f64>, res: usize) {
    for i in 0..a.nrows() {
        b.constant(0, res + i, -y[i]);
        b.constant(res + i, res + i, 1.0);
        for j in 0..a.ncols() {
            if a[(i, j)] != 0.0 {
                b.coeff(j, 0, res + i, a[(i, j)]);
            }
        }
    }
}

/// Raises `z[lambda]` (which enters only entry (0,0) of block 0 with
/// coefficient one) until that block is positive definite with unit margin.
fn lift_lambda(lmi: &LmiProblem, z: &mut DVector<f64>, lambda: usize) -> Result<()> {
    let f = lmi.blocks[0].eval(z);
    let n = f.nrows();
    let s = f.view((1, 1), (n - 1, n - 1)).into_owned();
    let w = f.view((1, 0), (n - 1, 1)).into_owned();
    let l = cholesky(&s)?;
    let v = l.solve_lower_triangular(&w).ok_or(Error::NotPositiveDefinite { pivot: 0 })?;
    let need = v.norm_squared() - f[(0, 0)] + 1.0;
    if need > 0.0 {
        z[lambda] += need;
    }
    Ok(())
}

fn ls_start(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    Ok(pinv(a)? * y)
}

fn ridge_start(a: &DMatrix<f64>, y: &DVector<f64>, mu: f64) -> Result<DVector<f64>> {
    let n = a.ncols();
    let g = a.transpose() * a + DMatrix::identity(n, n) * mu;
    crate::linalg::solve_psd_vec(&g, &(a.transpose() * y))
}

fn check_hint_x(x: &DVector<f64>, n: usize) -> Result<()> {
    if x.len() != n || !x.iter().all(|v| v.is_finite()) {
        return Err(Error::invalid(format!("x must be a finite {n}-vector")));
    }
    Ok(())
}

/// The unstructured LMI of order `1 + m + mn + m` (no ridge term).
pub fn build_thm1(p: &UnstructuredProblem) -> Result<LmiProblem> {
    if p.mu.is_some() {
        return Err(Error::InvalidParameter(
            "mu is set; use the regularized formulation".into(),
        ));
    }
    require_full_column_rank(&p.a)?;
    let x0 = ls_start(&p.a, &p.y)?;
    build_thm1_at(p, &x0)
}

pub(crate) fn build_thm1_at(p: &UnstructuredProblem, x_hint: &DVector<f64>) -> Result<LmiProblem> {
    let e = expand_unstructured(&p.a, &p.y)?;
    unstructured_regret_lmi(p, &e, None, x_hint)
}

/// The regularized LMI of order `1 + m + n + mn + m`.
///
/// The ridge row carries `sqrt(mu) x` against an identity block, which adds
/// exactly `mu ||x||^2` through the Schur complement.
pub fn build_thm2(p: &UnstructuredProblem) -> Result<LmiProblem> {
    let mu = p.require_mu()?;
    let x0 = ridge_start(&p.a, &p.y, mu)?;
    build_thm2_at(p, &x0)
}

pub(crate) fn build_thm2_at(p: &UnstructuredProblem, x_hint: &DVector<f64>) -> Result<LmiProblem> {
    let mu = p.require_mu()?;
    let e = expand_regularized(&p.a, &p.y, mu)?;
    unstructured_regret_lmi(p, &e, Some(mu), x_hint)
}

fn unstructured_regret_lmi(
    p: &UnstructuredProblem,
    e: &RegretExpansion,
    mu: Option<f64>,
    x_hint: &DVector<f64>,
) -> Result<LmiProblem> {
    let (m, n) = (p.m(), p.n());
    check_hint_x(x_hint, n)?;
    let (tau, theta, lambda) = (n, n + 1, n + 2);
    let nv = n + 3;
    let ridge = usize::from(mu.is_some()) * n;

    let res = 1;
    let rid = res + m;
    let dat = rid + ridge;
    let out = dat + m * n;
    let size = out + m;

    let mut b = BlockBuilder::new(size, nv);
    b.constant(0, 0, e.eta);
    b.coeff(lambda, 0, 0, 1.0);
    b.coeff(tau, 0, 0, -1.0);
    b.coeff(theta, 0, 0, -1.0);
    put_residual(&mut b, &p.a, &p.y, res);
    if let Some(mu) = mu {
        let s = mu.sqrt();
        for j in 0..n {
            b.coeff(j, 0, rid + j, s);
            b.constant(rid + j, rid + j, 1.0);
        }
    }
    for k in 0..m * n {
        b.constant(0, dat + k, p.rho_h * e.c_vec[k]);
        b.coeff(tau, dat + k, dat + k, 1.0);
    }
    for i in 0..m {
        b.constant(0, out + i, p.rho_y * e.b_vec[i]);
        b.constant(res + i, out + i, -p.rho_y);
        b.coeff(theta, out + i, out + i, 1.0);
        // rho_h * (I (x) x^T)
        for j in 0..n {
            b.coeff(j, res + i, dat + i * n + j, p.rho_h);
        }
    }

    let mut lmi = LmiProblem::new(regret_var_names(n, true), lambda_objective(nv));
    lmi.push_block(b.finish());
    lmi.push_block(scalar_block(tau, nv));
    lmi.push_block(scalar_block(theta, nv));

    let mut z = DVector::zeros(nv);
    z.rows_mut(0, n).copy_from(x_hint);
    z[tau] = 4.0 * p.rho_h.powi(2) * x_hint.norm_squared() + 1.0;
    z[theta] = 4.0 * p.rho_y.powi(2) + 1.0;
    lift_lambda(&lmi, &mut z, lambda)?;
    lmi.hint = Some(z);
    Ok(lmi)
}

/// The untied structured LMI of order `1 + m + 2p`.
pub fn build_thm3(p: &StructuredProblem) -> Result<LmiProblem> {
    if p.tied {
        return Err(Error::InvalidParameter(
            "tied structure; use the corollary form".into(),
        ));
    }
    let x0 = ls_start(&p.a, &p.y)?;
    build_thm3_at(p, &x0)
}

pub(crate) fn build_thm3_at(p: &StructuredProblem, x_hint: &DVector<f64>) -> Result<LmiProblem> {
    let e = expand_structured(p)?;
    let (m, n, np) = (p.m(), p.n(), p.p());
    check_hint_x(x_hint, n)?;
    let (tau, theta, lambda) = (n, n + 1, n + 2);
    let nv = n + 3;
    let (res, al, be) = (1, 1 + m, 1 + m + np);
    let size = be + np;

    let mut b = BlockBuilder::new(size, nv);
    b.constant(0, 0, e.eta);
    b.coeff(lambda, 0, 0, 1.0);
    b.coeff(tau, 0, 0, -1.0);
    b.coeff(theta, 0, 0, -1.0);
    put_residual(&mut b, &p.a, &p.y, res);
    for k in 0..np {
        b.constant(0, al + k, p.rho_h * e.b_alpha[k]);
        b.constant(0, be + k, p.rho_b * e.c_beta[k]);
        b.coeff(tau, al + k, al + k, 1.0);
        b.coeff(theta, be + k, be + k, 1.0);
        let (ak, yk) = (&p.basis_a[k], &p.basis_y[k]);
        for i in 0..m {
            b.constant(res + i, be + k, -p.rho_b * yk[i]);
            for j in 0..n {
                if ak[(i, j)] != 0.0 {
                    b.coeff(j, res + i, al + k, p.rho_h * ak[(i, j)]);
                }
            }
        }
    }

    let mut lmi = LmiProblem::new(regret_var_names(n, true), lambda_objective(nv));
    lmi.push_block(b.finish());
    lmi.push_block(scalar_block(tau, nv));
    lmi.push_block(scalar_block(theta, nv));

    let mut z = DVector::zeros(nv);
    z.rows_mut(0, n).copy_from(x_hint);
    z[tau] = 4.0 * p.rho_h.powi(2) * p.basis_times(x_hint).norm_squared() + 1.0;
    z[theta] = 4.0 * p.rho_b.powi(2) * p.basis_y_matrix().norm_squared() + 1.0;
    lift_lambda(&lmi, &mut z, lambda)?;
    lmi.hint = Some(z);
    Ok(lmi)
}

/// The tied structured LMI of order `1 + m + p` over `(x, tau, lambda)`.
pub fn build_corollary(p: &StructuredProblem) -> Result<LmiProblem> {
    if !p.tied {
        return Err(Error::InvalidParameter(
            "untied structure; use the two-ball form".into(),
        ));
    }
    let x0 = ls_start(&p.a, &p.y)?;
    build_corollary_at(p, &x0)
}

pub(crate) fn build_corollary_at(p: &StructuredProblem, x_hint: &DVector<f64>) -> Result<LmiProblem> {
    let e = expand_structured(p)?;
    tied_lmi(p, e.eta, &e.tied_coefficient(), x_hint)
}

/// Worst-case residual over the tied ball:
/// `min_x max_{||alpha|| <= rho} ||r(x) + M(x) alpha||^2`.
pub fn build_srls(p: &StructuredProblem) -> Result<LmiProblem> {
    if !p.tied {
        return Err(Error::InvalidParameter("sr-LS needs tied structure".into()));
    }
    let x0 = ls_start(&p.a, &p.y)?;
    build_srls_at(p, &x0)
}

pub(crate) fn build_srls_at(p: &StructuredProblem, x_hint: &DVector<f64>) -> Result<LmiProblem> {
    tied_lmi(p, 0.0, &DVector::zeros(p.p()), x_hint)
}

fn tied_lmi(p: &StructuredProblem, eta: f64, coef: &DVector<f64>, x_hint: &DVector<f64>) -> Result<LmiProblem> {
    let (m, n, np) = (p.m(), p.n(), p.p());
    check_hint_x(x_hint, n)?;
    let (tau, lambda) = (n, n + 1);
    let nv = n + 2;
    let (res, al) = (1, 1 + m);
    let rho = p.rho_h;

    let mut b = BlockBuilder::new(al + np, nv);
    b.constant(0, 0, eta);
    b.coeff(lambda, 0, 0, 1.0);
    b.coeff(tau, 0, 0, -1.0);
    put_residual(&mut b, &p.a, &p.y, res);
    for k in 0..np {
        b.constant(0, al + k, rho * coef[k]);
        b.coeff(tau, al + k, al + k, 1.0);
        let (ak, yk) = (&p.basis_a[k], &p.basis_y[k]);
        for i in 0..m {
            b.constant(res + i, al + k, -rho * yk[i]);
            for j in 0..n {
                if ak[(i, j)] != 0.0 {
                    b.coeff(j, res + i, al + k, rho * ak[(i, j)]);
                }
            }
        }
    }

    let mut lmi = LmiProblem::new(regret_var_names(n, false), lambda_objective(nv));
    lmi.push_block(b.finish());
    lmi.push_block(scalar_block(tau, nv));

    let mut z = DVector::zeros(nv);
    z.rows_mut(0, n).copy_from(x_hint);
    let mx = p.basis_times(x_hint) - p.basis_y_matrix();
    z[tau] = 2.0 * rho.powi(2) * mx.norm_squared() + 1.0;
    lift_lambda(&lmi, &mut z, lambda)?;
    lmi.hint = Some(z);
    Ok(lmi)
}

/// Worst-case residual program `min ||Ax - y|| + rho_h ||x||` over `(x, u, v)`.
///
/// When `rho_h = 0` the `||x|| <= v` cone is dropped (it would leave `v` free).
pub fn build_rls_robust(p: &UnstructuredProblem) -> Result<LmiProblem> {
    let (m, n) = (p.m(), p.n());
    let with_norm = p.rho_h > 0.0;
    let nv = n + 1 + usize::from(with_norm);
    let (u, v) = (n, n + 1);

    let mut names: Vec<String> = (1..=n).map(|j| format!("x{j}")).collect();
    names.push("u".into());
    let mut c = DVector::zeros(nv);
    c[u] = 1.0;
    if with_norm {
        names.push("v".into());
        c[v] = p.rho_h;
    }
    let mut lmi = LmiProblem::new(names, c);
    lmi.push_soc_epigraph(&residual_map(&p.a, &p.y, nv), u);
    if with_norm {
        lmi.push_soc_epigraph(&identity_map(n, nv), v);
    }

    let x0 = ls_start(&p.a, &p.y)?;
    let mut z = DVector::zeros(nv);
    z.rows_mut(0, n).copy_from(&x0);
    z[u] = (&p.a * &x0 - &p.y).norm() + 1.0;
    if with_norm {
        z[v] = x0.norm() + 1.0;
    }
    lmi.hint = Some(z);
    debug_assert_eq!(m, p.y.len());
    Ok(lmi)
}

/// `min (||Ax - y|| + rho_h ||x|| + rho_y)^2 + mu ||x||^2` over `(x, u, s, w)`.
pub fn build_rrls(p: &UnstructuredProblem) -> Result<LmiProblem> {
    let mu = p.require_mu()?;
    let n = p.n();
    let (u, s, w) = (n, n + 1, n + 2);
    let nv = n + 3;
    let mut names: Vec<String> = (1..=n).map(|j| format!("x{j}")).collect();
    names.extend(["u".into(), "s".into(), "w".into()]);
    let mut c = DVector::zeros(nv);
    c[w] = 1.0;

    let mut lmi = LmiProblem::new(names, c);
    lmi.push_soc_epigraph(&residual_map(&p.a, &p.y, nv), u);
    lmi.push_soc_epigraph(&identity_map(n, nv), s);

    // [[w, t, sqrt(mu) s], [t, 1, 0], [sqrt(mu) s, 0, 1]] with t = u + rho_h s + rho_y
    let mut b = BlockBuilder::new(3, nv);
    b.coeff(w, 0, 0, 1.0);
    b.constant(0, 1, p.rho_y);
    b.coeff(u, 0, 1, 1.0);
    b.coeff(s, 0, 1, p.rho_h);
    b.coeff(s, 0, 2, mu.sqrt());
    b.constant(1, 1, 1.0);
    b.constant(2, 2, 1.0);
    lmi.push_block(b.finish());

    let x0 = ridge_start(&p.a, &p.y, mu)?;
    let mut z = DVector::zeros(nv);
    z.rows_mut(0, n).copy_from(&x0);
    z[u] = (&p.a * &x0 - &p.y).norm() + 1.0;
    z[s] = x0.norm() + 1.0;
    let t = z[u] + p.rho_h * z[s] + p.rho_y;
    z[w] = t * t + mu * z[s] * z[s] + 1.0;
    lmi.hint = Some(z);
    Ok(lmi)
}

/// `A x - y` as an affine map of the full decision vector (x leading).
fn residual_map(a: &DMatrix<f64>, y: &DVector<f64>, nv: usize) -> AffineVector {
    let mut linear = DMatrix::zeros(a.nrows(), nv);
    linear.view_mut((0, 0), a.shape()).copy_from(a);
    AffineVector {
        constant: -y,
        linear,
    }
}

fn identity_map(n: usize, nv: usize) -> AffineVector {
    let mut linear = DMatrix::zeros(n, nv);
    linear.view_mut((0, 0), (n, n)).fill_with_identity();
    AffineVector {
        constant: DVector::zeros(n),
        linear,
    }
}

/// Expansion used by the structured builders, exposed for diagnostics.
pub fn structured_expansion(p: &StructuredProblem) -> Result<StructuredExpansion> {
    expand_structured(p)
}
