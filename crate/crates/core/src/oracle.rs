//! Ground-truth regret, sampled lower bounds and LMI upper bounds on the
//! worst case.

use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gradients::{
    expand_regularized, expand_structured, expand_unstructured, g_value, h_value, RegretExpansion,
    StructuredExpansion,
};
use crate::lmi::{build_corollary_at, build_thm1_at, build_thm2_at, build_thm3_at, LmiProblem};
use crate::problem::{StructuredProblem, UnstructuredProblem};
use crate::sdp::{solve, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    /// On the sphere of the given radius.
    Boundary,
    /// Volume-uniform in the ball.
    Uniform,
}

impl FromStr for SampleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "boundary" => Ok(Self::Boundary),
            "uniform" => Ok(Self::Uniform),
            other => Err(Error::Config(format!(
                "sample mode must be boundary or uniform, got {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for SampleMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Boundary => "boundary",
            Self::Uniform => "uniform",
        })
    }
}

/// Fills `out` with a point of the ball of `radius`: Gaussian direction,
/// normalized, then scaled by `U^(1/d)` in uniform mode.
pub fn sample_sphere_into<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64], radius: f64, mode: SampleMode) {
    if out.is_empty() {
        return;
    }
    let mut norm2 = 0.0;
    while norm2 == 0.0 {
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        norm2 = out.iter().map(|v| v * v).sum();
    }
    let scale = match mode {
        SampleMode::Boundary => radius,
        SampleMode::Uniform => {
            let u: f64 = rng.random();
            radius * u.powf(1.0 / out.len() as f64)
        }
    };
    let k = scale / norm2.sqrt();
    out.iter_mut().for_each(|v| *v *= k);
}

/// One draw from a ball of `radius` in `dims` coordinates.
pub fn sample_ball(dims: usize, radius: f64, mode: SampleMode, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = DVector::zeros(dims);
    sample_sphere_into(&mut rng, v.as_mut_slice(), radius, mode);
    v
}

/// Dense perturbation of an unstructured problem.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSample {
    pub delta_a: DMatrix<f64>,
    pub delta_y: DVector<f64>,
    pub rho_h: f64,
    pub rho_y: f64,
}

impl PerturbationSample {
    pub fn zero(m: usize, n: usize) -> Self {
        Self {
            delta_a: DMatrix::zeros(m, n),
            delta_y: DVector::zeros(m),
            rho_h: 0.0,
            rho_y: 0.0,
        }
    }

    pub fn draw<R: Rng + ?Sized>(p: &UnstructuredProblem, mode: SampleMode, rng: &mut R) -> Self {
        let mut delta_a = DMatrix::zeros(p.m(), p.n());
        let mut delta_y = DVector::zeros(p.m());
        sample_sphere_into(rng, delta_a.as_mut_slice(), p.rho_h, mode);
        sample_sphere_into(rng, delta_y.as_mut_slice(), p.rho_y, mode);
        Self {
            delta_a,
            delta_y,
            rho_h: p.rho_h,
            rho_y: p.rho_y,
        }
    }

    pub fn perturbed(&self, p: &UnstructuredProblem) -> (DMatrix<f64>, DVector<f64>) {
        (&p.a + &self.delta_a, &p.y + &self.delta_y)
    }
}

/// Coefficient perturbation of a structured problem; `beta == alpha` when tied.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredSample {
    pub alpha: DVector<f64>,
    pub beta: DVector<f64>,
    pub rho_h: f64,
    pub rho_b: f64,
}

impl StructuredSample {
    pub fn zero(p: usize) -> Self {
        Self {
            alpha: DVector::zeros(p),
            beta: DVector::zeros(p),
            rho_h: 0.0,
            rho_b: 0.0,
        }
    }

    pub fn draw<R: Rng + ?Sized>(p: &StructuredProblem, mode: SampleMode, rng: &mut R) -> Self {
        let mut alpha = DVector::zeros(p.p());
        sample_sphere_into(rng, alpha.as_mut_slice(), p.rho_h, mode);
        let beta = if p.tied {
            alpha.clone()
        } else {
            let mut b = DVector::zeros(p.p());
            sample_sphere_into(rng, b.as_mut_slice(), p.rho_b, mode);
            b
        };
        Self {
            alpha,
            beta,
            rho_h: p.rho_h,
            rho_b: p.beta_radius(),
        }
    }

    pub fn perturbed(&self, p: &StructuredProblem) -> (DMatrix<f64>, DVector<f64>) {
        (&p.a + p.delta_a(&self.alpha), &p.y + p.delta_y(&self.beta))
    }
}

fn squared_residual(a: &DMatrix<f64>, y: &DVector<f64>, x: &DVector<f64>) -> f64 {
    (a * x - y).norm_squared()
}

/// Exact regret against the best estimate for the perturbed data.
pub fn regret_exact(p: &UnstructuredProblem, x: &DVector<f64>, s: &PerturbationSample) -> Result<f64> {
    let (a, y) = s.perturbed(p);
    match p.mu {
        None => Ok(squared_residual(&a, &y, x) - g_value(&a, &y)?),
        Some(mu) => Ok(squared_residual(&a, &y, x) + mu * x.norm_squared() - h_value(&a, &y, mu)?),
    }
}

/// Regret with the optimal cost replaced by its first-order expansion.
pub fn regret_linearized(
    e: &RegretExpansion,
    p: &UnstructuredProblem,
    x: &DVector<f64>,
    s: &PerturbationSample,
) -> f64 {
    let (a, y) = s.perturbed(p);
    let ridge = p.mu.map_or(0.0, |mu| mu * x.norm_squared());
    squared_residual(&a, &y, x) + ridge - e.linear_model(&s.delta_a, &s.delta_y)
}

pub fn regret_exact_structured(p: &StructuredProblem, x: &DVector<f64>, s: &StructuredSample) -> Result<f64> {
    let (a, y) = s.perturbed(p);
    Ok(squared_residual(&a, &y, x) - g_value(&a, &y)?)
}

pub fn regret_linearized_structured(
    e: &StructuredExpansion,
    p: &StructuredProblem,
    x: &DVector<f64>,
    s: &StructuredSample,
) -> f64 {
    let (a, y) = s.perturbed(p);
    squared_residual(&a, &y, x) - e.linear_model(&s.alpha, &s.beta)
}

/// The expansion matching the problem's mode.
pub fn expansion_for(p: &UnstructuredProblem) -> Result<RegretExpansion> {
    match p.mu {
        None => expand_unstructured(&p.a, &p.y),
        Some(mu) => expand_regularized(&p.a, &p.y, mu),
    }
}

fn project(v: &mut DVector<f64>, radius: f64) {
    let n = v.norm();
    if n > radius {
        if radius == 0.0 {
            v.fill(0.0);
        } else {
            *v *= radius / n;
        }
    }
}

fn project_mat(v: &mut DMatrix<f64>, radius: f64) {
    let n = v.norm();
    if n > radius {
        if radius == 0.0 {
            v.fill(0.0);
        } else {
            *v *= radius / n;
        }
    }
}

const ASCENT_STEPS: usize = 50;

/// Sampled lower bound on the worst-case linearized regret at `x`: best of
/// `n_samples` boundary draws, refined by projected gradient ascent.
pub fn worst_case_lb(p: &UnstructuredProblem, x: &DVector<f64>, n_samples: usize, seed: u64) -> Result<f64> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be >= 1".into()));
    }
    let e = expansion_for(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = PerturbationSample::zero(p.m(), p.n());
    let mut best_val = regret_linearized(&e, p, x, &best);
    for _ in 0..n_samples {
        let s = PerturbationSample::draw(p, SampleMode::Boundary, &mut rng);
        let v = regret_linearized(&e, p, x, &s);
        if v > best_val {
            best_val = v;
            best = s;
        }
    }
    let mut cur = best;
    for k in 1..=ASCENT_STEPS {
        let (a, y) = cur.perturbed(p);
        let r = &a * x - &y;
        let mut ga = &r * x.transpose() * 2.0 - &e.grad_a;
        let mut gy = -&r * 2.0 - &e.grad_y;
        let step = 0.1 / (k as f64).sqrt();
        let (na, ny) = (ga.norm(), gy.norm());
        if na > 0.0 {
            ga *= step * p.rho_h / na;
        }
        if ny > 0.0 {
            gy *= step * p.rho_y / ny;
        }
        cur.delta_a += ga;
        cur.delta_y += gy;
        project_mat(&mut cur.delta_a, p.rho_h);
        project(&mut cur.delta_y, p.rho_y);
        best_val = best_val.max(regret_linearized(&e, p, x, &cur));
    }
    Ok(best_val)
}

pub fn worst_case_lb_structured(
    p: &StructuredProblem,
    x: &DVector<f64>,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be >= 1".into()));
    }
    let e = expand_structured(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = StructuredSample::zero(p.p());
    let mut best_val = regret_linearized_structured(&e, p, x, &best);
    for _ in 0..n_samples {
        let s = StructuredSample::draw(p, SampleMode::Boundary, &mut rng);
        let v = regret_linearized_structured(&e, p, x, &s);
        if v > best_val {
            best_val = v;
            best = s;
        }
    }
    let m = p.basis_times(x);
    let q = p.basis_y_matrix();
    let rb = p.beta_radius();
    let mut cur = best;
    for k in 1..=ASCENT_STEPS {
        let (a, y) = cur.perturbed(p);
        let r = &a * x - &y;
        let mut ga = m.transpose() * &r * 2.0 - &e.grad_alpha;
        let mut gb = -(q.transpose() * &r * 2.0) - &e.grad_beta;
        let step = 0.1 / (k as f64).sqrt();
        if p.tied {
            ga += &gb;
            let n = ga.norm();
            if n > 0.0 {
                ga *= step * p.rho_h / n;
            }
            cur.alpha += ga;
            project(&mut cur.alpha, p.rho_h);
            cur.beta = cur.alpha.clone();
        } else {
            let (na, nb) = (ga.norm(), gb.norm());
            if na > 0.0 {
                ga *= step * p.rho_h / na;
            }
            if nb > 0.0 {
                gb *= step * rb / nb;
            }
            cur.alpha += ga;
            cur.beta += gb;
            project(&mut cur.alpha, p.rho_h);
            project(&mut cur.beta, rb);
        }
        best_val = best_val.max(regret_linearized_structured(&e, p, x, &cur));
    }
    Ok(best_val)
}

fn solve_fixed_x(lmi: LmiProblem, x: &DVector<f64>) -> Result<f64> {
    let fixed: Vec<(usize, f64)> = x.iter().copied().enumerate().collect();
    let inner = lmi.fix_vars(&fixed);
    let sol = solve(&inner, &SolverConfig::default())?.require_optimal()?;
    Ok(sol.objective_value)
}

/// LMI upper bound on the worst-case linearized regret at fixed `x`,
/// minimizing over the multipliers and the bound only.
pub fn worst_case_ub(p: &UnstructuredProblem, x: &DVector<f64>) -> Result<f64> {
    let lmi = match p.mu {
        None => build_thm1_at(p, x)?,
        Some(_) => build_thm2_at(p, x)?,
    };
    solve_fixed_x(lmi, x)
}

pub fn worst_case_ub_structured(p: &StructuredProblem, x: &DVector<f64>) -> Result<f64> {
    let lmi = if p.tied {
        build_corollary_at(p, x)?
    } else {
        build_thm3_at(p, x)?
    };
    solve_fixed_x(lmi, x)
}
