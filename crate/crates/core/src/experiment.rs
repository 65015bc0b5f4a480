//! Monte Carlo experiment harness: config, instance generation, trial runs,
//! rho sweeps and their CSV output.

use std::io::{self, Write};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{estimate, Estimate, Method, ProblemInstance};
use crate::oracle::{PerturbationSample, SampleMode, StructuredSample};
use crate::problem::{StructuredProblem, UnstructuredProblem};

pub const TRIALS_HEADER: &str = "trial_id,method,error,regret_bound,seed_used";
pub const SWEEP_HEADER: &str = "rho,method,mean_error,max_error,trials";
pub const ERROR_METRIC: &str = "squared residual ||(A+dA)x - (y+dy)||^2 on the perturbed system";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemMode {
    Unstructured,
    Regularized,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureKind {
    /// Convolution with a +-1 input; tied shift-matrix basis.
    Toeplitz,
    /// Random unit-norm basis with separate alpha and beta balls.
    Generic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub rho_from: f64,
    pub rho_to: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn grid(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.rho_from];
        }
        let h = (self.rho_to - self.rho_from) / (self.steps - 1) as f64;
        (0..self.steps).map(|k| self.rho_from + h * k as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructuredSpec {
    /// Basis size for `generic`; for `toeplitz` it is fixed at `2m` and may be omitted.
    #[serde(default)]
    pub p: Option<usize>,
    pub kind: StructureKind,
    #[serde(default)]
    pub filter_len: Option<usize>,
    /// Toeplitz ball radius relative to `||U0||_F`.
    #[serde(default)]
    pub alpha_bound_rel: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: ProblemMode,
    pub m: usize,
    pub n: usize,
    pub trials: usize,
    pub rho_h: f64,
    pub rho_y: f64,
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub structured_spec: Option<StructuredSpec>,
    pub methods: Vec<Method>,
    pub seed: u64,
    #[serde(default = "default_sample_mode")]
    pub sample_mode: SampleMode,
}

fn default_sample_mode() -> SampleMode {
    SampleMode::Uniform
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    /// Parses and validates; serde errors keep their line/column.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| cfg_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(cfg_err("trials: must be >= 1"));
        }
        if self.n == 0 || self.m < self.n {
            return Err(cfg_err(format!("m, n: need m >= n >= 1, got m={} n={}", self.m, self.n)));
        }
        for (name, v) in [("rho_h", self.rho_h), ("rho_y", self.rho_y)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(cfg_err(format!("{name}: must be finite and >= 0, got {v}")));
            }
        }
        if let Some(mu) = self.mu {
            if !(mu > 0.0 && mu.is_finite()) {
                return Err(cfg_err(format!("mu: must be > 0, got {mu}")));
            }
        }
        if let Some(s) = &self.sweep {
            if s.steps == 0 || !(s.rho_from >= 0.0) || !(s.rho_to >= s.rho_from) || !s.rho_to.is_finite() {
                return Err(cfg_err("sweep: need 0 <= rho_from <= rho_to and steps >= 1"));
            }
        }
        if self.methods.is_empty() {
            return Err(cfg_err("methods: list is empty"));
        }
        if self.mode == ProblemMode::Regularized && self.mu.is_none() {
            return Err(cfg_err("mu: required in regularized mode"));
        }
        match (self.mode, &self.structured_spec) {
            (ProblemMode::Structured, None) => {
                return Err(cfg_err("structured_spec: required in structured mode"));
            }
            (ProblemMode::Structured, Some(s)) => self.validate_structure(s)?,
            (_, Some(_)) => return Err(cfg_err("structured_spec: only allowed in structured mode")),
            _ => {}
        }
        for m in &self.methods {
            if m.needs_structure() != (self.mode == ProblemMode::Structured)
                && !matches!(m, Method::LeastSquares | Method::Ridge)
            {
                return Err(cfg_err(format!("methods: {m} does not apply to {:?} mode", self.mode)));
            }
            if m.needs_mu() && self.mu.is_none() {
                return Err(cfg_err(format!("methods: {m} needs mu")));
            }
            if self.mode == ProblemMode::Structured
                && matches!(m, Method::StructuredRobustLs)
                && self.structured_spec.as_ref().is_some_and(|s| s.kind == StructureKind::Generic)
            {
                return Err(cfg_err("methods: sr-ls needs the tied (toeplitz) structure"));
            }
        }
        Ok(())
    }

    fn validate_structure(&self, s: &StructuredSpec) -> Result<()> {
        match s.kind {
            StructureKind::Toeplitz => {
                let fl = s.filter_len.ok_or_else(|| cfg_err("structured_spec.filter_len: required for toeplitz"))?;
                if fl != self.n {
                    return Err(cfg_err(format!(
                        "structured_spec.filter_len: must equal n ({}), got {fl}",
                        self.n
                    )));
                }
                if let Some(p) = s.p {
                    if p != 2 * self.m {
                        return Err(cfg_err(format!("structured_spec.p: toeplitz uses p = 2m = {}", 2 * self.m)));
                    }
                }
                match s.alpha_bound_rel {
                    Some(r) if r >= 0.0 && r.is_finite() => Ok(()),
                    _ => Err(cfg_err("structured_spec.alpha_bound_rel: required, finite and >= 0")),
                }
            }
            StructureKind::Generic => match s.p {
                Some(p) if p >= 1 => Ok(()),
                _ => Err(cfg_err("structured_spec.p: required and >= 1 for generic")),
            },
        }
    }

    /// Copy with every radius set to `rho` (the Toeplitz relative bound for structured runs).
    pub fn at_radius(&self, rho: f64) -> Self {
        let mut c = self.clone();
        c.rho_h = rho;
        c.rho_y = rho;
        if let Some(s) = c.structured_spec.as_mut() {
            if s.kind == StructureKind::Toeplitz {
                s.alpha_bound_rel = Some(rho);
            }
        }
        c.sweep = None;
        c
    }
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DMatrix<f64> {
    // Row-major fill so the draw order does not depend on storage layout.
    let mut a = DMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            a[(i, j)] = rng.sample(StandardNormal);
        }
    }
    a
}

fn gaussian_vector(rng: &mut ChaCha8Rng, m: usize) -> DVector<f64> {
    DVector::from_fn(m, |_, _| rng.sample(StandardNormal))
}

fn unit_frobenius(a: DMatrix<f64>) -> DMatrix<f64> {
    let n = a.norm();
    a / n
}

/// Causal convolution matrix: `U[i][j] = u[i - j]` for `i >= j`.
pub fn convolution_matrix(u: &[f64], n: usize) -> DMatrix<f64> {
    let m = u.len();
    DMatrix::from_fn(m, n, |i, j| if i >= j { u[i - j] } else { 0.0 })
}

/// Toeplitz basis: `m` input shifts (`y_i = 0`) then `m` output unit vectors (`A_i = 0`).
pub fn toeplitz_basis(m: usize, n: usize) -> (Vec<DMatrix<f64>>, Vec<DVector<f64>>) {
    let mut ba = Vec::with_capacity(2 * m);
    let mut by = Vec::with_capacity(2 * m);
    for k in 0..m {
        ba.push(DMatrix::from_fn(m, n, |i, j| if i >= j && i - j == k { 1.0 } else { 0.0 }));
        by.push(DVector::zeros(m));
    }
    for k in 0..m {
        ba.push(DMatrix::zeros(m, n));
        let mut e = DVector::zeros(m);
        e[k] = 1.0;
        by.push(e);
    }
    (ba, by)
}

/// Builds the nominal problem for `cfg` from `seed` alone.
pub fn gen_instance(cfg: &ExperimentConfig, seed: u64) -> Result<ProblemInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m, n) = (cfg.m, cfg.n);
    match cfg.mode {
        ProblemMode::Unstructured | ProblemMode::Regularized => {
            let a = unit_frobenius(gaussian_matrix(&mut rng, m, n));
            let y = gaussian_vector(&mut rng, m).normalize();
            let mut p = UnstructuredProblem::new(a, y, cfg.rho_h, cfg.rho_y)?;
            if cfg.mode == ProblemMode::Regularized {
                p.mu = cfg.mu;
            }
            Ok(ProblemInstance::Unstructured(p))
        }
        ProblemMode::Structured => {
            let spec = cfg
                .structured_spec
                .as_ref()
                .ok_or_else(|| cfg_err("structured_spec missing"))?;
            match spec.kind {
                StructureKind::Toeplitz => {
                    let u: Vec<f64> = (0..m)
                        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                        .collect();
                    let u0 = convolution_matrix(&u, n);
                    let h = gaussian_vector(&mut rng, n).normalize();
                    let y0 = &u0 * h;
                    let (ba, by) = toeplitz_basis(m, n);
                    let rho = spec.alpha_bound_rel.unwrap_or(0.0) * u0.norm();
                    let truth = StructuredProblem::tied(u0, y0, ba, by, rho)?;
                    // The observed nominal data is one noisy realization of the truth.
                    let s = StructuredSample::draw(&truth, cfg.sample_mode, &mut rng);
                    let (a, y) = s.perturbed(&truth);
                    Ok(ProblemInstance::Structured(StructuredProblem { a, y, ..truth }))
                }
                StructureKind::Generic => {
                    let p = spec.p.unwrap_or(1);
                    let a = unit_frobenius(gaussian_matrix(&mut rng, m, n));
                    let y = gaussian_vector(&mut rng, m).normalize();
                    let ba = (0..p).map(|_| unit_frobenius(gaussian_matrix(&mut rng, m, n))).collect();
                    let by = (0..p).map(|_| gaussian_vector(&mut rng, m).normalize()).collect();
                    Ok(ProblemInstance::Structured(StructuredProblem::new(
                        a, y, ba, by, cfg.rho_h, cfg.rho_y, false,
                    )?))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial_id: usize,
    pub method: Method,
    /// `NaN` when the estimator failed on the nominal data.
    pub error: f64,
    pub regret_bound: Option<f64>,
    pub seed_used: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: Method,
    pub trials: usize,
    pub failures: usize,
    pub mean_error: f64,
    pub max_error: f64,
    pub sorted_errors: Vec<f64>,
}

impl MethodSummary {
    pub fn from_rows(method: Method, rows: &[TrialResult]) -> Self {
        let mine: Vec<&TrialResult> = rows.iter().filter(|r| r.method == method).collect();
        let mut ok: Vec<f64> = mine.iter().map(|r| r.error).filter(|e| !e.is_nan()).collect();
        let sum: f64 = ok.iter().sum();
        let mean_error = if ok.is_empty() { f64::NAN } else { sum / ok.len() as f64 };
        let max_error = ok.iter().copied().fold(f64::NAN, f64::max);
        let failures = mine.len() - ok.len();
        ok.sort_by(f64::total_cmp);
        Self {
            method,
            trials: ok.len(),
            failures,
            mean_error,
            max_error,
            sorted_errors: ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub metric: &'static str,
    pub sample_mode: SampleMode,
    pub seed: u64,
    pub methods: Vec<MethodSummary>,
    /// Estimator failures on the nominal data, by method tag.
    pub estimator_errors: Vec<(Method, String)>,
}

#[derive(Debug)]
pub struct TrialRun {
    pub rows: Vec<TrialResult>,
    pub summary: RunSummary,
    pub estimates: Vec<(Method, Result<Estimate>)>,
}

impl TrialRun {
    pub fn method(&self, m: Method) -> Option<&MethodSummary> {
        self.summary.methods.iter().find(|s| s.method == m)
    }
}

fn trial_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Keep trial draws off the stream that generated the instance.
    rng.set_stream(1);
    rng
}

/// Estimates once on the nominal data, then scores each estimate on
/// `cfg.trials` perturbed systems.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<TrialRun> {
    cfg.validate()?;
    let inst = gen_instance(cfg, cfg.seed)?;
    run_trials_on(cfg, &inst)
}

pub fn run_trials_on(cfg: &ExperimentConfig, inst: &ProblemInstance) -> Result<TrialRun> {
    let estimates: Vec<(Method, Result<Estimate>)> = cfg
        .methods
        .iter()
        .map(|&m| (m, estimate(m, inst, cfg.mu)))
        .collect();

    let mut rows = Vec::with_capacity(cfg.trials * cfg.methods.len());
    for t in 0..cfg.trials {
        let seed_used = cfg.seed.wrapping_add(t as u64);
        let mut rng = trial_rng(seed_used);
        let (a, y) = match inst {
            ProblemInstance::Unstructured(p) => PerturbationSample::draw(p, cfg.sample_mode, &mut rng).perturbed(p),
            ProblemInstance::Structured(p) => StructuredSample::draw(p, cfg.sample_mode, &mut rng).perturbed(p),
        };
        for (m, est) in &estimates {
            let (error, regret_bound) = match est {
                Ok(e) => ((&a * &e.x_hat - &y).norm_squared(), e.regret_bound),
                Err(_) => (f64::NAN, None),
            };
            rows.push(TrialResult {
                trial_id: t,
                method: *m,
                error,
                regret_bound,
                seed_used,
            });
        }
    }

    let summary = RunSummary {
        metric: ERROR_METRIC,
        sample_mode: cfg.sample_mode,
        seed: cfg.seed,
        methods: cfg.methods.iter().map(|&m| MethodSummary::from_rows(m, &rows)).collect(),
        estimator_errors: estimates
            .iter()
            .filter_map(|(m, e)| e.as_ref().err().map(|err| (*m, err.to_string())))
            .collect(),
    };
    Ok(TrialRun {
        rows,
        summary,
        estimates,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub rho: f64,
    pub method: Method,
    pub mean_error: f64,
    pub max_error: f64,
    pub trials: usize,
}

/// One `run_trials` per grid radius; the instance is shared across the grid.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let sweep = cfg.sweep.as_ref().ok_or_else(|| cfg_err("sweep: required for a sweep run"))?;
    let mut out = Vec::new();
    for rho in sweep.grid() {
        let c = cfg.at_radius(rho);
        let run = run_trials(&c)?;
        for s in &run.summary.methods {
            out.push(SweepRow {
                rho,
                method: s.method,
                mean_error: s.mean_error,
                max_error: s.max_error,
                trials: s.trials,
            });
        }
    }
    Ok(out)
}

/// Round-trip exact float formatting (17 significant digits).
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.16e}")
    }
}

pub fn write_trials_csv<W: Write>(rows: &[TrialResult], mut w: W) -> io::Result<()> {
    writeln!(w, "{TRIALS_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.trial_id,
            r.method,
            fmt_f64(r.error),
            r.regret_bound.map(fmt_f64).unwrap_or_default(),
            r.seed_used
        )?;
    }
    Ok(())
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_f64(r.rho),
            r.method,
            fmt_f64(r.mean_error),
            fmt_f64(r.max_error),
            r.trials
        )?;
    }
    Ok(())
}

/// Parses rows written by [`write_trials_csv`].
pub fn parse_trials_csv(text: &str) -> Result<Vec<TrialResult>> {
    let mut lines = text.lines();
    if lines.next() != Some(TRIALS_HEADER) {
        return Err(Error::invalid("missing trials header"));
    }
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            let bad = || Error::invalid(format!("bad CSV row {line:?}"));
            if f.len() != 5 {
                return Err(bad());
            }
            Ok(TrialResult {
                trial_id: f[0].parse().map_err(|_| bad())?,
                method: f[1].parse()?,
                error: f[2].parse().map_err(|_| bad())?,
                regret_bound: if f[3].is_empty() {
                    None
                } else {
                    Some(f[3].parse().map_err(|_| bad())?)
                },
                seed_used: f[4].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructuredJson {
    #[serde(rename = "basis_A")]
    pub basis_a: Vec<Vec<Vec<f64>>>,
    pub basis_y: Vec<Vec<f64>>,
    #[serde(default)]
    pub rho_b: Option<f64>,
    #[serde(default)]
    pub tied: bool,
}

/// Input of the `solve` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemJson {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub rho_h: f64,
    pub rho_y: f64,
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(default)]
    pub structured: Option<StructuredJson>,
}

fn matrix_from_rows(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if m == 0 || n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(cfg_err(format!("{what}: need a non-empty rectangular array")));
    }
    Ok(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
}

impl ProblemJson {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| cfg_err(e.to_string()))
    }

    /// Builds the instance; `mu` is kept separately for ridge-type methods.
    pub fn to_instance(&self) -> Result<(ProblemInstance, Option<f64>)> {
        let a = matrix_from_rows(&self.a, "A")?;
        let y = DVector::from_vec(self.y.clone());
        let inst = match &self.structured {
            None => {
                let mut p = UnstructuredProblem::new(a, y, self.rho_h, self.rho_y)?;
                p.mu = self.mu;
                ProblemInstance::Unstructured(p)
            }
            Some(s) => {
                let ba = s
                    .basis_a
                    .iter()
                    .map(|rows| matrix_from_rows(rows, "basis_A"))
                    .collect::<Result<Vec<_>>>()?;
                let by = s.basis_y.iter().map(|v| DVector::from_vec(v.clone())).collect();
                let rho_b = s.rho_b.unwrap_or(self.rho_y);
                ProblemInstance::Structured(StructuredProblem::new(a, y, ba, by, self.rho_h, rho_b, s.tied)?)
            }
        };
        Ok((inst, self.mu))
    }
}

/// JSON rendering of an estimate for the `solve` subcommand.
pub fn estimate_json(e: &Estimate) -> serde_json::Value {
    serde_json::json!({
        "method": e.method,
        "x_hat": e.x_hat.iter().collect::<Vec<_>>(),
        "regret_bound": e.regret_bound,
        "diagnostics": e.diagnostics.as_ref().map(|d| serde_json::json!({
            "iterations": d.iterations,
            "status": format!("{:?}", d.status),
            "min_eig": d.min_eig,
            "objective": d.objective,
        })),
    })
}
