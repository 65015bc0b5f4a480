//! Problem data: nominal `(A, y)` plus the uncertainty description.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{ensure_finite, ensure_finite_vec, svd};
use crate::oracle::{sample_sphere_into, SampleMode};

fn check_radius(r: f64, name: &str) -> Result<()> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "{name} must be finite and >= 0, got {r}"
        )));
    }
    Ok(())
}

fn check_nominal(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<()> {
    ensure_finite(a, "A")?;
    ensure_finite_vec(y, "y")?;
    if a.ncols() == 0 || a.nrows() < a.ncols() {
        return Err(Error::invalid(format!(
            "A must be m x n with m >= n >= 1, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if y.len() != a.nrows() {
        return Err(Error::invalid(format!(
            "y has length {}, A has {} rows",
            y.len(),
            a.nrows()
        )));
    }
    Ok(())
}

/// Unstructured uncertainty: `||dA||_F <= rho_h`, `||dy|| <= rho_y`.
///
/// `mu` is present only for the regularized (ridge) variant.
#[derive(Debug, Clone, PartialEq)]
pub struct UnstructuredProblem {
    pub a: DMatrix<f64>,
    pub y: DVector<f64>,
    pub rho_h: f64,
    pub rho_y: f64,
    pub mu: Option<f64>,
}

impl UnstructuredProblem {
    pub fn new(a: DMatrix<f64>, y: DVector<f64>, rho_h: f64, rho_y: f64) -> Result<Self> {
        check_nominal(&a, &y)?;
        check_radius(rho_h, "rho_h")?;
        check_radius(rho_y, "rho_y")?;
        Ok(Self {
            a,
            y,
            rho_h,
            rho_y,
            mu: None,
        })
    }

    pub fn regularized(
        a: DMatrix<f64>,
        y: DVector<f64>,
        rho_h: f64,
        rho_y: f64,
        mu: f64,
    ) -> Result<Self> {
        let mut p = Self::new(a, y, rho_h, rho_y)?;
        p.mu = Some(check_mu(mu)?);
        Ok(p)
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    /// Same data with both radii replaced.
    pub fn with_radii(&self, rho_h: f64, rho_y: f64) -> Result<Self> {
        check_radius(rho_h, "rho_h")?;
        check_radius(rho_y, "rho_y")?;
        Ok(Self {
            rho_h,
            rho_y,
            ..self.clone()
        })
    }

    /// The regularization weight, or an error if this is not a ridge problem.
    pub fn require_mu(&self) -> Result<f64> {
        match self.mu {
            Some(mu) => check_mu(mu),
            None => Err(Error::InvalidParameter(
                "regularized formulation needs mu > 0".into(),
            )),
        }
    }
}

pub(crate) fn check_mu(mu: f64) -> Result<f64> {
    if mu > 0.0 && mu.is_finite() {
        Ok(mu)
    } else {
        Err(Error::InvalidParameter(format!("mu must be > 0, got {mu}")))
    }
}

/// Structured uncertainty: `dA = sum alpha_i A_i`, `dy = sum beta_i y_i`,
/// `||alpha|| <= rho_h`, `||beta|| <= rho_b`.
///
/// With `tied` set, `beta = alpha` and only `rho_h` is used.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredProblem {
    pub a: DMatrix<f64>,
    pub y: DVector<f64>,
    pub basis_a: Vec<DMatrix<f64>>,
    pub basis_y: Vec<DVector<f64>>,
    pub rho_h: f64,
    pub rho_b: f64,
    pub tied: bool,
}

impl StructuredProblem {
    pub fn new(
        a: DMatrix<f64>,
        y: DVector<f64>,
        basis_a: Vec<DMatrix<f64>>,
        basis_y: Vec<DVector<f64>>,
        rho_h: f64,
        rho_b: f64,
        tied: bool,
    ) -> Result<Self> {
        check_nominal(&a, &y)?;
        check_radius(rho_h, "rho_h")?;
        check_radius(rho_b, "rho_b")?;
        if basis_a.is_empty() {
            return Err(Error::invalid("structured basis must have p >= 1 terms"));
        }
        if basis_a.len() != basis_y.len() {
            return Err(Error::invalid(format!(
                "basis lengths differ: {} matrices, {} vectors",
                basis_a.len(),
                basis_y.len()
            )));
        }
        for (i, (ai, yi)) in basis_a.iter().zip(&basis_y).enumerate() {
            if ai.shape() != a.shape() {
                return Err(Error::invalid(format!("basis matrix {i} has wrong shape")));
            }
            if yi.len() != y.len() {
                return Err(Error::invalid(format!("basis vector {i} has wrong length")));
            }
            ensure_finite(ai, "basis matrix")?;
            ensure_finite_vec(yi, "basis vector")?;
        }
        Ok(Self {
            a,
            y,
            basis_a,
            basis_y,
            rho_h,
            rho_b,
            tied,
        })
    }

    pub fn tied(
        a: DMatrix<f64>,
        y: DVector<f64>,
        basis_a: Vec<DMatrix<f64>>,
        basis_y: Vec<DVector<f64>>,
        rho: f64,
    ) -> Result<Self> {
        Self::new(a, y, basis_a, basis_y, rho, rho, true)
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn p(&self) -> usize {
        self.basis_a.len()
    }

    /// Radius of the beta ball (equals `rho_h` when tied).
    pub fn beta_radius(&self) -> f64 {
        if self.tied {
            self.rho_h
        } else {
            self.rho_b
        }
    }

    pub fn with_radius(&self, rho_h: f64, rho_b: f64) -> Result<Self> {
        check_radius(rho_h, "rho_h")?;
        check_radius(rho_b, "rho_b")?;
        Ok(Self {
            rho_h,
            rho_b,
            ..self.clone()
        })
    }

    /// `sum alpha_i A_i`
    pub fn delta_a(&self, alpha: &DVector<f64>) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.m(), self.n());
        for (ai, &w) in self.basis_a.iter().zip(alpha.iter()) {
            d += ai * w;
        }
        d
    }

    /// `sum beta_i y_i`
    pub fn delta_y(&self, beta: &DVector<f64>) -> DVector<f64> {
        let mut d = DVector::zeros(self.m());
        for (yi, &w) in self.basis_y.iter().zip(beta.iter()) {
            d += yi * w;
        }
        d
    }

    /// `[A_1 x, ..., A_p x]`
    pub fn basis_times(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let cols: Vec<DVector<f64>> = self.basis_a.iter().map(|ai| ai * x).collect();
        DMatrix::from_columns(&cols)
    }

    /// `[y_1, ..., y_p]`
    pub fn basis_y_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.basis_y)
    }

    /// Counts rank-deficient `A(alpha)` over `samples` boundary draws of the
    /// alpha ball. Full rank on the whole ball cannot be certified by sampling;
    /// this is a smoke check.
    pub fn rank_failures_on_ball(&self, samples: usize, seed: u64) -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut alpha = DVector::zeros(self.p());
        (0..samples)
            .filter(|_| {
                sample_sphere_into(&mut rng, alpha.as_mut_slice(), self.rho_h, SampleMode::Boundary);
                let perturbed = &self.a + self.delta_a(&alpha);
                svd(&perturbed).map(|f| f.rank() < self.n()).unwrap_or(true)
            })
            .count()
    }
}
