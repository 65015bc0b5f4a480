#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regretls::{StructuredProblem, UnstructuredProblem};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0))
}

pub fn uniform_vector(rng: &mut ChaCha8Rng, m: usize) -> DVector<f64> {
    DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0))
}

/// Random tall matrix with singular values bounded away from zero.
pub fn well_conditioned(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DMatrix<f64> {
    loop {
        let a = uniform_matrix(rng, m, n);
        let s = a.clone().svd(false, false).singular_values;
        let (hi, lo) = (s.max(), s.min());
        if lo > 0.1 * hi && lo > 0.05 {
            return a;
        }
    }
}

pub fn unstructured(rng: &mut ChaCha8Rng, m: usize, n: usize, rho: f64) -> UnstructuredProblem {
    let a = well_conditioned(rng, m, n);
    let y = uniform_vector(rng, m);
    UnstructuredProblem::new(a, y, rho, rho).unwrap()
}

pub fn regularized(rng: &mut ChaCha8Rng, m: usize, n: usize, rho: f64, mu: f64) -> UnstructuredProblem {
    let a = well_conditioned(rng, m, n);
    let y = uniform_vector(rng, m);
    UnstructuredProblem::regularized(a, y, rho, rho, mu).unwrap()
}

/// Basis scaled down so the perturbed matrix keeps full rank on the ball.
pub fn structured(rng: &mut ChaCha8Rng, m: usize, n: usize, p: usize, rho: f64, tied: bool) -> StructuredProblem {
    let a = well_conditioned(rng, m, n);
    let y = uniform_vector(rng, m);
    let ba = (0..p).map(|_| uniform_matrix(rng, m, n) * 0.5).collect();
    let by = (0..p).map(|_| uniform_vector(rng, m) * 0.5).collect();
    StructuredProblem::new(a, y, ba, by, rho, rho * 0.8, tied).unwrap()
}

/// Central differences of a scalar function of a matrix.
pub fn fd_matrix(a: &DMatrix<f64>, h: f64, f: impl Fn(&DMatrix<f64>) -> f64) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows(), a.ncols());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let (mut up, mut dn) = (a.clone(), a.clone());
            up[(i, j)] += h;
            dn[(i, j)] -= h;
            out[(i, j)] = (f(&up) - f(&dn)) / (2.0 * h);
        }
    }
    out
}

pub fn fd_vector(v: &DVector<f64>, h: f64, f: impl Fn(&DVector<f64>) -> f64) -> DVector<f64> {
    DVector::from_fn(v.len(), |i, _| {
        let (mut up, mut dn) = (v.clone(), v.clone());
        up[i] += h;
        dn[i] -= h;
        (f(&up) - f(&dn)) / (2.0 * h)
    })
}

/// `||fd - analytic|| / max(||analytic||, 1e-3)` from the two norms.
pub fn rel_err(diff_norm: f64, analytic_norm: f64) -> f64 {
    diff_norm / analytic_norm.max(1e-3)
}
