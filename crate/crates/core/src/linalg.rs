//! Dense real linear algebra: SVD, pseudo-inverse, projectors, Cholesky solves,
//! and the row-stacking vectorization that every LMI builder relies on.
//!
//! All matrices are `nalgebra::DMatrix<f64>`; column vectors are `DVector<f64>`.
//! Vectorization is row-major throughout: `vec_rows(M)` concatenates the rows
//! of `M`, so that `kron_id_rowvec(x, m) * vec_rows(dA) == dA * x`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Thin SVD `A = U diag(D) V^T` of an `m x n` matrix with `m >= n`.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    /// `m x n`, orthonormal columns.
    pub u: DMatrix<f64>,
    /// Nonincreasing, nonnegative.
    pub singular_values: DVector<f64>,
    /// `n x n` orthogonal.
    pub v: DMatrix<f64>,
}

impl SvdFactors {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.u * DMatrix::from_diagonal(&self.singular_values) * self.v.transpose()
    }

    /// Singular values below `max(m, n) * eps * d_max` count as zero.
    pub fn rank_tolerance(&self) -> f64 {
        let dim = self.u.nrows().max(self.v.nrows()) as f64;
        let dmax = self.singular_values.iter().cloned().fold(0.0, f64::max);
        dim * f64::EPSILON * dmax
    }

    pub fn rank(&self) -> usize {
        let tol = self.rank_tolerance();
        self.singular_values.iter().filter(|&&s| s > tol).count()
    }
}

pub fn ensure_finite(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} contains non-finite entries")))
    }
}

pub fn ensure_finite_vec(v: &DVector<f64>, what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} contains non-finite entries")))
    }
}

fn ensure_tall(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() < a.ncols() || a.ncols() == 0 {
        return Err(Error::invalid(format!(
            "expected rows >= cols >= 1, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

pub fn svd(a: &DMatrix<f64>) -> Result<SvdFactors> {
    ensure_tall(a)?;
    ensure_finite(a, "matrix")?;
    let n = a.ncols();
    let raw = a.clone().svd(true, true);
    let u = raw.u.expect("requested U");
    let v_t = raw.v_t.expect("requested V^T");

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw.singular_values[j].total_cmp(&raw.singular_values[i]));

    let mut us = DMatrix::zeros(a.nrows(), n);
    let mut vs = DMatrix::zeros(n, n);
    let mut ds = DVector::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        us.set_column(dst, &u.column(src));
        vs.set_column(dst, &v_t.row(src).transpose());
        ds[dst] = raw.singular_values[src];
    }
    Ok(SvdFactors {
        u: us,
        singular_values: ds,
        v: vs,
    })
}

pub fn rank(a: &DMatrix<f64>) -> Result<usize> {
    Ok(svd(a)?.rank())
}

/// Fails with `UnsupportedRank` unless `a` has full column rank.
pub fn require_full_column_rank(a: &DMatrix<f64>) -> Result<()> {
    let r = rank(a)?;
    if r < a.ncols() {
        return Err(Error::UnsupportedRank {
            rank: r,
            cols: a.ncols(),
        });
    }
    Ok(())
}

/// Moore-Penrose pseudo-inverse via SVD.
pub fn pinv(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let f = svd(a)?;
    let tol = f.rank_tolerance();
    let inv_d = f
        .singular_values
        .map(|s| if s > tol { 1.0 / s } else { 0.0 });
    Ok(&f.v * DMatrix::from_diagonal(&inv_d) * f.u.transpose())
}

/// `I - A A^+`, the orthogonal projector onto the complement of range(A).
pub fn projector_perp(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let m = a.nrows();
    let mut p = -(a * pinv(a)?);
    for i in 0..m {
        p[(i, i)] += 1.0;
    }
    // symmetrize away round-off
    Ok((&p + p.transpose()) * 0.5)
}

/// Rows of `m` concatenated top to bottom.
pub fn vec_rows(m: &DMatrix<f64>) -> DVector<f64> {
    let (r, c) = m.shape();
    DVector::from_iterator(r * c, (0..r).flat_map(|i| (0..c).map(move |j| m[(i, j)])))
}

/// Inverse of [`vec_rows`].
pub fn unvec_rows(v: &DVector<f64>, rows: usize, cols: usize) -> DMatrix<f64> {
    assert_eq!(v.len(), rows * cols, "length mismatch in unvec_rows");
    DMatrix::from_row_slice(rows, cols, v.as_slice())
}

/// `I_m (x) x^T`: the `m x mn` matrix with `x^T` in each diagonal block.
pub fn kron_id_rowvec(x: &DVector<f64>, m: usize) -> DMatrix<f64> {
    let n = x.len();
    let mut out = DMatrix::zeros(m, m * n);
    for i in 0..m {
        for j in 0..n {
            out[(i, i * n + j)] = x[j];
        }
    }
    out
}

/// Frobenius inner product `<A, B> = tr(A^T B)`.
pub fn frob_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Lower-triangular Cholesky factor `L` with `S = L L^T`.
///
/// Only the lower triangle of `s` is read.
pub fn cholesky(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = s.nrows();
    if s.ncols() != n {
        return Err(Error::invalid("cholesky needs a square matrix"));
    }
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = s[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j });
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut v = s[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / d;
        }
    }
    Ok(l)
}

/// `S^{-1} B` for symmetric positive definite `S`.
pub fn solve_psd(s: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    ensure_finite(s, "S")?;
    ensure_finite(b, "B")?;
    if b.nrows() != s.nrows() {
        return Err(Error::invalid("solve_psd: dimension mismatch"));
    }
    let asym = (s - s.transpose()).norm();
    if asym > 1e-10 * s.norm().max(1.0) {
        return Err(Error::invalid("solve_psd: S is not symmetric"));
    }
    let l = cholesky(s)?;
    let w = l
        .solve_lower_triangular(b)
        .ok_or(Error::NotPositiveDefinite { pivot: 0 })?;
    l.transpose()
        .solve_upper_triangular(&w)
        .ok_or(Error::NotPositiveDefinite { pivot: 0 })
}

pub fn solve_psd_vec(s: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let out = solve_psd(s, &DMatrix::from_column_slice(b.len(), 1, b.as_slice()))?;
    Ok(out.column(0).into_owned())
}
