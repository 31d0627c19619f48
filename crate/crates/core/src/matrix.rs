//! Small dense symmetric matrices and their spectral decomposition.
//!
//! The operators in this crate act on Hessians, so the matrices involved are
//! symmetric and tiny (dimension ≤ 8 in every intended use).  Eigenvalues are
//! computed by the cyclic Jacobi rotation method, which is robust and exact to
//! rounding for this size range; no external linear-algebra backend is pulled
//! in for a 4×4 eigenproblem.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{real, Real};

/// Maximum number of Jacobi sweeps before giving up.
const MAX_SWEEPS: usize = 50;

#[derive(Debug, Error, PartialEq)]
pub enum MatrixError {
    #[error("entry buffer has length {got}, expected {expected} for dimension {dim}")]
    BadLength { dim: usize, expected: usize, got: usize },
    #[error("matrix dimension must be at least 1")]
    ZeroDim,
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("asymmetry {max_dev:e} exceeds tolerance {tol:e}")]
    NotSymmetric { max_dev: f64, tol: f64 },
    #[error("dimension mismatch: {a} vs {b}")]
    DimMismatch { a: usize, b: usize },
    #[error("Jacobi iteration failed to converge in {MAX_SWEEPS} sweeps")]
    NoConvergence,
}

/// Dense symmetric matrix, row-major storage.
///
/// Construction validates symmetry within `1e-12 · max(1, max|entry|)`
/// (widened to a few ulps when the scalar is `f32`) and then stores the
/// symmetrized part `(A + Aᵀ)/2`, so discrete Hessians that are symmetric
/// only to rounding are accepted and cleaned up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricMatrix<F> {
    dim: usize,
    entries: Vec<F>,
}

impl<F: Real> SymmetricMatrix<F> {
    pub fn new(dim: usize, entries: Vec<F>) -> Result<Self, MatrixError> {
        if dim == 0 {
            return Err(MatrixError::ZeroDim);
        }
        if entries.len() != dim * dim {
            return Err(MatrixError::BadLength { dim, expected: dim * dim, got: entries.len() });
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(MatrixError::NonFinite);
        }
        let max_abs = entries.iter().fold(F::zero(), |m, &e| m.max(e.abs()));
        let tol = real::<F>(1e-12).max(F::epsilon() * real(8.0)) * F::one().max(max_abs);
        let mut max_dev = F::zero();
        for i in 0..dim {
            for j in (i + 1)..dim {
                max_dev = max_dev.max((entries[i * dim + j] - entries[j * dim + i]).abs());
            }
        }
        if max_dev > tol {
            return Err(MatrixError::NotSymmetric {
                max_dev: max_dev.to_f64().unwrap_or(f64::NAN),
                tol: tol.to_f64().unwrap_or(f64::NAN),
            });
        }
        let mut sym = entries;
        for i in 0..dim {
            for j in (i + 1)..dim {
                let avg = (sym[i * dim + j] + sym[j * dim + i]) / real(2.0);
                sym[i * dim + j] = avg;
                sym[j * dim + i] = avg;
            }
        }
        Ok(Self { dim, entries: sym })
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self, MatrixError> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(MatrixError::BadLength { dim, expected: dim * dim, got: dim * row.len() });
            }
            entries.extend_from_slice(row);
        }
        Self::new(dim, entries)
    }

    /// Diagonal matrix `diag(values)`.
    pub fn diag(values: &[F]) -> Result<Self, MatrixError> {
        let dim = values.len();
        if dim == 0 {
            return Err(MatrixError::ZeroDim);
        }
        let mut entries = vec![F::zero(); dim * dim];
        for (i, &v) in values.iter().enumerate() {
            entries[i * dim + i] = v;
        }
        Self::new(dim, entries)
    }

    /// `diag(head, 0, …, 0)` in dimension `dim`: the Hessian of a function of
    /// one coordinate extended constantly to the others.
    pub fn embed_1d(head: F, dim: usize) -> Result<Self, MatrixError> {
        let mut values = vec![F::zero(); dim.max(1)];
        values[0] = head;
        Self::diag(&values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[F] {
        &self.entries
    }

    pub fn max_abs(&self) -> F {
        self.entries.iter().fold(F::zero(), |m, &e| m.max(e.abs()))
    }

    pub fn scale(&self, alpha: F) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|&e| e * alpha).collect() }
    }

    pub fn neg(&self) -> Self {
        self.scale(-F::one())
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.dim != other.dim {
            return Err(MatrixError::DimMismatch { a: self.dim, b: other.dim });
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| a + b).collect();
        Ok(Self { dim: self.dim, entries })
    }

    /// Conjugation `Q A Qᵀ` with `q` column-major; `Q` is assumed orthogonal,
    /// so the result is constructed as exactly symmetric.
    pub fn conjugate_by(&self, q: &[F]) -> Result<Self, MatrixError> {
        let n = self.dim;
        if q.len() != n * n {
            return Err(MatrixError::BadLength { dim: n, expected: n * n, got: q.len() });
        }
        // B = A Qᵀ, i.e. B[i][j] = Σ_k A[i][k] Q[j][k].
        let mut b = vec![F::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = F::zero();
                for k in 0..n {
                    s = s + self.get(i, k) * q[k * n + j];
                }
                b[i * n + j] = s;
            }
        }
        // C = Q B, symmetrized against rounding before validation.
        let mut c = vec![F::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = F::zero();
                for k in 0..n {
                    s = s + q[k * n + i] * b[k * n + j];
                }
                c[i * n + j] = s;
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = (c[i * n + j] + c[j * n + i]) / real(2.0);
                c[i * n + j] = avg;
                c[j * n + i] = avg;
            }
        }
        Self::new(n, c)
    }

    /// Eigenvalues in ascending order, by cyclic Jacobi rotations.
    pub fn eigenvalues(&self) -> Result<Vec<F>, MatrixError> {
        let (vals, _) = self.eigen_pairs()?;
        Ok(vals)
    }

    /// Full spectral decomposition: eigenvalues ascending and the matching
    /// eigenvectors as columns of a column-major orthogonal matrix.
    pub fn eigen_pairs(&self) -> Result<(Vec<F>, Vec<F>), MatrixError> {
        let n = self.dim;
        let mut a = self.entries.clone();
        // v column-major accumulates the rotations: A = V diag(e) Vᵀ.
        let mut v = vec![F::zero(); n * n];
        for i in 0..n {
            v[i * n + i] = F::one();
        }
        let scale = self.max_abs().max(F::one());
        let tol = F::epsilon() * scale * real(4.0);
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            let mut off = F::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(a[p * n + q].abs());
                }
            }
            if off <= tol {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq.abs() <= tol {
                        continue;
                    }
                    // Rotation angle from tan(2θ) = 2 a_pq / (a_pp − a_qq).
                    let theta = (a[q * n + q] - a[p * n + p]) / (real::<F>(2.0) * apq);
                    let t = {
                        let denom = theta.abs() + (theta * theta + F::one()).sqrt();
                        if theta >= F::zero() {
                            F::one() / denom
                        } else {
                            -F::one() / denom
                        }
                    };
                    let c = F::one() / (t * t + F::one()).sqrt();
                    let s = t * c;
                    let tau = s / (F::one() + c);
                    let h = t * apq;
                    a[p * n + p] = a[p * n + p] - h;
                    a[q * n + q] = a[q * n + q] + h;
                    a[p * n + q] = F::zero();
                    a[q * n + p] = F::zero();
                    let rot = |a: &mut Vec<F>, i: usize, j: usize, k: usize, l: usize| {
                        let g = a[i * n + j];
                        let hh = a[k * n + l];
                        a[i * n + j] = g - s * (hh + g * tau);
                        a[k * n + l] = hh + s * (g - hh * tau);
                    };
                    for j in 0..p {
                        rot(&mut a, j, p, j, q);
                        a[p * n + j] = a[j * n + p];
                        a[q * n + j] = a[j * n + q];
                    }
                    for j in (p + 1)..q {
                        rot(&mut a, p, j, j, q);
                        a[j * n + p] = a[p * n + j];
                        a[q * n + j] = a[j * n + q];
                    }
                    for j in (q + 1)..n {
                        rot(&mut a, p, j, q, j);
                        a[j * n + p] = a[p * n + j];
                        a[j * n + q] = a[q * n + j];
                    }
                    // Accumulate the rotation into the eigenvector columns.
                    for j in 0..n {
                        let g = v[p * n + j];
                        let hh = v[q * n + j];
                        v[p * n + j] = g - s * (hh + g * tau);
                        v[q * n + j] = hh + s * (g - hh * tau);
                    }
                }
            }
        }
        if !converged {
            return Err(MatrixError::NoConvergence);
        }
        let mut order: Vec<usize> = (0..n).collect();
        let diag: Vec<F> = (0..n).map(|i| a[i * n + i]).collect();
        order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("eigenvalues are finite"));
        let vals: Vec<F> = order.iter().map(|&i| diag[i]).collect();
        let mut vecs = vec![F::zero(); n * n];
        for (col, &src) in order.iter().enumerate() {
            for row in 0..n {
                vecs[col * n + row] = v[src * n + row];
            }
        }
        Ok((vals, vecs))
    }
}

/// Random orthogonal matrix (column-major) by Gram–Schmidt on a random
/// square matrix; redraws on near-degenerate input, so it always succeeds.
pub fn random_orthogonal<F: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<F> {
    loop {
        let mut q = vec![F::zero(); n * n];
        for e in q.iter_mut() {
            *e = real(rng.gen_range(-1.0..1.0f64));
        }
        if gram_schmidt(&mut q, n) {
            return q;
        }
    }
}

/// In-place modified Gram–Schmidt on column-major `q`; false if a column
/// collapses below the independence threshold.
fn gram_schmidt<F: Real>(q: &mut [F], n: usize) -> bool {
    for col in 0..n {
        for prev in 0..col {
            let mut dot = F::zero();
            for row in 0..n {
                dot = dot + q[col * n + row] * q[prev * n + row];
            }
            for row in 0..n {
                q[col * n + row] = q[col * n + row] - dot * q[prev * n + row];
            }
        }
        let mut norm = F::zero();
        for row in 0..n {
            norm = norm + q[col * n + row] * q[col * n + row];
        }
        let norm = norm.sqrt();
        if norm < real(1e-6) {
            return false;
        }
        for row in 0..n {
            q[col * n + row] = q[col * n + row] / norm;
        }
    }
    true
}
