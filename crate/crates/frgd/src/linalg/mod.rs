//! Minimal dense linear algebra: symmetric matrix-vector products, Jacobi
//! eigenvalue and singular-value decompositions for small matrices,
//! condition numbers and pseudoinverse norms.
//!
//! Everything here targets desk-scale sizes (a few hundred rows, at most a
//! couple of thousand). Accuracy is preferred over speed: the eigensolver is
//! a cyclic Jacobi iteration and the SVD is one-sided Jacobi, both accurate
//! to a small multiple of machine epsilon at these sizes.

mod eigen;
mod svd;
pub mod vector;

pub use eigen::{symmetric_eigen, symmetric_eigenvalues};
pub use svd::singular_values;

use std::fmt;
use std::ops::{Index, IndexMut};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not symmetric: max |a_ij - a_ji| = {deviation:.3e} exceeds tolerance {tolerance:.3e}")]
    NotSymmetric { deviation: f64, tolerance: f64 },
    #[error("zero matrix has no condition number")]
    ZeroMatrix,
    #[error("matrix is rank deficient within tolerance: sigma_min = {sigma_min:.3e}, sigma_max = {sigma_max:.3e}")]
    RankDeficient { sigma_min: f64, sigma_max: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

/// Relative tolerance for symmetry checks and rank decisions.
pub const SYMMETRY_TOL: f64 = 1e-12;
pub const RANK_TOL: f64 = 1e-12;

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Self {
        assert_eq!(
            entries.len(),
            rows * cols,
            "entry count {} does not match {}x{}",
            entries.len(),
            rows,
            cols
        );
        Self { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self::new(rows, cols, entries)
    }

    /// Builds the matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<f64>]) -> Self {
        assert!(!columns.is_empty(), "from_columns: need at least one column");
        let rows = columns[0].len();
        assert!(
            columns.iter().all(|c| c.len() == rows),
            "from_columns: ragged columns"
        );
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Largest off-symmetric deviation `max |a_ij - a_ji|`; zero for
    /// non-square matrices is never reported (they are simply not symmetric).
    pub fn symmetry_deviation(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        dev
    }

    pub fn symmetry_tolerance(&self) -> f64 {
        SYMMETRY_TOL * self.frobenius_norm().max(1.0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetry_deviation() <= self.symmetry_tolerance()
    }

    /// Asymmetric inputs are rejected, never symmetrized.
    pub fn ensure_symmetric(&self) -> Result<(), LinalgError> {
        let deviation = self.symmetry_deviation();
        let tolerance = self.symmetry_tolerance();
        if deviation <= tolerance {
            Ok(())
        } else {
            Err(LinalgError::NotSymmetric { deviation, tolerance })
        }
    }

    /// Dense matrix-vector product `A x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(
            self.cols,
            x.len(),
            "matvec: {}x{} matrix applied to vector of length {}",
            self.rows,
            self.cols,
            x.len()
        );
        self.entries
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "matmul: inner dimension mismatch");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Spectral norm (largest singular value).
    pub fn spectral_norm(&self) -> f64 {
        singular_values(self).first().copied().unwrap_or(0.0)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>12.5e}", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Extreme singular (or eigen-) values of a matrix and their ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSummary {
    pub min_value: f64,
    pub max_value: f64,
    /// `max_value / min_value`; `f64::INFINITY` when rank deficient.
    pub condition_number: f64,
    /// Set when `min_value <= RANK_TOL * max_value`.
    pub infinite: bool,
}

/// Spectral condition number `sigma_max / sigma_min` from singular values.
pub fn condition_number(m: &DenseMatrix) -> Result<SpectralSummary, LinalgError> {
    let sigma = singular_values(m);
    let max_value = sigma[0];
    let min_value = *sigma.last().expect("at least one singular value");
    if max_value <= 0.0 {
        return Err(LinalgError::ZeroMatrix);
    }
    let infinite = min_value <= RANK_TOL * max_value;
    let condition_number = if infinite { f64::INFINITY } else { max_value / min_value };
    Ok(SpectralSummary { min_value, max_value, condition_number, infinite })
}

/// `||M^+|| = 1 / sigma_min(M)` for a matrix with full column rank.
pub fn pseudoinverse_norm(m: &DenseMatrix) -> Result<f64, LinalgError> {
    let sigma = singular_values(m);
    let sigma_max = sigma[0];
    // Full column rank needs cols singular values above the rank cutoff.
    let sigma_min = if m.cols() > sigma.len() { 0.0 } else { sigma[m.cols() - 1] };
    if sigma_max <= 0.0 || sigma_min <= RANK_TOL * sigma_max {
        return Err(LinalgError::RankDeficient { sigma_min, sigma_max });
    }
    Ok(1.0 / sigma_min)
}
