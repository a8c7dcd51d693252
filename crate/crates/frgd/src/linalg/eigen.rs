//! Cyclic Jacobi eigensolver for dense symmetric matrices.

use super::{DenseMatrix, LinalgError};

const MAX_SWEEPS: usize = 60;

/// All eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>, LinalgError> {
    jacobi(a, false).map(|(values, _)| values)
}

/// Eigenvalues (ascending) and the matrix whose columns are the matching
/// eigenvectors, so that `A = V diag(values) V^T` up to rounding.
pub fn symmetric_eigen(a: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix), LinalgError> {
    let (values, vectors) = jacobi(a, true)?;
    Ok((values, vectors.expect("vectors requested")))
}

fn jacobi(a: &DenseMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<DenseMatrix>), LinalgError> {
    a.ensure_symmetric()?;
    let n = a.rows();
    let mut m = a.clone();
    let mut v = want_vectors.then(|| DenseMatrix::identity(n));

    if n == 1 {
        return Ok((vec![m[(0, 0)]], v));
    }

    let fro = m.frobenius_norm();
    if fro == 0.0 {
        return Ok((vec![0.0; n], v));
    }
    // Stop when the off-diagonal mass is negligible relative to the matrix.
    let target = 1e-15 * fro;

    for _sweep in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&m);
        if off <= target {
            return Ok(finish(m, v));
        }
        // Rotating away entries below this threshold cannot reduce `off`
        // meaningfully; skipping them keeps late sweeps cheap.
        let threshold = off / (n as f64 * n as f64);
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() <= threshold.min(target) {
                    continue;
                }
                rotate(&mut m, v.as_mut(), p, q);
            }
        }
    }
    Err(LinalgError::NoConvergence { sweeps: MAX_SWEEPS })
}

fn off_diagonal_norm(m: &DenseMatrix) -> f64 {
    let n = m.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += 2.0 * m[(i, j)] * m[(i, j)];
        }
    }
    s.sqrt()
}

/// One Jacobi rotation zeroing `m[(p, q)]`, applied symmetrically.
fn rotate(m: &mut DenseMatrix, v: Option<&mut DenseMatrix>, p: usize, q: usize) {
    let n = m.rows();
    let apq = m[(p, q)];
    let app = m[(p, p)];
    let aqq = m[(q, q)];

    let tau = (aqq - app) / (2.0 * apq);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    m[(p, p)] = app - t * apq;
    m[(q, q)] = aqq + t * apq;
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        let new_p = c * akp - s * akq;
        let new_q = s * akp + c * akq;
        m[(k, p)] = new_p;
        m[(p, k)] = new_p;
        m[(k, q)] = new_q;
        m[(q, k)] = new_q;
    }

    if let Some(v) = v {
        for k in 0..n {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = c * vkp - s * vkq;
            v[(k, q)] = s * vkp + c * vkq;
        }
    }
}

fn finish(m: DenseMatrix, v: Option<DenseMatrix>) -> (Vec<f64>, Option<DenseMatrix>) {
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).expect("finite eigenvalues"));
    let values: Vec<f64> = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = v.map(|v| DenseMatrix::from_fn(n, n, |i, j| v[(i, order[j])]));
    (values, vectors)
}
