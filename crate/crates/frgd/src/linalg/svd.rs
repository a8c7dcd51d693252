//! One-sided Jacobi singular values.

use super::DenseMatrix;

const MAX_SWEEPS: usize = 60;

/// Singular values in descending order.
///
/// One-sided Jacobi: rotate column pairs of the (tall) matrix until all
/// pairs are mutually orthogonal; the column norms are then the singular
/// values. Convergence is quadratic and the values come out accurate to a
/// small multiple of machine epsilon, including the tiny ones that decide
/// rank questions.
pub fn singular_values(m: &DenseMatrix) -> Vec<f64> {
    // Work on the tall orientation; singular values are shared with the
    // transpose.
    let work = if m.rows() >= m.cols() { m.clone() } else { m.transpose() };
    let rows = work.rows();
    let cols = work.cols();

    // Column-major copy so rotations touch contiguous memory.
    let mut col: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|i| work[(i, j)]).collect())
        .collect();

    let eps = 1e-15;
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols.saturating_sub(1) {
            for j in i + 1..cols {
                let (ci, cj) = pair_mut(&mut col, i, j);
                let aii: f64 = ci.iter().map(|x| x * x).sum();
                let ajj: f64 = cj.iter().map(|x| x * x).sum();
                let aij: f64 = ci.iter().zip(cj.iter()).map(|(x, y)| x * y).sum();
                if aij.abs() <= eps * (aii * ajj).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (ajj - aii) / (2.0 * aij);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
                    let xi = *x;
                    let yj = *y;
                    *x = c * xi - s * yj;
                    *y = s * xi + c * yj;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<f64> = col
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    sigma.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    sigma
}

fn pair_mut(cols: &mut [Vec<f64>], i: usize, j: usize) -> (&mut Vec<f64>, &mut Vec<f64>) {
    debug_assert!(i < j);
    let (lo, hi) = cols.split_at_mut(j);
    (&mut lo[i], &mut hi[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn diagonal_singular_values() {
        let m = DenseMatrix::new(2, 2, vec![4.0, 0.0, 0.0, -1.0]);
        let s = singular_values(&m);
        assert!((s[0] - 4.0).abs() < 1e-14);
        assert!((s[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn wide_matrix_matches_transpose() {
        let mut rng = SplitMix64::new(5);
        let m = DenseMatrix::from_fn(3, 7, |_, _| rng.uniform(-1.0, 1.0));
        let a = singular_values(&m);
        let b = singular_values(&m.transpose());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-12 * a[0]);
        }
    }

    #[test]
    fn zero_matrix_gives_zero_values() {
        let s = singular_values(&DenseMatrix::zeros(4, 2));
        assert_eq!(s, vec![0.0, 0.0]);
    }

    #[test]
    fn known_construction_recovers_sigma() {
        // Build M = U diag(3, 2, 0.5) V^T from two rotations, so the exact
        // singular values are known in advance.
        let (c1, s1) = (0.6f64, 0.8f64);
        let u = DenseMatrix::new(3, 3, vec![c1, -s1, 0.0, s1, c1, 0.0, 0.0, 0.0, 1.0]);
        let (c2, s2) = ((0.3f64).cos(), (0.3f64).sin());
        let v = DenseMatrix::new(3, 3, vec![1.0, 0.0, 0.0, 0.0, c2, -s2, 0.0, s2, c2]);
        let mut d = DenseMatrix::zeros(3, 3);
        d[(0, 0)] = 3.0;
        d[(1, 1)] = 2.0;
        d[(2, 2)] = 0.5;
        let m = u.matmul(&d).matmul(&v.transpose());
        let s = singular_values(&m);
        for (got, want) in s.iter().zip([3.0, 2.0, 0.5]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }
}
