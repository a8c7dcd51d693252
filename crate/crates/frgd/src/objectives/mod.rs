//! Differentiable objective functions: quadratics, finite-sum losses for
//! stochastic training, and the central-difference gradient oracle used by
//! every gradient-correctness test in the repository.

mod dataset;
mod mlp;

pub use dataset::{gaussian_blobs, two_moons, DatasetError, LabeledDataset};
pub use mlp::{logistic_regression, mlp_loss_and_gradient, Activation, MlpModel, MlpObjective};

use crate::linalg::vector::{dot, norm};
use crate::linalg::DenseMatrix;

/// A differentiable scalar function of a parameter vector.
pub trait Objective {
    fn dim(&self) -> usize;
    fn value(&self, w: &[f64]) -> f64;
    fn gradient(&self, w: &[f64]) -> Vec<f64>;
}

/// A mean of `N` differentiable components, the structure stochastic
/// optimizers sample from. The full value and gradient are the arithmetic
/// means of the per-component ones.
pub trait FiniteSumObjective {
    fn dim(&self) -> usize;
    fn component_count(&self) -> usize;
    fn value_at(&self, w: &[f64], index: usize) -> f64;
    fn gradient_at(&self, w: &[f64], index: usize) -> Vec<f64>;

    fn full_value(&self, w: &[f64]) -> f64 {
        let n = self.component_count();
        assert!(n >= 1, "finite sum needs at least one component");
        (0..n).map(|i| self.value_at(w, i)).sum::<f64>() / n as f64
    }

    fn full_gradient(&self, w: &[f64]) -> Vec<f64> {
        let indices: Vec<usize> = (0..self.component_count()).collect();
        minibatch_gradient(self, w, &indices)
    }
}

impl<T: FiniteSumObjective> Objective for T {
    fn dim(&self) -> usize {
        FiniteSumObjective::dim(self)
    }
    fn value(&self, w: &[f64]) -> f64 {
        self.full_value(w)
    }
    fn gradient(&self, w: &[f64]) -> Vec<f64> {
        self.full_gradient(w)
    }
}

/// Arithmetic mean of the per-index gradients over `batch`.
pub fn minibatch_gradient<T: FiniteSumObjective + ?Sized>(
    obj: &T,
    w: &[f64],
    batch: &[usize],
) -> Vec<f64> {
    assert!(!batch.is_empty(), "minibatch_gradient: empty batch");
    let n = obj.component_count();
    let mut acc = vec![0.0; w.len()];
    for &i in batch {
        assert!(i < n, "minibatch_gradient: index {i} out of range (N = {n})");
        let g = obj.gradient_at(w, i);
        for (a, gi) in acc.iter_mut().zip(&g) {
            *a += gi;
        }
    }
    let inv = 1.0 / batch.len() as f64;
    for a in &mut acc {
        *a *= inv;
    }
    acc
}

/// `f(w) = 1/2 w'Aw - b'w` with symmetric `A`; its gradient is `Aw - b`.
#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    a: DenseMatrix,
    b: Vec<f64>,
}

impl QuadraticProblem {
    pub fn new(a: DenseMatrix, b: Vec<f64>) -> Self {
        assert_eq!(a.rows(), a.cols(), "quadratic matrix must be square");
        assert_eq!(a.rows(), b.len(), "matrix and rhs dimension mismatch");
        a.ensure_symmetric().expect("quadratic matrix must be symmetric");
        Self { a, b }
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        assert_eq!(w.len(), self.dim(), "quadratic value: dimension mismatch");
        0.5 * dot(w, &self.a.matvec(w)) - dot(&self.b, w)
    }

    pub fn gradient(&self, w: &[f64]) -> Vec<f64> {
        assert_eq!(w.len(), self.dim(), "quadratic gradient: dimension mismatch");
        let mut g = self.a.matvec(w);
        for (gi, bi) in g.iter_mut().zip(&self.b) {
            *gi -= bi;
        }
        g
    }
}

impl Objective for QuadraticProblem {
    fn dim(&self) -> usize {
        self.dim()
    }
    fn value(&self, w: &[f64]) -> f64 {
        self.value(w)
    }
    fn gradient(&self, w: &[f64]) -> Vec<f64> {
        self.gradient(w)
    }
}

/// Laplacian of the cycle graph on `d` vertices: 2 on the diagonal, -1 on
/// the cyclic off-diagonals. Positive semidefinite with row sums zero and
/// eigenvalues `2 - 2 cos(2 pi k / d)`, so its spectral norm stays below 4.
pub fn build_cycle_laplacian(d: usize) -> DenseMatrix {
    assert!(d >= 3, "cycle graph needs at least 3 vertices, got {d}");
    DenseMatrix::from_fn(d, d, |i, j| {
        if i == j {
            2.0
        } else if (i + 1) % d == j || (j + 1) % d == i {
            -1.0
        } else {
            0.0
        }
    })
}

/// The cycle-Laplacian quadratic with unit load on the first coordinate:
/// `f(w) = 1/2 w'Lw - w'e_1`. Convex but not strongly convex; the benchmark
/// instance uses `d = 500`.
pub fn cycle_laplacian_problem(d: usize) -> QuadraticProblem {
    let mut b = vec![0.0; d];
    b[0] = 1.0;
    QuadraticProblem::new(build_cycle_laplacian(d), b)
}

/// Random symmetric positive definite quadratic `1/2 w'Aw - b'w` with
/// eigenvalues drawn log-uniformly from `[eig_lo, eig_hi]` and a random
/// orthogonal eigenbasis. `b` has standard normal entries.
pub fn random_spd_problem(
    rng: &mut crate::rng::SplitMix64,
    d: usize,
    eig_lo: f64,
    eig_hi: f64,
) -> QuadraticProblem {
    assert!(0.0 < eig_lo && eig_lo <= eig_hi, "invalid eigenvalue range");
    let mut eigs: Vec<f64> = (0..d)
        .map(|_| (rng.uniform(eig_lo.ln(), eig_hi.ln())).exp())
        .collect();
    // Pin the extremes so the requested range is attained exactly.
    if d >= 2 {
        eigs[0] = eig_lo;
        eigs[1] = eig_hi;
    }
    let q = random_orthogonal(rng, d);
    // A = Q diag(eigs) Q^T, symmetrized against rounding.
    let mut a = DenseMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let mut s = 0.0;
            for k in 0..d {
                s += q[(i, k)] * eigs[k] * q[(j, k)];
            }
            a[(i, j)] = s;
            a[(j, i)] = s;
        }
    }
    let b: Vec<f64> = (0..d).map(|_| rng.next_normal()).collect();
    QuadraticProblem::new(a, b)
}

/// Random orthogonal matrix from modified Gram-Schmidt on a Gaussian matrix.
pub fn random_orthogonal(rng: &mut crate::rng::SplitMix64, d: usize) -> DenseMatrix {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| rng.next_normal()).collect();
        for c in &cols {
            let proj = dot(&v, c);
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi -= proj * ci;
            }
        }
        let n = norm(&v);
        if n < 1e-8 {
            continue; // essentially impossible; redraw
        }
        for vi in &mut v {
            *vi /= n;
        }
        cols.push(v);
    }
    DenseMatrix::from_columns(&cols)
}

/// Central differences `(f(w + h e_j) - f(w - h e_j)) / 2h` per coordinate.
///
/// This is the independent oracle behind every gradient-correctness check in
/// the test suites; `h = 1e-5` is the documented default.
pub fn finite_difference_gradient(f: impl Fn(&[f64]) -> f64, w: &[f64], h: f64) -> Vec<f64> {
    assert!(h > 0.0, "step size must be positive");
    let mut probe = w.to_vec();
    (0..w.len())
        .map(|j| {
            probe[j] = w[j] + h;
            let fp = f(&probe);
            probe[j] = w[j] - h;
            let fm = f(&probe);
            probe[j] = w[j];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Relative deviation between an analytic gradient and the central-difference
/// oracle, used by the acceptance suite.
pub fn gradient_check(obj: &impl Objective, w: &[f64], h: f64) -> f64 {
    let analytic = obj.gradient(w);
    let numeric = finite_difference_gradient(|v| obj.value(v), w, h);
    let diff: Vec<f64> = analytic.iter().zip(&numeric).map(|(a, n)| a - n).collect();
    norm(&diff) / norm(&numeric).max(1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::symmetric_eigenvalues;
    use crate::linalg::vector::norm;
    use crate::rng::SplitMix64;

    fn random_spd(seed: u64, d: usize, eig_lo: f64, eig_hi: f64) -> QuadraticProblem {
        let mut rng = SplitMix64::new(seed);
        random_spd_problem(&mut rng, d, eig_lo, eig_hi)
    }

    #[test]
    fn quadratic_value_examples() {
        let half_norm = QuadraticProblem::new(DenseMatrix::identity(2), vec![0.0, 0.0]);
        assert_eq!(half_norm.value(&[3.0, 4.0]), 12.5);

        let cycle = cycle_laplacian_problem(500);
        assert_eq!(cycle.value(&vec![0.0; 500]), 0.0);

        // By hand: 1/2 * 2 * 1 - 2 * 1 = -1.
        let scalar = QuadraticProblem::new(DenseMatrix::new(1, 1, vec![2.0]), vec![2.0]);
        assert_eq!(scalar.value(&[1.0]), -1.0);
    }

    #[test]
    fn quadratic_gradient_examples() {
        let half_norm = QuadraticProblem::new(DenseMatrix::identity(3), vec![0.0; 3]);
        assert_eq!(half_norm.gradient(&[1.0, -2.0, 0.5]), vec![1.0, -2.0, 0.5]);

        let cycle = cycle_laplacian_problem(500);
        let g0 = cycle.gradient(&vec![0.0; 500]);
        assert_eq!(g0[0], -1.0);
        assert!(g0[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn quadratic_gradient_matches_finite_differences() {
        let q = random_spd(41, 10, 0.5, 5.0);
        let mut rng = SplitMix64::new(42);
        let w: Vec<f64> = (0..10).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let analytic = q.gradient(&w);
        let numeric = finite_difference_gradient(|v| q.value(v), &w, 1e-5);
        for (a, n) in analytic.iter().zip(&numeric) {
            assert!((a - n).abs() < 1e-6, "{a} vs {n}");
        }
    }

    #[test]
    fn quadratic_gradient_is_affine() {
        // g(w1) - g(w2) = A (w1 - w2) as a matvec identity.
        let q = random_spd(43, 8, 0.5, 4.0);
        let mut rng = SplitMix64::new(44);
        let w1: Vec<f64> = (0..8).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let w2: Vec<f64> = (0..8).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let lhs: Vec<f64> = q
            .gradient(&w1)
            .iter()
            .zip(q.gradient(&w2))
            .map(|(a, b)| a - b)
            .collect();
        let dw: Vec<f64> = w1.iter().zip(&w2).map(|(a, b)| a - b).collect();
        let rhs = q.matrix().matvec(&dw);
        for (l, r) in lhs.iter().zip(&rhs) {
            assert!((l - r).abs() <= 1e-12 * (1.0 + r.abs()));
        }
    }

    #[test]
    fn cycle_laplacian_d3_entries() {
        let l = build_cycle_laplacian(3);
        let expected = [2.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l[(i, j)], expected[i * 3 + j]);
            }
        }
    }

    #[test]
    fn cycle_laplacian_rows_sum_to_zero() {
        for d in [3, 7, 50] {
            let l = build_cycle_laplacian(d);
            for i in 0..d {
                assert_eq!(l.row(i).iter().sum::<f64>(), 0.0);
            }
        }
    }

    #[test]
    #[should_panic(expected = "at least 3")]
    fn cycle_laplacian_rejects_small_d() {
        build_cycle_laplacian(2);
    }

    #[test]
    fn cycle_laplacian_500_spectrum_bounds() {
        let eigs = symmetric_eigenvalues(&build_cycle_laplacian(500)).unwrap();
        assert!(eigs[0].abs() < 1e-10, "smallest eigenvalue {}", eigs[0]);
        let max = eigs[eigs.len() - 1];
        assert!(max < 4.0, "largest eigenvalue {max}");
        assert!(max > 3.9);
    }

    #[test]
    fn cycle_laplacian_is_positive_semidefinite() {
        for d in [3, 16, 64] {
            let eigs = symmetric_eigenvalues(&build_cycle_laplacian(d)).unwrap();
            assert!(eigs.iter().all(|&e| e >= -1e-10), "d={d}");
        }
    }

    #[test]
    fn cycle_problem_rhs_is_unit_first_coordinate() {
        let q = cycle_laplacian_problem(500);
        assert_eq!(q.rhs()[0], 1.0);
        assert_eq!(q.rhs()[1..].iter().filter(|&&x| x != 0.0).count(), 0);
        assert!(q.matrix().is_symmetric());
        assert_eq!(q.value(&vec![0.0; 500]), 0.0);
        assert_eq!(norm(&q.gradient(&vec![0.0; 500])), 1.0);
    }

    struct TwoQuadratics {
        parts: Vec<QuadraticProblem>,
    }

    impl FiniteSumObjective for TwoQuadratics {
        fn dim(&self) -> usize {
            self.parts[0].dim()
        }
        fn component_count(&self) -> usize {
            self.parts.len()
        }
        fn value_at(&self, w: &[f64], index: usize) -> f64 {
            self.parts[index].value(w)
        }
        fn gradient_at(&self, w: &[f64], index: usize) -> Vec<f64> {
            self.parts[index].gradient(w)
        }
    }

    fn two_quadratics() -> TwoQuadratics {
        TwoQuadratics {
            parts: vec![
                QuadraticProblem::new(DenseMatrix::identity(2), vec![1.0, 0.0]),
                QuadraticProblem::new(
                    DenseMatrix::new(2, 2, vec![3.0, 1.0, 1.0, 2.0]),
                    vec![0.0, -1.0],
                ),
            ],
        }
    }

    #[test]
    fn minibatch_over_all_indices_is_full_gradient() {
        let obj = two_quadratics();
        let w = [0.3, -0.7];
        assert_eq!(minibatch_gradient(&obj, &w, &[0, 1]), obj.full_gradient(&w));
    }

    #[test]
    fn singleton_batch_is_component_gradient() {
        let obj = two_quadratics();
        let w = [0.5, 2.0];
        assert_eq!(minibatch_gradient(&obj, &w, &[1]), obj.gradient_at(&w, 1));
    }

    #[test]
    fn two_component_batch_averages_elementwise() {
        let obj = two_quadratics();
        let w = [1.0, 1.0];
        let g0 = obj.gradient_at(&w, 0);
        let g1 = obj.gradient_at(&w, 1);
        let got = minibatch_gradient(&obj, &w, &[0, 1]);
        for k in 0..2 {
            assert_eq!(got[k], (g0[k] + g1[k]) / 2.0);
        }
    }

    #[test]
    #[should_panic(expected = "empty batch")]
    fn minibatch_rejects_empty_batch() {
        minibatch_gradient(&two_quadratics(), &[0.0, 0.0], &[]);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn minibatch_rejects_out_of_range_index() {
        minibatch_gradient(&two_quadratics(), &[0.0, 0.0], &[2]);
    }

    #[test]
    fn disjoint_batches_recombine_to_full_gradient() {
        // Weighted average of disjoint batch gradients equals the full one.
        let q = random_spd(77, 6, 0.5, 3.0);
        struct PerRow(QuadraticProblem);
        impl FiniteSumObjective for PerRow {
            fn dim(&self) -> usize {
                self.0.dim()
            }
            fn component_count(&self) -> usize {
                6
            }
            fn value_at(&self, w: &[f64], i: usize) -> f64 {
                // Row-wise split of the quadratic, scaled to keep the mean equal
                // to the full objective.
                let row = self.0.matrix().row(i);
                6.0 * (0.5 * w[i] * dot(row, w) - self.0.rhs()[i] * w[i])
            }
            fn gradient_at(&self, w: &[f64], i: usize) -> Vec<f64> {
                let row = self.0.matrix().row(i);
                let mut g = vec![0.0; 6];
                for (k, gk) in g.iter_mut().enumerate() {
                    *gk = 0.5 * row[k] * w[i];
                }
                g[i] += 0.5 * dot(row, w) - self.0.rhs()[i];
                for gk in &mut g {
                    *gk *= 6.0;
                }
                g
            }
        }
        let obj = PerRow(q);
        let mut rng = SplitMix64::new(78);
        let w: Vec<f64> = (0..6).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let mut indices: Vec<usize> = (0..6).collect();
        rng.shuffle(&mut indices);
        let (ba, bb) = indices.split_at(2);
        let ga = minibatch_gradient(&obj, &w, ba);
        let gb = minibatch_gradient(&obj, &w, bb);
        let full = obj.full_gradient(&w);
        for k in 0..6 {
            let mixed = (ba.len() as f64 * ga[k] + bb.len() as f64 * gb[k]) / 6.0;
            assert!((mixed - full[k]).abs() <= 1e-12 * (1.0 + full[k].abs()));
        }
    }

    #[test]
    fn finite_differences_exact_for_quadratics() {
        // Central differences are exact on polynomials of degree <= 2.
        let f = |w: &[f64]| 0.5 * norm_sq_local(w);
        let w = [0.4, -1.3, 2.2];
        let g = finite_difference_gradient(f, &w, 1e-3);
        for (gi, wi) in g.iter().zip(&w) {
            assert!((gi - wi).abs() < 1e-9);
        }
    }

    fn norm_sq_local(w: &[f64]) -> f64 {
        w.iter().map(|x| x * x).sum()
    }

    #[test]
    fn finite_difference_error_order_on_cubic() {
        // Taylor remainder h^2 f'''/6 = 1e-6 for f(w) = w^3 at w = 1, h = 1e-3.
        let g = finite_difference_gradient(|w| w[0].powi(3), &[1.0], 1e-3);
        let err = g[0] - 3.0;
        assert!((err - 1e-6).abs() < 1e-8, "error {err}");
    }

    #[test]
    #[should_panic(expected = "positive")]
    fn finite_differences_reject_nonpositive_h() {
        finite_difference_gradient(|w| w[0], &[1.0], 0.0);
    }
}
