//! Small fully connected networks with manual backpropagation.
//!
//! Parameters live in one flat vector, laid out layer by layer as the weight
//! matrix (row-major, `out x in`) followed by the bias. The loss is softmax
//! cross-entropy in the log-sum-exp stabilized form.

use super::{FiniteSumObjective, LabeledDataset};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Relu,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Relu => z.max(0.0),
        }
    }

    // Derivative expressed through the activation value where possible.
    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => {
                let t = z.tanh();
                1.0 - t * t
            }
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Feed-forward network `widths[0] -> widths[1] -> ... -> widths[last]`
/// with the given activation on hidden layers and a linear output layer.
#[derive(Debug, Clone)]
pub struct MlpModel {
    widths: Vec<usize>,
    activation: Activation,
}

impl MlpModel {
    pub fn new(widths: Vec<usize>, activation: Activation) -> Self {
        assert!(widths.len() >= 2, "need at least input and output widths");
        assert!(widths.iter().all(|&w| w >= 1), "zero-width layer");
        Self { widths, activation }
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.widths.last().expect("nonempty widths")
    }

    /// Total parameter count: sum of `in * out + out` over layers.
    pub fn param_count(&self) -> usize {
        self.widths
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum()
    }

    /// Seeded init, uniform on `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`.
    pub fn init_params(&self, seed: u64) -> Vec<f64> {
        let mut rng = SplitMix64::new(seed);
        let mut w = Vec::with_capacity(self.param_count());
        for pair in self.widths.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            for _ in 0..fan_in * fan_out + fan_out {
                w.push(rng.uniform(-bound, bound));
            }
        }
        w
    }

    fn check_params(&self, w: &[f64]) {
        assert_eq!(
            w.len(),
            self.param_count(),
            "parameter vector has length {}, model needs {}",
            w.len(),
            self.param_count()
        );
    }

    /// Pre-activations per layer; the last entry holds the logits.
    fn forward_trace(&self, w: &[f64], x: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        assert_eq!(x.len(), self.input_dim(), "input dimension mismatch");
        let layers = self.widths.len() - 1;
        let mut pre = Vec::with_capacity(layers);
        let mut act = Vec::with_capacity(layers + 1);
        act.push(x.to_vec());
        let mut offset = 0;
        for (l, pair) in self.widths.windows(2).enumerate() {
            let (nin, nout) = (pair[0], pair[1]);
            let weights = &w[offset..offset + nin * nout];
            let biases = &w[offset + nin * nout..offset + nin * nout + nout];
            offset += nin * nout + nout;
            let input = &act[l];
            let mut z = vec![0.0; nout];
            for (o, zo) in z.iter_mut().enumerate() {
                let row = &weights[o * nin..(o + 1) * nin];
                *zo = biases[o] + row.iter().zip(input).map(|(a, b)| a * b).sum::<f64>();
            }
            let is_output = l == layers - 1;
            let a = if is_output {
                z.clone()
            } else {
                z.iter().map(|&v| self.activation.apply(v)).collect()
            };
            pre.push(z);
            act.push(a);
        }
        (pre, act)
    }

    pub fn logits(&self, w: &[f64], x: &[f64]) -> Vec<f64> {
        self.check_params(w);
        let (pre, _) = self.forward_trace(w, x);
        pre.last().expect("at least one layer").clone()
    }

    pub fn predict(&self, w: &[f64], x: &[f64]) -> usize {
        let logits = self.logits(w, x);
        let mut best = 0;
        for (k, &v) in logits.iter().enumerate() {
            if v > logits[best] {
                best = k;
            }
        }
        best
    }

    /// Cross-entropy of one sample via log-sum-exp.
    pub fn sample_loss(&self, w: &[f64], x: &[f64], y: usize) -> f64 {
        let logits = self.logits(w, x);
        assert!(y < logits.len(), "label {y} out of range");
        log_sum_exp(&logits) - logits[y]
    }

    /// Mean cross-entropy and its gradient w.r.t. the parameters over a batch
    /// of raw samples, by reverse-mode accumulation.
    pub fn batch_loss_and_gradient(
        &self,
        w: &[f64],
        inputs: &[&[f64]],
        labels: &[usize],
    ) -> (f64, Vec<f64>) {
        self.check_params(w);
        assert_eq!(inputs.len(), labels.len(), "inputs/labels length mismatch");
        assert!(!inputs.is_empty(), "empty batch");
        let mut grad = vec![0.0; w.len()];
        let mut loss = 0.0;
        for (x, &y) in inputs.iter().zip(labels) {
            loss += self.accumulate_sample(w, x, y, &mut grad, None);
        }
        let inv = 1.0 / inputs.len() as f64;
        loss *= inv;
        for g in &mut grad {
            *g *= inv;
        }
        (loss, grad)
    }

    /// Gradient of one sample's loss w.r.t. the input `x` (the attack
    /// surface for gradient-based adversaries).
    pub fn input_gradient(&self, w: &[f64], x: &[f64], y: usize) -> Vec<f64> {
        self.check_params(w);
        let mut input_grad = vec![0.0; x.len()];
        let mut scratch = vec![0.0; w.len()];
        self.accumulate_sample(w, x, y, &mut scratch, Some(&mut input_grad));
        input_grad
    }

    /// Backprop for one sample; adds parameter gradients into `grad` and
    /// optionally writes the input gradient. Returns the sample loss.
    fn accumulate_sample(
        &self,
        w: &[f64],
        x: &[f64],
        y: usize,
        grad: &mut [f64],
        input_grad: Option<&mut [f64]>,
    ) -> f64 {
        let (pre, act) = self.forward_trace(w, x);
        let logits = pre.last().expect("at least one layer");
        assert!(y < logits.len(), "label {y} out of range");
        let lse = log_sum_exp(logits);
        let loss = lse - logits[y];

        // delta at the output: softmax(logits) - onehot(y)
        let mut delta: Vec<f64> = logits.iter().map(|&z| (z - lse).exp()).collect();
        delta[y] -= 1.0;

        let layers = self.widths.len() - 1;
        let mut offsets = Vec::with_capacity(layers);
        let mut offset = 0;
        for pair in self.widths.windows(2) {
            offsets.push(offset);
            offset += pair[0] * pair[1] + pair[1];
        }

        for l in (0..layers).rev() {
            let (nin, nout) = (self.widths[l], self.widths[l + 1]);
            let base = offsets[l];
            let weights = &w[base..base + nin * nout];
            let input = &act[l];

            for o in 0..nout {
                let d = delta[o];
                let wrow = base + o * nin;
                for i in 0..nin {
                    grad[wrow + i] += d * input[i];
                }
                grad[base + nin * nout + o] += d;
            }

            let propagate_to_input = l > 0 || input_grad.is_some();
            if !propagate_to_input {
                break;
            }
            // delta_prev = W^T delta, times the activation derivative except
            // at the raw input.
            let mut prev = vec![0.0; nin];
            for (o, &d) in delta.iter().enumerate() {
                let row = &weights[o * nin..(o + 1) * nin];
                for (p, r) in prev.iter_mut().zip(row) {
                    *p += d * r;
                }
            }
            if l > 0 {
                for (p, &z) in prev.iter_mut().zip(&pre[l - 1]) {
                    *p *= self.activation.derivative(z);
                }
            }
            delta = prev;
        }

        if let Some(ig) = input_grad {
            ig.copy_from_slice(&delta);
        }
        loss
    }
}

fn log_sum_exp(z: &[f64]) -> f64 {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + z.iter().map(|&v| (v - m).exp()).sum::<f64>().ln()
}

/// Mean cross-entropy over `batch` and its exact parameter gradient.
pub fn mlp_loss_and_gradient(
    model: &MlpModel,
    w: &[f64],
    data: &LabeledDataset,
    batch: &[usize],
) -> (f64, Vec<f64>) {
    let inputs: Vec<&[f64]> = batch.iter().map(|&i| data.input(i)).collect();
    let labels: Vec<usize> = batch.iter().map(|&i| data.label(i)).collect();
    model.batch_loss_and_gradient(w, &inputs, &labels)
}

/// Multinomial logistic regression is the no-hidden-layer special case.
pub fn logistic_regression(dim: usize, classes: usize) -> MlpModel {
    MlpModel::new(vec![dim, classes], Activation::Tanh)
}

/// An [`MlpModel`] paired with a dataset, exposed as a finite sum with one
/// component per sample.
#[derive(Debug, Clone)]
pub struct MlpObjective {
    model: MlpModel,
    data: LabeledDataset,
}

impl MlpObjective {
    pub fn new(model: MlpModel, data: LabeledDataset) -> Self {
        assert_eq!(model.input_dim(), data.feature_dim(), "model/data dimension mismatch");
        assert!(model.output_dim() >= data.num_classes(), "model has too few outputs");
        Self { model, data }
    }

    pub fn model(&self) -> &MlpModel {
        &self.model
    }

    pub fn data(&self) -> &LabeledDataset {
        &self.data
    }

    /// Fraction of samples classified correctly.
    pub fn accuracy(&self, w: &[f64]) -> f64 {
        let hits = (0..self.data.len())
            .filter(|&i| self.model.predict(w, self.data.input(i)) == self.data.label(i))
            .count();
        hits as f64 / self.data.len() as f64
    }
}

impl FiniteSumObjective for MlpObjective {
    fn dim(&self) -> usize {
        self.model.param_count()
    }
    fn component_count(&self) -> usize {
        self.data.len()
    }
    fn value_at(&self, w: &[f64], index: usize) -> f64 {
        self.model.sample_loss(w, self.data.input(index), self.data.label(index))
    }
    fn gradient_at(&self, w: &[f64], index: usize) -> Vec<f64> {
        let (_, g) = mlp_loss_and_gradient(&self.model, w, &self.data, &[index]);
        g
    }
}
