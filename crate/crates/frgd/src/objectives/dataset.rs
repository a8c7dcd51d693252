//! Labeled datasets, synthetic generators, and the CSV interchange format
//! (`f0,...,fk,label`, one row per sample).

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use thiserror::Error;

use crate::rng::SplitMix64;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("inputs and labels have different lengths ({inputs} vs {labels})")]
    LengthMismatch { inputs: usize, labels: usize },
    #[error("label {label} out of range for {classes} classes (sample {index})")]
    LabelOutOfRange { label: usize, classes: usize, index: usize },
    #[error("sample {index} has {got} features, expected {expected}")]
    RaggedFeatures { index: usize, got: usize, expected: usize },
    #[error("coordinate {value} of sample {index} outside [0, 1] in unit-range dataset")]
    OutOfUnitRange { value: f64, index: usize },
    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Feature vectors with class labels. `unit_range` marks image-style data
/// whose coordinates must stay in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    inputs: Vec<Vec<f64>>,
    labels: Vec<usize>,
    num_classes: usize,
    unit_range: bool,
}

impl LabeledDataset {
    pub fn new(
        inputs: Vec<Vec<f64>>,
        labels: Vec<usize>,
        num_classes: usize,
    ) -> Result<Self, DatasetError> {
        Self::build(inputs, labels, num_classes, false)
    }

    /// Like [`new`](Self::new) but additionally enforces coordinates in [0, 1].
    pub fn new_unit_range(
        inputs: Vec<Vec<f64>>,
        labels: Vec<usize>,
        num_classes: usize,
    ) -> Result<Self, DatasetError> {
        Self::build(inputs, labels, num_classes, true)
    }

    fn build(
        inputs: Vec<Vec<f64>>,
        labels: Vec<usize>,
        num_classes: usize,
        unit_range: bool,
    ) -> Result<Self, DatasetError> {
        if inputs.len() != labels.len() {
            return Err(DatasetError::LengthMismatch {
                inputs: inputs.len(),
                labels: labels.len(),
            });
        }
        assert!(!inputs.is_empty(), "dataset must be nonempty");
        let expected = inputs[0].len();
        for (index, x) in inputs.iter().enumerate() {
            if x.len() != expected {
                return Err(DatasetError::RaggedFeatures { index, got: x.len(), expected });
            }
            if unit_range {
                if let Some(&value) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                    return Err(DatasetError::OutOfUnitRange { value, index });
                }
            }
        }
        for (index, &label) in labels.iter().enumerate() {
            if label >= num_classes {
                return Err(DatasetError::LabelOutOfRange { label, classes: num_classes, index });
            }
        }
        Ok(Self { inputs, labels, num_classes, unit_range })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.inputs[0].len()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn is_unit_range(&self) -> bool {
        self.unit_range
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<(), DatasetError> {
        let header: Vec<String> = (0..self.feature_dim()).map(|j| format!("f{j}")).collect();
        writeln!(w, "{},label", header.join(","))?;
        for (x, &y) in self.inputs.iter().zip(&self.labels) {
            let fields: Vec<String> = x.iter().map(|v| crate::harness::format_float(*v)).collect();
            writeln!(w, "{},{}", fields.join(","), y)?;
        }
        Ok(())
    }

    pub fn to_csv_file(&self, path: impl AsRef<Path>) -> Result<(), DatasetError> {
        self.write_csv(File::create(path)?)
    }

    pub fn from_csv_file(path: impl AsRef<Path>) -> Result<Self, DatasetError> {
        let reader = BufReader::new(File::open(path)?);
        let mut lines = reader.lines().enumerate();
        let (_, header) = lines.next().ok_or(DatasetError::Csv {
            line: 1,
            message: "missing header".into(),
        })?;
        let header = header?;
        let columns: Vec<&str> = header.trim_end().split(',').collect();
        if columns.last() != Some(&"label") || columns.len() < 2 {
            return Err(DatasetError::Csv {
                line: 1,
                message: format!("expected header f0,...,fk,label, got {header:?}"),
            });
        }
        let dim = columns.len() - 1;
        let mut inputs = Vec::new();
        let mut labels = Vec::new();
        let mut max_label = 0usize;
        for (idx, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim_end().split(',').collect();
            if fields.len() != dim + 1 {
                return Err(DatasetError::Csv {
                    line: idx + 1,
                    message: format!("expected {} fields, got {}", dim + 1, fields.len()),
                });
            }
            let mut x = Vec::with_capacity(dim);
            for f in &fields[..dim] {
                x.push(f.parse::<f64>().map_err(|e| DatasetError::Csv {
                    line: idx + 1,
                    message: format!("bad float {f:?}: {e}"),
                })?);
            }
            let y: usize = fields[dim].parse().map_err(|e| DatasetError::Csv {
                line: idx + 1,
                message: format!("bad label {:?}: {e}", fields[dim]),
            })?;
            max_label = max_label.max(y);
            inputs.push(x);
            labels.push(y);
        }
        Self::new(inputs, labels, max_label + 1)
    }
}

/// Two interleaved half-circles with Gaussian noise, `n` samples split
/// evenly between the classes.
pub fn two_moons(n: usize, noise: f64, seed: u64) -> LabeledDataset {
    assert!(n >= 2, "need at least one sample per class");
    let mut rng = SplitMix64::new(seed);
    let mut inputs = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let half = n / 2;
    for i in 0..n {
        let outer = i < half;
        let count = if outer { half } else { n - half };
        let k = if outer { i } else { i - half };
        let t = std::f64::consts::PI * k as f64 / (count.max(2) - 1) as f64;
        let (mut x, mut y) = if outer {
            (t.cos(), t.sin())
        } else {
            (1.0 - t.cos(), 0.5 - t.sin())
        };
        x += noise * rng.next_normal();
        y += noise * rng.next_normal();
        inputs.push(vec![x, y]);
        labels.push(usize::from(!outer));
    }
    LabeledDataset::new(inputs, labels, 2).expect("generator produces valid data")
}

/// Isotropic Gaussian blobs: `classes` centers drawn uniformly in
/// `[-1, 1]^dim`, `n` samples assigned round-robin.
pub fn gaussian_blobs(n: usize, dim: usize, classes: usize, spread: f64, seed: u64) -> LabeledDataset {
    assert!(classes >= 2 && n >= classes, "need at least one sample per class");
    let mut rng = SplitMix64::new(seed);
    let centers: Vec<Vec<f64>> = (0..classes)
        .map(|_| (0..dim).map(|_| rng.uniform(-1.0, 1.0)).collect())
        .collect();
    let mut inputs = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % classes;
        let x: Vec<f64> = centers[c]
            .iter()
            .map(|&m| m + spread * rng.next_normal())
            .collect();
        inputs.push(x);
        labels.push(c);
    }
    LabeledDataset::new(inputs, labels, classes).expect("generator produces valid data")
}
