//! Confusion matrix and classification metrics.

use std::fmt::Write as _;

use crate::error::{invalid_arg, Result};

/// Rows are true classes, columns predicted classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfusionMatrix {
    k: usize,
    counts: Vec<u64>,
}

/// Accuracy and macro-averaged scores. F1 is the harmonic mean of the two
/// macros, not the mean of per-class F1s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MacroMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl ConfusionMatrix {
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(invalid_arg(format!("confusion matrix needs at least 2 classes, got {k}")));
        }
        Ok(Self { k, counts: vec![0; k * k] })
    }

    pub fn from_predictions(k: usize, truth: &[usize], predicted: &[usize]) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(invalid_arg("label and prediction lists differ in length"));
        }
        let mut cm = Self::new(k)?;
        for (&t, &p) in truth.iter().zip(predicted) {
            cm.accumulate(t, p)?;
        }
        Ok(cm)
    }

    pub fn num_classes(&self) -> usize {
        self.k
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth * self.k + predicted]
    }

    pub fn row(&self, truth: usize) -> &[u64] {
        &self.counts[truth * self.k..(truth + 1) * self.k]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.k).map(|i| self.get(i, i)).sum()
    }

    pub fn accumulate(&mut self, truth: usize, predicted: usize) -> Result<()> {
        if truth >= self.k || predicted >= self.k {
            return Err(invalid_arg(format!(
                "label pair ({truth}, {predicted}) outside [0, {})",
                self.k
            )));
        }
        self.counts[truth * self.k + predicted] += 1;
        Ok(())
    }

    /// Elementwise sum, for combining evaluation shards.
    pub fn merge(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if other.k != self.k {
            return Err(invalid_arg("cannot merge confusion matrices of different sizes"));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }

    /// One-vs-rest `(precision, recall)` for `class`; 0 when undefined.
    pub fn binary_metrics(&self, class: usize) -> (f64, f64) {
        let tp = self.get(class, class);
        let predicted: u64 = (0..self.k).map(|t| self.get(t, class)).sum();
        let actual: u64 = self.row(class).iter().sum();
        (ratio(tp, predicted), ratio(tp, actual))
    }

    pub fn macro_metrics(&self) -> Result<MacroMetrics> {
        let total = self.total();
        if total == 0 {
            return Err(invalid_arg("no samples in confusion matrix"));
        }
        let (mut p, mut r) = (0.0, 0.0);
        for i in 0..self.k {
            let (pi, ri) = self.binary_metrics(i);
            p += pi;
            r += ri;
        }
        p /= self.k as f64;
        r /= self.k as f64;
        let f1 = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
        Ok(MacroMetrics { accuracy: ratio(self.trace(), total), precision: p, recall: r, f1 })
    }

    /// CSV with a header of predicted-class names and one row per true class.
    pub fn to_csv(&self, class_names: Option<&[String]>) -> Result<String> {
        let names: Vec<String> = match class_names {
            Some(n) if n.len() == self.k => n.to_vec(),
            Some(n) => return Err(invalid_arg(format!("{} class names for {} classes", n.len(), self.k))),
            None => (0..self.k).map(|i| i.to_string()).collect(),
        };
        let mut out = String::from("true\\predicted");
        for n in &names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (t, name) in names.iter().enumerate() {
            out.push_str(name);
            for c in self.row(t) {
                let _ = write!(out, ",{c}");
            }
            out.push('\n');
        }
        Ok(out)
    }
}
