use super::RealTensor;
use crate::error::{invalid_arg, Result};
use crate::Real;

/// Probabilities are clamped to `[PROB_CLAMP, 1 − PROB_CLAMP]` inside the loss.
pub const PROB_CLAMP: f64 = 1e-12;

/// Row-wise softmax of a `batch×k` tensor.
pub fn softmax<T: Real>(logits: &RealTensor<T>) -> Result<RealTensor<T>> {
    if logits.shape().len() != 2 {
        return Err(invalid_arg("softmax expects batch×k logits"));
    }
    let k = logits.shape()[1];
    let mut out = Vec::with_capacity(logits.len());
    for r in 0..logits.rows() {
        let row = &logits.values()[r * k..(r + 1) * k];
        let max = row.iter().fold(T::neg_infinity(), |m, &v| m.max(v));
        let exps: Vec<T> = row.iter().map(|&v| (v - max).exp()).collect();
        let total: T = exps.iter().copied().sum();
        out.extend(exps.into_iter().map(|e| e / total));
    }
    RealTensor::new(logits.shape().to_vec(), out)
}

/// One-hot rows for integer labels.
pub fn one_hot<T: Real>(labels: &[usize], k: usize) -> Result<RealTensor<T>> {
    let mut v = vec![T::zero(); labels.len() * k];
    for (i, &l) in labels.iter().enumerate() {
        if l >= k {
            return Err(invalid_arg(format!("label {l} outside [0, {k})")));
        }
        v[i * k + l] = T::one();
    }
    RealTensor::new(vec![labels.len(), k], v)
}

/// Softmax followed by the summed per-class binary cross-entropy
///
/// `C = (1/m) Σ_i Σ_j [−y_ij log ŷ_ij − (1 − y_ij) log(1 − ŷ_ij)]`,
///
/// with `ŷ` clamped away from 0 and 1. Returns the loss and its exact
/// gradient with respect to the logits.
pub fn softmax_cross_entropy<T: Real>(
    logits: &RealTensor<T>,
    labels: &RealTensor<T>,
) -> Result<(T, RealTensor<T>)> {
    if logits.shape() != labels.shape() {
        return Err(invalid_arg(format!(
            "logits {:?} and labels {:?} differ in shape",
            logits.shape(),
            labels.shape()
        )));
    }
    let probs = softmax(logits)?;
    let (m, k) = (logits.rows(), logits.shape()[1]);
    if m == 0 {
        return Err(invalid_arg("empty batch"));
    }
    let lo = T::lit(PROB_CLAMP);
    let hi = T::one() - lo;
    let inv_m = T::one() / T::from_usize(m).unwrap();
    let mut loss = T::zero();
    let mut grad = Vec::with_capacity(m * k);
    for r in 0..m {
        let y = &labels.values()[r * k..(r + 1) * k];
        let ones = y.iter().filter(|&&v| v == T::one()).count();
        let zeros = y.iter().filter(|&&v| v == T::zero()).count();
        if ones != 1 || zeros != k - 1 {
            return Err(invalid_arg(format!("label row {r} is not one-hot")));
        }
        let p = &probs.values()[r * k..(r + 1) * k];
        let mut dp = vec![T::zero(); k];
        for j in 0..k {
            let pc = p[j].max(lo).min(hi);
            loss = loss - y[j] * pc.ln() - (T::one() - y[j]) * (T::one() - pc).ln();
            if p[j] > lo && p[j] < hi {
                dp[j] = -y[j] / pc + (T::one() - y[j]) / (T::one() - pc);
            }
        }
        let dot: T = p.iter().zip(&dp).map(|(a, b)| *a * *b).sum();
        grad.extend((0..k).map(|i| p[i] * (dp[i] - dot) * inv_m));
    }
    Ok((loss * inv_m, RealTensor::new(vec![m, k], grad)?))
}
