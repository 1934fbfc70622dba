//! Finite-difference gradient checks for circuits and whole models.
//!
//! Errors are `|a − n| / max(|a|, |n|, 1e-3)` for analytic `a` and central
//! difference `n`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{InputSpec, Model, ModelKind, ModelSpec};
use crate::error::Result;
use crate::nn::{one_hot, softmax_cross_entropy, RealTensor};
use crate::qnn::MembershipCircuit;

/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;

pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-3)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub checked: usize,
    pub max_rel_err: f64,
    /// Where the largest error occurred.
    pub worst: String,
}

impl CheckResult {
    fn new(name: &str) -> Self {
        Self { name: name.to_string(), checked: 0, max_rel_err: 0.0, worst: String::new() }
    }

    fn record(&mut self, err: f64, at: impl FnOnce() -> String) {
        self.checked += 1;
        if err > self.max_rel_err || self.worst.is_empty() {
            self.max_rel_err = self.max_rel_err.max(err);
            self.worst = at();
        }
    }
}

/// Parameter shift vs central differences on random single-qubit circuits
/// with 1 to `max_layers` layers and inputs in `[-1, 1]`.
pub fn check_circuits(cases: usize, max_layers: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut res = CheckResult::new("parameter-shift vs finite differences");
    for case in 0..cases {
        let layers = rng.gen_range(1..=max_layers.max(1));
        let circ = MembershipCircuit::<f64>::random(1, layers, &mut rng)?;
        let x: f64 = rng.gen_range(-1.0..=1.0);
        let grad = circ.param_shift_grad(x)?;
        for (p, &a) in grad.iter().enumerate() {
            let mut plus = circ.clone();
            plus.thetas_mut()[p] += FD_STEP;
            let mut minus = circ.clone();
            minus.thetas_mut()[p] -= FD_STEP;
            let n = (plus.eval(x)? - minus.eval(x)?) / (2.0 * FD_STEP);
            res.record(rel_err(a, n), || format!("case {case} (L={layers}, x={x:.6}) theta[{p}]: analytic {a:e}, numeric {n:e}"));
        }
    }
    Ok(res)
}

fn loss(model: &mut Model<f64>, x: &RealTensor<f64>, y: &RealTensor<f64>) -> Result<f64> {
    let logits = model.forward(x, false)?;
    Ok(softmax_cross_entropy(&logits, y)?.0)
}

/// Backprop vs central differences of the loss for every `stride`-th
/// parameter of `spec`, dropout off.
pub fn check_model(spec: ModelSpec, batch: usize, seed: u64, stride: usize) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfd);
    let mut model = Model::<f64>::new(spec.clone(), seed)?;
    let mut shape = vec![batch];
    shape.extend(spec.input.sample_shape());
    let n: usize = shape.iter().product();
    let x = RealTensor::new(shape, (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect())?;
    let labels: Vec<usize> = (0..batch).map(|_| rng.gen_range(0..spec.classes)).collect();
    let y = one_hot(&labels, spec.classes)?;

    model.zero_grad();
    let logits = model.forward(&x, false)?;
    let (_, g) = softmax_cross_entropy(&logits, &y)?;
    model.backward(&g)?;
    let mut analytic: Vec<(String, Vec<f64>)> = Vec::new();
    model.visit_named(&mut |name, t| analytic.push((name.to_string(), t.grad().map_or(vec![0.0; t.len()], <[f64]>::to_vec))));

    let mut res = CheckResult::new(&format!("{} end-to-end", spec.kind));
    let mut flat = 0usize;
    for (ti, (name, grads)) in analytic.iter().enumerate() {
        for (i, &a) in grads.iter().enumerate() {
            flat += 1;
            if (flat - 1) % stride.max(1) != 0 {
                continue;
            }
            let shifted = |delta: f64| -> Result<f64> {
                let mut m = model.clone();
                let mut ti_seen = 0;
                m.visit_named(&mut |_, t| {
                    if ti_seen == ti {
                        t.values_mut()[i] += delta;
                    }
                    ti_seen += 1;
                });
                m.sync_params();
                loss(&mut m, &x, &y)
            };
            let num = (shifted(FD_STEP)? - shifted(-FD_STEP)?) / (2.0 * FD_STEP);
            res.record(rel_err(a, num), || format!("{name}[{i}]: analytic {a:e}, numeric {num:e}"));
        }
    }
    Ok(res)
}

/// The tiny hybrid models used by the default end-to-end check:
/// 4 features, 2 classes, one re-uploading layer, hidden width 8.
pub fn tiny_specs() -> Vec<ModelSpec> {
    [ModelKind::Hqfnn, ModelKind::Fdnn]
        .into_iter()
        .map(|kind| {
            let mut s = ModelSpec::new(kind, InputSpec::Feature(4), 2);
            s.qnn_layers = 1;
            s.hidden = 8;
            s
        })
        .collect()
}
