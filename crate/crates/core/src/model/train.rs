use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{argmax_rows, Model};
use crate::data::{batches, BatchPlan, Dataset};
use crate::error::{invalid_arg, Error, Result};
use crate::metrics::{ConfusionMatrix, MacroMetrics};
use crate::nn::{sgd_step, softmax_cross_entropy, SgdState};
use crate::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch: usize,
    pub lr: f64,
    pub decay: f64,
    /// The single decay milestone sits at `round(milestone_fraction × epochs)`.
    pub milestone_fraction: f64,
    pub seed: u64,
    /// Share of the training data held out for the validation trace.
    pub val_fraction: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { epochs: 200, batch: 128, lr: 0.01, decay: 0.1, milestone_fraction: 0.58, seed: 0, val_fraction: 0.1 }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch == 0 {
            return Err(invalid_arg("epochs and batch size must be positive"));
        }
        if !(self.milestone_fraction >= 0.0 && self.milestone_fraction.is_finite()) {
            return Err(invalid_arg("milestone fraction must be non-negative"));
        }
        if !(self.val_fraction > 0.0 && self.val_fraction < 1.0) {
            return Err(invalid_arg(format!("validation fraction {} outside (0, 1)", self.val_fraction)));
        }
        SgdState::new(self.lr, self.decay, vec![]).map(|_| ())
    }

    pub fn sgd_state(&self) -> Result<SgdState> {
        SgdState::with_fractional_milestone(self.lr, self.decay, self.milestone_fraction, self.epochs)
    }
}

/// One line of the training trace. Epochs are numbered from 1.
///
/// `train_acc` is measured on the training batches as they are seen (dropout
/// active); `val_acc` is a clean pass over the held-out split.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub train_acc: f64,
    pub val_acc: f64,
}

#[derive(Clone, Debug)]
pub struct TrainReport<T> {
    pub trace: Vec<EpochRecord>,
    pub sgd: SgdState,
    pub validation: Dataset<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub confusion: ConfusionMatrix,
    pub metrics: MacroMetrics,
    pub n_samples: usize,
}

/// Seeded `(train, validation)` split with at least one sample on each side.
/// Needs `ds.len() >= 2`.
pub fn holdout_split<T: Real>(ds: &Dataset<T>, fraction: f64, seed: u64) -> (Dataset<T>, Dataset<T>) {
    let n = ds.len();
    let n_val = ((n as f64 * fraction).round() as usize).clamp(1, n - 1);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_7a11));
    let (val, tr) = order.split_at_mut(n_val);
    val.sort_unstable();
    tr.sort_unstable();
    (ds.subset(tr), ds.subset(val))
}

fn check_labels<T: Real>(model: &Model<T>, ds: &Dataset<T>) -> Result<()> {
    let k = model.spec().classes;
    if let Some((i, l)) = ds.labels.iter().enumerate().find(|(_, &l)| l >= k) {
        return Err(invalid_arg(format!("label {l} of sample {i} outside [0, {k})")));
    }
    Ok(())
}

/// Mini-batch SGD over a 90/10 train/validation split of `ds`.
pub fn train<T: Real>(model: &mut Model<T>, ds: &Dataset<T>, cfg: &TrainConfig) -> Result<TrainReport<T>> {
    cfg.validate()?;
    if ds.len() < 2 {
        return Err(invalid_arg(format!("training needs at least 2 samples, got {}", ds.len())));
    }
    check_labels(model, ds)?;
    let (train_ds, val_ds) = holdout_split(ds, cfg.val_fraction, cfg.seed);
    let plan = BatchPlan::new(cfg.seed, cfg.batch)?;
    let mut sgd = cfg.sgd_state()?;
    let mut trace = Vec::with_capacity(cfg.epochs);
    for e in 0..cfg.epochs {
        let epoch = e + 1;
        sgd.begin_epoch(e);
        let (mut loss_sum, mut correct) = (0.0, 0usize);
        for batch in batches(&train_ds, &plan, e) {
            model.zero_grad();
            let logits = model.forward(&batch.inputs, true)?;
            let (loss, grad) = softmax_cross_entropy(&logits, &batch.targets)?;
            let loss = loss.as_f64();
            if !loss.is_finite() {
                return Err(Error::NumericFailure { epoch, reason: format!("loss became {loss}") });
            }
            if logits.values().iter().any(|v| !v.is_finite()) {
                return Err(Error::NumericFailure { epoch, reason: "logits became non-finite".into() });
            }
            model.backward(&grad)?;
            let mut step_err = None;
            model.visit_named(&mut |name, t| {
                let (v, g) = t.values_and_grad_mut();
                if let Err(err) = sgd_step(v, g, &sgd) {
                    step_err.get_or_insert(invalid_arg(format!("{name}: {err}")));
                } else if v.iter().any(|p| !p.is_finite()) {
                    step_err.get_or_insert(Error::NumericFailure { epoch, reason: format!("parameter {name} became non-finite") });
                }
            });
            if let Some(err) = step_err {
                return Err(err);
            }
            model.sync_params();
            loss_sum += loss * batch.labels.len() as f64;
            correct += argmax_rows(&logits).iter().zip(&batch.labels).filter(|(p, l)| p == l).count();
        }
        let val = evaluate(model, &val_ds)?;
        trace.push(EpochRecord {
            epoch,
            loss: loss_sum / train_ds.len() as f64,
            train_acc: correct as f64 / train_ds.len() as f64,
            val_acc: val.metrics.accuracy,
        });
    }
    Ok(TrainReport { trace, sgd, validation: val_ds })
}

/// Size of the inference chunks used by [`evaluate`].
const EVAL_CHUNK: usize = 256;

/// Dropout-free predictions over `ds`, chunked and assembled in order.
pub fn predict_all<T: Real>(model: &Model<T>, ds: &Dataset<T>) -> Result<Vec<usize>> {
    let idx: Vec<usize> = (0..ds.len()).collect();
    let parts: Vec<Vec<usize>> = idx
        .par_chunks(EVAL_CHUNK)
        .map(|c| model.predict(&ds.gather(c)))
        .collect::<Result<_>>()?;
    Ok(parts.concat())
}

pub fn evaluate<T: Real>(model: &Model<T>, ds: &Dataset<T>) -> Result<Evaluation> {
    if ds.is_empty() {
        return Err(invalid_arg("cannot evaluate on an empty dataset"));
    }
    check_labels(model, ds)?;
    let pred = predict_all(model, ds)?;
    let confusion = ConfusionMatrix::from_predictions(model.spec().classes, &ds.labels, &pred)?;
    let metrics = confusion.macro_metrics()?;
    Ok(Evaluation { confusion, metrics, n_samples: ds.len() })
}
