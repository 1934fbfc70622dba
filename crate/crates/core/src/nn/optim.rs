use crate::error::{invalid_arg, Result};
use crate::Real;

/// Plain SGD learning-rate state with milestone step decay.
///
/// Epochs are counted from 0; the rate is multiplied by `decay_factor` once
/// for every milestone `m` with `epoch >= m`.
#[derive(Clone, Debug, PartialEq)]
pub struct SgdState {
    pub lr: f64,
    pub initial_lr: f64,
    pub decay_factor: f64,
    pub milestones: Vec<usize>,
    applied: usize,
}

impl SgdState {
    pub fn new(initial_lr: f64, decay_factor: f64, mut milestones: Vec<usize>) -> Result<Self> {
        if !(initial_lr > 0.0 && initial_lr.is_finite()) {
            return Err(invalid_arg(format!("learning rate {initial_lr} must be positive")));
        }
        if !(decay_factor > 0.0 && decay_factor < 1.0) {
            return Err(invalid_arg(format!("decay factor {decay_factor} outside (0, 1)")));
        }
        milestones.sort_unstable();
        milestones.dedup();
        Ok(Self { lr: initial_lr, initial_lr, decay_factor, milestones, applied: 0 })
    }

    /// One milestone at `round(fraction × epochs)`.
    pub fn with_fractional_milestone(initial_lr: f64, decay_factor: f64, fraction: f64, epochs: usize) -> Result<Self> {
        let m = (fraction * epochs as f64).round() as usize;
        Self::new(initial_lr, decay_factor, vec![m])
    }

    /// Number of milestones already applied.
    pub fn decays_applied(&self) -> usize {
        self.applied
    }

    /// Restores a saved state.
    pub fn restore(initial_lr: f64, decay_factor: f64, milestones: Vec<usize>, lr: f64, applied: usize) -> Result<Self> {
        let mut s = Self::new(initial_lr, decay_factor, milestones)?;
        if applied > s.milestones.len() || !(lr > 0.0) {
            return Err(invalid_arg("inconsistent optimizer state"));
        }
        s.lr = lr;
        s.applied = applied;
        Ok(s)
    }

    /// Apply every milestone that `epoch` has reached and not yet applied.
    pub fn begin_epoch(&mut self, epoch: usize) {
        while self.applied < self.milestones.len() && epoch >= self.milestones[self.applied] {
            self.lr *= self.decay_factor;
            self.applied += 1;
        }
    }
}

/// `p ← p − lr · g`.
pub fn sgd_step<T: Real>(params: &mut [T], grads: &[T], state: &SgdState) -> Result<()> {
    if params.len() != grads.len() {
        return Err(invalid_arg(format!(
            "{} parameters but {} gradients",
            params.len(),
            grads.len()
        )));
    }
    let lr = T::lit(state.lr);
    for (p, g) in params.iter_mut().zip(grads) {
        *p = *p - lr * *g;
    }
    Ok(())
}
