use rand::Rng;

use crate::error::{invalid_arg, Result};
use crate::Real;

/// Symmetric uniform sampler `U[−bound, bound]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformInit {
    pub bound: f64,
}

impl UniformInit {
    pub fn sample<T: Real, R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<T> {
        (0..n)
            .map(|_| T::lit(rng.gen_range(-self.bound..=self.bound)))
            .collect()
    }
}

/// `U[−1/√fan_in, 1/√fan_in]`, used for fully connected layers (biases start at 0).
pub fn init_uniform_inverse_sqrt(fan_in: usize) -> Result<UniformInit> {
    if fan_in == 0 {
        return Err(invalid_arg("fan_in must be at least 1"));
    }
    Ok(UniformInit { bound: 1.0 / (fan_in as f64).sqrt() })
}

/// Kaiming uniform for ReLU networks: `U[−√(6/fan_in), √(6/fan_in)]`.
pub fn init_kaiming_uniform(fan_in: usize) -> Result<UniformInit> {
    if fan_in == 0 {
        return Err(invalid_arg("fan_in must be at least 1"));
    }
    Ok(UniformInit { bound: (6.0 / fan_in as f64).sqrt() })
}
