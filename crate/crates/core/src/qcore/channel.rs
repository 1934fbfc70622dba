use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use super::gates::{self, dagger, mat2_mul, scale, Mat2};
use crate::error::{invalid_arg, Error, Result};
use crate::Real;

/// Which single-qubit noise model a [`KrausChannel`] realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    /// Energy decay toward `|0⟩`.
    AmplitudeDamping,
    /// Kraus set `{√(1−γ) I, √(γ/3) X, √(γ/3) Z, √(γ/3) Y}`; shrinks the
    /// Bloch vector by `1 − 4γ/3`.
    Depolarizing,
    /// `ρ ↦ (1−γ) ρ + γ I/2`; shrinks the Bloch vector by `1 − γ`.
    MixingDepolarizing,
}

impl ChannelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChannelKind::AmplitudeDamping => "ad",
            ChannelKind::Depolarizing => "dp",
            ChannelKind::MixingDepolarizing => "mix_dp",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "ad" | "amplitude_damping" => Ok(ChannelKind::AmplitudeDamping),
            "dp" | "depolarizing" => Ok(ChannelKind::Depolarizing),
            "mix_dp" | "mixdp" => Ok(ChannelKind::MixingDepolarizing),
            other => Err(invalid_arg(format!("unknown channel '{other}' (expected ad, dp or mix_dp)"))),
        }
    }
}

/// Single-qubit channel in Kraus form.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel<T> {
    kind: ChannelKind,
    gamma: T,
    operators: Vec<Mat2<T>>,
}

impl<T: Real> KrausChannel<T> {
    pub fn new(kind: ChannelKind, gamma: T) -> Result<Self> {
        if !(gamma >= T::zero() && gamma <= T::one()) {
            return Err(invalid_arg(format!("noise probability {gamma} outside [0, 1]")));
        }
        let z = Complex::new(T::zero(), T::zero());
        let operators = match kind {
            ChannelKind::AmplitudeDamping => {
                let keep = Complex::new((T::one() - gamma).sqrt(), T::zero());
                let decay = Complex::new(gamma.sqrt(), T::zero());
                let one = Complex::new(T::one(), T::zero());
                vec![[[one, z], [z, keep]], [[z, decay], [z, z]]]
            }
            ChannelKind::Depolarizing => {
                let p = (gamma / T::lit(3.0)).sqrt();
                vec![
                    scale(&gates::identity(), (T::one() - gamma).sqrt()),
                    scale(&gates::pauli_x(), p),
                    scale(&gates::pauli_z(), p),
                    scale(&gates::pauli_y(), p),
                ]
            }
            ChannelKind::MixingDepolarizing => {
                let p = (gamma / T::lit(4.0)).sqrt();
                vec![
                    scale(&gates::identity(), (T::one() - T::lit(0.75) * gamma).sqrt()),
                    scale(&gates::pauli_x(), p),
                    scale(&gates::pauli_y(), p),
                    scale(&gates::pauli_z(), p),
                ]
            }
        };
        Ok(Self { kind, gamma, operators })
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn operators(&self) -> &[Mat2<T>] {
        &self.operators
    }

    /// Largest entry of `|Σ E_k†E_k − I|`.
    pub fn completeness_error(&self) -> T {
        let mut sum = [[Complex::new(T::zero(), T::zero()); 2]; 2];
        for e in &self.operators {
            let p = mat2_mul(&dagger(e), e);
            for i in 0..2 {
                for j in 0..2 {
                    sum[i][j] = sum[i][j] + p[i][j];
                }
            }
        }
        let id = gates::identity::<T>();
        let mut worst = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((sum[i][j] - id[i][j]).norm());
            }
        }
        worst
    }
}
