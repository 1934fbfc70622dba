//! Noisy simulation of membership circuits and fidelity sweeps.
//!
//! The noiseless reference is the same circuit run through the density
//! matrix path with no channel; fidelities compare it with the noisy output.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{invalid_arg, Error, Result};
use crate::qcore::{fidelity, ChannelKind, KrausChannel, MixedState, PureState};
use crate::qnn::MembershipCircuit;
use crate::Real;

pub const DEFAULT_GAMMAS: [f64; 5] = [0.01, 0.03, 0.05, 0.07, 0.1];

/// Published mean fidelities for the default gammas.
pub const REFERENCE_AD: [f64; 5] = [0.9964, 0.9894, 0.9823, 0.9751, 0.9644];
pub const REFERENCE_DP: [f64; 5] = [0.9950, 0.9850, 0.9750, 0.9650, 0.9500];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Placement {
    /// The channel acts on every qubit a gate touched, after that gate.
    AfterEachGate,
    /// The channel acts once on every qubit after the last gate.
    EndOfCircuit,
}

impl Placement {
    pub fn as_str(self) -> &'static str {
        match self {
            Placement::AfterEachGate => "after_each_gate",
            Placement::EndOfCircuit => "end_of_circuit",
        }
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Placement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "after_each_gate" | "each" | "gate" => Ok(Placement::AfterEachGate),
            "end_of_circuit" | "end" => Ok(Placement::EndOfCircuit),
            other => Err(invalid_arg(format!("unknown placement '{other}' (after_each_gate|end_of_circuit)"))),
        }
    }
}

/// Density-matrix run of `circ` at input `x` with `channel` inserted per
/// `placement`. A zero-strength channel is skipped, so γ = 0 reproduces the
/// noiseless path exactly.
pub fn simulate_noisy<T: Real>(
    circ: &MembershipCircuit<T>,
    x: T,
    channel: &KrausChannel<T>,
    placement: Placement,
) -> Result<MixedState<T>> {
    if !x.is_finite() {
        return Err(Error::InvalidInput("circuit input must be finite".into()));
    }
    let noisy = channel.gamma() != T::zero();
    let mut rho = PureState::zero(circ.qubits())?.to_mixed();
    for op in circ.gate_sequence(x) {
        op.apply_mixed(&mut rho)?;
        if noisy && placement == Placement::AfterEachGate {
            for q in op.qubits() {
                rho.apply_channel(channel, q)?;
            }
        }
    }
    if noisy && placement == Placement::EndOfCircuit {
        for q in 0..circ.qubits() {
            rho.apply_channel(channel, q)?;
        }
    }
    Ok(rho)
}

fn noiseless<T: Real>(circ: &MembershipCircuit<T>, x: T) -> Result<MixedState<T>> {
    let mut rho = PureState::zero(circ.qubits())?.to_mixed();
    for op in circ.gate_sequence(x) {
        op.apply_mixed(&mut rho)?;
    }
    Ok(rho)
}

/// Fidelity between the noiseless and noisy outputs, in `[0, 1]`.
pub fn circuit_fidelity<T: Real>(
    circ: &MembershipCircuit<T>,
    x: T,
    kind: ChannelKind,
    gamma: T,
    placement: Placement,
) -> Result<T> {
    let channel = KrausChannel::new(kind, gamma)?;
    fidelity(&noiseless(circ, x)?, &simulate_noisy(circ, x, &channel, placement)?)
}

#[derive(Clone, Debug)]
pub struct SweepConfig<T> {
    pub channel: ChannelKind,
    pub gammas: Vec<f64>,
    pub x_samples: usize,
    pub circuit: MembershipCircuit<T>,
    pub placement: Placement,
}

impl<T: Real> SweepConfig<T> {
    /// Default gammas, 100 inputs, end-of-circuit placement.
    pub fn new(channel: ChannelKind, circuit: MembershipCircuit<T>) -> Self {
        Self { channel, gammas: DEFAULT_GAMMAS.to_vec(), x_samples: 100, circuit, placement: Placement::EndOfCircuit }
    }

    pub fn validate(&self) -> Result<()> {
        if self.x_samples == 0 {
            return Err(invalid_arg("need at least one input sample"));
        }
        if self.gammas.is_empty() {
            return Err(invalid_arg("need at least one gamma"));
        }
        if let Some(g) = self.gammas.iter().find(|g| !(0.0..=1.0).contains(*g)) {
            return Err(invalid_arg(format!("gamma {g} outside [0, 1]")));
        }
        Ok(())
    }
}

/// `n` evenly spaced points covering `[-1, 1]` (just `0` when `n = 1`).
pub fn x_grid(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FidelityTable {
    pub channel: ChannelKind,
    pub placement: Placement,
    pub gammas: Vec<f64>,
    pub xs: Vec<f64>,
    /// `grid[g][i]` is the fidelity at `gammas[g]`, `xs[i]`.
    pub grid: Vec<Vec<f64>>,
    /// Arithmetic mean over `xs` per gamma.
    pub means: Vec<f64>,
}

impl FidelityTable {
    /// `gamma,x,fidelity` rows.
    pub fn grid_csv(&self) -> String {
        let mut out = String::from("gamma,x,fidelity\n");
        for (g, row) in self.gammas.iter().zip(&self.grid) {
            for (x, f) in self.xs.iter().zip(row) {
                let _ = writeln!(out, "{g:.6},{x:.6},{f:.6}");
            }
        }
        out
    }

    /// `gamma,mean_fidelity` rows.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("gamma,mean_fidelity\n");
        for (g, m) in self.gammas.iter().zip(&self.means) {
            let _ = writeln!(out, "{g:.6},{m:.6}");
        }
        out
    }
}

pub fn run_sweep<T: Real>(cfg: &SweepConfig<T>) -> Result<FidelityTable> {
    cfg.validate()?;
    let xs = x_grid(cfg.x_samples);
    let points: Vec<(usize, usize)> =
        (0..cfg.gammas.len()).flat_map(|g| (0..xs.len()).map(move |i| (g, i))).collect();
    let values: Vec<f64> = points
        .par_iter()
        .map(|&(g, i)| {
            circuit_fidelity(&cfg.circuit, T::lit(xs[i]), cfg.channel, T::lit(cfg.gammas[g]), cfg.placement)
                .map(|f| f.as_f64())
        })
        .collect::<Result<_>>()?;
    let grid: Vec<Vec<f64>> = values.chunks(xs.len()).map(<[f64]>::to_vec).collect();
    let means = grid.iter().map(|row| row.iter().sum::<f64>() / row.len() as f64).collect();
    Ok(FidelityTable { channel: cfg.channel, placement: cfg.placement, gammas: cfg.gammas.clone(), xs, grid, means })
}
