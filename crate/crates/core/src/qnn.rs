//! Data re-uploading membership circuits.
//!
//! A circuit maps a real input `x` (used directly as a rotation angle) to a
//! membership degree `f_θ(x) = (⟨Z⟩ + 1) / 2 ∈ [0, 1]`.
//!
//! * one qubit, per layer: `R_y(x)`, `R_z(θ¹)`, `R_y(θ²)`, `R_z(θ³)`
//!   (3 angles per layer);
//! * `n ≥ 2` qubits, per layer: `R_y(x)` on every qubit, `R_y(θ_q)` on every
//!   qubit, then a CNOT chain `(0,1), (1,2), …` (n angles per layer).
//!
//! Gradients with respect to `x` are not provided; only the trainable angles
//! are differentiated.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex;

use rayon::prelude::*;

use crate::error::{invalid_arg, Error, Result};
use crate::qcore::{self, gates, Mat2, PureState};
use crate::Real;

/// One primitive operation of a compiled circuit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateOp<T> {
    Ry { qubit: usize, angle: T },
    Rz { qubit: usize, angle: T },
    Cnot { control: usize, target: usize },
}

impl<T: Real> GateOp<T> {
    pub fn apply_pure(&self, s: &mut PureState<T>) -> Result<()> {
        match *self {
            GateOp::Ry { qubit, angle } => s.apply_ry(qubit, angle),
            GateOp::Rz { qubit, angle } => s.apply_rz(qubit, angle),
            GateOp::Cnot { control, target } => s.apply_cnot(control, target),
        }
    }

    pub fn apply_mixed(&self, s: &mut qcore::MixedState<T>) -> Result<()> {
        match *self {
            GateOp::Ry { qubit, angle } => s.apply_ry(qubit, angle),
            GateOp::Rz { qubit, angle } => s.apply_rz(qubit, angle),
            GateOp::Cnot { control, target } => s.apply_cnot(control, target),
        }
    }

    /// Qubits the gate touches.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            GateOp::Ry { qubit, .. } | GateOp::Rz { qubit, .. } => vec![qubit],
            GateOp::Cnot { control, target } => vec![control, target],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipCircuit<T> {
    qubits: usize,
    layers: usize,
    thetas: Vec<T>,
    observable: usize,
}

impl<T: Real> MembershipCircuit<T> {
    /// Number of trainable angles for a `(qubits, layers)` circuit.
    pub fn param_count(qubits: usize, layers: usize) -> usize {
        if qubits == 1 {
            3 * layers
        } else {
            qubits * layers
        }
    }

    pub fn new(qubits: usize, layers: usize, thetas: Vec<T>) -> Result<Self> {
        qcore::check_qubits(qubits)?;
        if layers == 0 {
            return Err(invalid_arg("membership circuit needs at least one layer"));
        }
        let want = Self::param_count(qubits, layers);
        if thetas.len() != want {
            return Err(invalid_arg(format!(
                "{qubits}-qubit {layers}-layer circuit takes {want} angles, got {}",
                thetas.len()
            )));
        }
        if thetas.iter().any(|t| !t.is_finite()) {
            return Err(invalid_arg("circuit angles must be finite"));
        }
        Ok(Self { qubits, layers, thetas, observable: 0 })
    }

    pub fn zeros(qubits: usize, layers: usize) -> Result<Self> {
        Self::new(qubits, layers, vec![T::zero(); Self::param_count(qubits, layers)])
    }

    /// Angles drawn uniformly from `[-π, π)`.
    pub fn random<R: rand::Rng + ?Sized>(qubits: usize, layers: usize, rng: &mut R) -> Result<Self> {
        let thetas = (0..Self::param_count(qubits, layers))
            .map(|_| T::lit(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)))
            .collect();
        Self::new(qubits, layers, thetas)
    }

    /// Measure `Z` on a different qubit (default 0).
    pub fn with_observable(mut self, qubit: usize) -> Result<Self> {
        qcore::check_index(qubit, self.qubits)?;
        self.observable = qubit;
        Ok(self)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn observable(&self) -> usize {
        self.observable
    }

    pub fn thetas(&self) -> &[T] {
        &self.thetas
    }

    pub fn set_thetas(&mut self, thetas: &[T]) -> Result<()> {
        if thetas.len() != self.thetas.len() {
            return Err(invalid_arg("angle vector length mismatch"));
        }
        if thetas.iter().any(|t| !t.is_finite()) {
            return Err(invalid_arg("circuit angles must be finite"));
        }
        self.thetas.copy_from_slice(thetas);
        Ok(())
    }

    /// Mutable access for optimizers. Angles must stay finite.
    pub fn thetas_mut(&mut self) -> &mut [T] {
        &mut self.thetas
    }

    /// The gate list realizing `U(x, θ)`, in application order.
    pub fn gate_sequence(&self, x: T) -> Vec<GateOp<T>> {
        let n = self.qubits;
        let mut ops = Vec::new();
        for l in 0..self.layers {
            if n == 1 {
                let t = &self.thetas[3 * l..3 * l + 3];
                ops.push(GateOp::Ry { qubit: 0, angle: x });
                ops.push(GateOp::Rz { qubit: 0, angle: t[0] });
                ops.push(GateOp::Ry { qubit: 0, angle: t[1] });
                ops.push(GateOp::Rz { qubit: 0, angle: t[2] });
            } else {
                for q in 0..n {
                    ops.push(GateOp::Ry { qubit: q, angle: x });
                }
                for q in 0..n {
                    ops.push(GateOp::Ry { qubit: q, angle: self.thetas[l * n + q] });
                }
                for q in 1..n {
                    ops.push(GateOp::Cnot { control: q - 1, target: q });
                }
            }
        }
        ops
    }

    /// Output state `U(x, θ)|0…0⟩`.
    pub fn state(&self, x: T) -> Result<PureState<T>> {
        if !x.is_finite() {
            return Err(Error::InvalidInput("circuit input must be finite".into()));
        }
        let mut s = PureState::zero(self.qubits)?;
        for op in self.gate_sequence(x) {
            op.apply_pure(&mut s)?;
        }
        Ok(s)
    }

    fn membership_from_state(&self, x: T) -> Result<T> {
        let z = self.state(x)?.expectation_z(self.observable)?;
        Ok(((z + T::one()) * T::half()).max(T::zero()).min(T::one()))
    }

    /// Single-qubit membership value.
    pub fn eval_membership(&self, x: T) -> Result<T> {
        if self.qubits != 1 {
            return Err(Error::WrongCircuitKind(format!(
                "eval_membership needs a 1-qubit circuit, got {} qubits",
                self.qubits
            )));
        }
        self.membership_from_state(x)
    }

    /// Multi-qubit membership value.
    pub fn eval_membership_multi(&self, x: T) -> Result<T> {
        if self.qubits < 2 {
            return Err(Error::WrongCircuitKind(
                "eval_membership_multi needs at least 2 qubits".into(),
            ));
        }
        self.membership_from_state(x)
    }

    /// Dispatches to the single- or multi-qubit evaluation.
    pub fn eval(&self, x: T) -> Result<T> {
        self.membership_from_state(x)
    }

    /// `∂f/∂θ_i = ½ (f(θ_i + π/2) − f(θ_i − π/2))` for every angle.
    pub fn param_shift_grad(&self, x: T) -> Result<Vec<T>> {
        let shift = T::lit(FRAC_PI_2);
        let mut probe = self.clone();
        let mut grad = Vec::with_capacity(self.thetas.len());
        for i in 0..self.thetas.len() {
            let orig = self.thetas[i];
            probe.thetas[i] = orig + shift;
            let plus = probe.eval(x)?;
            probe.thetas[i] = orig - shift;
            let minus = probe.eval(x)?;
            probe.thetas[i] = orig;
            grad.push((plus - minus) * T::half());
        }
        Ok(grad)
    }

    /// Elementwise evaluation, parallel over inputs, order preserved.
    pub fn batch_eval(&self, xs: &[T]) -> Result<Vec<T>> {
        xs.par_iter().map(|&x| self.eval(x)).collect()
    }

    /// Precompiled form for fast repeated single-qubit evaluation.
    pub fn compile(&self) -> Option<CompiledQubit<T>> {
        CompiledQubit::new(self)
    }
}

/// A single-qubit membership circuit with its trainable blocks pre-multiplied.
///
/// Each layer is `W_l · R_y(x)` with `W_l = R_z(θ³) R_y(θ²) R_z(θ¹)`, so an
/// evaluation costs two 2×2 products per layer plus one `sin_cos` for the
/// input. Shifted blocks for the parameter-shift rule are precomputed too.
#[derive(Clone, Debug)]
pub struct CompiledQubit<T> {
    blocks: Vec<Mat2<T>>,
    /// For angle `i`: blocks of its layer with `θ_i ± π/2`.
    shifted: Vec<(Mat2<T>, Mat2<T>)>,
}

fn block<T: Real>(t: &[T]) -> Mat2<T> {
    let a = gates::rz_matrix(t[0]);
    let b = gates::ry_matrix(t[1]);
    let c = gates::rz_matrix(t[2]);
    gates::mat2_mul(&c, &gates::mat2_mul(&b, &a))
}

impl<T: Real> CompiledQubit<T> {
    fn new(circ: &MembershipCircuit<T>) -> Option<Self> {
        if circ.qubits != 1 {
            return None;
        }
        let shift = T::lit(FRAC_PI_2);
        let blocks = circ.thetas.chunks(3).map(block).collect();
        let mut shifted = Vec::with_capacity(circ.thetas.len());
        for (i, _) in circ.thetas.iter().enumerate() {
            let l = i / 3;
            let mut t = [circ.thetas[3 * l], circ.thetas[3 * l + 1], circ.thetas[3 * l + 2]];
            let orig = t[i % 3];
            t[i % 3] = orig + shift;
            let plus = block(&t);
            t[i % 3] = orig - shift;
            let minus = block(&t);
            shifted.push((plus, minus));
        }
        Some(Self { blocks, shifted })
    }

    pub fn num_params(&self) -> usize {
        self.shifted.len()
    }

    #[inline]
    fn run(&self, enc: &Mat2<T>, swap: Option<(usize, &Mat2<T>)>) -> T {
        let mut v = [Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero())];
        for (l, b) in self.blocks.iter().enumerate() {
            v = gates::mat2_apply(enc, v);
            let w = match swap {
                Some((sl, m)) if sl == l => m,
                _ => b,
            };
            v = gates::mat2_apply(w, v);
        }
        let z = v[0].norm_sqr() - v[1].norm_sqr();
        ((z + T::one()) * T::half()).max(T::zero()).min(T::one())
    }

    pub fn eval(&self, x: T) -> T {
        self.run(&gates::ry_matrix(x), None)
    }

    /// Membership value and its parameter-shift gradient, written into `grad`.
    pub fn eval_with_grad(&self, x: T, grad: &mut [T]) -> T {
        let enc = gates::ry_matrix(x);
        for (i, (plus, minus)) in self.shifted.iter().enumerate() {
            let l = i / 3;
            grad[i] = (self.run(&enc, Some((l, plus))) - self.run(&enc, Some((l, minus)))) * T::half();
        }
        self.run(&enc, None)
    }
}
