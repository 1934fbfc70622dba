use num_complex::Complex;

use super::gates::{self, Mat2};
use super::{check_index, check_qubits, state_tolerance, MixedState};
use crate::error::{invalid_arg, Result};
use crate::Real;

/// Normalized state vector of `n` qubits (length `2^n`).
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T> {
    n: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> PureState<T> {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_qubits(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(invalid_arg(format!("basis index {index} >= {dim}")));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[index] = Complex::new(T::one(), T::zero());
        Ok(Self { n, amps })
    }

    /// Wraps an amplitude vector, checking length and normalization.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(invalid_arg(format!("amplitude length {len} is not 2^n")));
        }
        let n = len.trailing_zeros() as usize;
        check_qubits(n)?;
        let norm: T = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - T::one()).abs() > state_tolerance::<T>() {
            return Err(invalid_arg(format!("state norm {norm} differs from 1")));
        }
        Ok(Self { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Apply an arbitrary single-qubit operator. The caller is responsible
    /// for it being unitary.
    pub fn apply_unitary(&mut self, qubit: usize, m: &Mat2<T>) -> Result<()> {
        check_index(qubit, self.n)?;
        gates::apply_1q(&mut self.amps, self.n, qubit, m);
        Ok(())
    }

    pub fn apply_ry(&mut self, qubit: usize, theta: T) -> Result<()> {
        if !theta.is_finite() {
            return Err(invalid_arg("rotation angle must be finite"));
        }
        self.apply_unitary(qubit, &gates::ry_matrix(theta))
    }

    pub fn apply_rz(&mut self, qubit: usize, theta: T) -> Result<()> {
        if !theta.is_finite() {
            return Err(invalid_arg("rotation angle must be finite"));
        }
        self.apply_unitary(qubit, &gates::rz_matrix(theta))
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        check_index(control, self.n)?;
        check_index(target, self.n)?;
        if control == target {
            return Err(invalid_arg("CNOT control and target must differ"));
        }
        gates::apply_cnot_raw(&mut self.amps, self.n, control, target);
        Ok(())
    }

    /// `⟨Z_q⟩`, in `[-1, 1]`.
    pub fn expectation_z(&self, qubit: usize) -> Result<T> {
        check_index(qubit, self.n)?;
        let e = gates::expectation_z_raw(&self.amps, self.n, qubit);
        Ok(e.max(-T::one()).min(T::one()))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.n != other.n {
            return Err(invalid_arg("inner product of states with different qubit counts"));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .fold(Complex::new(T::zero(), T::zero()), |acc, v| acc + v))
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_mixed(&self) -> MixedState<T> {
        let d = self.dim();
        let mut rho = Vec::with_capacity(d * d);
        for a in &self.amps {
            for b in &self.amps {
                rho.push(a * b.conj());
            }
        }
        MixedState::from_raw(self.n, rho)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn amps(s: &PureState<f64>) -> Vec<(f64, f64)> {
        s.amplitudes().iter().map(|c| (c.re, c.im)).collect()
    }

    #[test]
    fn ry_half_turn_flips() {
        let mut s = PureState::<f64>::zero(1).unwrap();
        s.apply_ry(0, PI).unwrap();
        let a = amps(&s);
        assert_abs_diff_eq!(a[0].0, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a[1].0, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ry_zero_is_identity() {
        let mut s = PureState::<f64>::zero(1).unwrap();
        s.apply_ry(0, 0.0).unwrap();
        assert_eq!(s, PureState::zero(1).unwrap());
    }

    #[test]
    fn ry_quarter_turn() {
        let mut s = PureState::<f64>::zero(1).unwrap();
        s.apply_ry(0, PI / 2.0).unwrap();
        let a = amps(&s);
        assert_abs_diff_eq!(a[0].0, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(a[1].0, FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn rz_on_basis_is_phase() {
        let theta = 1.3;
        let mut s = PureState::<f64>::zero(1).unwrap();
        s.apply_rz(0, theta).unwrap();
        let a = s.amplitudes()[0];
        assert_abs_diff_eq!(a.re, (theta / 2.0).cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(a.im, -(theta / 2.0).sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(a.norm_sqr(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rz_pi_on_plus_gives_minus_up_to_phase() {
        let h = Complex::new(FRAC_1_SQRT_2, 0.0);
        let mut s = PureState::from_amplitudes(vec![h, h]).unwrap();
        s.apply_rz(0, PI).unwrap();
        let minus = PureState::from_amplitudes(vec![h, -h]).unwrap();
        assert_abs_diff_eq!(s.inner(&minus).unwrap().norm_sqr(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn cnot_truth_table_with_qubit0_as_msb() {
        // |10⟩ is basis index 2 because qubit 0 is the high bit.
        let mut s = PureState::<f64>::basis(2, 0b10).unwrap();
        s.apply_cnot(0, 1).unwrap();
        assert_eq!(s, PureState::basis(2, 0b11).unwrap());
        let mut s = PureState::<f64>::basis(2, 0b00).unwrap();
        s.apply_cnot(0, 1).unwrap();
        assert_eq!(s, PureState::basis(2, 0b00).unwrap());
        let mut s = PureState::<f64>::basis(2, 0b01).unwrap();
        s.apply_cnot(0, 1).unwrap();
        assert_eq!(s, PureState::basis(2, 0b01).unwrap());
    }

    #[test]
    fn cnot_preserves_control_expectation() {
        for &x in &[-1.0, -0.3, 0.2, 0.9, 2.5] {
            let mut s = PureState::<f64>::zero(2).unwrap();
            s.apply_ry(0, x).unwrap();
            s.apply_ry(1, x).unwrap();
            s.apply_cnot(0, 1).unwrap();
            assert_abs_diff_eq!(s.expectation_z(0).unwrap(), f64::cos(x), epsilon = 1e-14);
        }
    }

    #[test]
    fn index_errors() {
        let mut s = PureState::<f64>::zero(2).unwrap();
        assert!(s.apply_ry(2, 0.1).is_err());
        assert!(s.apply_rz(5, 0.1).is_err());
        assert!(s.apply_cnot(1, 1).is_err());
        assert!(s.expectation_z(2).is_err());
        assert!(PureState::<f64>::zero(0).is_err());
        assert!(PureState::<f64>::zero(9).is_err());
    }

    #[test]
    fn expectation_eigenstates() {
        assert_eq!(PureState::<f64>::zero(1).unwrap().expectation_z(0).unwrap(), 1.0);
        assert_eq!(PureState::<f64>::basis(1, 1).unwrap().expectation_z(0).unwrap(), -1.0);
    }

    #[test]
    fn to_mixed_of_plus_is_all_half() {
        let h = Complex::new(FRAC_1_SQRT_2, 0.0);
        let rho = PureState::from_amplitudes(vec![h, h]).unwrap().to_mixed();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(rho.get(i, j).re, 0.5, epsilon = 1e-15);
            }
        }
        let rho1 = PureState::<f64>::basis(1, 1).unwrap().to_mixed();
        assert_eq!(rho1.get(1, 1).re, 1.0);
        assert_eq!(rho1.get(0, 0).re, 0.0);
    }

    #[derive(Debug, Clone)]
    enum Gate {
        Ry(usize, f64),
        Rz(usize, f64),
        Cnot(usize, usize),
    }

    fn gate(n: usize) -> impl Strategy<Value = Gate> {
        prop_oneof![
            (0..n, -10.0..10.0f64).prop_map(|(q, t)| Gate::Ry(q, t)),
            (0..n, -10.0..10.0f64).prop_map(|(q, t)| Gate::Rz(q, t)),
            (0..n, 1..n).prop_map(move |(c, off)| Gate::Cnot(c, (c + off) % n)),
        ]
    }

    proptest! {
        #[test]
        fn gate_sequences_preserve_norm(gs in prop::collection::vec(gate(3), 0..40)) {
            let mut s = PureState::<f64>::zero(3).unwrap();
            for g in gs {
                match g {
                    Gate::Ry(q, t) => s.apply_ry(q, t).unwrap(),
                    Gate::Rz(q, t) => s.apply_rz(q, t).unwrap(),
                    Gate::Cnot(c, t) => s.apply_cnot(c, t).unwrap(),
                }
            }
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn rz_leaves_z_expectation(pre in -6.0..6.0f64, t in -20.0..20.0f64) {
            let mut s = PureState::<f64>::zero(1).unwrap();
            s.apply_ry(0, pre).unwrap();
            let before = s.expectation_z(0).unwrap();
            s.apply_rz(0, t).unwrap();
            prop_assert!((s.expectation_z(0).unwrap() - before).abs() < 1e-12);
        }

        #[test]
        fn ry_expectation_is_cosine(x in -20.0..20.0f64) {
            let mut s = PureState::<f64>::zero(1).unwrap();
            s.apply_ry(0, x).unwrap();
            prop_assert!((s.expectation_z(0).unwrap() - x.cos()).abs() < 1e-12);
        }
    }
}
