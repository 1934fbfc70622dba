use num_complex::Complex;

use super::gates::{self, Mat2};
use super::linalg::hermitian_eigenvalues;
use super::{check_index, check_qubits, state_tolerance, KrausChannel};
use crate::error::{invalid_arg, Result};
use crate::Real;

/// Most negative eigenvalue a density matrix may carry from round-off.
pub const EIGEN_NEG_TOLERANCE: f64 = 1e-10;

/// Density matrix of `n` qubits, row-major `2^n × 2^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState<T> {
    n: usize,
    rho: Vec<Complex<T>>,
}

impl<T: Real> MixedState<T> {
    pub(crate) fn from_raw(n: usize, rho: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(rho.len(), 1 << (2 * n));
        Self { n, rho }
    }

    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_matrix(n: usize, rho: Vec<Complex<T>>) -> Result<Self> {
        check_qubits(n)?;
        let dim = 1usize << n;
        if rho.len() != dim * dim {
            return Err(invalid_arg(format!(
                "density matrix has {} entries, expected {}",
                rho.len(),
                dim * dim
            )));
        }
        let s = Self { n, rho };
        s.validate()?;
        Ok(s)
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let dim = 1usize << n;
        let mut rho = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        let w = T::one() / T::from_usize(dim).unwrap();
        for i in 0..dim {
            rho[i * dim + i] = Complex::new(w, T::zero());
        }
        Ok(Self { n, rho })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.rho[row * self.dim() + col]
    }

    pub fn matrix(&self) -> &[Complex<T>] {
        &self.rho
    }

    pub fn trace(&self) -> Complex<T> {
        let d = self.dim();
        (0..d).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + self.rho[i * d + i])
    }

    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_error(&self) -> T {
        let d = self.dim();
        let mut worst = T::zero();
        for i in 0..d {
            for j in i..d {
                let e = (self.rho[i * d + j] - self.rho[j * d + i].conj()).norm();
                worst = worst.max(e);
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        hermitian_eigenvalues(&self.rho, self.dim())
    }

    pub fn validate(&self) -> Result<()> {
        let tol = state_tolerance::<T>();
        let herm = self.hermiticity_error();
        if herm > tol {
            return Err(invalid_arg(format!("density matrix not Hermitian (error {herm})")));
        }
        let tr = self.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(invalid_arg(format!("density matrix trace {tr} differs from 1")));
        }
        let min = self
            .eigenvalues()
            .into_iter()
            .fold(T::infinity(), |a, b| a.min(b));
        if min < -T::lit(EIGEN_NEG_TOLERANCE) {
            return Err(invalid_arg(format!("density matrix has eigenvalue {min} < 0")));
        }
        Ok(())
    }

    /// `K ρ K†` for a single-qubit operator acting on `qubit`.
    fn sandwich(&self, qubit: usize, k: &Mat2<T>) -> Vec<Complex<T>> {
        let d = self.dim();
        let st = gates::stride(self.n, qubit);
        let mut out = self.rho.clone();
        // Left multiply: each column is a state vector.
        for col in 0..d {
            for r in 0..d {
                if r & st == 0 {
                    let [a, b] = gates::mat2_apply(k, [out[r * d + col], out[(r | st) * d + col]]);
                    out[r * d + col] = a;
                    out[(r | st) * d + col] = b;
                }
            }
        }
        // Right multiply by K†: rows transform with conj(K).
        let kc = [
            [k[0][0].conj(), k[0][1].conj()],
            [k[1][0].conj(), k[1][1].conj()],
        ];
        for r in 0..d {
            let row = &mut out[r * d..(r + 1) * d];
            for c in 0..d {
                if c & st == 0 {
                    let [a, b] = gates::mat2_apply(&kc, [row[c], row[c | st]]);
                    row[c] = a;
                    row[c | st] = b;
                }
            }
        }
        out
    }

    /// `ρ ↦ U ρ U†`.
    pub fn apply_unitary(&mut self, qubit: usize, u: &Mat2<T>) -> Result<()> {
        check_index(qubit, self.n)?;
        self.rho = self.sandwich(qubit, u);
        Ok(())
    }

    pub fn apply_ry(&mut self, qubit: usize, theta: T) -> Result<()> {
        self.apply_unitary(qubit, &gates::ry_matrix(theta))
    }

    pub fn apply_rz(&mut self, qubit: usize, theta: T) -> Result<()> {
        self.apply_unitary(qubit, &gates::rz_matrix(theta))
    }

    /// CNOT is a permutation `P`, so `P ρ P^T` just permutes indices.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        check_index(control, self.n)?;
        check_index(target, self.n)?;
        if control == target {
            return Err(invalid_arg("CNOT control and target must differ"));
        }
        let d = self.dim();
        let cs = gates::stride(self.n, control);
        let ts = gates::stride(self.n, target);
        let perm = |i: usize| if i & cs != 0 { i ^ ts } else { i };
        let mut out = vec![Complex::new(T::zero(), T::zero()); d * d];
        for r in 0..d {
            for c in 0..d {
                out[perm(r) * d + perm(c)] = self.rho[r * d + c];
            }
        }
        self.rho = out;
        Ok(())
    }

    /// Operator-sum evolution `Σ_k E_k ρ E_k†` on one qubit.
    pub fn apply_channel(&mut self, channel: &KrausChannel<T>, qubit: usize) -> Result<()> {
        check_index(qubit, self.n)?;
        let d = self.dim();
        let mut acc = vec![Complex::new(T::zero(), T::zero()); d * d];
        for op in channel.operators() {
            for (a, v) in acc.iter_mut().zip(self.sandwich(qubit, op)) {
                *a = *a + v;
            }
        }
        self.rho = acc;
        Ok(())
    }

    /// `Tr(ρ Z_q)`.
    pub fn expectation_z(&self, qubit: usize) -> Result<T> {
        check_index(qubit, self.n)?;
        let d = self.dim();
        let st = gates::stride(self.n, qubit);
        Ok((0..d)
            .map(|i| {
                let p = self.rho[i * d + i].re;
                if i & st == 0 {
                    p
                } else {
                    -p
                }
            })
            .sum())
    }
}
