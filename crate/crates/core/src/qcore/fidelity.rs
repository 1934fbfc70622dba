use num_complex::Complex;

use super::linalg::{eigen_floor, hermitian_eigenvalues, hermitian_sqrt};
use super::{MixedState, PureState};
use crate::error::{invalid_arg, Result};
use crate::Real;

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`, clamped to `[0, 1]`.
pub fn fidelity<T: Real>(rho: &MixedState<T>, sigma: &MixedState<T>) -> Result<T> {
    if rho.num_qubits() != sigma.num_qubits() {
        return Err(invalid_arg(format!(
            "fidelity of {}-qubit and {}-qubit states",
            rho.num_qubits(),
            sigma.num_qubits()
        )));
    }
    if rho == sigma {
        return Ok(T::one());
    }
    let d = rho.dim();
    let root = hermitian_sqrt(rho.matrix(), d);
    let inner = mul(&mul(&root, sigma.matrix(), d), &root, d);
    let ev = hermitian_eigenvalues(&inner, d);
    let radius = ev.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let floor = eigen_floor(radius);
    let s: T = ev
        .into_iter()
        .filter(|&l| l > floor)
        .map(|l| l.sqrt())
        .sum();
    Ok((s * s).max(T::zero()).min(T::one()))
}

/// `⟨ψ|σ|ψ⟩`, the fidelity when the first argument is pure.
pub fn fidelity_with_pure<T: Real>(psi: &PureState<T>, sigma: &MixedState<T>) -> Result<T> {
    if psi.num_qubits() != sigma.num_qubits() {
        return Err(invalid_arg("fidelity of states with different qubit counts"));
    }
    let d = psi.dim();
    let a = psi.amplitudes();
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..d {
        for j in 0..d {
            acc = acc + a[i].conj() * sigma.get(i, j) * a[j];
        }
    }
    Ok(acc.re.max(T::zero()).min(T::one()))
}

fn mul<T: Real>(a: &[Complex<T>], b: &[Complex<T>], d: usize) -> Vec<Complex<T>> {
    let mut out = vec![Complex::new(T::zero(), T::zero()); d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            for j in 0..d {
                out[i * d + j] = out[i * d + j] + aik * b[k * d + j];
            }
        }
    }
    out
}
