//! Exact simulation of small qubit registers.
//!
//! Qubit 0 is the most significant bit of a basis index: for two qubits the
//! amplitude order is `|00⟩, |01⟩, |10⟩, |11⟩` with the left digit being
//! qubit 0.

mod channel;
mod fidelity;
pub(crate) mod gates;
mod linalg;
mod mixed;
mod pure;

pub use channel::{ChannelKind, KrausChannel};
pub use fidelity::{fidelity, fidelity_with_pure};
pub use gates::{mat2_mul, pauli_x, pauli_y, pauli_z, ry_matrix, rz_matrix, Mat2};
pub use linalg::{hermitian_eigenvalues, hermitian_sqrt};
pub use mixed::MixedState;
pub use pure::PureState;

use crate::error::{invalid_arg, Result};
use crate::Real;

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 8;

pub(crate) fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(invalid_arg(format!(
            "qubit count {n} outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

pub(crate) fn check_index(q: usize, n: usize) -> Result<()> {
    if q >= n {
        return Err(invalid_arg(format!("qubit index {q} out of range for {n} qubits")));
    }
    Ok(())
}

/// Tolerance used when validating normalization, trace and Hermiticity.
///
/// 1e-12 for `f64`; for `f32` it widens to what single precision can hold.
pub fn state_tolerance<T: Real>() -> T {
    let eps_based = T::epsilon() * T::lit(64.0);
    let fixed = T::lit(1e-12);
    if eps_based > fixed {
        eps_based
    } else {
        fixed
    }
}
