//! Hardware-efficient variational ansatz.
//!
//! The circuit starts from `|0…0⟩` with one RY+RZ column, then repeats
//! `layers` times: a linear CNOT chain (control q, target q+1) followed by
//! another RY+RZ column.  Parameters are laid out column-major: block `l`
//! holds the RY angles of all qubits, then the RZ angles of all qubits.

use super::QuantumState;
use crate::error::{QrbnbError, Result};
use num_complex::Complex64;

/// Shape of the hardware-efficient ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    /// Number of entangling repetitions `k`.
    pub layers: usize,
}

impl AnsatzSpec {
    /// Total rotation parameters: `2·n_qubits·(layers + 1)`.
    pub fn n_params(&self) -> usize {
        2 * self.n_qubits * (self.layers + 1)
    }
}

/// RY(θ) on qubit `q`: rows `[cos θ/2, −sin θ/2; sin θ/2, cos θ/2]`.
fn apply_ry(amps: &mut [Complex64], q: usize, theta: f64) {
    let (s, c) = (theta / 2.0).sin_cos();
    let bit = 1usize << q;
    for b in 0..amps.len() {
        if b & bit == 0 {
            let a0 = amps[b];
            let a1 = amps[b | bit];
            amps[b] = c * a0 - s * a1;
            amps[b | bit] = s * a0 + c * a1;
        }
    }
}

/// RZ(θ) on qubit `q`: phases `e^{∓iθ/2}` on the 0/1 components.
fn apply_rz(amps: &mut [Complex64], q: usize, theta: f64) {
    let phase0 = Complex64::from_polar(1.0, -theta / 2.0);
    let phase1 = Complex64::from_polar(1.0, theta / 2.0);
    let bit = 1usize << q;
    for (b, a) in amps.iter_mut().enumerate() {
        *a *= if b & bit == 0 { phase0 } else { phase1 };
    }
}

/// CNOT with control `c` and target `t`.
fn apply_cnot(amps: &mut [Complex64], c: usize, t: usize) {
    let cbit = 1usize << c;
    let tbit = 1usize << t;
    for b in 0..amps.len() {
        if b & cbit != 0 && b & tbit == 0 {
            amps.swap(b, b | tbit);
        }
    }
}

/// Prepare the ansatz state for the given parameters.
pub fn ansatz_state(spec: &AnsatzSpec, params: &[f64]) -> Result<QuantumState> {
    if params.len() != spec.n_params() {
        return Err(QrbnbError::InvalidInput(format!(
            "expected {} ansatz parameters, got {}",
            spec.n_params(),
            params.len()
        )));
    }
    let n = spec.n_qubits;
    let mut state = QuantumState::zero(n);
    let amps = &mut state.amplitudes;
    let rotate = |amps: &mut [Complex64], block: usize| {
        let base = block * 2 * n;
        for q in 0..n {
            apply_ry(amps, q, params[base + q]);
        }
        for q in 0..n {
            apply_rz(amps, q, params[base + n + q]);
        }
    };
    rotate(amps, 0);
    for layer in 1..=spec.layers {
        for q in 0..n.saturating_sub(1) {
            apply_cnot(amps, q, q + 1);
        }
        rotate(amps, layer);
    }
    Ok(state)
}
