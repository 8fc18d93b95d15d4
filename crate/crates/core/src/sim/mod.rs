//! Dense statevector simulation: Pauli-string application, expectations,
//! exact ground energies, the hardware-efficient ansatz, and the NFT
//! optimizer.
//!
//! Qubit `q` is bit `q` of the basis index (little-endian).  A Pauli string
//! maps a basis state to a single basis state with a phase, so strings
//! compile to an X-type bit mask, a Z-type bit mask, and a global `i^{#Y}`
//! factor; application and expectation are then linear passes over the
//! amplitudes.

mod ansatz;
mod eigen;
mod nft;

pub use ansatz::{ansatz_state, AnsatzSpec};
pub use eigen::{dense_ground, exact_ground, lanczos_ground, DENSE_QUBIT_THRESHOLD, MAX_QUBITS};
pub use nft::{nft_optimize, vqe_ground, NftResult, VqeOutcome};

use crate::error::{QrbnbError, Result};
use crate::qrac::{Axis, PauliTermSum};
use num_complex::Complex64;

/// Pure quantum state as a dense amplitude vector of length `2^n_qubits`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    pub n_qubits: usize,
    pub amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// The all-zeros computational basis state `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::ZERO; 1 << n_qubits];
        amplitudes[0] = Complex64::ONE;
        QuantumState {
            n_qubits,
            amplitudes,
        }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// One Pauli string in mask form: `P|b⟩ = i^{#Y}·(−1)^{|b ∧ z_mask|}·|b ⊕ x_mask⟩`
/// (`z_mask` covers Y and Z positions, `x_mask` covers X and Y).
#[derive(Debug, Clone, Copy)]
struct CompiledTerm {
    coeff: f64,
    x_mask: usize,
    z_mask: usize,
    y_phase: Complex64,
}

fn compile_ops(ops: &[(usize, Axis)], n_qubits: usize) -> Result<CompiledTerm> {
    let mut x_mask = 0usize;
    let mut z_mask = 0usize;
    let mut n_y = 0u32;
    for &(q, axis) in ops {
        if q >= n_qubits {
            return Err(QrbnbError::VariableOutOfRange {
                index: q,
                n_vars: n_qubits,
            });
        }
        match axis {
            Axis::X => x_mask |= 1 << q,
            Axis::Y => {
                x_mask |= 1 << q;
                z_mask |= 1 << q;
                n_y += 1;
            }
            Axis::Z => z_mask |= 1 << q,
        }
    }
    // i^{n_y}
    let y_phase = match n_y % 4 {
        0 => Complex64::ONE,
        1 => Complex64::I,
        2 => -Complex64::ONE,
        _ => -Complex64::I,
    };
    Ok(CompiledTerm {
        coeff: 1.0,
        x_mask,
        z_mask,
        y_phase,
    })
}

#[inline]
fn parity_sign(bits: usize) -> f64 {
    if bits.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// A Pauli-term sum compiled to mask form for fast repeated evaluation.
#[derive(Debug, Clone)]
pub struct CompiledHamiltonian {
    pub n_qubits: usize,
    terms: Vec<CompiledTerm>,
    pub constant: f64,
}

impl CompiledHamiltonian {
    pub fn compile(h: &PauliTermSum) -> Result<Self> {
        let mut terms = Vec::with_capacity(h.terms.len());
        for (coeff, ops) in &h.terms {
            let mut t = compile_ops(ops, h.n_qubits)?;
            t.coeff = *coeff;
            terms.push(t);
        }
        Ok(CompiledHamiltonian {
            n_qubits: h.n_qubits,
            terms,
            constant: h.constant,
        })
    }

    /// `out += (H − constant)·v`, i.e. the Pauli terms only.
    pub fn accumulate_matvec(&self, v: &[Complex64], out: &mut [Complex64]) {
        for t in &self.terms {
            let phase = t.y_phase * t.coeff;
            for (b, &amp) in v.iter().enumerate() {
                out[b ^ t.x_mask] += phase * parity_sign(b & t.z_mask) * amp;
            }
        }
    }

    /// `⟨ψ|H|ψ⟩` including the constant; errors if the imaginary residue
    /// exceeds 1e-10 (it must vanish for Hermitian sums).
    pub fn expectation(&self, state: &QuantumState) -> Result<f64> {
        let v = &state.amplitudes;
        let mut acc = Complex64::ZERO;
        for t in &self.terms {
            let phase = t.y_phase * t.coeff;
            let mut term_acc = Complex64::ZERO;
            for (b, &amp) in v.iter().enumerate() {
                term_acc += v[b ^ t.x_mask].conj() * parity_sign(b & t.z_mask) * amp;
            }
            acc += phase * term_acc;
        }
        if acc.im.abs() > 1e-10 {
            return Err(QrbnbError::Numerical(format!(
                "expectation has imaginary residue {:.3e}",
                acc.im
            )));
        }
        Ok(acc.re + self.constant)
    }

    /// Scale estimate `Σ|coeff|` of the term part (Gershgorin-style bound on
    /// the spectral radius).
    pub fn coeff_scale(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).sum()
    }
}

/// Apply one Pauli string to a state, returning the new state.
pub fn apply_pauli_string(state: &QuantumState, ops: &[(usize, Axis)]) -> Result<QuantumState> {
    let t = compile_ops(ops, state.n_qubits)?;
    let v = &state.amplitudes;
    let mut out = vec![Complex64::ZERO; v.len()];
    for (b, &amp) in v.iter().enumerate() {
        out[b ^ t.x_mask] = t.y_phase * parity_sign(b & t.z_mask) * amp;
    }
    Ok(QuantumState {
        n_qubits: state.n_qubits,
        amplitudes: out,
    })
}

/// `Σ_t coeff_t·⟨ψ|P_t|ψ⟩ + constant` for a Pauli-term sum.
pub fn expectation(h: &PauliTermSum, state: &QuantumState) -> Result<f64> {
    CompiledHamiltonian::compile(h)?.expectation(state)
}

/// Expectation of a single Pauli string (no constant).
pub fn pauli_expectation(state: &QuantumState, ops: &[(usize, Axis)]) -> Result<f64> {
    let t = compile_ops(ops, state.n_qubits)?;
    let v = &state.amplitudes;
    let mut acc = Complex64::ZERO;
    for (b, &amp) in v.iter().enumerate() {
        acc += v[b ^ t.x_mask].conj() * parity_sign(b & t.z_mask) * amp;
    }
    acc *= t.y_phase;
    if acc.im.abs() > 1e-10 {
        return Err(QrbnbError::Numerical(format!(
            "Pauli expectation has imaginary residue {:.3e}",
            acc.im
        )));
    }
    Ok(acc.re)
}

/// Minimum eigenvalue and a ground eigenvector.
#[derive(Debug, Clone)]
pub struct GroundResult {
    pub energy: f64,
    pub state: QuantumState,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qrac::Axis::{X, Y, Z};
    use num_complex::Complex64;

    fn single(n: usize, basis: usize) -> QuantumState {
        let mut amplitudes = vec![Complex64::ZERO; 1 << n];
        amplitudes[basis] = Complex64::ONE;
        QuantumState {
            n_qubits: n,
            amplitudes,
        }
    }

    #[test]
    fn pauli_basis_actions() {
        // X|0⟩ = |1⟩
        let s = apply_pauli_string(&single(1, 0), &[(0, X)]).unwrap();
        assert_eq!(s.amplitudes[1], Complex64::ONE);
        assert_eq!(s.amplitudes[0], Complex64::ZERO);
        // Z|1⟩ = −|1⟩
        let s = apply_pauli_string(&single(1, 1), &[(0, Z)]).unwrap();
        assert_eq!(s.amplitudes[1], -Complex64::ONE);
        // Y|0⟩ = i|1⟩
        let s = apply_pauli_string(&single(1, 0), &[(0, Y)]).unwrap();
        assert_eq!(s.amplitudes[1], Complex64::I);
        // Y|1⟩ = −i|0⟩
        let s = apply_pauli_string(&single(1, 1), &[(0, Y)]).unwrap();
        assert_eq!(s.amplitudes[0], -Complex64::I);
    }

    #[test]
    fn pauli_involutions() {
        let mut state = QuantumState::zero(3);
        // A superposition with assorted phases.
        for (b, a) in state.amplitudes.iter_mut().enumerate() {
            *a = Complex64::new(1.0 + b as f64, (b as f64) - 2.5);
        }
        let n = state.norm();
        for a in state.amplitudes.iter_mut() {
            *a /= n;
        }
        for ops in [
            vec![(0, X)],
            vec![(1, Z)],
            vec![(2, Y)],
            vec![(0, X), (2, Z)],
            vec![(0, Y), (1, Y), (2, X)],
        ] {
            let once = apply_pauli_string(&state, &ops).unwrap();
            let twice = apply_pauli_string(&once, &ops).unwrap();
            for (a, b) in state.amplitudes.iter().zip(&twice.amplitudes) {
                assert!((a - b).norm() < 1e-12);
            }
            assert!((once.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn expectation_known_states() {
        // ⟨0|Z|0⟩ = 1
        assert!((pauli_expectation(&single(1, 0), &[(0, Z)]).unwrap() - 1.0).abs() < 1e-12);
        // ⟨+|X|+⟩ = 1
        let plus = QuantumState {
            n_qubits: 1,
            amplitudes: vec![
                Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            ],
        };
        assert!((pauli_expectation(&plus, &[(0, X)]).unwrap() - 1.0).abs() < 1e-12);
        // ⟨0|X|0⟩ = 0
        assert!(pauli_expectation(&single(1, 0), &[(0, X)]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn expectation_sum_with_constant() {
        let h = PauliTermSum {
            n_qubits: 2,
            terms: vec![(2.0, vec![(0, Z)]), (-0.5, vec![(0, Z), (1, Z)])],
            constant: 1.25,
        };
        // |01⟩ (qubit 0 = 1, qubit 1 = 0): ⟨Z_0⟩ = −1, ⟨Z_0 Z_1⟩ = −1.
        let v = expectation(&h, &single(2, 1)).unwrap();
        assert!((v - (-2.0 + 0.5 + 1.25)).abs() < 1e-12);
    }

    #[test]
    fn expectation_index_guard() {
        assert!(pauli_expectation(&single(1, 0), &[(3, X)]).is_err());
    }
}
