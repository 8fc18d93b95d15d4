//! Exact ground energy of a Pauli-term sum.
//!
//! Small systems are diagonalized densely; larger ones use a matrix-free
//! Lanczos iteration with full reorthogonalization and thick restarts, which
//! only ever touches the Hamiltonian through `H·v` products over the
//! compiled Pauli masks.

use super::{CompiledHamiltonian, GroundResult, QuantumState};
use crate::error::{QrbnbError, Result};
use crate::qrac::PauliTermSum;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Hard cap on simulated qubits (dense vectors of length `2^n`).
pub const MAX_QUBITS: usize = 16;

/// Below this qubit count the dense eigensolver runs; at or above it the
/// Lanczos path takes over.  Dense Hermitian diagonalization is cubic in the
/// dimension and becomes slower than the iterative path near dim 512.
pub const DENSE_QUBIT_THRESHOLD: usize = 9;

/// Minimum eigenvalue and eigenvector of `H`, dispatching on system size.
///
/// The returned energy includes the constant term.
pub fn exact_ground(h: &PauliTermSum) -> Result<GroundResult> {
    if h.n_qubits > MAX_QUBITS {
        return Err(QrbnbError::TooLarge(format!(
            "exact diagonalization limited to {MAX_QUBITS} qubits, got {}",
            h.n_qubits
        )));
    }
    if h.n_qubits < DENSE_QUBIT_THRESHOLD {
        dense_ground(h)
    } else {
        lanczos_ground(h)
    }
}

/// Dense path: materialize `H` and diagonalize.
pub fn dense_ground(h: &PauliTermSum) -> Result<GroundResult> {
    let compiled = CompiledHamiltonian::compile(h)?;
    let dim = 1usize << h.n_qubits;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    let mut basis = vec![Complex64::ZERO; dim];
    let mut column = vec![Complex64::ZERO; dim];
    for b in 0..dim {
        basis[b] = Complex64::ONE;
        column.fill(Complex64::ZERO);
        compiled.accumulate_matvec(&basis, &mut column);
        for (r, &v) in column.iter().enumerate() {
            m[(r, b)] = v;
        }
        basis[b] = Complex64::ZERO;
    }
    let eig = m.symmetric_eigen();
    let mut best = 0;
    for i in 1..dim {
        if eig.eigenvalues[i] < eig.eigenvalues[best] {
            best = i;
        }
    }
    let energy = eig.eigenvalues[best] + h.constant;
    let state = QuantumState {
        n_qubits: h.n_qubits,
        amplitudes: eig.eigenvectors.column(best).iter().copied().collect(),
    };
    Ok(GroundResult { energy, state })
}

/// Iterative path: Lanczos with full reorthogonalization, restarted from the
/// best Ritz vector until the ground-pair residual `β·|y_last|` falls below
/// tolerance.
pub fn lanczos_ground(h: &PauliTermSum) -> Result<GroundResult> {
    let compiled = CompiledHamiltonian::compile(h)?;
    let dim = 1usize << h.n_qubits;
    let scale = compiled.coeff_scale().max(1.0);
    let tol = 1e-10 * scale;
    let max_krylov = dim.min(100);
    let max_restarts = 50;

    // Deterministic start vector: the same Hamiltonian always yields the
    // same ground pair, keeping solver traces reproducible.
    let mut rng = ChaCha20Rng::seed_from_u64(0x51ac_05ee_d000_0001);
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    normalize(&mut v);

    for _restart in 0..max_restarts {
        let mut basis: Vec<Vec<Complex64>> = vec![v.clone()];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut result: Option<(f64, Vec<f64>, f64)> = None; // (ritz, y, residual)

        for j in 0..max_krylov {
            let mut w = vec![Complex64::ZERO; dim];
            compiled.accumulate_matvec(&basis[j], &mut w);
            let alpha = dot(&basis[j], &w).re;
            alphas.push(alpha);
            axpy(&mut w, -Complex64::from(alpha), &basis[j]);
            if j > 0 {
                axpy(&mut w, -Complex64::from(betas[j - 1]), &basis[j - 1]);
            }
            // Full reorthogonalization, two passes, as a deflation safeguard.
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    axpy(&mut w, -c, q);
                }
            }
            let beta = norm(&w);

            let (ritz, y) = tridiag_min_pair(&alphas, &betas);
            let residual = beta * y.last().copied().unwrap_or(1.0).abs();
            result = Some((ritz, y, residual));
            if residual <= tol || beta <= tol * 1e-3 {
                break;
            }
            if j + 1 < max_krylov {
                betas.push(beta);
                for a in w.iter_mut() {
                    *a /= beta;
                }
                basis.push(w);
            }
        }

        let (ritz, y, residual) = result.expect("at least one Lanczos step runs");
        // Assemble the Ritz vector in the original space.
        let mut ground = vec![Complex64::ZERO; dim];
        for (j, q) in basis.iter().enumerate() {
            axpy(&mut ground, Complex64::from(y[j]), q);
        }
        normalize(&mut ground);
        if residual <= tol {
            return Ok(GroundResult {
                energy: ritz + h.constant,
                state: QuantumState {
                    n_qubits: h.n_qubits,
                    amplitudes: ground,
                },
            });
        }
        v = ground;
    }
    Err(QrbnbError::NoConvergence(format!(
        "Lanczos did not reach residual {tol:.3e} within {max_restarts} restarts"
    )))
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [Complex64], c: Complex64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += c * xi;
    }
}

fn normalize(v: &mut [Complex64]) {
    let n = norm(v);
    for a in v.iter_mut() {
        *a /= n;
    }
}

/// Minimum eigenpair of the symmetric tridiagonal matrix with the given
/// diagonal and off-diagonal entries.
fn tridiag_min_pair(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let m = alphas.len();
    if m == 1 {
        return (alphas[0], vec![1.0]);
    }
    let mut t = DMatrix::<f64>::zeros(m, m);
    for (i, &a) in alphas.iter().enumerate() {
        t[(i, i)] = a;
    }
    for (i, &b) in betas.iter().take(m - 1).enumerate() {
        t[(i, i + 1)] = b;
        t[(i + 1, i)] = b;
    }
    let eig = t.symmetric_eigen();
    let mut best = 0;
    for i in 1..m {
        if eig.eigenvalues[i] < eig.eigenvalues[best] {
            best = i;
        }
    }
    (
        eig.eigenvalues[best],
        eig.eigenvectors.column(best).iter().copied().collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qrac::Axis::{self, X, Y, Z};
    use crate::sim::expectation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn random_hamiltonian(rng: &mut ChaCha20Rng, n_qubits: usize, n_terms: usize) -> PauliTermSum {
        let axes = [X, Y, Z];
        let mut terms = Vec::new();
        for _ in 0..n_terms {
            let q1 = rng.gen_range(0..n_qubits);
            let a1 = axes[rng.gen_range(0..3)];
            let coeff = rng.gen_range(-2.0..2.0);
            if n_qubits > 1 && rng.gen::<bool>() {
                let mut q2 = rng.gen_range(0..n_qubits);
                while q2 == q1 {
                    q2 = rng.gen_range(0..n_qubits);
                }
                let a2 = axes[rng.gen_range(0..3)];
                let mut ops: Vec<(usize, Axis)> = vec![(q1, a1), (q2, a2)];
                ops.sort_by_key(|&(q, _)| q);
                terms.push((coeff, ops));
            } else {
                terms.push((coeff, vec![(q1, a1)]));
            }
        }
        PauliTermSum {
            n_qubits,
            terms,
            constant: rng.gen_range(-1.0..1.0),
        }
    }

    #[test]
    fn known_ground_energies() {
        // 2·X⊗X has eigenvalues ±2.
        let h = PauliTermSum {
            n_qubits: 2,
            terms: vec![(2.0, vec![(0, X), (1, X)])],
            constant: 0.0,
        };
        let g = exact_ground(&h).unwrap();
        assert!((g.energy + 2.0).abs() < 1e-10);

        // √3·X has eigenvalues ±√3.
        let h = PauliTermSum {
            n_qubits: 1,
            terms: vec![(3.0_f64.sqrt(), vec![(0, X)])],
            constant: 0.0,
        };
        let g = exact_ground(&h).unwrap();
        assert!((g.energy + 3.0_f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn ground_state_satisfies_eigen_equation() {
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        for _ in 0..10 {
            let n = rng.gen_range(1..=6);
            let h = random_hamiltonian(&mut rng, n, 3 * n);
            let g = exact_ground(&h).unwrap();
            // |H·ψ − E·ψ| ≤ 1e-8 and ⟨ψ|H|ψ⟩ = E.
            let compiled = CompiledHamiltonian::compile(&h).unwrap();
            let mut hv = vec![Complex64::ZERO; 1 << n];
            compiled.accumulate_matvec(&g.state.amplitudes, &mut hv);
            let e_terms = g.energy - h.constant;
            let mut residual = 0.0f64;
            for (b, &a) in g.state.amplitudes.iter().enumerate() {
                residual += (hv[b] - Complex64::from(e_terms) * a).norm_sqr();
            }
            assert!(residual.sqrt() < 1e-8, "residual {}", residual.sqrt());
            let e = expectation(&h, &g.state).unwrap();
            assert!((e - g.energy).abs() < 1e-8);
        }
    }

    #[test]
    fn ground_below_all_basis_energies() {
        let mut rng = ChaCha20Rng::seed_from_u64(29);
        for _ in 0..5 {
            let n = rng.gen_range(2..=5);
            let h = random_hamiltonian(&mut rng, n, 2 * n);
            let g = exact_ground(&h).unwrap();
            for b in 0..(1usize << n) {
                let mut amplitudes = vec![Complex64::ZERO; 1 << n];
                amplitudes[b] = Complex64::ONE;
                let s = QuantumState {
                    n_qubits: n,
                    amplitudes,
                };
                let e = expectation(&h, &s).unwrap();
                assert!(g.energy <= e + 1e-9);
            }
        }
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        for n in [4usize, 6, 9] {
            for _ in 0..2 {
                let h = random_hamiltonian(&mut rng, n, 3 * n);
                let d = dense_ground(&h).unwrap();
                let l = lanczos_ground(&h).unwrap();
                assert!(
                    (d.energy - l.energy).abs() < 1e-8,
                    "n={n}: dense {} vs lanczos {}",
                    d.energy,
                    l.energy
                );
                // The Lanczos state is a genuine eigenvector too.
                let e = expectation(&h, &l.state).unwrap();
                assert!((e - l.energy).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn lanczos_handles_degenerate_and_zero_spectra() {
        // Zero Hamiltonian: every vector is ground with energy 0.
        let h = PauliTermSum {
            n_qubits: 9,
            terms: vec![],
            constant: 0.75,
        };
        let g = lanczos_ground(&h).unwrap();
        assert!((g.energy - 0.75).abs() < 1e-10);

        // Single Z on one of many qubits: massively degenerate ground space.
        let h = PauliTermSum {
            n_qubits: 9,
            terms: vec![(1.5, vec![(4, Z)])],
            constant: 0.0,
        };
        let g = lanczos_ground(&h).unwrap();
        assert!((g.energy + 1.5).abs() < 1e-9);
    }

    #[test]
    fn qubit_guard() {
        let h = PauliTermSum {
            n_qubits: MAX_QUBITS + 1,
            terms: vec![],
            constant: 0.0,
        };
        assert!(matches!(exact_ground(&h), Err(QrbnbError::TooLarge(_))));
    }
}
