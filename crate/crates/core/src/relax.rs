//! One-shot relaxation solves: subproblem in, lower bound and per-variable
//! Pauli expectations out.
//!
//! The pipeline reduces the subproblem over its unfixed variables, converts
//! to spin form, colors the interaction graph, packs spins onto qubits, and
//! finds the relaxed Hamiltonian's ground energy with the chosen backend.
//! Subproblems with fewer than three unfixed variables skip the quantum
//! machinery entirely: their assignments are enumerated classically and the
//! argmin's spins stand in for expectations, so variable selection remains
//! well-defined at the bottom of the tree.

use std::collections::BTreeMap;

use crate::error::{QrbnbError, Result};
use crate::problem::{
    apply_penalty, brute_force_solve, fix_variables, qubo_to_ising,
    ConstrainedQuadraticProblem, Subproblem,
};
use crate::qrac::{
    assign_slots, build_interaction_graph, build_relaxed_hamiltonian, greedy_color, QracKind,
};
use crate::sim::{exact_ground, pauli_expectation, vqe_ground};
use serde::{Deserialize, Serialize};

/// How relaxed-Hamiltonian ground energies are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Exact diagonalization; bounds are true lower bounds.
    Exact,
    /// Simulated VQE with the given ansatz depth and parameter seed; the
    /// energy is an upper estimate of the relaxation optimum.
    Vqe { layers: usize, seed: u64 },
}

/// Which computation actually produced a [`RelaxationResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Vqe,
    BruteForce,
}

/// Lower bound and rounding data for one subproblem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelaxationResult {
    /// Offset-corrected bound on the subproblem's objective.
    pub bound: f64,
    /// Per-variable expectations in [−1, 1], keyed by original index;
    /// present for exactly the unfixed variables.
    pub expectations: BTreeMap<usize, f64>,
    pub method_used: Method,
    pub n_qubits: usize,
    /// True for exact and brute-force methods; false for VQE, whose energy
    /// may exceed the true relaxation optimum.
    pub is_exact_bound: bool,
}

/// Unfixed-variable count below which subproblems are enumerated classically
/// instead of relaxed.
pub const FALLBACK_THRESHOLD: usize = 3;

/// Solve the quantum relaxation of a subproblem (with the standard tiny-case
/// fallback).
pub fn solve_relaxation(
    sub: &Subproblem,
    kind: QracKind,
    backend: Backend,
) -> Result<RelaxationResult> {
    solve_relaxation_with_fallback(sub, kind, backend, FALLBACK_THRESHOLD)
}

/// As [`solve_relaxation`], but with an explicit fallback threshold; passing
/// 0 forces the relaxation pipeline regardless of size (used by the
/// quantumness gap, which is about the relaxation itself).
pub fn solve_relaxation_with_fallback(
    sub: &Subproblem,
    kind: QracKind,
    backend: Backend,
    fallback_below: usize,
) -> Result<RelaxationResult> {
    let unfixed = sub.unfixed();
    if unfixed.len() < fallback_below {
        return brute_force_fallback(sub, &unfixed);
    }
    let (reduced, index_map, fix_offset) = fix_variables(sub);
    let ising = qubo_to_ising(&reduced);
    let graph = build_interaction_graph(&ising);
    let coloring = greedy_color(&graph);
    let encoding = assign_slots(&coloring, kind);
    let h = build_relaxed_hamiltonian(&ising, &encoding)?;
    let (ground, method, is_exact_bound) = match backend {
        Backend::Exact => (exact_ground(&h)?, Method::Exact, true),
        Backend::Vqe { layers, seed } => (
            vqe_ground(&h, layers, seed)?.as_ground(),
            Method::Vqe,
            false,
        ),
    };
    let mut expectations = BTreeMap::new();
    for (r, &orig) in index_map.iter().enumerate() {
        let slot = encoding.slots[r];
        let e = pauli_expectation(&ground.state, &[slot])?;
        expectations.insert(orig, e.clamp(-1.0, 1.0));
    }
    Ok(RelaxationResult {
        bound: ground.energy + fix_offset,
        expectations,
        method_used: method,
        n_qubits: encoding.n_qubits,
        is_exact_bound,
    })
}

/// Classical enumeration for subproblems with < 3 unfixed variables: the
/// exact minimum of the (unconstrained) subproblem objective, with the
/// argmin's spins as expectations.  Ties break toward the lowest binary
/// completion, mirroring the reference oracle.
fn brute_force_fallback(sub: &Subproblem, unfixed: &[usize]) -> Result<RelaxationResult> {
    let u = unfixed.len();
    if u > 20 {
        return Err(QrbnbError::TooLarge(format!(
            "fallback enumeration over {u} variables refused"
        )));
    }
    let (reduced, index_map, fix_offset) = fix_variables(sub);
    let terms: Vec<(usize, usize, f64)> = reduced
        .quadratic
        .iter()
        .map(|(&(i, j), &c)| (i, j, c))
        .collect();
    let mut best_value = f64::INFINITY;
    let mut best_bits = vec![0u8; u];
    let mut bits = vec![0u8; u];
    for a in 0u32..(1u32 << u) {
        for (slot, b) in bits.iter_mut().enumerate() {
            *b = ((a >> (u - 1 - slot)) & 1) as u8;
        }
        let mut v = reduced.offset;
        for &(i, j, c) in &terms {
            v += c * (bits[i] as f64) * (bits[j] as f64);
        }
        if v < best_value {
            best_value = v;
            best_bits.copy_from_slice(&bits);
        }
    }
    let expectations = index_map
        .iter()
        .zip(&best_bits)
        .map(|(&orig, &b)| (orig, if b == 0 { 1.0 } else { -1.0 }))
        .collect();
    Ok(RelaxationResult {
        bound: best_value + fix_offset,
        expectations,
        method_used: Method::BruteForce,
        n_qubits: 0,
        is_exact_bound: true,
    })
}

/// Quantumness gap `z̃_QR / z*` of a problem: the root relaxation optimum
/// (exact backend, no tiny-case fallback) over the true optimum.
///
/// For minimization problems with negative optima (sign-flipped MaxCut) both
/// values are negative and the ratio is ≥ 1, the analog of an integrality
/// gap.  Errors when the true optimum is zero.
pub fn quantumness_gap(problem: &ConstrainedQuadraticProblem, kind: QracKind) -> Result<f64> {
    let (z_star, _) = brute_force_solve(problem)?;
    if z_star.abs() < 1e-12 {
        return Err(QrbnbError::UndefinedGap(
            "true optimum is zero, the ratio z̃/z* is undefined".into(),
        ));
    }
    let folded = apply_penalty(problem, &BTreeMap::new())?;
    let root = Subproblem::root(&folded);
    let relaxed = solve_relaxation_with_fallback(&root, kind, Backend::Exact, 0)?;
    Ok(relaxed.bound / z_star)
}
