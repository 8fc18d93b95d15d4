//! QRAC encoding: interaction graph, greedy coloring, slot assignment, and
//! the relaxed Hamiltonian.
//!
//! Spins that interact (nonzero coupling) must land on different qubits, so
//! the Ising coupling graph is vertex-colored and each color class is packed
//! k-to-a-qubit, k = 3 for the (3,1,p) code (axes X, Y, Z) and k = 2 for
//! (2,1,p) (axes X, Z).  The relaxed Hamiltonian replaces each spin by √k
//! times its slot Pauli, giving terms `k·J_ij·P_i P_j` and `√k·h_i·P_i`
//! whose ground energy lower-bounds the classical optimum, with equality
//! structure preserved on QRAC product states.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{QrbnbError, Result};
use crate::problem::{Assignment, IsingModel};
use serde::{Deserialize, Serialize};

/// Pauli axis of a QRAC slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    /// Index into a Bloch-vector triple `[⟨X⟩, ⟨Y⟩, ⟨Z⟩]`.
    pub fn bloch_index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::X => write!(f, "X"),
            Axis::Y => write!(f, "Y"),
            Axis::Z => write!(f, "Z"),
        }
    }
}

/// Which quantum random access code compresses the spins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QracKind {
    /// (3,1,p): three bits per qubit, axes X, Y, Z, p = ½(1 + 1/√3).
    #[serde(rename = "31")]
    ThreeOne,
    /// (2,1,p): two bits per qubit, axes X, Z, p = ½(1 + 1/√2).
    #[serde(rename = "21")]
    TwoOne,
}

impl QracKind {
    /// Bits packed per qubit.
    pub fn k(self) -> usize {
        match self {
            QracKind::ThreeOne => 3,
            QracKind::TwoOne => 2,
        }
    }

    /// Axes used by the code, in slot order.
    pub fn axes(self) -> &'static [Axis] {
        match self {
            QracKind::ThreeOne => &[Axis::X, Axis::Y, Axis::Z],
            QracKind::TwoOne => &[Axis::X, Axis::Z],
        }
    }

    /// Coefficient on coupling terms of the relaxed Hamiltonian (= k).
    pub fn coupling_coeff(self) -> f64 {
        self.k() as f64
    }

    /// Coefficient on field terms of the relaxed Hamiltonian (= √k).
    pub fn field_coeff(self) -> f64 {
        (self.k() as f64).sqrt()
    }
}

impl fmt::Display for QracKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QracKind::ThreeOne => write!(f, "31"),
            QracKind::TwoOne => write!(f, "21"),
        }
    }
}

/// Undirected graph with an edge wherever two spins share a nonzero coupling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionGraph {
    pub n_nodes: usize,
    /// Edge set, `i < j`.
    pub edges: BTreeSet<(usize, usize)>,
}

impl InteractionGraph {
    /// Adjacency lists in ascending neighbor order.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_nodes];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }
}

/// A proper vertex coloring of an interaction graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    /// `color[v]` is the color id of node `v`.
    pub color: Vec<usize>,
    pub n_colors: usize,
}

/// Assignment of each spin to a (qubit, axis) slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QracEncoding {
    pub kind: QracKind,
    /// `slots[v] = (qubit, axis)` for node `v`.
    pub slots: Vec<(usize, Axis)>,
    pub n_qubits: usize,
}

/// A real-weighted sum of Pauli strings plus a constant.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTermSum {
    pub n_qubits: usize,
    /// `(coefficient, ops)` with ops sorted by qubit index.
    pub terms: Vec<(f64, Vec<(usize, Axis)>)>,
    pub constant: f64,
}

/// Build the interaction graph of an Ising model: one node per spin, one
/// edge per nonzero coupling.  Isolated nodes are retained.
pub fn build_interaction_graph(ising: &IsingModel) -> InteractionGraph {
    let edges = ising
        .couplings
        .iter()
        .filter(|&(_, &j)| j != 0.0)
        .map(|(&e, _)| e)
        .collect();
    InteractionGraph {
        n_nodes: ising.n_spins,
        edges,
    }
}

/// Greedy proper coloring: visit nodes in ascending index, give each the
/// smallest color unused by its already-colored neighbors.
pub fn greedy_color(graph: &InteractionGraph) -> Coloring {
    let adj = graph.adjacency();
    let mut color = vec![usize::MAX; graph.n_nodes];
    let mut n_colors = 0;
    for v in 0..graph.n_nodes {
        let mut used: BTreeSet<usize> = BTreeSet::new();
        for &u in &adj[v] {
            if u < v {
                used.insert(color[u]);
            }
        }
        let mut c = 0;
        while used.contains(&c) {
            c += 1;
        }
        color[v] = c;
        n_colors = n_colors.max(c + 1);
    }
    Coloring { color, n_colors }
}

/// Pack each color class onto qubits, k nodes per qubit in ascending node
/// order, axes assigned in the code's fixed slot order.
pub fn assign_slots(coloring: &Coloring, kind: QracKind) -> QracEncoding {
    let k = kind.k();
    let axes = kind.axes();
    let mut slots = vec![(usize::MAX, Axis::X); coloring.color.len()];
    let mut next_qubit = 0;
    for c in 0..coloring.n_colors {
        let members: Vec<usize> = (0..coloring.color.len())
            .filter(|&v| coloring.color[v] == c)
            .collect();
        for chunk in members.chunks(k) {
            for (slot, &v) in chunk.iter().enumerate() {
                slots[v] = (next_qubit, axes[slot]);
            }
            next_qubit += 1;
        }
    }
    QracEncoding {
        kind,
        slots,
        n_qubits: next_qubit,
    }
}

/// Relaxed Hamiltonian `H̃ = Σ k·J_ij·P_i P_j + Σ √k·h_i·P_i + offset`.
///
/// Errors if a coupled pair shares a qubit (the encoding must come from a
/// proper coloring of the interaction graph).
pub fn build_relaxed_hamiltonian(
    ising: &IsingModel,
    encoding: &QracEncoding,
) -> Result<PauliTermSum> {
    let kc = encoding.kind.coupling_coeff();
    let fc = encoding.kind.field_coeff();
    let mut terms = Vec::with_capacity(ising.couplings.len() + ising.fields.len());
    for (&(i, j), &jij) in &ising.couplings {
        let (qi, ai) = encoding.slots[i];
        let (qj, aj) = encoding.slots[j];
        if qi == qj {
            return Err(QrbnbError::InvalidInput(format!(
                "coupled spins {i} and {j} share qubit {qi}"
            )));
        }
        let mut ops = vec![(qi, ai), (qj, aj)];
        ops.sort_by_key(|&(q, _)| q);
        terms.push((kc * jij, ops));
    }
    for (&i, &h) in &ising.fields {
        let (qi, ai) = encoding.slots[i];
        terms.push((fc * h, vec![(qi, ai)]));
    }
    Ok(PauliTermSum {
        n_qubits: encoding.n_qubits,
        terms,
        constant: ising.offset,
    })
}

/// Per-qubit Bloch vectors of the QRAC product state of a classical
/// assignment: each qubit's state is `½(I + (1/√k)·Σ_slots (−1)^{x}·P)`.
///
/// Partially filled qubits give mixed single-qubit states, so the state is
/// kept as Bloch vectors rather than amplitudes; expectations of Pauli
/// strings factor across qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QracProductState {
    /// `bloch[q] = [⟨X⟩, ⟨Y⟩, ⟨Z⟩]` on qubit `q`.
    pub bloch: Vec<[f64; 3]>,
}

impl QracProductState {
    /// Expectation of a Pauli-term sum: `Σ coeff·Π_q ⟨P_q⟩ + constant`.
    pub fn expectation(&self, h: &PauliTermSum) -> f64 {
        let mut total = h.constant;
        for (coeff, ops) in &h.terms {
            let mut prod = *coeff;
            for &(q, axis) in ops {
                prod *= self.bloch[q][axis.bloch_index()];
            }
            total += prod;
        }
        total
    }
}

/// QRAC product state encoding a full binary assignment: slot Pauli
/// expectations are `(−1)^{x_v}/√k`, all other axes 0.
pub fn qrac_product_state(encoding: &QracEncoding, assignment: &Assignment) -> QracProductState {
    let bits = assignment.to_bits();
    let inv = 1.0 / encoding.kind.field_coeff();
    let mut bloch = vec![[0.0f64; 3]; encoding.n_qubits];
    for (v, &(q, axis)) in encoding.slots.iter().enumerate() {
        let sign = if bits[v] == 0 { 1.0 } else { -1.0 };
        bloch[q][axis.bloch_index()] = sign * inv;
    }
    QracProductState { bloch }
}

/// Debug dump of a Hamiltonian, one term per line as
/// `coeff axis@qubit [axis@qubit]`, then a `constant` line.
pub fn format_hamiltonian(h: &PauliTermSum) -> String {
    let mut out = String::new();
    for (coeff, ops) in &h.terms {
        out.push_str(&format!("{coeff:.10}"));
        for &(q, axis) in ops {
            out.push_str(&format!(" {axis}@{q}"));
        }
        out.push('\n');
    }
    out.push_str(&format!("constant {:.10}\n", h.constant));
    out
}
