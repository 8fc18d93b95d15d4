//! Quantum-relaxation branch-and-bound for binary quadratic programs.
//!
//! The solver lower-bounds constrained binary quadratic subproblems by the
//! ground energy of a qubit-compressed relaxation of their Ising form and
//! embeds that bound inside a classical branch-and-bound search.  Variables
//! are packed onto qubits with quantum random access codes, the relaxed
//! Hamiltonian is diagonalized (exactly, or variationally with a simulated
//! VQE), and ground-state Pauli expectations are rounded back to candidate
//! assignments that drive the incumbent.
//!
//! The crate is organized bottom-up:
//!
//! * [`problem`] — binary quadratic programs, Ising conversion, fixing,
//!   penalty folding, brute force reference solves.
//! * [`qrac`] — interaction-graph coloring, slot assignment, and the relaxed
//!   Hamiltonian construction.
//! * [`sim`] — dense statevectors, Pauli-string application, exact ground
//!   energies (dense and Lanczos), hardware-efficient ansatz and the NFT
//!   parameter optimizer.
//! * [`relax`] — one-shot relaxation solves tying the above together.
//! * [`bnb`] — the branch-and-bound engine with pluggable search, selection,
//!   and branching strategies.
//! * [`experiments`] — instance generators and the sweep runner behind the
//!   command line interface.

pub mod bnb;
pub mod error;
pub mod experiments;
pub mod io;
pub mod problem;
pub mod qrac;
pub mod relax;
pub mod sim;

pub use error::QrbnbError;
