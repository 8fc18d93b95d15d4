//! Binary quadratic programs and their Ising form.
//!
//! A [`ConstrainedQuadraticProblem`] minimizes `x^T Q x + offset` over binary
//! vectors subject to linear constraints.  Equality constraints can be folded
//! into the objective as quadratic penalties ([`apply_penalty`]); the folded
//! objective converts exactly to an [`IsingModel`] over spins
//! ([`qubo_to_ising`]), which is what the relaxation encoder consumes.
//! Partial assignments reduce to smaller problems via [`fix_variables`], and
//! [`brute_force_solve`] provides the exact reference optimum for testing and
//! metric aggregation.

use std::collections::BTreeMap;

use crate::error::{QrbnbError, Result};
use serde::{Deserialize, Serialize};

/// Whether an [`Assignment`] stores bits (0/1) or spins (±1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarSpace {
    Binary,
    Spin,
}

/// A full assignment of every variable, in binary or spin space.
///
/// The two spaces are linked by `s_i = (-1)^{x_i}`, i.e. bit 0 ↔ spin +1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub values: Vec<i8>,
    pub space: VarSpace,
}

impl Assignment {
    pub fn from_bits(bits: Vec<u8>) -> Self {
        Assignment {
            values: bits.into_iter().map(|b| b as i8).collect(),
            space: VarSpace::Binary,
        }
    }

    pub fn from_spins(spins: Vec<i8>) -> Self {
        Assignment {
            values: spins,
            space: VarSpace::Spin,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The assignment as bits, converting from spins if necessary.
    pub fn to_bits(&self) -> Vec<u8> {
        match self.space {
            VarSpace::Binary => self.values.iter().map(|&v| v as u8).collect(),
            VarSpace::Spin => self.values.iter().map(|&s| ((1 - s) / 2) as u8).collect(),
        }
    }

    /// The assignment as spins, converting from bits if necessary.
    pub fn to_spins(&self) -> Vec<i8> {
        match self.space {
            VarSpace::Binary => self.values.iter().map(|&x| 1 - 2 * x).collect(),
            VarSpace::Spin => self.values.clone(),
        }
    }
}

/// Equality or less-equal sense of a linear constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    Eq,
    Le,
}

/// A linear constraint `Σ a_i x_i {=, ≤} rhs` over binary variables.
///
/// Constraints whose tag starts with `"onehot"` are treated as one-hot groups
/// by the branching logic and must have unit coefficients and rhs 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    /// `(index, coefficient)` pairs; indices distinct and in range.
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
    pub kind: ConstraintKind,
    pub tag: Option<String>,
}

impl LinearConstraint {
    /// Build an equality one-hot constraint `Σ_{i∈members} x_i = 1`.
    pub fn onehot(members: Vec<usize>, tag: impl Into<String>) -> Self {
        LinearConstraint {
            coeffs: members.into_iter().map(|i| (i, 1.0)).collect(),
            rhs: 1.0,
            kind: ConstraintKind::Eq,
            tag: Some(tag.into()),
        }
    }

    /// True when this constraint is a one-hot group usable by Onehot Branch:
    /// tagged `onehot*`, equality, all coefficients 1, rhs 1.
    pub fn is_onehot(&self) -> bool {
        self.tag.as_deref().is_some_and(|t| t.starts_with("onehot"))
            && self.kind == ConstraintKind::Eq
            && (self.rhs - 1.0).abs() == 0.0
            && self.coeffs.iter().all(|&(_, a)| a == 1.0)
    }

    /// Member indices of the constraint.
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.iter().map(|&(i, _)| i)
    }

    /// Evaluate `Σ a_i x_i` on a full bit vector.
    pub fn lhs(&self, bits: &[u8]) -> f64 {
        self.coeffs
            .iter()
            .map(|&(i, a)| a * bits[i] as f64)
            .sum::<f64>()
    }

    /// Whether the constraint holds on a full bit vector (tolerance 1e-9).
    pub fn satisfied(&self, bits: &[u8]) -> bool {
        let v = self.lhs(bits);
        match self.kind {
            ConstraintKind::Eq => (v - self.rhs).abs() <= FEAS_TOL,
            ConstraintKind::Le => v <= self.rhs + FEAS_TOL,
        }
    }
}

/// Feasibility tolerance on real-valued constraint arithmetic.
pub const FEAS_TOL: f64 = 1e-9;

/// A minimization problem `min x^T Q x + offset` over binary `x`, subject to
/// linear constraints.
///
/// `quadratic` is stored upper-triangular (`i ≤ j`); diagonal entries are
/// linear terms since `x_i² = x_i`.  The constant `offset` carries additive
/// terms produced by penalty folding and variable fixing so that objective
/// values stay exactly comparable across transformations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedQuadraticProblem {
    pub n_vars: usize,
    /// Map `(i, j) → Q_ij` with `i ≤ j`; no zero entries stored.
    pub quadratic: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
    pub constraints: Vec<LinearConstraint>,
}

impl ConstrainedQuadraticProblem {
    pub fn new(n_vars: usize) -> Self {
        ConstrainedQuadraticProblem {
            n_vars,
            quadratic: BTreeMap::new(),
            offset: 0.0,
            constraints: Vec::new(),
        }
    }

    /// Add `c · x_i x_j` (or `c · x_i` when `i == j`), accumulating into the
    /// canonical upper-triangular entry and dropping it if it cancels to zero.
    pub fn add_quadratic(&mut self, i: usize, j: usize, c: f64) {
        let key = if i <= j { (i, j) } else { (j, i) };
        let entry = self.quadratic.entry(key).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.quadratic.remove(&key);
        }
    }

    /// Structural validation: index ranges, triangular storage, and the
    /// one-hot tagging rule.
    pub fn validate(&self) -> Result<()> {
        for (&(i, j), _) in &self.quadratic {
            if i > j {
                return Err(QrbnbError::InvalidInput(format!(
                    "quadratic key ({i},{j}) not upper-triangular"
                )));
            }
            if j >= self.n_vars {
                return Err(QrbnbError::VariableOutOfRange {
                    index: j,
                    n_vars: self.n_vars,
                });
            }
        }
        for c in &self.constraints {
            if c.coeffs.is_empty() {
                return Err(QrbnbError::InvalidInput(
                    "constraint with no coefficients".into(),
                ));
            }
            let mut seen = std::collections::BTreeSet::new();
            for &(i, _) in &c.coeffs {
                if i >= self.n_vars {
                    return Err(QrbnbError::VariableOutOfRange {
                        index: i,
                        n_vars: self.n_vars,
                    });
                }
                if !seen.insert(i) {
                    return Err(QrbnbError::InvalidInput(format!(
                        "constraint repeats variable {i}"
                    )));
                }
            }
            let onehot_tagged = c.tag.as_deref().is_some_and(|t| t.starts_with("onehot"));
            if onehot_tagged && !c.is_onehot() {
                return Err(QrbnbError::InvalidInput(format!(
                    "constraint tagged {:?} is not a one-hot group",
                    c.tag
                )));
            }
        }
        Ok(())
    }

    /// Objective value `x^T Q x + offset` on a full assignment.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<f64> {
        if assignment.len() != self.n_vars {
            return Err(QrbnbError::InvalidInput(format!(
                "assignment length {} != n_vars {}",
                assignment.len(),
                self.n_vars
            )));
        }
        let bits = assignment.to_bits();
        let mut v = self.offset;
        for (&(i, j), &c) in &self.quadratic {
            v += c * (bits[i] as f64) * (bits[j] as f64);
        }
        Ok(v)
    }

    /// Whether the assignment satisfies every (unfolded) constraint.
    pub fn is_feasible(&self, assignment: &Assignment) -> Result<bool> {
        if assignment.len() != self.n_vars {
            return Err(QrbnbError::InvalidInput(format!(
                "assignment length {} != n_vars {}",
                assignment.len(),
                self.n_vars
            )));
        }
        let bits = assignment.to_bits();
        Ok(self.constraints.iter().all(|c| c.satisfied(&bits)))
    }
}

/// Classical Ising model `offset + Σ_{i<j} J_ij s_i s_j + Σ_i h_i s_i` over
/// spins `s_i ∈ {±1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingModel {
    pub n_spins: usize,
    /// Map `(i, j) → J_ij` with `i < j`; no zero entries stored.
    pub couplings: BTreeMap<(usize, usize), f64>,
    /// Map `i → h_i`; no zero entries stored.
    pub fields: BTreeMap<usize, f64>,
    pub offset: f64,
}

impl IsingModel {
    /// Energy of a full spin vector.
    pub fn evaluate_spins(&self, spins: &[i8]) -> f64 {
        let mut v = self.offset;
        for (&(i, j), &jij) in &self.couplings {
            v += jij * (spins[i] as f64) * (spins[j] as f64);
        }
        for (&i, &h) in &self.fields {
            v += h * spins[i] as f64;
        }
        v
    }
}

/// A node of the branch-and-bound tree: the base problem plus a partial
/// assignment of fixed variables.
#[derive(Debug, Clone)]
pub struct Subproblem<'a> {
    pub base: &'a ConstrainedQuadraticProblem,
    /// Map variable index → fixed bit.
    pub fixed: BTreeMap<usize, u8>,
    pub depth: usize,
}

impl<'a> Subproblem<'a> {
    pub fn root(base: &'a ConstrainedQuadraticProblem) -> Self {
        Subproblem {
            base,
            fixed: BTreeMap::new(),
            depth: 0,
        }
    }

    /// Unfixed variable indices in ascending order.
    pub fn unfixed(&self) -> Vec<usize> {
        (0..self.base.n_vars)
            .filter(|i| !self.fixed.contains_key(i))
            .collect()
    }

    pub fn n_unfixed(&self) -> usize {
        self.base.n_vars - self.fixed.len()
    }

    /// Child subproblem with additional fixings applied.
    pub fn child(&self, fixings: &[(usize, u8)]) -> Self {
        let mut fixed = self.fixed.clone();
        for &(i, b) in fixings {
            fixed.insert(i, b);
        }
        Subproblem {
            base: self.base,
            fixed,
            depth: self.depth + 1,
        }
    }

    /// Merge the fixed map with bits for the unfixed variables (given in
    /// ascending index order) into a full assignment.
    pub fn complete(&self, unfixed_bits: &[u8]) -> Assignment {
        let mut bits = vec![0u8; self.base.n_vars];
        for (&i, &b) in &self.fixed {
            bits[i] = b;
        }
        for (slot, &i) in self.unfixed().iter().enumerate() {
            bits[i] = unfixed_bits[slot];
        }
        Assignment::from_bits(bits)
    }
}

/// Fold every equality constraint into the objective as a quadratic penalty
/// `w · (Σ a_i x_i − rhs)²`, keyed by constraint tag (untagged and unlisted
/// tags get weight 1.0).  The constraint list is retained on the returned
/// problem: penalties exist for the relaxation Hamiltonian only, while
/// feasibility checks keep using the original linear constraints.
pub fn apply_penalty(
    problem: &ConstrainedQuadraticProblem,
    weights: &BTreeMap<String, f64>,
) -> Result<ConstrainedQuadraticProblem> {
    let mut out = problem.clone();
    for c in &problem.constraints {
        if c.kind == ConstraintKind::Le {
            return Err(QrbnbError::UnsupportedFold(
                "inequality constraints cannot be folded into a penalty objective".into(),
            ));
        }
        let w = c
            .tag
            .as_deref()
            .and_then(|t| weights.get(t).copied())
            .unwrap_or(1.0);
        // w·(Σ a_i x_i − b)² = w·[Σ_{i,j} a_i a_j x_i x_j − 2b Σ a_i x_i + b²],
        // with x_i² = x_i folding the squares into the diagonal.
        for (p, &(i, ai)) in c.coeffs.iter().enumerate() {
            out.add_quadratic(i, i, w * (ai * ai - 2.0 * c.rhs * ai));
            for &(j, aj) in &c.coeffs[p + 1..] {
                out.add_quadratic(i, j, w * 2.0 * ai * aj);
            }
        }
        out.offset += w * c.rhs * c.rhs;
    }
    Ok(out)
}

/// Exact conversion of an (already folded) quadratic objective to spin form
/// via `x_i = (1 − s_i)/2`.
pub fn qubo_to_ising(problem: &ConstrainedQuadraticProblem) -> IsingModel {
    let mut couplings: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut fields: BTreeMap<usize, f64> = BTreeMap::new();
    let mut offset = problem.offset;
    for (&(i, j), &q) in &problem.quadratic {
        if i == j {
            // q·x_i = q·(1 − s_i)/2
            *fields.entry(i).or_insert(0.0) += -q / 2.0;
            offset += q / 2.0;
        } else {
            // q·x_i x_j = q·(1 − s_i − s_j + s_i s_j)/4
            *couplings.entry((i, j)).or_insert(0.0) += q / 4.0;
            *fields.entry(i).or_insert(0.0) += -q / 4.0;
            *fields.entry(j).or_insert(0.0) += -q / 4.0;
            offset += q / 4.0;
        }
    }
    couplings.retain(|_, v| *v != 0.0);
    fields.retain(|_, v| *v != 0.0);
    IsingModel {
        n_spins: problem.n_vars,
        couplings,
        fields,
        offset,
    }
}

/// Reduce a subproblem to an unconstrained quadratic over its unfixed
/// variables.  Returns the reduced problem, the map reduced index → original
/// index, and the constant offset contributed by the fixed variables (plus
/// the base offset).
pub fn fix_variables(
    sub: &Subproblem,
) -> (ConstrainedQuadraticProblem, Vec<usize>, f64) {
    let index_map = sub.unfixed();
    let mut reduced_of = BTreeMap::new();
    for (r, &orig) in index_map.iter().enumerate() {
        reduced_of.insert(orig, r);
    }
    let mut reduced = ConstrainedQuadraticProblem::new(index_map.len());
    let mut offset = sub.base.offset;
    for (&(i, j), &q) in &sub.base.quadratic {
        match (sub.fixed.get(&i), sub.fixed.get(&j)) {
            (Some(&bi), Some(&bj)) => offset += q * (bi as f64) * (bj as f64),
            (Some(&bi), None) => {
                if bi == 1 {
                    let rj = reduced_of[&j];
                    reduced.add_quadratic(rj, rj, q);
                }
            }
            (None, Some(&bj)) => {
                if bj == 1 {
                    let ri = reduced_of[&i];
                    reduced.add_quadratic(ri, ri, q);
                }
            }
            (None, None) => {
                reduced.add_quadratic(reduced_of[&i], reduced_of[&j], q);
            }
        }
    }
    (reduced, index_map, offset)
}

/// Maximum problem size accepted by [`brute_force_solve`].
pub const BRUTE_FORCE_MAX_VARS: usize = 26;

/// Exact optimum by exhaustive enumeration of feasible assignments.
///
/// Ties are broken toward the assignment with the lowest binary value read
/// with `x_0` as the most significant bit, so results are deterministic.
pub fn brute_force_solve(
    problem: &ConstrainedQuadraticProblem,
) -> Result<(f64, Assignment)> {
    let n = problem.n_vars;
    if n > BRUTE_FORCE_MAX_VARS {
        return Err(QrbnbError::TooLarge(format!(
            "brute force limited to {BRUTE_FORCE_MAX_VARS} variables, got {n}"
        )));
    }
    let terms: Vec<(usize, usize, f64)> = problem
        .quadratic
        .iter()
        .map(|(&(i, j), &c)| (i, j, c))
        .collect();
    let mut best: Option<(f64, Vec<u8>)> = None;
    let mut bits = vec![0u8; n];
    for a in 0u64..(1u64 << n) {
        for (i, b) in bits.iter_mut().enumerate() {
            *b = ((a >> (n - 1 - i)) & 1) as u8;
        }
        if !problem.constraints.iter().all(|c| c.satisfied(&bits)) {
            continue;
        }
        let mut v = problem.offset;
        for &(i, j, c) in &terms {
            v += c * (bits[i] as f64) * (bits[j] as f64);
        }
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, bits.clone()));
        }
    }
    match best {
        Some((v, bits)) => Ok((v, Assignment::from_bits(bits))),
        None => Err(QrbnbError::Infeasible(
            "no feasible assignment exists".into(),
        )),
    }
}

/// MaxCut on a simple undirected graph as a minimization problem: the
/// objective is `−(1/2) Σ_{(i,j)∈E} (1 − s_i s_j)`, written over binary
/// variables.  The optimum is minus the maximum cut size.
pub fn maxcut_to_problem(
    n_nodes: usize,
    edges: &[(usize, usize)],
) -> Result<ConstrainedQuadraticProblem> {
    let mut problem = ConstrainedQuadraticProblem::new(n_nodes);
    let mut seen = std::collections::BTreeSet::new();
    for &(u, v) in edges {
        if u == v {
            return Err(QrbnbError::InvalidInput(format!("self-loop at node {u}")));
        }
        if u >= n_nodes || v >= n_nodes {
            return Err(QrbnbError::VariableOutOfRange {
                index: u.max(v),
                n_vars: n_nodes,
            });
        }
        let key = (u.min(v), u.max(v));
        if !seen.insert(key) {
            return Err(QrbnbError::InvalidInput(format!(
                "duplicate edge ({}, {})",
                key.0, key.1
            )));
        }
        // −(1/2)(1 − s_u s_v) = −x_u − x_v + 2·x_u x_v in binary form.
        problem.add_quadratic(key.0, key.0, -1.0);
        problem.add_quadratic(key.1, key.1, -1.0);
        problem.add_quadratic(key.0, key.1, 2.0);
    }
    Ok(problem)
}

/// Traveling salesman as a quadratic program with one-hot constraints.
///
/// Variable `x_{i,t}` (index `i·N + t`) means city `i` is visited at time
/// `t`.  The objective sums `d_ij x_{i,t} x_{j,t+1 mod N}` over ordered pairs
/// and all times; `2N` one-hot equality groups (one per time, one per city)
/// are attached for feasibility checks, penalty folding, and Onehot Branch.
pub fn tsp_to_problem(distances: &[Vec<f64>]) -> Result<ConstrainedQuadraticProblem> {
    let n = distances.len();
    if n < 2 {
        return Err(QrbnbError::InvalidInput(
            "TSP needs at least 2 cities".into(),
        ));
    }
    for (i, row) in distances.iter().enumerate() {
        if row.len() != n {
            return Err(QrbnbError::InvalidInput("distance matrix not square".into()));
        }
        if distances[i][i] != 0.0 {
            return Err(QrbnbError::InvalidInput(format!(
                "distance matrix diagonal entry {i} is nonzero"
            )));
        }
        for j in 0..n {
            if row[j] < 0.0 {
                return Err(QrbnbError::InvalidInput(format!(
                    "negative distance at ({i}, {j})"
                )));
            }
            if (row[j] - distances[j][i]).abs() > 0.0 {
                return Err(QrbnbError::InvalidInput(format!(
                    "distance matrix not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let var = |i: usize, t: usize| i * n + t;
    let mut problem = ConstrainedQuadraticProblem::new(n * n);
    for t in 0..n {
        let t_next = (t + 1) % n;
        for i in 0..n {
            for j in 0..n {
                if i != j && distances[i][j] != 0.0 {
                    problem.add_quadratic(var(i, t), var(j, t_next), distances[i][j]);
                }
            }
        }
    }
    for t in 0..n {
        let members = (0..n).map(|i| var(i, t)).collect();
        problem
            .constraints
            .push(LinearConstraint::onehot(members, format!("onehot-time-{t}")));
    }
    for i in 0..n {
        let members = (0..n).map(|t| var(i, t)).collect();
        problem
            .constraints
            .push(LinearConstraint::onehot(members, format!("onehot-city-{i}")));
    }
    Ok(problem)
}
