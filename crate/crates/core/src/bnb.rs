//! Branch-and-bound over binary variables with quantum-relaxation bounds.
//!
//! Each open node holds a partial assignment. Its relaxation (see
//! [`crate::relax`]) yields a lower bound on every completion, a rounded
//! candidate for the incumbent, and per-variable expectations that drive
//! branching-variable selection. Nodes whose bound cannot beat the incumbent
//! are pruned; the rest are split by binary or onehot branching, and children
//! that provably violate a linear constraint are discarded at creation.
//!
//! All tie-breaking (queue pops, variable selection, branching order) is
//! deterministic, and stochastic strategies draw from seeded streams, so a
//! run is a pure function of problem, configuration, and seeds.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use crate::error::{QrbnbError, Result};
use crate::problem::{
    apply_penalty, Assignment, ConstraintKind, ConstrainedQuadraticProblem, LinearConstraint,
    Subproblem, FEAS_TOL,
};
use crate::qrac::QracKind;
use crate::relax::{solve_relaxation, Backend, Method, RelaxationResult};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

/// Order in which open nodes are explored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchStrategy {
    /// Depth-first: pop the most recently inserted node.
    Dfs,
    /// Breadth-first: pop the earliest inserted node.
    BrFs,
    /// Best-first: pop the node with the smallest priority key (its parent's
    /// relaxation bound), breaking ties by insertion order.
    Bfs,
}

/// How the branching variable is chosen among a node's unfixed variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionStrategy {
    /// Uniform over unfixed variables, drawn from a stream seeded once per
    /// solve from `seed`.
    Random { seed: u64 },
    /// Largest |expectation| first — the most decided variable.
    #[serde(rename = "least")]
    LeastFractional,
    /// Smallest |expectation| first — the most undecided variable.
    #[serde(rename = "most")]
    MostFractional,
}

/// How a node splits on the selected variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchingStrategy {
    /// Two children: variable fixed to 0, then to 1.
    Binary,
    /// One child per unfixed member of the variable's onehot group, fixing
    /// that member to 1 and the rest to 0; falls back to binary when the
    /// variable is in no eligible group.
    Onehot,
}

/// Default relaxation-evaluation budget per solve.
pub const DEFAULT_EVAL_CAP: usize = 2000;

/// Absolute slack used when comparing bounds against the incumbent: a node
/// is pruned when `bound >= incumbent - BOUND_TOL`.
pub const BOUND_TOL: f64 = 1e-9;

/// Full strategy configuration for one solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BnBConfig {
    pub kind: QracKind,
    pub backend: Backend,
    pub search: SearchStrategy,
    pub selection: SelectionStrategy,
    pub branching: BranchingStrategy,
    /// Maximum number of relaxation evaluations before the search stops and
    /// reports `capped`; must be at least 1.
    pub eval_cap: usize,
}

impl Default for BnBConfig {
    fn default() -> Self {
        Self {
            kind: QracKind::ThreeOne,
            backend: Backend::Exact,
            search: SearchStrategy::Bfs,
            selection: SelectionStrategy::LeastFractional,
            branching: BranchingStrategy::Binary,
            eval_cap: DEFAULT_EVAL_CAP,
        }
    }
}

/// One open node of the search tree.
#[derive(Debug, Clone)]
pub struct BnBNode<'a> {
    pub sub: Subproblem<'a>,
    /// The parent's relaxation bound (−∞ at the root); best-first order key.
    pub priority_key: f64,
    /// Global insertion counter; tie-breaker and DFS/BrFS order key.
    pub insertion_seq: u64,
}

/// Pool of open nodes; the pop rule is chosen per call so one structure
/// serves every search strategy.
#[derive(Debug, Default)]
pub struct NodeQueue<'a> {
    nodes: Vec<BnBNode<'a>>,
}

impl<'a> NodeQueue<'a> {
    pub fn new() -> Self {
        Self { nodes: Vec::new() }
    }

    pub fn push(&mut self, node: BnBNode<'a>) {
        self.nodes.push(node);
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Remove and return the next node under the given strategy, or `None`
    /// when the pool is empty.
    pub fn pop(&mut self, search: SearchStrategy) -> Option<BnBNode<'a>> {
        if self.nodes.is_empty() {
            return None;
        }
        let best = match search {
            SearchStrategy::Dfs => (0..self.nodes.len())
                .max_by_key(|&i| self.nodes[i].insertion_seq)
                .unwrap(),
            SearchStrategy::BrFs => (0..self.nodes.len())
                .min_by_key(|&i| self.nodes[i].insertion_seq)
                .unwrap(),
            SearchStrategy::Bfs => {
                let mut best = 0;
                for i in 1..self.nodes.len() {
                    let (a, b) = (&self.nodes[i], &self.nodes[best]);
                    if a.priority_key < b.priority_key
                        || (a.priority_key == b.priority_key
                            && a.insertion_seq < b.insertion_seq)
                    {
                        best = i;
                    }
                }
                best
            }
        };
        Some(self.nodes.remove(best))
    }
}

/// Outcome of checking one linear constraint against a partial assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintStatus {
    /// Some completion may satisfy it.
    FeasiblePossible,
    /// Every completion satisfies it.
    AlwaysSatisfied,
    /// No completion can satisfy it.
    Infeasible,
}

/// Interval test of every constraint under the fixed variables: with
/// `b̃ = rhs − Σ_fixed a_j x_j` and the unfixed coefficients' negative/positive
/// sums `inf`/`sup`, an equality is infeasible iff `b̃ ∉ [inf, sup]` and an
/// inequality iff `b̃ < inf` (always satisfied once `sup ≤ b̃`).
pub fn feasibility_check(
    problem: &ConstrainedQuadraticProblem,
    fixed: &BTreeMap<usize, u8>,
) -> Vec<ConstraintStatus> {
    problem
        .constraints
        .iter()
        .map(|c| {
            let mut b_res = c.rhs;
            let (mut inf, mut sup) = (0.0_f64, 0.0_f64);
            for &(j, a) in &c.coeffs {
                match fixed.get(&j) {
                    Some(&bit) => b_res -= a * f64::from(bit),
                    None if a > 0.0 => sup += a,
                    None => inf += a,
                }
            }
            match c.kind {
                ConstraintKind::Eq => {
                    if b_res < inf - FEAS_TOL || b_res > sup + FEAS_TOL {
                        ConstraintStatus::Infeasible
                    } else if sup - inf <= FEAS_TOL {
                        ConstraintStatus::AlwaysSatisfied
                    } else {
                        ConstraintStatus::FeasiblePossible
                    }
                }
                ConstraintKind::Le => {
                    if b_res < inf - FEAS_TOL {
                        ConstraintStatus::Infeasible
                    } else if sup <= b_res + FEAS_TOL {
                        ConstraintStatus::AlwaysSatisfied
                    } else {
                        ConstraintStatus::FeasiblePossible
                    }
                }
            }
        })
        .collect()
}

fn any_infeasible(statuses: &[ConstraintStatus]) -> bool {
    statuses.contains(&ConstraintStatus::Infeasible)
}

/// Round a relaxation to a full binary assignment: each unfixed variable
/// takes the sign of its Pauli expectation (≥ 0 → spin +1 → bit 0), fixed
/// variables keep their values.
pub fn pauli_round(result: &RelaxationResult, sub: &Subproblem) -> Assignment {
    let bits = (0..sub.base.n_vars)
        .map(|i| match sub.fixed.get(&i) {
            Some(&bit) => bit,
            None => {
                let e = result.expectations.get(&i).copied().unwrap_or(0.0);
                u8::from(e < 0.0)
            }
        })
        .collect();
    Assignment::from_bits(bits)
}

/// Choose the branching variable from a node's relaxation expectations.
/// Least/most-fractional ties resolve to the lowest index; the random
/// strategy draws uniformly from `rng` (which only that strategy consumes).
pub fn select_variable(
    result: &RelaxationResult,
    selection: &SelectionStrategy,
    rng: &mut impl Rng,
) -> Result<usize> {
    if result.expectations.is_empty() {
        return Err(QrbnbError::InvalidInput(
            "variable selection on a fully fixed subproblem".into(),
        ));
    }
    let pick = match selection {
        SelectionStrategy::Random { .. } => {
            let keys: Vec<usize> = result.expectations.keys().copied().collect();
            keys[rng.gen_range(0..keys.len())]
        }
        SelectionStrategy::LeastFractional => {
            let mut best = (usize::MAX, f64::NEG_INFINITY);
            for (&i, &e) in &result.expectations {
                if e.abs() > best.1 {
                    best = (i, e.abs());
                }
            }
            best.0
        }
        SelectionStrategy::MostFractional => {
            let mut best = (usize::MAX, f64::INFINITY);
            for (&i, &e) in &result.expectations {
                if e.abs() < best.1 {
                    best = (i, e.abs());
                }
            }
            best.0
        }
    };
    Ok(pick)
}

/// Split a node on `index`. Binary branching yields the 0-child then the
/// 1-child. Onehot branching looks for eligible onehot groups — tagged
/// onehot constraints containing `index` with no member already fixed to 1 —
/// and picks the one with the most unfixed members (ties: lexicographically
/// smallest tag), emitting one child per unfixed member `k` in ascending
/// order with `k` fixed to 1 and the group's other unfixed members to 0.
/// Without an eligible group it degrades to binary.
pub fn branch<'a>(
    sub: &Subproblem<'a>,
    index: usize,
    branching: BranchingStrategy,
) -> Result<Vec<Subproblem<'a>>> {
    if index >= sub.base.n_vars {
        return Err(QrbnbError::VariableOutOfRange {
            index,
            n_vars: sub.base.n_vars,
        });
    }
    if sub.fixed.contains_key(&index) {
        return Err(QrbnbError::InvalidInput(format!(
            "branching on already-fixed variable {index}"
        )));
    }
    if branching == BranchingStrategy::Onehot {
        if let Some(group) = eligible_onehot_group(sub, index) {
            let members: Vec<usize> = group
                .members()
                .filter(|m| !sub.fixed.contains_key(m))
                .collect();
            return Ok(members
                .iter()
                .map(|&k| {
                    let fixings: Vec<(usize, u8)> = members
                        .iter()
                        .map(|&m| (m, u8::from(m == k)))
                        .collect();
                    sub.child(&fixings)
                })
                .collect());
        }
    }
    Ok(vec![sub.child(&[(index, 0)]), sub.child(&[(index, 1)])])
}

/// The onehot constraint `index` should branch over, if any: among tagged
/// onehot groups containing `index` with no member fixed to 1, the one with
/// the most unfixed members, ties broken by tag.
fn eligible_onehot_group<'p>(
    sub: &Subproblem<'p>,
    index: usize,
) -> Option<&'p LinearConstraint> {
    sub.base
        .constraints
        .iter()
        .filter(|c| {
            c.is_onehot()
                && c.members().any(|m| m == index)
                && !c.members().any(|m| sub.fixed.get(&m) == Some(&1))
        })
        .min_by(|a, b| {
            let unfixed = |c: &LinearConstraint| {
                c.members().filter(|m| !sub.fixed.contains_key(m)).count()
            };
            unfixed(b)
                .cmp(&unfixed(a))
                .then_with(|| a.tag.cmp(&b.tag))
        })
}

/// Deterministically derive a seed from a base seed and context words
/// (instance ids, node counters, …) with splitmix-style avalanching.
pub fn mix_seed(base: u64, parts: &[u64]) -> u64 {
    let mut state = splitmix64(base ^ 0x9e37_79b9_7f4a_7c15);
    for &p in parts {
        state = splitmix64(state ^ p);
    }
    state
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const SELECT_SALT: u64 = 0x73_656c; // "sel"
const VQE_SALT: u64 = 0x76_7165; // "vqe"

/// Memo cache for exact-backend relaxations. Results are pure functions of
/// (QRAC kind, fixed map) for a fixed folded problem, so a cache may be
/// shared across solves of the *same* problem (e.g. a strategy grid) to skip
/// repeated ground-state computations; cache hits still count as relaxation
/// evaluations. VQE results are never cached — their per-node seeds are part
/// of the run's semantics.
#[derive(Debug, Default)]
pub struct RelaxCache {
    map: Mutex<HashMap<(QracKind, Vec<(usize, u8)>), RelaxationResult>>,
}

impl RelaxCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn relax_node(
    sub: &Subproblem,
    kind: QracKind,
    backend: Backend,
    cache: Option<&RelaxCache>,
) -> Result<RelaxationResult> {
    let cache = match (cache, backend) {
        (Some(c), Backend::Exact) => c,
        _ => return solve_relaxation(sub, kind, backend),
    };
    let key = (kind, sub.fixed.iter().map(|(&i, &b)| (i, b)).collect());
    if let Some(hit) = cache.map.lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let result = solve_relaxation(sub, kind, backend)?;
    cache.map.lock().unwrap().insert(key, result.clone());
    Ok(result)
}

/// Best feasible solution seen so far.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Incumbent {
    pub value: f64,
    pub assignment: Assignment,
    /// Relaxation-evaluation count at the moment of discovery.
    pub found_at_eval: usize,
}

/// What happened to a processed node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeOutcome {
    Branched,
    PrunedBound,
    Leaf,
}

/// One processed node, in processing order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceEntry {
    /// Relaxation-evaluation count after this node was processed.
    pub eval_index: usize,
    pub depth: usize,
    /// The node's lower bound (for leaves, its exact value).
    pub bound: f64,
    pub outcome: NodeOutcome,
    /// The node's fixed variables as (index, bit), ascending by index.
    pub fixed: Vec<(usize, u8)>,
}

/// Everything a solve produces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    /// Best feasible solution, if one was found (absent only when the eval
    /// cap struck first).
    pub incumbent: Option<Incumbent>,
    /// Relaxation evaluations spent (fully fixed leaves cost none).
    pub n_eval: usize,
    /// The subset of evaluations that ran the quantum pipeline rather than
    /// the small-subproblem classical fallback.
    pub n_eval_quantum: usize,
    /// True when the search ran to completion on exact bounds, making the
    /// incumbent a certified optimum.
    pub proven_optimal: bool,
    /// True when the eval cap stopped the search early.
    pub capped: bool,
    pub node_trace: Vec<TraceEntry>,
}

/// Solve a problem by quantum-relaxation branch-and-bound.
///
/// Equality constraints are folded into the objective as unit-weight
/// penalties for bounding purposes; all constraints (including inequalities)
/// additionally gate the search through interval feasibility checks, and
/// incumbents are scored and checked on the original problem. Errors:
/// invalid problem or configuration, onehot branching without an onehot
/// constraint, a provably infeasible root, or exhausting the tree without
/// ever finding a feasible assignment.
pub fn solve(problem: &ConstrainedQuadraticProblem, config: &BnBConfig) -> Result<SolveReport> {
    solve_with_cache(problem, config, None)
}

/// As [`solve`], optionally reusing a [`RelaxCache`] shared across repeated
/// solves of the same problem.
pub fn solve_with_cache(
    problem: &ConstrainedQuadraticProblem,
    config: &BnBConfig,
    cache: Option<&RelaxCache>,
) -> Result<SolveReport> {
    problem.validate()?;
    if config.eval_cap == 0 {
        return Err(QrbnbError::InvalidInput("eval_cap must be at least 1".into()));
    }
    if config.branching == BranchingStrategy::Onehot
        && !problem.constraints.iter().any(LinearConstraint::is_onehot)
    {
        return Err(QrbnbError::InvalidInput(
            "onehot branching requires at least one onehot-tagged constraint".into(),
        ));
    }
    let folded = fold_equalities(problem)?;
    let root = Subproblem::root(&folded);
    if any_infeasible(&feasibility_check(&folded, &root.fixed)) {
        return Err(QrbnbError::Infeasible(
            "a constraint is unsatisfiable before any branching".into(),
        ));
    }

    let mut queue = NodeQueue::new();
    queue.push(BnBNode {
        sub: root,
        priority_key: f64::NEG_INFINITY,
        insertion_seq: 0,
    });
    let mut next_seq: u64 = 1;
    let mut sel_rng = match config.selection {
        SelectionStrategy::Random { seed } => {
            ChaCha20Rng::seed_from_u64(mix_seed(seed, &[SELECT_SALT]))
        }
        _ => ChaCha20Rng::seed_from_u64(0),
    };

    let mut incumbent: Option<Incumbent> = None;
    let mut n_eval = 0_usize;
    let mut n_eval_quantum = 0_usize;
    let mut capped = false;
    let mut all_exact = true;
    let mut node_trace = Vec::new();

    while let Some(node) = queue.pop(config.search) {
        let fully_fixed = node.sub.n_unfixed() == 0;
        if !fully_fixed && n_eval >= config.eval_cap {
            capped = true;
            break;
        }
        let backend = match config.backend {
            Backend::Vqe { layers, seed } => Backend::Vqe {
                layers,
                seed: mix_seed(seed, &[VQE_SALT, node.insertion_seq]),
            },
            other => other,
        };
        let relax = relax_node(&node.sub, config.kind, backend, cache)?;
        if !fully_fixed {
            n_eval += 1;
            if relax.method_used != Method::BruteForce {
                n_eval_quantum += 1;
            }
            if !relax.is_exact_bound {
                all_exact = false;
            }
        }

        let candidate = pauli_round(&relax, &node.sub);
        if problem.is_feasible(&candidate)? {
            let value = problem.evaluate(&candidate)?;
            if incumbent.as_ref().map_or(true, |inc| value < inc.value) {
                incumbent = Some(Incumbent {
                    value,
                    assignment: candidate,
                    found_at_eval: n_eval,
                });
            }
        }
        let z_inc = incumbent.as_ref().map_or(f64::INFINITY, |inc| inc.value);

        let outcome = if fully_fixed {
            NodeOutcome::Leaf
        } else if relax.bound >= z_inc - BOUND_TOL {
            NodeOutcome::PrunedBound
        } else {
            let index = select_variable(&relax, &config.selection, &mut sel_rng)?;
            for child in branch(&node.sub, index, config.branching)? {
                if !any_infeasible(&feasibility_check(&folded, &child.fixed)) {
                    queue.push(BnBNode {
                        sub: child,
                        priority_key: relax.bound,
                        insertion_seq: next_seq,
                    });
                    next_seq += 1;
                }
            }
            NodeOutcome::Branched
        };
        node_trace.push(TraceEntry {
            eval_index: n_eval,
            depth: node.sub.depth,
            bound: relax.bound,
            outcome,
            fixed: node.sub.fixed.iter().map(|(&i, &b)| (i, b)).collect(),
        });
    }

    if incumbent.is_none() && !capped {
        return Err(QrbnbError::Infeasible(
            "search exhausted without finding a feasible assignment".into(),
        ));
    }
    let proven_optimal = !capped && incumbent.is_some() && all_exact;
    Ok(SolveReport {
        incumbent,
        n_eval,
        n_eval_quantum,
        proven_optimal,
        capped,
        node_trace,
    })
}

/// Fold equality constraints into the objective (unit weights) while leaving
/// the full constraint list — inequalities included — attached for
/// feasibility checking.
fn fold_equalities(
    problem: &ConstrainedQuadraticProblem,
) -> Result<ConstrainedQuadraticProblem> {
    let eq_only = ConstrainedQuadraticProblem {
        constraints: problem
            .constraints
            .iter()
            .filter(|c| c.kind == ConstraintKind::Eq)
            .cloned()
            .collect(),
        ..problem.clone()
    };
    let mut folded = apply_penalty(&eq_only, &BTreeMap::new())?;
    folded.constraints = problem.constraints.clone();
    Ok(folded)
}
