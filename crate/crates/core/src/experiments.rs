//! Experiment sweeps: seeded instance generators, strategy grids, and a
//! resumable CSV metrics runner.
//!
//! Two instance families are built in — MaxCut on random 3-regular graphs
//! and tours over random planar cities — each materialized deterministically
//! from a master seed, so a plan identifies its instances exactly and a
//! rerun (or a resumed run) sees the very same problems. Per-instance
//! optima come from brute force, which bounds the family sizes.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::time::Instant;

use crate::bnb::{
    mix_seed, solve_with_cache, BnBConfig, BranchingStrategy, RelaxCache, SearchStrategy,
    SelectionStrategy, DEFAULT_EVAL_CAP,
};
use crate::error::{QrbnbError, Result};
use crate::io::coords_to_distances;
use crate::problem::{
    brute_force_solve, maxcut_to_problem, tsp_to_problem, ConstrainedQuadraticProblem,
};
use crate::qrac::QracKind;
use crate::relax::Backend;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

/// Attempts before giving up on sampling a simple connected regular graph.
const MAX_GRAPH_TRIES: usize = 10_000;

/// Incumbents within this absolute distance of the brute-force optimum count
/// as optimal in the metrics.
pub const OPT_TOL: f64 = 1e-6;

const MAXCUT_SALT: u64 = 0x6d63; // "mc"
const TSP_SALT: u64 = 0x7473; // "ts"
const RUN_SALT: u64 = 0x726e; // "rn"

/// Sample a simple connected `degree`-regular graph on `n` nodes by the
/// pairing model: shuffle `degree` stubs per node, pair them off, and reject
/// draws with self-loops, parallel edges, or a disconnected result.
pub fn gen_regular_graph(n: usize, degree: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    if n == 0 || degree == 0 || degree >= n {
        return Err(QrbnbError::InvalidInput(format!(
            "no simple {degree}-regular graph on {n} nodes"
        )));
    }
    if (n * degree) % 2 != 0 {
        return Err(QrbnbError::InvalidInput(
            "regular graph needs even n·degree".into(),
        ));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    'attempt: for _ in 0..MAX_GRAPH_TRIES {
        let mut stubs: Vec<usize> = (0..n)
            .flat_map(|v| std::iter::repeat(v).take(degree))
            .collect();
        stubs.shuffle(&mut rng);
        let mut edges = BTreeSet::new();
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !edges.insert((u, v)) {
                continue 'attempt;
            }
        }
        if !is_connected(n, &edges) {
            continue;
        }
        return Ok(edges.into_iter().collect());
    }
    Err(QrbnbError::NoConvergence(format!(
        "no valid {degree}-regular graph on {n} nodes within {MAX_GRAPH_TRIES} draws"
    )))
}

fn is_connected(n: usize, edges: &BTreeSet<(usize, usize)>) -> bool {
    let mut adjacency = vec![Vec::new(); n];
    for &(u, v) in edges {
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &v in &adjacency[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Sample city coordinates uniformly from the unit square.
pub fn gen_tsp_coords(n_cities: usize, seed: u64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..n_cities).map(|_| [rng.gen(), rng.gen()]).collect()
}

/// A benchmark instance family, materialized from a master seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// MaxCut on connected 3-regular graphs, `samples` graphs per size.
    Maxcut3Regular { sizes: Vec<usize>, samples: usize },
    /// Tours over `samples` draws of `n_cities` uniform planar cities.
    TspRandom { n_cities: usize, samples: usize },
}

/// One concrete instance of a family.
#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub problem: ConstrainedQuadraticProblem,
    /// The instance's own derived seed; per-run seeds mix further from it.
    pub seed: u64,
}

/// Materialize every instance of a family, in a fixed enumeration order.
pub fn instances(family: &Family, master_seed: u64) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    match family {
        Family::Maxcut3Regular { sizes, samples } => {
            for &n in sizes {
                for s in 0..*samples {
                    let seed = mix_seed(master_seed, &[MAXCUT_SALT, n as u64, s as u64]);
                    let edges = gen_regular_graph(n, 3, seed)?;
                    out.push(Instance {
                        id: format!("maxcut-n{n:02}-s{s:02}"),
                        problem: maxcut_to_problem(n, &edges)?,
                        seed,
                    });
                }
            }
        }
        Family::TspRandom { n_cities, samples } => {
            for s in 0..*samples {
                let seed = mix_seed(master_seed, &[TSP_SALT, *n_cities as u64, s as u64]);
                let coords = gen_tsp_coords(*n_cities, seed);
                out.push(Instance {
                    id: format!("tsp-n{n_cities}-s{s:02}"),
                    problem: tsp_to_problem(&coords_to_distances(&coords))?,
                    seed,
                });
            }
        }
    }
    Ok(out)
}

/// An instance family crossed with a set of solver configurations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub family: Family,
    pub configs: Vec<BnBConfig>,
    pub master_seed: u64,
}

/// One CSV line of [`run_plan`] output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsRow {
    pub instance_id: String,
    /// [`config_descriptor`] of the configuration that produced the row.
    pub config: String,
    pub n_eval: usize,
    pub n_eval_quantum: usize,
    /// Incumbent within [`OPT_TOL`] of the brute-force optimum.
    pub optimal_found: bool,
    /// Relative gap of the incumbent to the optimum; empty when no feasible
    /// solution was found.
    pub gap: Option<f64>,
    /// Wall-clock seconds for the solve; the one column that legitimately
    /// differs between otherwise identical runs.
    pub runtime_s: f64,
}

/// Compact identity of a configuration, used as the CSV resume key — e.g.
/// `31-exact-bfs-least-binary` or `21-vqe2-dfs-random-onehot`. Seeds and the
/// eval cap are deliberately not part of the identity: plans fix one cap,
/// and stream seeds derive from plan and instance.
pub fn config_descriptor(config: &BnBConfig) -> String {
    let backend = match config.backend {
        Backend::Exact => "exact".to_string(),
        Backend::Vqe { layers, .. } => format!("vqe{layers}"),
    };
    let search = match config.search {
        SearchStrategy::Dfs => "dfs",
        SearchStrategy::BrFs => "brfs",
        SearchStrategy::Bfs => "bfs",
    };
    let selection = match config.selection {
        SelectionStrategy::Random { .. } => "random",
        SelectionStrategy::LeastFractional => "least",
        SelectionStrategy::MostFractional => "most",
    };
    let branching = match config.branching {
        BranchingStrategy::Binary => "binary",
        BranchingStrategy::Onehot => "onehot",
    };
    format!("{}-{}-{}-{}-{}", config.kind, backend, search, selection, branching)
}

/// The seed a plan run derives for configuration index `config_index` on an
/// instance; selection and VQE streams mix further from it (see
/// [`resolve_seeds`]).
pub fn run_seed(instance_seed: u64, config_index: usize) -> u64 {
    mix_seed(instance_seed, &[RUN_SALT, config_index as u64])
}

/// Replace stream seeds in a configuration with ones derived from a per-run
/// seed, leaving everything else untouched.
pub fn resolve_seeds(config: &BnBConfig, run_seed: u64) -> BnBConfig {
    let mut resolved = config.clone();
    if let SelectionStrategy::Random { .. } = resolved.selection {
        resolved.selection = SelectionStrategy::Random {
            seed: mix_seed(run_seed, &[1]),
        };
    }
    if let Backend::Vqe { layers, .. } = resolved.backend {
        resolved.backend = Backend::Vqe {
            layers,
            seed: mix_seed(run_seed, &[2]),
        };
    }
    resolved
}

/// Run a plan, appending one [`MetricsRow`] per (instance, config) pair to
/// `out_csv` and flushing after each so an interrupted sweep loses at most
/// the row in flight. Pairs already present in the file are skipped, which
/// makes reruns resume instead of duplicating work. Returns the number of
/// rows written by this call.
pub fn run_plan(plan: &ExperimentPlan, out_csv: impl AsRef<Path>) -> Result<usize> {
    let out_csv = out_csv.as_ref();
    let mut done: BTreeSet<(String, String)> = BTreeSet::new();
    let resuming = out_csv.exists()
        && fs::metadata(out_csv)
            .map_err(|e| crate::io::annotate(out_csv, e))?
            .len()
            > 0;
    if resuming {
        let mut reader = csv::Reader::from_path(out_csv)?;
        for row in reader.deserialize::<MetricsRow>() {
            let row = row?;
            done.insert((row.instance_id, row.config));
        }
    }
    let file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(out_csv)
        .map_err(|e| crate::io::annotate(out_csv, e))?;
    let mut writer = csv::WriterBuilder::new()
        .has_headers(!resuming)
        .from_writer(file);

    let mut written = 0;
    for instance in instances(&plan.family, plan.master_seed)? {
        let todo: Vec<(usize, &BnBConfig)> = plan
            .configs
            .iter()
            .enumerate()
            .filter(|(_, c)| !done.contains(&(instance.id.clone(), config_descriptor(c))))
            .collect();
        if todo.is_empty() {
            continue;
        }
        let (z_star, _) = brute_force_solve(&instance.problem)?;
        let cache = RelaxCache::new();
        for (ci, config) in todo {
            let resolved = resolve_seeds(config, run_seed(instance.seed, ci));
            let start = Instant::now();
            let report = solve_with_cache(&instance.problem, &resolved, Some(&cache))?;
            let runtime_s = start.elapsed().as_secs_f64();
            let (optimal_found, gap) = match &report.incumbent {
                Some(inc) => (
                    (inc.value - z_star).abs() <= OPT_TOL,
                    Some(relative_gap(inc.value, z_star)),
                ),
                None => (false, None),
            };
            writer.serialize(MetricsRow {
                instance_id: instance.id.clone(),
                config: config_descriptor(config),
                n_eval: report.n_eval,
                n_eval_quantum: report.n_eval_quantum,
                optimal_found,
                gap,
                runtime_s,
            })?;
            writer.flush()?;
            written += 1;
        }
    }
    Ok(written)
}

/// Relative optimality gap, falling back to the absolute gap near zero.
pub fn relative_gap(value: f64, optimum: f64) -> f64 {
    if optimum.abs() > 1e-12 {
        (value - optimum) / optimum.abs()
    } else {
        value - optimum
    }
}

/// The full exact-backend MaxCut strategy grid: both QRAC kinds × three
/// search orders × three selection rules, binary branching (onehot needs
/// onehot constraints, which MaxCut lacks). 18 configurations.
pub fn maxcut_strategy_grid() -> Vec<BnBConfig> {
    let mut configs = Vec::new();
    for kind in [QracKind::ThreeOne, QracKind::TwoOne] {
        for search in [SearchStrategy::Dfs, SearchStrategy::BrFs, SearchStrategy::Bfs] {
            for selection in [
                SelectionStrategy::Random { seed: 0 },
                SelectionStrategy::LeastFractional,
                SelectionStrategy::MostFractional,
            ] {
                configs.push(BnBConfig {
                    kind,
                    backend: Backend::Exact,
                    search,
                    selection,
                    branching: BranchingStrategy::Binary,
                    eval_cap: DEFAULT_EVAL_CAP,
                });
            }
        }
    }
    configs
}

/// The full exact-backend tour strategy grid: the MaxCut grid crossed with
/// both branching rules. 36 configurations.
pub fn tsp_strategy_grid() -> Vec<BnBConfig> {
    let mut configs = Vec::new();
    for branching in [BranchingStrategy::Binary, BranchingStrategy::Onehot] {
        for base in maxcut_strategy_grid() {
            configs.push(BnBConfig { branching, ..base });
        }
    }
    configs
}

/// Desk-scale MaxCut sweep: five even sizes up to 16 nodes, 20 graphs each.
pub fn desk_maxcut_plan(master_seed: u64) -> ExperimentPlan {
    ExperimentPlan {
        family: Family::Maxcut3Regular {
            sizes: vec![8, 10, 12, 14, 16],
            samples: 20,
        },
        configs: maxcut_strategy_grid(),
        master_seed,
    }
}

/// Desk-scale tour sweep: 30 four-city instances.
pub fn desk_tsp_plan(master_seed: u64) -> ExperimentPlan {
    ExperimentPlan {
        family: Family::TspRandom {
            n_cities: 4,
            samples: 30,
        },
        configs: tsp_strategy_grid(),
        master_seed,
    }
}

/// Publication-scale MaxCut sweep (sizes 16–24, 100 graphs each); expect
/// hours of single-core time.
pub fn full_maxcut_plan(master_seed: u64) -> ExperimentPlan {
    ExperimentPlan {
        family: Family::Maxcut3Regular {
            sizes: vec![16, 18, 20, 22, 24],
            samples: 100,
        },
        configs: maxcut_strategy_grid(),
        master_seed,
    }
}

/// Publication-scale tour sweep: 100 four-city instances.
pub fn full_tsp_plan(master_seed: u64) -> ExperimentPlan {
    ExperimentPlan {
        family: Family::TspRandom {
            n_cities: 4,
            samples: 100,
        },
        configs: tsp_strategy_grid(),
        master_seed,
    }
}
