//! Command-line front end: instance generation, single solves, experiment
//! sweeps, and root-gap inspection.
//!
//! Exit codes: 0 on success, 2 when the problem is infeasible, 3 when the
//! evaluation cap stopped a solve before optimality was proven, 1 for any
//! other error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qrbnb::bnb::{
    mix_seed, solve, BnBConfig, BranchingStrategy, SearchStrategy, SelectionStrategy,
    DEFAULT_EVAL_CAP,
};
use qrbnb::experiments::{
    desk_maxcut_plan, desk_tsp_plan, full_maxcut_plan, full_tsp_plan, run_plan, ExperimentPlan,
};
use qrbnb::io::{
    coords_to_distances, coords_to_json, format_edge_list, read_coords, read_edge_list,
    read_file, read_problem, write_file,
};
use qrbnb::problem::{maxcut_to_problem, tsp_to_problem, ConstrainedQuadraticProblem};
use qrbnb::qrac::QracKind;
use qrbnb::relax::{quantumness_gap, Backend};
use qrbnb::QrbnbError;

#[derive(Parser)]
#[command(name = "qrbnb", version, about = "Quantum-relaxation branch-and-bound solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate benchmark instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Solve one problem and print a JSON report.
    Solve(SolveArgs),
    /// Run an experiment sweep, appending metrics rows to a CSV file.
    Bench(BenchArgs),
    /// Print the root quantumness gap (optimum minus relaxed bound).
    Gap(GapArgs),
}

#[derive(Subcommand)]
enum GenCommand {
    /// Sample a connected regular graph and write it as an edge list.
    Maxcut {
        #[arg(long, default_value_t = 12)]
        nodes: usize,
        #[arg(long, default_value_t = 3)]
        degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample city coordinates in the unit square as a JSON array.
    Tsp {
        #[arg(long, default_value_t = 4)]
        cities: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    /// Problem JSON (quadratic triples plus constraints).
    Problem,
    /// Edge list; solved as MaxCut.
    Maxcut,
    /// City coordinates JSON; solved as a tour problem.
    Tsp,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    #[value(name = "31")]
    ThreeOne,
    #[value(name = "21")]
    TwoOne,
}

impl From<KindArg> for QracKind {
    fn from(kind: KindArg) -> Self {
        match kind {
            KindArg::ThreeOne => QracKind::ThreeOne,
            KindArg::TwoOne => QracKind::TwoOne,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Vqe,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchArg {
    Dfs,
    Brfs,
    Bfs,
}

#[derive(Clone, Copy, ValueEnum)]
enum SelectArg {
    Random,
    Least,
    Most,
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    Binary,
    Onehot,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Problem)]
    format: InputFormat,
    #[arg(long, value_enum, default_value_t = KindArg::ThreeOne)]
    kind: KindArg,
    #[arg(long, value_enum, default_value_t = BackendArg::Exact)]
    backend: BackendArg,
    /// Ansatz depth for the VQE backend.
    #[arg(long, default_value_t = 1)]
    layers: usize,
    #[arg(long, value_enum, default_value_t = SearchArg::Bfs)]
    search: SearchArg,
    #[arg(long, value_enum, default_value_t = SelectArg::Least)]
    select: SelectArg,
    #[arg(long, value_enum, default_value_t = BranchArg::Binary)]
    branch: BranchArg,
    /// Base seed for the random-selection and VQE streams.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_EVAL_CAP)]
    eval_cap: usize,
    /// Also write the JSON report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    DeskMaxcut,
    DeskTsp,
    FullMaxcut,
    FullTsp,
}

#[derive(Args)]
struct BenchArgs {
    /// Built-in experiment plan.
    #[arg(long, value_enum, conflicts_with = "plan")]
    preset: Option<PresetArg>,
    /// Experiment plan JSON file (family, configs, master_seed).
    #[arg(long)]
    plan: Option<PathBuf>,
    /// Metrics CSV; existing (instance, config) rows are kept and skipped.
    #[arg(long)]
    out: PathBuf,
    /// Master seed for preset plans (plan files carry their own).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GapArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Problem)]
    format: InputFormat,
    /// Restrict to one QRAC kind; both are printed when omitted.
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
}

fn load_problem(
    path: &PathBuf,
    format: InputFormat,
) -> Result<ConstrainedQuadraticProblem, QrbnbError> {
    match format {
        InputFormat::Problem => read_problem(path),
        InputFormat::Maxcut => {
            let (n, edges) = read_edge_list(path)?;
            maxcut_to_problem(n, &edges)
        }
        InputFormat::Tsp => {
            let coords = read_coords(path)?;
            tsp_to_problem(&coords_to_distances(&coords))
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), QrbnbError> {
    match out {
        Some(path) => write_file(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, QrbnbError> {
    match cli.command {
        Command::Gen(GenCommand::Maxcut {
            nodes,
            degree,
            seed,
            out,
        }) => {
            let edges = qrbnb::experiments::gen_regular_graph(nodes, degree, seed)?;
            emit(out.as_ref(), &format_edge_list(&edges))?;
            Ok(0)
        }
        Command::Gen(GenCommand::Tsp { cities, seed, out }) => {
            let coords = qrbnb::experiments::gen_tsp_coords(cities, seed);
            let mut text = coords_to_json(&coords)?;
            text.push('\n');
            emit(out.as_ref(), &text)?;
            Ok(0)
        }
        Command::Solve(args) => {
            let problem = load_problem(&args.input, args.format)?;
            let config = BnBConfig {
                kind: args.kind.into(),
                backend: match args.backend {
                    BackendArg::Exact => Backend::Exact,
                    BackendArg::Vqe => Backend::Vqe {
                        layers: args.layers,
                        seed: mix_seed(args.seed, &[2]),
                    },
                },
                search: match args.search {
                    SearchArg::Dfs => SearchStrategy::Dfs,
                    SearchArg::Brfs => SearchStrategy::BrFs,
                    SearchArg::Bfs => SearchStrategy::Bfs,
                },
                selection: match args.select {
                    SelectArg::Random => SelectionStrategy::Random {
                        seed: mix_seed(args.seed, &[1]),
                    },
                    SelectArg::Least => SelectionStrategy::LeastFractional,
                    SelectArg::Most => SelectionStrategy::MostFractional,
                },
                branching: match args.branch {
                    BranchArg::Binary => BranchingStrategy::Binary,
                    BranchArg::Onehot => BranchingStrategy::Onehot,
                },
                eval_cap: args.eval_cap,
            };
            let report = solve(&problem, &config)?;
            let mut json = serde_json::to_string_pretty(&report).map_err(QrbnbError::from)?;
            json.push('\n');
            print!("{json}");
            if let Some(path) = &args.out {
                write_file(path, &json)?;
            }
            Ok(if report.capped && !report.proven_optimal {
                3
            } else {
                0
            })
        }
        Command::Bench(args) => {
            let plan: ExperimentPlan = match (&args.preset, &args.plan) {
                (Some(preset), None) => match preset {
                    PresetArg::DeskMaxcut => desk_maxcut_plan(args.seed),
                    PresetArg::DeskTsp => desk_tsp_plan(args.seed),
                    PresetArg::FullMaxcut => full_maxcut_plan(args.seed),
                    PresetArg::FullTsp => full_tsp_plan(args.seed),
                },
                (None, Some(path)) => {
                    serde_json::from_str(&read_file(path)?).map_err(QrbnbError::from)?
                }
                _ => {
                    return Err(QrbnbError::InvalidInput(
                        "bench needs exactly one of --preset or --plan".into(),
                    ))
                }
            };
            let written = run_plan(&plan, &args.out)?;
            eprintln!("wrote {written} rows to {}", args.out.display());
            Ok(0)
        }
        Command::Gap(args) => {
            let problem = load_problem(&args.input, args.format)?;
            let kinds = match args.kind {
                Some(kind) => vec![kind.into()],
                None => vec![QracKind::ThreeOne, QracKind::TwoOne],
            };
            for kind in kinds {
                let gap = quantumness_gap(&problem, kind)?;
                println!("{kind} {gap:.6}");
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err @ QrbnbError::Infeasible(_)) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
