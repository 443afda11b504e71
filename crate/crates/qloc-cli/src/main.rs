//! `qloc`: experiments, synthesis and file checks for commuting projector
//! Hamiltonians.
//!
//! Every subcommand prints a report: an optional table, then `key=value`
//! lines echoing the seed, the parameters and the tolerances in force.
//! Exit codes: 0 success, 1 a roundtrip check failed, 2 usage error,
//! 3 malformed input file, 4 error raised by an operation, 5 I/O error.

mod commands;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use report::Report;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "qloc", version, about = "Interaction complexes and ground-state circuits for commuting projector Hamiltonians")]
struct Cli {
    /// Worker threads for trial-parallel commands.
    #[arg(long, global = true, env = "QLOC_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// Inputs, outputs, seed and numeric parameters shared by every command.
#[derive(Args, Debug, Clone, Default)]
pub struct ExperimentConfig {
    /// Input files, in the order the command documents.
    pub inputs: Vec<PathBuf>,
    /// Artifact output path (circuit, map, clustering or generated instance).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Also write the report to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    /// Localization range.
    #[arg(long = "R")]
    pub range: Option<usize>,
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Largest cluster size.
    #[arg(long = "maxC", alias = "max-c")]
    pub max_c: Option<usize>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Family {
    /// Ring of ZZ projectors (--n).
    RingZz,
    /// Toric code on an l x l torus (--l).
    Toric,
    /// Toric code on --n x --n with holes every --l; also writes .graph and .images.
    PuncturedToric,
    /// Planted two-body instance on a path (--n, --seed).
    Planted,
    /// Cycle graph (--n).
    Cycle,
    /// Clique complex of the --r-th power of the --n-cycle.
    PowerComplex,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Girth of a graph file.
    Girth(ExperimentConfig),
    /// Random ensemble: loop removal and triangle-free clustering of E^r (--n --d --r --trials --maxC).
    Ensemble(ExperimentConfig),
    /// Triangle-free clustering search on a graph file (--maxC).
    ClusterSearch(ExperimentConfig),
    /// Collapse map of the clique complex of G^R onto G, with goodness and distortion checks (--R).
    Localize(ExperimentConfig),
    /// Two-body solver on a Hamiltonian file.
    TwoBodySolve(ExperimentConfig),
    /// Stabilizer cut solver: Hamiltonian [target graph, image file].
    StabSolve(ExperimentConfig),
    /// High-girth tree reduction: Hamiltonian [target graph, image file].
    TreeReduceSolve(ExperimentConfig),
    /// Block baseline on a hypercubic lattice of dimension --d (default 1) with block side --l.
    Hypercube(ExperimentConfig),
    /// Removal search on triangulated lattices of side --n (--epsilon --R --trials).
    Hyperfinite(ExperimentConfig),
    /// Shields of a set: complex file, set file.
    Shields(ExperimentConfig),
    /// Truncated cover: complex file, set list file (--depth).
    Cover(ExperimentConfig),
    /// Energies of a circuit: Hamiltonian file, circuit file.
    Verify(ExperimentConfig),
    /// Parse, serialize and parse a file; reports whether both parses agree.
    Roundtrip(ExperimentConfig),
    /// Writes a standard instance.
    Generate {
        family: Family,
        #[command(flatten)]
        cfg: ExperimentConfig,
    },
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(q) = cause.downcast_ref::<qloc::Error>() {
            return if matches!(q, qloc::Error::Parse { .. }) { 3 } else { 4 };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 5;
        }
    }
    2
}

fn run(cmd: Command) -> anyhow::Result<(Report, bool, ExperimentConfig)> {
    let (name, cfg) = match &cmd {
        Command::Girth(c) => ("girth", c),
        Command::Ensemble(c) => ("ensemble", c),
        Command::ClusterSearch(c) => ("cluster-search", c),
        Command::Localize(c) => ("localize", c),
        Command::TwoBodySolve(c) => ("two-body-solve", c),
        Command::StabSolve(c) => ("stab-solve", c),
        Command::TreeReduceSolve(c) => ("tree-reduce-solve", c),
        Command::Hypercube(c) => ("hypercube", c),
        Command::Hyperfinite(c) => ("hyperfinite", c),
        Command::Shields(c) => ("shields", c),
        Command::Cover(c) => ("cover", c),
        Command::Verify(c) => ("verify", c),
        Command::Roundtrip(c) => ("roundtrip", c),
        Command::Generate { cfg, .. } => ("generate", cfg),
    };
    let cfg = cfg.clone();
    let mut rep = Report::new(name, cfg.seed);
    let mut ok = true;
    match cmd {
        Command::Girth(_) => commands::girth(&cfg, &mut rep)?,
        Command::Ensemble(_) => commands::ensemble(&cfg, &mut rep)?,
        Command::ClusterSearch(_) => commands::cluster_search(&cfg, &mut rep)?,
        Command::Localize(_) => commands::localize(&cfg, &mut rep)?,
        Command::TwoBodySolve(_) => commands::two_body_solve(&cfg, &mut rep)?,
        Command::StabSolve(_) => commands::stab_solve(&cfg, &mut rep)?,
        Command::TreeReduceSolve(_) => commands::tree_reduce_solve(&cfg, &mut rep)?,
        Command::Hypercube(_) => commands::hypercube(&cfg, &mut rep)?,
        Command::Hyperfinite(_) => commands::hyperfinite(&cfg, &mut rep)?,
        Command::Shields(_) => commands::shield(&cfg, &mut rep)?,
        Command::Cover(_) => commands::cover(&cfg, &mut rep)?,
        Command::Verify(_) => commands::verify(&cfg, &mut rep)?,
        Command::Roundtrip(_) => ok = commands::roundtrip(&cfg, &mut rep)?,
        Command::Generate { family, .. } => commands::generate(family, &cfg, &mut rep)?,
    }
    rep.tolerances();
    Ok((rep, ok, cfg))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok((rep, ok, cfg)) => {
            let text = rep.to_string();
            print!("{text}");
            if let Some(p) = &cfg.report {
                if let Err(e) = std::fs::write(p, &text) {
                    eprintln!("error: writing {}: {e}", p.display());
                    return ExitCode::from(5);
                }
            }
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
