//! Command-line interface: `generate` (grow one network), `simulate`
//! (one epidemic run), `sweep` (the full replicated experiment), and
//! `plot` (summary CSV → SVG chart).
//!
//! Exit codes: 0 success, 1 configuration/usage error, 2 runtime error.
//! Logging goes to standard error; set `SECONET_LOG` (e.g. `info`,
//! `debug`) to raise verbosity.

use crate::centrality::{
    betweenness_centrality, closeness_centrality, degree_centrality, eigenvector_centrality,
    percolation_centrality, CentralityScores, EIGEN_MAX_ITERATIONS, EIGEN_TOLERANCE,
};
use crate::config::{ScenarioConfig, Strategy};
use crate::epidemic::{Compartment, HealthState};
use crate::error::{Error, Result};
use crate::growth::{grow_network, ContactNetwork};
use crate::harness::{
    format_sig6, run_simulation, sweep, write_daily_series, write_errors, write_summary,
};
use crate::plot::{read_summary, render_plot, DEFAULT_BINS};
use crate::rng::run_streams;
use crate::snapshot::{write_edge_list, write_node_table};
use crate::topology::summarize;
use crate::vaccination::write_session_audits;
use clap::{Args, Parser, Subcommand};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "seconet",
    version,
    about = "Bipartite sexual-contact network growth, SIRS transmission, and vaccination experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow one network; write nodes.csv, edges.csv, topology.json.
    Generate(GenerateArgs),
    /// Run one simulation; write daily.csv and sessions.csv.
    Simulate(SimulateArgs),
    /// Run the replicated sweep; write summary.csv and errors.csv.
    Sweep(SweepArgs),
    /// Render an SVG chart from a sweep summary CSV.
    Plot(PlotArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Scenario JSON file.
    #[arg(long)]
    config: PathBuf,
    /// Override the scenario's base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario JSON file.
    #[arg(long)]
    config: PathBuf,
    /// Override the scenario's base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Vaccination strategy (default: none).
    #[arg(long)]
    strategy: Option<String>,
    /// Also dump final-day centrality scores of this kind
    /// (degree|betweenness|closeness|percolation|eigenvector) to
    /// scores_<kind>.csv.
    #[arg(long)]
    scores: Option<String>,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Scenario JSON file.
    #[arg(long)]
    config: PathBuf,
    /// Override the scenario's base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the scenario's replicate count.
    #[arg(long)]
    replicates: Option<u32>,
    /// Worker threads (output is identical for any value).
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct PlotArgs {
    /// Sweep summary CSV to read.
    #[arg(long)]
    summary: PathBuf,
    /// Topology metric for the x axis.
    #[arg(long, default_value = "avg_degree")]
    x: String,
    /// Epidemiological metric for the y axis.
    #[arg(long, default_value = "peak_inc")]
    y: String,
    /// Number of equal-width bins for the mean polylines.
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

/// Parses argv and runs the requested command, returning the process
/// exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SECONET_LOG", "warn")).init();
    let result = match cli.command {
        Command::Generate(args) => generate(args),
        Command::Simulate(args) => simulate(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Plot(args) => plot(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn generate(args: GenerateArgs) -> Result<()> {
    let mut scenario = ScenarioConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    std::fs::create_dir_all(&args.out)?;
    let mut streams = run_streams(scenario.seed);
    let network = grow_network(&scenario.growth, &mut streams.growth)?;

    write_node_table(&network, create(&args.out, "nodes.csv")?)?;
    write_edge_list(&network, create(&args.out, "edges.csv")?)?;
    let summary = summarize(&network);
    let mut w = create(&args.out, "topology.json")?;
    serde_json::to_writer_pretty(&mut w, &summary)
        .map_err(|e| Error::Config(format!("serializing topology summary: {e}")))?;
    writeln!(w)?;
    log::info!(
        "generated network: {} persons, {} active links",
        network.population(),
        network.link_count()
    );
    Ok(())
}

fn centrality_by_kind(
    kind: &str,
    network: &ContactNetwork,
    states: &[HealthState],
) -> Result<CentralityScores> {
    match kind {
        "degree" => Ok(degree_centrality(network)),
        "betweenness" => Ok(betweenness_centrality(network)),
        "closeness" => Ok(closeness_centrality(network)),
        "percolation" => {
            let chi: Vec<f64> = states
                .iter()
                .map(|s| f64::from(s.compartment == Compartment::Infected))
                .collect();
            Ok(percolation_centrality(network, &chi))
        }
        "eigenvector" => eigenvector_centrality(network, EIGEN_TOLERANCE, EIGEN_MAX_ITERATIONS),
        other => Err(Error::Config(format!(
            "unknown centrality kind '{other}' (valid: degree, betweenness, closeness, percolation, eigenvector)"
        ))),
    }
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let mut scenario = ScenarioConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    let strategy: Strategy = match &args.strategy {
        Some(name) => name.parse()?,
        None => Strategy::None,
    };
    std::fs::create_dir_all(&args.out)?;
    let output = run_simulation(
        &scenario.growth,
        &scenario.epidemic,
        &scenario.plan,
        strategy,
        scenario.seed,
    )?;
    write_daily_series(&output.series, create(&args.out, "daily.csv")?)?;
    write_session_audits(create(&args.out, "sessions.csv")?, &output.audits)?;
    if let Some(kind) = &args.scores {
        let scores = centrality_by_kind(kind, &output.network, &output.final_states)?;
        let mut w = create(&args.out, &format!("scores_{kind}.csv"))?;
        writeln!(w, "node_id,score")?;
        for (id, score) in scores.values.iter().enumerate() {
            writeln!(w, "{id},{}", format_sig6(*score))?;
        }
    }
    log::info!(
        "simulated {} days with strategy {}",
        output.series.len() - 1,
        strategy.name()
    );
    Ok(())
}

fn run_sweep(args: SweepArgs) -> Result<()> {
    let mut scenario = ScenarioConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    if let Some(replicates) = args.replicates {
        scenario.replicates = replicates;
        scenario.validate()?;
    }
    std::fs::create_dir_all(&args.out)?;
    let records = sweep(&scenario, args.parallel.max(1))?;
    write_summary(&records, create(&args.out, "summary.csv")?)?;
    write_errors(&records, create(&args.out, "errors.csv")?)?;
    let failures = records.iter().filter(|r| r.outcome.is_err()).count();
    log::info!("sweep complete: {} runs, {failures} failed", records.len());
    Ok(())
}

fn plot(args: PlotArgs) -> Result<()> {
    let file = File::open(&args.summary)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", args.summary.display())))?;
    let rows = read_summary(BufReader::new(file))?;
    std::fs::create_dir_all(&args.out)?;
    let name = format!("{}_vs_{}.svg", args.y, args.x);
    render_plot(&rows, &args.x, &args.y, args.bins, create(&args.out, &name)?)?;
    log::info!("wrote {name}");
    Ok(())
}
