use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use coopcast::algos::{self, GridCoopParams};
use coopcast::analysis;
use coopcast::broadcast::{self, DeliveryMode, Schedule};
use coopcast::convert::convert_with;
use coopcast::experiment::{self, ExperimentConfig, ExperimentKind, RunOptions};
use coopcast::net::{
    sample_placement, GridNetwork, Network, NodeId, PlacementKind, PlacementSpec, SourceRule,
};
use coopcast::Error;

#[derive(Parser)]
#[command(
    name = "coopcast",
    version,
    about = "Cooperative broadcast simulation and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a network and print it as JSON.
    Gen {
        #[command(flatten)]
        net: NetArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a broadcast schedule and check that it delivers.
    Algo {
        #[arg(long, value_enum)]
        name: AlgoName,
        /// Row spacing for grid-rows; defaults to the largest that delivers.
        #[arg(long = "L", value_name = "k")]
        spacing: Option<usize>,
        /// Border rows transmit too (grid-rows).
        #[arg(long)]
        borders: bool,
        #[command(flatten)]
        net: NetArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a cooperative schedule into a non-cooperative one.
    Convert {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        /// Converted schedule; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Disks, selected set and winners as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Check that the output delivers without cooperation, with no
        /// tolerance (`--verify false` skips it).
        #[arg(long, default_value_t = true, num_args = 0..=1, default_missing_value = "true", action = ArgAction::Set)]
        verify: bool,
    },
    /// Print closed-form quantities, one value per line.
    Analyze(AnalyzeArgs),
    /// Run a seeded experiment and write CSV.
    Experiment {
        #[arg(value_enum)]
        kind: ExperimentArg,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Also check the experiment's own property on every run.
        #[arg(long)]
        verify: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoName {
    GreedyFilling,
    Bip,
    Mst,
    GridAll,
    GridRows,
    Single,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentArg {
    Gain,
    ConversionRatio,
    Grid,
}

impl From<ExperimentArg> for ExperimentKind {
    fn from(a: ExperimentArg) -> Self {
        match a {
            ExperimentArg::Gain => ExperimentKind::Gain,
            ExperimentArg::ConversionRatio => ExperimentKind::ConversionRatio,
            ExperimentArg::Grid => ExperimentKind::GridGain,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PlacementArg {
    Grid,
    UniformDisk,
    Gaussian,
    Clustered,
}

#[derive(Args)]
struct NetArgs {
    /// Network JSON file instead of a sampled placement.
    #[arg(long, conflicts_with = "placement")]
    network: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "network")]
    placement: Option<PlacementArg>,
    /// Node count (non-grid placements).
    #[arg(long)]
    n: Option<usize>,
    /// Grid side.
    #[arg(long)]
    m: Option<usize>,
    /// Grid spacing.
    #[arg(long, default_value_t = 1.0)]
    d: f64,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 4)]
    clusters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0, conflicts_with = "random_source")]
    source: usize,
    /// Draw the source uniformly from the placement's RNG stream.
    #[arg(long)]
    random_source: bool,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct AnalyzeArgs {
    #[arg(long, num_args = 2, value_names = ["n", "alpha"])]
    zeta: Option<Vec<f64>>,
    #[arg(long, num_args = 2, value_names = ["alpha", "gamma"])]
    beta: Option<Vec<f64>>,
    #[arg(long, num_args = 3, value_names = ["m", "d", "alpha"])]
    grid_bounds: Option<Vec<f64>>,
    #[arg(long, num_args = 2, value_names = ["m", "L"])]
    l_condition: Option<Vec<f64>>,
}

/// Errors that decide the exit code.
enum Failure {
    Usage(String),
    Checker(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_checker_failure() {
            Failure::Checker(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Checker(msg)) => {
            eprintln!("checker failure: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn pretty(v: &impl serde::Serialize) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

fn load_network(a: &NetArgs) -> Result<Network, Failure> {
    if let Some(path) = &a.network {
        return read_json(path);
    }
    let need_n = || {
        a.n.ok_or_else(|| Failure::Usage("--n is required for this placement".into()))
    };
    let kind = match a
        .placement
        .expect("clap requires a placement without --network")
    {
        PlacementArg::Grid => PlacementKind::Grid {
            m: a.m
                .ok_or_else(|| Failure::Usage("--m is required for grids".into()))?,
            d: a.d,
        },
        PlacementArg::UniformDisk => PlacementKind::UniformDisk {
            n: need_n()?,
            radius: a.radius,
        },
        PlacementArg::Gaussian => PlacementKind::Gaussian {
            n: need_n()?,
            sigma: a.sigma,
        },
        PlacementArg::Clustered => PlacementKind::Clustered {
            n: need_n()?,
            clusters: a.clusters,
            sigma: a.sigma,
        },
    };
    let rule = if a.random_source {
        SourceRule::RandomUniform
    } else {
        SourceRule::Fixed(NodeId(a.source))
    };
    Ok(sample_placement(
        &PlacementSpec { kind, seed: a.seed },
        a.alpha,
        rule,
    )?)
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Gen { net, out } => {
            let net = load_network(&net)?;
            emit(out.as_deref(), &pretty(&net)?)
        }
        Command::Algo {
            name,
            spacing,
            borders,
            net,
            out,
        } => {
            let net = load_network(&net)?;
            let grid = || GridNetwork::from_network(&net);
            let (sched, mode) = match name {
                AlgoName::GreedyFilling => (algos::greedy_filling(&net), DeliveryMode::Cooperative),
                AlgoName::Bip => (algos::bip(&net), DeliveryMode::NonCooperative),
                AlgoName::Mst => (algos::mst_broadcast(&net), DeliveryMode::NonCooperative),
                AlgoName::Single => (
                    algos::single_transmission(&net),
                    DeliveryMode::NonCooperative,
                ),
                AlgoName::GridAll => (
                    algos::grid_all_nodes(&grid()?),
                    DeliveryMode::NonCooperative,
                ),
                AlgoName::GridRows => {
                    let g = grid()?;
                    let l = match spacing {
                        Some(l) => l,
                        None => algos::max_feasible_spacing(&g, borders)?,
                    };
                    (
                        algos::grid_coop_rows(&g, GridCoopParams::new(l, borders))?,
                        DeliveryMode::Cooperative,
                    )
                }
            };
            let report =
                broadcast::check_with_tolerance(&net, &sched, mode, broadcast::DELIVERY_TOLERANCE)?;
            let doc = json!({
                "entries": sched.entries,
                "total_power": sched.total_power(),
                "delivered": report.all_delivered,
            });
            emit(out.as_deref(), &pretty(&doc)?)?;
            match report.first_failure {
                None => Ok(()),
                Some(node) => Err(Failure::Checker(format!(
                    "{} delivery fails at node {node} (received {})",
                    mode.name(),
                    report.received_at(node).unwrap_or(0.0)
                ))),
            }
        }
        Command::Convert {
            network,
            schedule,
            out,
            trace,
            verify,
        } => {
            let net: Network = read_json(&network)?;
            let coop: Schedule = read_json(&schedule)?;
            let (converted, tr) = convert_with(&net, &coop, verify)?;
            if let Some(path) = trace {
                fs::write(path, pretty(&tr)?)?;
            }
            emit(out.as_deref(), &pretty(&converted)?)
        }
        Command::Analyze(a) => analyze(a),
        Command::Experiment {
            kind,
            config,
            out,
            jobs,
            verify,
        } => {
            let cfg: ExperimentConfig = read_json(&config)?;
            let kind = ExperimentKind::from(kind);
            if cfg.experiment != kind {
                return Err(Failure::Usage(format!(
                    "config describes a {} experiment, not {}",
                    cfg.experiment.name(),
                    kind.name()
                )));
            }
            let records = experiment::run_experiment(&cfg, RunOptions { jobs, verify })?;
            let mut buf = Vec::new();
            experiment::write_csv(&records, &mut buf)?;
            match out.or(cfg.output) {
                Some(p) => fs::write(p, buf)?,
                None => io::stdout().write_all(&buf)?,
            }
            Ok(())
        }
    }
}

fn as_count(x: f64, what: &str) -> Result<usize, Failure> {
    if x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(Failure::Usage(format!(
            "{what} must be a non-negative integer, got {x}"
        )))
    }
}

fn analyze(a: AnalyzeArgs) -> Result<(), Failure> {
    let lines: Vec<String> = if let Some(v) = a.zeta {
        vec![analysis::zeta_alpha(as_count(v[0], "n")?, v[1])?.to_string()]
    } else if let Some(v) = a.beta {
        let b = analysis::beta_constants(v[0], v[1])?;
        vec![b.beta.to_string(), b.beta1.to_string(), b.beta2.to_string()]
    } else if let Some(v) = a.grid_bounds {
        let m = as_count(v[0], "m")?;
        let mut out = vec![analysis::grid_coop_lower_bound(m, v[1], v[2])?.to_string()];
        if v[2] == 2.0 {
            out.push(analysis::grid_noncoop_lower_bound(m * m, v[1], v[2])?.to_string());
        }
        out
    } else if let Some(v) = a.l_condition {
        let (m, l) = (as_count(v[0], "m")?, as_count(v[1], "L")?);
        let value =
            analysis::grid_l_condition_value(m, l).map_or("nan".to_string(), |x| x.to_string());
        vec![
            value,
            u8::from(analysis::grid_l_condition(m, l)).to_string(),
        ]
    } else {
        unreachable!("clap requires one analysis flag")
    };
    let mut text = lines.join("\n");
    text.push('\n');
    emit(None, &text)
}
