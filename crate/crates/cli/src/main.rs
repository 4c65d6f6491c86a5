mod commands;
mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{Map, Value};

use commands::{embedded_config, produce, Artifact};
use config::{parse_grid, Command, Format, GapKind, MetricKind, ObservableKind, RunConfig};

const EXIT_USAGE: u8 = 1;
const EXIT_FAIL: u8 = 2;

const ARTIFACTS: &str = "\
Output: JSON (default) holds {tool, version, schema, config, verdict, report}.
With --format csv the first line is `# ` followed by the same header object
without the report, then a table. Every artifact can be regenerated with
`levy-lab replay FILE`.

Exit status: 0 when the verdict passes or the command asserts nothing,
2 when the verdict fails, 1 on usage, configuration or input errors.";

#[derive(Parser)]
#[command(name = "levy-lab", version, about = "Simulate random flights on heavy-tailed media and check their scaling limits", after_help = ARTIFACTS)]
struct Cli {
    /// Worker threads; defaults to the available cores. Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw stable variables (--alpha, --skew, --scale, --shift, --count).
    #[command(after_help = "CSV columns: i, x")]
    SampleStable(RunArgs),
    /// Simulate one flight: walk positions S_i and flight values Y_i.
    #[command(after_help = "\
Writes the table `i,S_i,Y_i` for i = 0..ceil(n T), preceded by a `# ` header
line holding the configuration. --path-out also writes Y_floor(nt) / n^gamma
as a path file usable by `distance`.")]
    Simulate(RunArgs),
    /// Distance between two path files (--metric j1|j2|j32, --m, --runs).
    #[command(after_help = "CSV columns: metric, value, slack, m")]
    Distance(RunArgs),
    /// Reordering of walk cells against the displacement bound, over --replicas walks.
    #[command(after_help = "CSV columns: walk, c, bound, max_shift, holds, monotone\n\
Passes when every walk satisfies the bound and reorders monotonically.")]
    ReorderCheck(RunArgs),
    /// Fluctuation decomposition residuals over --replicas Pareto flights.
    #[command(after_help = "CSV columns: alpha, beta, instance, residual, bound\nPasses when no residual exceeds its bound.")]
    DecomposeCheck(RunArgs),
    /// Self-consistency of rescaled marginals at n and factor * n (joint with --times a,b,..).
    #[command(after_help = "CSV columns: label, n_left, n_right, statistic, threshold, passed")]
    FddTest(RunArgs),
    /// Rescaled flight marginal against the exact limit law (needs --gap stable).
    #[command(after_help = "CSV columns: label, n_left, n_right, statistic, threshold, passed")]
    OracleTest(RunArgs),
    /// Log-log slope of the spread over --ngrid against the predicted exponent.
    #[command(after_help = "CSV columns: n, scale, fitted\nPasses when the slope is within --tolerance.")]
    Exponent(RunArgs),
    /// Median J2 and J1 distances between a flight and its drift approximation.
    #[command(after_help = "CSV columns: n, median_j2, median_j1\n\
Passes when the J2 medians decrease along the grid and never exceed the J1 medians.")]
    J2Gap(RunArgs),
    /// Continuity of addition under jump-time perturbations of size 1/k.
    #[command(after_help = "\
CSV columns: k, distance, bound, witness_cost
Without path files the summands are 1_[x_jump,1) and 1_[y_jump,1) on [0,1).
Passes when distances stay within 3/k + slack and do not grow with k.
With --control the summands may jump together; it then passes when the
distance stays above 0.4, i.e. when the control detects the discontinuity.")]
    AdditionTest(RunArgs),
    /// Regenerate an artifact from its embedded configuration and compare bytes.
    Replay {
        artifact: PathBuf,
    },
}

fn skip_false(b: &bool) -> bool {
    !*b
}

/// Flags shared by all run subcommands. Serialized names match the
/// configuration keys; unset flags are skipped so defaults show through.
#[derive(Args, Serialize)]
struct RunArgs {
    /// JSON object whose keys override both flags and defaults.
    #[arg(long)]
    #[serde(skip)]
    spec: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    #[serde(skip)]
    out: Option<PathBuf>,
    /// simulate: also write the rescaled flight path here.
    #[arg(long)]
    #[serde(skip)]
    path_out: Option<PathBuf>,

    /// Jump index in (0, 2), or the stable index for sample-stable.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    /// Probability of a positive jump.
    #[arg(long = "pplus")]
    #[serde(skip_serializing_if = "Option::is_none")]
    p_plus: Option<f64>,
    /// Gap index.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gap: Option<GapKind>,
    /// Scale of Pareto gaps.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    x_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    skew: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    scale: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    shift: Option<f64>,
    /// Number of samples for sample-stable.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    count: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    /// `lo:hi:xR` geometric grid or a comma list.
    #[arg(long = "ngrid")]
    #[serde(skip_serializing_if = "Option::is_none")]
    n_grid: Option<Grid>,
    /// Time horizon T.
    #[arg(long = "horizon", short = 'T')]
    #[serde(skip_serializing_if = "Option::is_none")]
    horizon: Option<f64>,
    /// Evaluation time for marginal tests.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
    /// Comma-separated times; two or more make fdd-test joint.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    times: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    factor: Option<usize>,
    /// Replicas, walks or instances, depending on the command.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    replicas: Option<usize>,
    /// Distance resolution.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    /// Number of runs allowed for j32.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    runs: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    metric: Option<MetricKind>,
    #[arg(long, env = "LEVY_LAB_SEED")]
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    /// Replica index for sample-stable and simulate.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    replica: Option<u64>,
    /// Added to the scaling exponent (negative controls).
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_shift: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    observable: Option<ObservableKind>,
    /// Allowed slope error for exponent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
    /// Evaluation points per cell for decompose-check.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<usize>,
    /// Perturbation levels for addition-test.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    ks: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    x_jump: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    y_jump: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    shift_x: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    shift_y: Option<f64>,
    /// addition-test: run the shared-jump control.
    #[arg(long)]
    #[serde(skip_serializing_if = "skip_false")]
    control: bool,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    format: Option<Format>,
    /// Path files (distance, addition-test).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    inputs: Vec<String>,
}

#[derive(Clone, Serialize)]
#[serde(transparent)]
struct Grid(Vec<usize>);

impl std::str::FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_grid(s).map(Grid)
    }
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            Ok(out.flush()?)
        }
    }
}

fn run_command(command: Command, args: RunArgs) -> Result<Option<bool>> {
    let flags = match serde_json::to_value(&args)? {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    let config = RunConfig::merge(command, flags, args.spec.as_deref())?;
    if args.path_out.is_some() && command != Command::Simulate {
        anyhow::bail!("--path-out only applies to simulate");
    }
    let main = produce(&config, Artifact::Main)?;
    write_out(args.out.as_deref(), &main.bytes)?;
    if let Some(p) = &args.path_out {
        write_out(Some(p), &produce(&config, Artifact::Path)?.bytes)?;
    }
    if let Some(v) = main.verdict {
        eprintln!("verdict: {}", if v { "pass" } else { "fail" });
    }
    Ok(main.verdict)
}

fn replay(file: &Path) -> Result<Option<bool>> {
    let bytes = std::fs::read(file).with_context(|| format!("reading {}", file.display()))?;
    let (config, artifact) = embedded_config(&bytes)?;
    let regenerated = produce(&config, artifact)?.bytes;
    let identical = regenerated == bytes;
    if identical {
        eprintln!("replay: {} reproduced byte for byte", file.display());
    } else {
        let at = regenerated.iter().zip(&bytes).position(|(a, b)| a != b).unwrap_or(regenerated.len().min(bytes.len()));
        eprintln!("replay: {} differs from its regeneration at byte {at}", file.display());
    }
    Ok(Some(identical))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let outcome = match cli.command {
        Cmd::SampleStable(a) => run_command(Command::SampleStable, a),
        Cmd::Simulate(a) => run_command(Command::Simulate, a),
        Cmd::Distance(a) => run_command(Command::Distance, a),
        Cmd::ReorderCheck(a) => run_command(Command::ReorderCheck, a),
        Cmd::DecomposeCheck(a) => run_command(Command::DecomposeCheck, a),
        Cmd::FddTest(a) => run_command(Command::FddTest, a),
        Cmd::OracleTest(a) => run_command(Command::OracleTest, a),
        Cmd::Exponent(a) => run_command(Command::Exponent, a),
        Cmd::J2Gap(a) => run_command(Command::J2Gap, a),
        Cmd::AdditionTest(a) => run_command(Command::AdditionTest, a),
        Cmd::Replay { artifact } => replay(&artifact),
    };
    match outcome {
        Ok(Some(false)) => ExitCode::from(EXIT_FAIL),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
