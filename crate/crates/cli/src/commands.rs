//! Subcommand bodies. Each one turns a validated [`RunConfig`] into artifact
//! bytes; nothing here touches the file system except reading inputs, so
//! replay can regenerate an artifact and compare it byte for byte.

use std::fs::File;
use std::io::BufReader;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use levy_lab::io::{read_path, write_flight, write_path, DistanceReport};
use levy_lab::lab::{
    addition_continuity_experiment, addition_shared_jump_control, decomposition_suite, exponent_fit, fdd_joint,
    fdd_self_consistency, j2_gap_experiment, oracle_test, reorder_suite, KsReport, Perturbation,
};
use levy_lab::laws::{sample_stable, StableParams};
use levy_lab::path::StepPath;
use levy_lab::rng::{Role, SeedStream};
use levy_lab::skorokhod::{d_j1_estimate, d_j2_estimate, d_j32_estimate};
use levy_lab::walk::{build_flight, MediumMode};

use crate::config::{Command, Format, MetricKind, RunConfig};

pub const TOOL: &str = "levy-lab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Version of the artifact layout (header object and CSV columns).
pub const SCHEMA: u32 = 1;

/// Auxiliary stream tag for `sample-stable`.
const SAMPLE_TAG: u64 = 0x5354_4142;

/// Which file of a run to produce. Only `simulate` has a second one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Artifact {
    Main,
    Path,
}

pub struct Output {
    pub bytes: Vec<u8>,
    /// `None` for commands that assert nothing.
    pub verdict: Option<bool>,
}

struct Table {
    header: &'static [&'static str],
    rows: Vec<Vec<String>>,
}

fn header(config: &RunConfig, verdict: Option<bool>) -> Value {
    json!({"tool": TOOL, "version": VERSION, "schema": SCHEMA, "config": config, "verdict": verdict})
}

fn render(config: &RunConfig, verdict: Option<bool>, report: &impl Serialize, table: Table) -> Result<Output> {
    let mut bytes = Vec::new();
    match config.format {
        Format::Json => {
            let mut doc = header(config, verdict);
            doc["report"] = serde_json::to_value(report)?;
            serde_json::to_writer_pretty(&mut bytes, &doc)?;
            bytes.push(b'\n');
        }
        Format::Csv => {
            bytes.extend_from_slice(b"# ");
            serde_json::to_writer(&mut bytes, &header(config, verdict))?;
            bytes.push(b'\n');
            let mut w = csv::Writer::from_writer(&mut bytes);
            w.write_record(table.header)?;
            for row in &table.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
    }
    Ok(Output { bytes, verdict })
}

fn ks_row(label: &str, ks: &KsReport) -> Vec<String> {
    vec![
        label.to_string(),
        ks.n_left.to_string(),
        ks.n_right.to_string(),
        ks.statistic.to_string(),
        ks.threshold.to_string(),
        ks.verdict.to_string(),
    ]
}

const KS_COLUMNS: &[&str] = &["label", "n_left", "n_right", "statistic", "threshold", "passed"];

fn load_path(name: &str) -> Result<StepPath> {
    let file = File::open(name).with_context(|| format!("opening path file {name}"))?;
    let (path, _) = read_path(BufReader::new(file)).with_context(|| format!("reading path file {name}"))?;
    Ok(path)
}

pub fn produce(config: &RunConfig, artifact: Artifact) -> Result<Output> {
    if artifact == Artifact::Path && config.command != Command::Simulate {
        bail!("only simulate writes path files");
    }
    match config.command {
        Command::SampleStable => sample_stable_cmd(config),
        Command::Simulate => simulate(config, artifact),
        Command::Distance => distance(config),
        Command::ReorderCheck => {
            let r = reorder_suite(config.alpha, config.p_plus, config.n, config.horizon, config.replicas, config.seed)?;
            let verdict = r.holding == r.checks.len() && r.monotone == r.checks.len();
            let rows = r
                .checks
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    vec![
                        i.to_string(),
                        c.c.to_string(),
                        c.bound.to_string(),
                        c.max_shift.to_string(),
                        c.holds.to_string(),
                        c.monotone.to_string(),
                    ]
                })
                .collect();
            let table = Table { header: &["walk", "c", "bound", "max_shift", "holds", "monotone"], rows };
            render(config, Some(verdict), &r, table)
        }
        Command::DecomposeCheck => {
            let r = decomposition_suite(
                &[config.alpha],
                &[config.beta],
                config.p_plus,
                config.n,
                config.horizon,
                config.replicas,
                config.points,
                config.seed,
            )?;
            let rows = r
                .rows
                .iter()
                .map(|d| {
                    vec![
                        d.alpha.to_string(),
                        d.beta.to_string(),
                        d.instance.to_string(),
                        d.residual.to_string(),
                        d.bound.to_string(),
                    ]
                })
                .collect();
            let table = Table { header: &["alpha", "beta", "instance", "residual", "bound"], rows };
            render(config, Some(r.failures == 0), &r, table)
        }
        Command::FddTest => {
            let model = config.model()?;
            if config.times.len() >= 2 {
                let r = fdd_joint(&model, &config.times, config.n, config.factor, config.replicas, config.seed)?;
                let mut rows: Vec<Vec<String>> =
                    r.marginals.iter().zip(&r.times).map(|(ks, t)| ks_row(&format!("t={t}"), ks)).collect();
                rows.push(ks_row("joint", &r.joint));
                render(config, Some(r.verdict), &r, Table { header: KS_COLUMNS, rows })
            } else {
                let t = config.times.first().copied().unwrap_or(config.t);
                let r = fdd_self_consistency(
                    &model,
                    t,
                    config.n,
                    config.factor,
                    config.replicas,
                    config.seed,
                    config.gamma_shift,
                )?;
                let rows = vec![ks_row(&format!("t={t}"), &r.ks)];
                render(config, Some(r.ks.verdict), &r, Table { header: KS_COLUMNS, rows })
            }
        }
        Command::OracleTest => {
            let model = config.model()?;
            let r = oracle_test(&model, config.n, config.t, config.replicas, config.seed, config.gamma_shift)?;
            let rows = vec![ks_row(&format!("n={}", config.n), &r.ks)];
            render(config, Some(r.ks.verdict), &r, Table { header: KS_COLUMNS, rows })
        }
        Command::Exponent => {
            let model = config.model()?;
            let r = exponent_fit(
                &model,
                config.observable.into(),
                config.t,
                &config.n_grid,
                config.replicas,
                config.seed,
            )?;
            let rows = r
                .n_grid
                .iter()
                .zip(&r.scale)
                .map(|(&n, s)| {
                    let fitted = (r.intercept + r.slope * (n as f64).ln()).exp();
                    vec![n.to_string(), s.to_string(), fitted.to_string()]
                })
                .collect();
            let table = Table { header: &["n", "scale", "fitted"], rows };
            render(config, Some(r.within(config.tolerance)), &r, table)
        }
        Command::J2Gap => {
            let model = config.model()?;
            let r = j2_gap_experiment(&model, &config.n_grid, config.replicas, config.m, config.seed)?;
            let rows = r
                .rows
                .iter()
                .map(|g| vec![g.n.to_string(), g.median_j2.to_string(), g.median_j1.to_string()])
                .collect();
            let table = Table { header: &["n", "median_j2", "median_j1"], rows };
            render(config, Some(r.decreasing && r.ordered), &r, table)
        }
        Command::AdditionTest => addition(config),
    }
}

fn sample_stable_cmd(config: &RunConfig) -> Result<Output> {
    let params = StableParams::new(config.alpha, config.skew, config.scale, config.shift)?;
    let stream = SeedStream::new(config.seed, config.replica, Role::Auxiliary(SAMPLE_TAG));
    let samples = sample_stable(&params, config.count, &stream)?;
    let rows = samples.iter().enumerate().map(|(i, x)| vec![i.to_string(), x.to_string()]).collect();
    let report = json!({"params": params, "samples": samples});
    render(config, None, &report, Table { header: &["i", "x"], rows })
}

/// Flight table `i,S_i,Y_i`, or the flight path `Y_floor(nt) / n^gamma` on
/// `[0, (steps + 1) / n)`, with `steps = ceil(n T)`.
fn simulate(config: &RunConfig, artifact: Artifact) -> Result<Output> {
    let model = config.model()?;
    let steps = (config.n as f64 * config.horizon).ceil() as usize;
    let flight = build_flight(model.gap, model.jump, steps, config.seed, config.replica, MediumMode::Auto)?;
    let head = header(config, None);
    let mut bytes = Vec::new();
    match artifact {
        Artifact::Main => {
            bytes.extend_from_slice(b"# ");
            serde_json::to_writer(&mut bytes, &head)?;
            bytes.push(b'\n');
            write_flight(&mut bytes, &flight)?;
        }
        Artifact::Path => {
            let n = config.n as f64;
            let norm = n.powf(model.regime()?.gamma);
            let values = flight.targets().iter().map(|y| y / norm).collect();
            let path = StepPath::from_cells(0.0, (steps + 1) as f64 / n, values)?;
            write_path(&mut bytes, &path, head)?;
        }
    }
    Ok(Output { bytes, verdict: None })
}

fn distance(config: &RunConfig) -> Result<Output> {
    let f = load_path(&config.inputs[0])?;
    let g = load_path(&config.inputs[1])?;
    let result = match config.metric {
        MetricKind::J1 => d_j1_estimate(&f, &g, config.m)?,
        MetricKind::J2 => d_j2_estimate(&f, &g, config.m)?,
        MetricKind::J32 => d_j32_estimate(&f, &g, config.m, config.runs)?,
    };
    let r = DistanceReport::new(&result, &f, &g)?;
    let metric = serde_json::to_value(r.metric)?;
    let metric = match &metric {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    let rows = vec![vec![metric, r.value.to_string(), r.slack.to_string(), r.m.to_string()]];
    render(config, None, &r, Table { header: &["metric", "value", "slack", "m"], rows })
}

/// Without inputs, `x = 1_[x_jump, 1)` and `y = 1_[y_jump, 1)` on `[0, 1)`.
/// With `control`, the experiment runs without the disjoint-jumps
/// requirement and passes when the distance stays above 0.4.
fn addition(config: &RunConfig) -> Result<Output> {
    let (x, y) = if config.inputs.is_empty() {
        let ind = |at: f64| StepPath::piecewise(0.0, 1.0, &[at], &[0.0, 1.0]);
        (ind(config.x_jump)?, ind(config.y_jump)?)
    } else {
        (load_path(&config.inputs[0])?, load_path(&config.inputs[1])?)
    };
    let perturbation = Perturbation { x: config.shift_x, y: config.shift_y };
    let (r, verdict) = if config.control {
        let r = addition_shared_jump_control(&x, &y, &config.ks, perturbation, config.m)?;
        let v = r.floor > 0.4;
        (r, v)
    } else {
        let r = addition_continuity_experiment(&x, &y, &config.ks, perturbation, config.m)?;
        let v = r.bounded && r.monotone;
        (r, v)
    };
    let rows = r
        .rows
        .iter()
        .map(|row| {
            vec![
                row.k.to_string(),
                row.distance.to_string(),
                row.bound.to_string(),
                row.witness_cost.map(|c| c.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    let table = Table { header: &["k", "distance", "bound", "witness_cost"], rows };
    render(config, Some(verdict), &r, table)
}

/// Extracts the embedded configuration of an artifact and which kind it is.
pub fn embedded_config(bytes: &[u8]) -> Result<(RunConfig, Artifact)> {
    let text = std::str::from_utf8(bytes).context("artifact is not UTF-8")?;
    let (head, artifact): (Value, Artifact) = if let Some(rest) = text.strip_prefix("# ") {
        let line = rest.lines().next().unwrap_or("");
        let v: Value = serde_json::from_str(line).context("artifact header is not JSON")?;
        if v.get("format").is_some() {
            (v["meta"].clone(), Artifact::Path)
        } else {
            (v, Artifact::Main)
        }
    } else {
        (serde_json::from_str(text).context("artifact is neither JSON nor a commented CSV")?, Artifact::Main)
    };
    if head.get("tool").and_then(Value::as_str) != Some(TOOL) {
        bail!("not a {TOOL} artifact");
    }
    let config: RunConfig =
        serde_json::from_value(head.get("config").cloned().unwrap_or(Value::Null)).context("embedded config")?;
    config.validate()?;
    Ok((config, artifact))
}
