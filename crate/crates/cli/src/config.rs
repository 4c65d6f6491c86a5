//! Run configuration: defaults, overridden by flags, overridden by a JSON
//! spec file. The merged configuration is embedded in every artifact.

use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use levy_lab::lab::{FlightModel, Observable};
use levy_lab::laws::{GapLaw, JumpLaw};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SampleStable,
    Simulate,
    Distance,
    ReorderCheck,
    DecomposeCheck,
    FddTest,
    OracleTest,
    Exponent,
    J2Gap,
    AdditionTest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum GapKind {
    /// Pareto gaps with survival (x / x_min)^-beta.
    Pareto,
    /// Positive stable gaps (beta < 1), which make the exact oracle available.
    Stable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    J1,
    J2,
    J32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    Flight,
    Fluctuation,
}

impl From<ObservableKind> for Observable {
    fn from(o: ObservableKind) -> Self {
        match o {
            ObservableKind::Flight => Observable::Flight,
            ObservableKind::Fluctuation => Observable::Fluctuation,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub alpha: f64,
    pub p_plus: f64,
    pub beta: f64,
    pub gap: GapKind,
    pub x_min: f64,
    pub skew: f64,
    pub scale: f64,
    pub shift: f64,
    pub count: usize,
    pub n: usize,
    pub n_grid: Vec<usize>,
    pub horizon: f64,
    pub t: f64,
    pub times: Vec<f64>,
    pub factor: usize,
    pub replicas: usize,
    pub m: usize,
    pub runs: usize,
    pub metric: MetricKind,
    pub seed: u64,
    pub replica: u64,
    pub gamma_shift: f64,
    pub observable: ObservableKind,
    pub tolerance: f64,
    pub points: usize,
    pub ks: Vec<usize>,
    pub x_jump: f64,
    pub y_jump: f64,
    pub shift_x: f64,
    pub shift_y: f64,
    pub control: bool,
    pub inputs: Vec<String>,
    pub format: Format,
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        RunConfig {
            command,
            alpha: 1.5,
            p_plus: 0.75,
            beta: 0.7,
            gap: GapKind::Pareto,
            x_min: 1.0,
            skew: 1.0,
            scale: 1.0,
            shift: 0.0,
            count: 1000,
            n: 1024,
            n_grid: (8..=16).map(|k| 1usize << k).collect(),
            horizon: 1.0,
            t: 1.0,
            times: vec![],
            factor: 4,
            replicas: 1000,
            m: 1000,
            runs: 2,
            metric: MetricKind::J2,
            seed: 1,
            replica: 0,
            gamma_shift: 0.0,
            observable: ObservableKind::Flight,
            tolerance: 0.1,
            points: 3,
            ks: vec![4, 8, 16, 32],
            x_jump: 0.3,
            y_jump: 0.7,
            shift_x: 1.0,
            shift_y: -1.0,
            control: false,
            inputs: vec![],
            format: Format::Json,
        }
    }

    /// `defaults <- flags <- spec file`. `flags` holds only the flags given.
    pub fn merge(command: Command, flags: Map<String, Value>, spec: Option<&Path>) -> Result<Self> {
        let mut merged = match serde_json::to_value(Self::defaults(command))? {
            Value::Object(m) => m,
            _ => unreachable!("config serializes to an object"),
        };
        merged.extend(flags);
        if let Some(path) = spec {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading spec file {}", path.display()))?;
            let overrides: Map<String, Value> =
                serde_json::from_str(&text).with_context(|| format!("parsing spec file {}", path.display()))?;
            if let Some(c) = overrides.get("command") {
                if *c != serde_json::to_value(command)? {
                    bail!("spec file is for command {c}, not {}", serde_json::to_value(command)?);
                }
            }
            merged.extend(overrides);
        }
        let config: RunConfig = serde_json::from_value(Value::Object(merged)).context("invalid configuration")?;
        config.validate()?;
        Ok(config)
    }

    pub fn gap_law(&self) -> GapLaw {
        match self.gap {
            GapKind::Pareto => GapLaw::ParetoTail { beta: self.beta, x_min: self.x_min },
            GapKind::Stable => GapLaw::ExactPositiveStable { beta: self.beta },
        }
    }

    pub fn jump_law(&self) -> JumpLaw {
        JumpLaw::DiscretePareto { alpha: self.alpha, p_plus: self.p_plus }
    }

    pub fn model(&self) -> Result<FlightModel> {
        Ok(FlightModel::new(self.jump_law(), self.gap_law())?)
    }

    /// Checks that do not need any sampling.
    pub fn validate(&self) -> Result<()> {
        use Command::*;
        let needs_model = !matches!(self.command, SampleStable | Distance | AdditionTest);
        if needs_model {
            self.model()?;
        }
        if !(self.t > 0.0 && self.horizon > 0.0) {
            bail!("t and horizon must be positive");
        }
        if self.m == 0 {
            bail!("m must be positive");
        }
        match self.command {
            Simulate | ReorderCheck | DecomposeCheck | FddTest | OracleTest if self.n == 0 => bail!("n must be positive"),
            FddTest if self.replicas < 1000 => bail!("fdd-test needs at least 1000 replicas, got {}", self.replicas),
            OracleTest if self.gap != GapKind::Stable => bail!("oracle-test needs --gap stable"),
            Exponent if self.n_grid.len() < 5 => bail!("exponent needs an n grid with at least 5 points"),
            J2Gap if !(self.beta < 1.0 && self.alpha > 1.0 && self.p_plus != 0.5) => {
                bail!("j2-gap needs beta < 1, alpha in (1, 2) and a nonzero drift (pplus != 0.5)")
            }
            ReorderCheck if !(self.alpha > 1.0 && self.p_plus > 0.5) => {
                bail!("reorder-check needs alpha in (1, 2) and a positive drift (pplus > 0.5)")
            }
            DecomposeCheck if !(self.alpha > 1.0 && self.beta > 1.0 && self.p_plus != 0.5) => {
                bail!("decompose-check needs alpha, beta in (1, 2) and a nonzero drift")
            }
            Distance if self.inputs.len() != 2 => bail!("distance needs two path files"),
            AdditionTest if !(self.inputs.is_empty() || self.inputs.len() == 2) => {
                bail!("addition-test takes either no path files or two")
            }
            _ => Ok(()),
        }
    }
}

/// Parses `lo:hi:xr` (geometric) or a comma-separated list.
pub fn parse_grid(s: &str) -> std::result::Result<Vec<usize>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let lo = parts[0].parse::<usize>().map_err(|e| e.to_string())?;
        let hi = parts[1].parse::<usize>().map_err(|e| e.to_string())?;
        let ratio = parts[2]
            .strip_prefix('x')
            .ok_or("ratio must look like x2")?
            .parse::<usize>()
            .map_err(|e| e.to_string())?;
        return levy_lab::lab::geometric_grid(lo, hi, ratio).map_err(|e| e.to_string());
    }
    s.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| e.to_string()))
        .collect()
}
