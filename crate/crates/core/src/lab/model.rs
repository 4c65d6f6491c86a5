//! Laws of an experiment and the per-replica samplers built on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laws::{GapLaw, JumpLaw, StableParams};
use crate::medium::{marginal_target, Site, SparseMedium};
use crate::rng::{combine, Role, SeedStream};
use crate::walk::{walk_endpoint, Walk};

use super::regime::{classify_regime, RegimeId, RegimeSpec};

const ORACLE_ROLE: u64 = 0x6f72_6163;

/// Jump law and gap law of a flight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlightModel {
    pub jump: JumpLaw,
    pub gap: GapLaw,
}

impl FlightModel {
    pub fn new(jump: JumpLaw, gap: GapLaw) -> Result<Self> {
        jump.validate()?;
        gap.validate()?;
        Ok(FlightModel { jump, gap })
    }

    /// Discrete Pareto jumps and Pareto gaps with unit scale.
    pub fn pareto(alpha: f64, p_plus: f64, beta: f64) -> Result<Self> {
        Self::new(JumpLaw::DiscretePareto { alpha, p_plus }, GapLaw::ParetoTail { beta, x_min: 1.0 })
    }

    /// Mean jump when it exists.
    pub fn mu(&self) -> Option<f64> {
        self.jump.mean().ok()
    }

    /// Mean gap when it exists.
    pub fn nu(&self) -> Option<f64> {
        self.gap.mean().ok()
    }

    /// Regime of the model; both laws must carry a tail index.
    pub fn regime(&self) -> Result<RegimeSpec> {
        let alpha = self
            .jump
            .index()
            .ok_or_else(|| Error::ModeMismatch("degenerate jump law has no regime".into()))?;
        let beta = self
            .gap
            .index()
            .ok_or_else(|| Error::ModeMismatch("degenerate gap law has no regime".into()))?;
        let spec = classify_regime(alpha, beta, self.mu())?;
        Ok(match self.nu() {
            Some(nu) if beta > 1.0 => spec.with_nu(nu),
            _ => spec,
        })
    }
}

/// Replica id of replica `r` at grid point `tag`; distinct grid points get
/// independent replicas.
pub fn replica_id(r: u64, tag: u64) -> u64 {
    combine(tag, r)
}

/// `Y_steps` for one replica, drawn from the walk endpoint and the marginal
/// law of the medium at that site.
pub fn flight_endpoint(model: &FlightModel, steps: usize, root: u64, replica: u64) -> f64 {
    let k = walk_endpoint(&model.jump, steps, &SeedStream::new(root, replica, Role::Walk));
    marginal_target(&model.gap, &SeedStream::new(root, replica, Role::Medium), k)
}

/// `Y` at each of the step indices `at`, jointly, for one replica.
pub fn flight_at(model: &FlightModel, at: &[usize], root: u64, replica: u64) -> Result<Vec<f64>> {
    let last = at.iter().copied().max().unwrap_or(0);
    let walk = Walk::simulate(model.jump, last, SeedStream::new(root, replica, Role::Walk))?;
    let sites: Vec<Site> = at.iter().map(|&i| walk.position(i)).collect();
    let medium = SparseMedium::new(&model.gap, &SeedStream::new(root, replica, Role::Medium), &sites)?;
    sites.iter().map(|&s| medium.get(s)).collect()
}

/// Normalization under which the conditional oracle is exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleScaling {
    /// `Y / n^(1/(alpha beta))`, no drift.
    Subordinated,
    /// `Y / n^(1/beta)`, with drift.
    Drifted,
}

impl OracleScaling {
    pub fn for_regime(spec: &RegimeSpec) -> Result<Self> {
        match spec.id {
            RegimeId::Subordinated => Ok(OracleScaling::Subordinated),
            RegimeId::DriftedMedium => Ok(OracleScaling::Drifted),
            other => Err(Error::ModeMismatch(format!("no exact oracle in regime {other:?}"))),
        }
    }

    /// Exponent `gamma` of the normalization `n^gamma`.
    pub fn gamma(self, alpha: f64, beta: f64) -> f64 {
        match self {
            OracleScaling::Subordinated => 1.0 / (alpha * beta),
            OracleScaling::Drifted => 1.0 / beta,
        }
    }
}

fn exact_gap_index(model: &FlightModel) -> Result<f64> {
    match model.gap {
        GapLaw::ExactPositiveStable { beta } => Ok(beta),
        other => Err(Error::ModeMismatch(format!("exact oracle needs positive stable gaps, got {other:?}"))),
    }
}

/// One draw of the normalized flight marginal at time `t` from its exact law.
///
/// Given `K = S_floor(nt)`, the medium point `omega_K` is a sum of `|K|` i.i.d.
/// positive stable gaps, hence `|K|^(1/beta) Z` in law. So the draw is
/// `sgn(K) (|K| / n^(1/alpha))^(1/beta) Z` or `sgn(K) (|K| / n)^(1/beta) Z`.
pub fn exact_marginal_oracle(
    model: &FlightModel,
    scaling: OracleScaling,
    n: usize,
    t: f64,
    root: u64,
    replica: u64,
) -> Result<f64> {
    let beta = exact_gap_index(model)?;
    let alpha = model
        .jump
        .index()
        .ok_or_else(|| Error::ModeMismatch("oracle needs an indexed jump law".into()))?;
    let steps = (n as f64 * t).floor() as usize;
    let stream = SeedStream::new(root, replica, Role::Walk).derive(ORACLE_ROLE);
    let k = walk_endpoint(&model.jump, steps, &stream);
    if k == 0 {
        return Ok(0.0);
    }
    let unit = match scaling {
        OracleScaling::Subordinated => (n as f64).powf(1.0 / alpha),
        OracleScaling::Drifted => n as f64,
    };
    let mut rng = SeedStream::new(root, replica, Role::Auxiliary(ORACLE_ROLE)).rng(0);
    let z = StableParams::positive(beta)?.sample(&mut rng);
    let mag = (k.unsigned_abs() as f64 / unit).powf(1.0 / beta) * z;
    Ok(if k > 0 { mag } else { -mag })
}

/// `n^gamma` normalized flight draw at time `t` through the full pipeline.
pub fn normalized_endpoint(model: &FlightModel, n: usize, t: f64, gamma: f64, root: u64, replica: u64) -> f64 {
    let steps = (n as f64 * t).floor() as usize;
    flight_endpoint(model, steps, root, replica) / (n as f64).powf(gamma)
}
