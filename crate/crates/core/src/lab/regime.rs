//! Which normalization and topology apply for given indices and drift.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Topology (or mode) in which the rescaled flight converges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceMode {
    /// Finite-dimensional distributions only.
    Fdd,
    J1,
    J2,
    /// Convergence to a deterministic linear path.
    Deterministic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeId {
    /// Gap index < 1, no drift: medium evaluated along the walk limit.
    Subordinated,
    /// Gap index < 1 with drift: the medium limit read along the drift line.
    DriftedMedium,
    /// Gap index > 1, no drift: the walk limit times the mean gap.
    ScaledWalk,
    /// Both means exist and the drift is nonzero: a law of large numbers.
    LinearDrift,
}

/// Which part of the flight dominates the centered fluctuations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluctuationSource {
    Walk,
    Medium,
    /// Both, at the same scale and independent.
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fluctuation {
    pub exponent: f64,
    pub mode: ConvergenceMode,
    pub source: FluctuationSource,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpec {
    pub alpha: f64,
    pub beta: f64,
    /// Mean jump, when the jump index exceeds 1.
    pub mu: Option<f64>,
    /// Mean gap, when the gap index exceeds 1 and it is known.
    pub nu: Option<f64>,
    pub id: RegimeId,
    /// The flight is normalized by `n^gamma`.
    pub gamma: f64,
    pub mode: ConvergenceMode,
    /// Present iff both indices are in (1, 2) and the drift is nonzero.
    pub fluctuation: Option<Fluctuation>,
}

impl RegimeSpec {
    pub fn with_nu(mut self, nu: f64) -> Self {
        self.nu = Some(nu);
        self
    }

    /// Whether the drift is present and nonzero.
    pub fn drifting(&self) -> bool {
        self.mu.is_some_and(|m| m != 0.0)
    }
}

fn index_ok(x: f64) -> bool {
    x > 0.0 && x < 2.0 && x != 1.0
}

/// Regime of the flight for jump index `alpha`, gap index `beta` and mean
/// jump `mu`. The drift is ignored when `alpha < 1`.
pub fn classify_regime(alpha: f64, beta: f64, mu: Option<f64>) -> Result<RegimeSpec> {
    if !index_ok(alpha) || !index_ok(beta) {
        return invalid(format!("indices must lie in (0, 1) or (1, 2), got alpha={alpha}, beta={beta}"));
    }
    let mu = if alpha > 1.0 { mu } else { None };
    if mu.is_some_and(|m| !m.is_finite()) {
        return invalid("drift must be finite");
    }
    let drift = mu.is_some_and(|m| m != 0.0);
    let (id, gamma, mode) = match (beta < 1.0, drift) {
        (true, false) => (RegimeId::Subordinated, 1.0 / (alpha * beta), ConvergenceMode::Fdd),
        (true, true) => (RegimeId::DriftedMedium, 1.0 / beta, ConvergenceMode::J2),
        (false, false) => (RegimeId::ScaledWalk, 1.0 / alpha, ConvergenceMode::J1),
        (false, true) => (RegimeId::LinearDrift, 1.0, ConvergenceMode::Deterministic),
    };
    let fluctuation = (id == RegimeId::LinearDrift).then(|| {
        if alpha < beta {
            Fluctuation { exponent: 1.0 / alpha, mode: ConvergenceMode::J1, source: FluctuationSource::Walk }
        } else if alpha > beta {
            Fluctuation { exponent: 1.0 / beta, mode: ConvergenceMode::J2, source: FluctuationSource::Medium }
        } else {
            Fluctuation { exponent: 1.0 / alpha, mode: ConvergenceMode::J2, source: FluctuationSource::Both }
        }
    });
    Ok(RegimeSpec { alpha, beta, mu, nu: None, id, gamma, mode, fluctuation })
}
