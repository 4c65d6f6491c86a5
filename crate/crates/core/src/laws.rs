//! Stable sampling and the two heavy-tailed laws that drive the model:
//! positive gaps between medium points and integer jumps of the walk.

use std::f64::consts::FRAC_PI_2;

use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{exp1, unit_open, unit_open_closed, SeedStream};

/// Stable law in the S1 parameterization: index, skewness, scale, shift.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub alpha: f64,
    pub skew: f64,
    pub scale: f64,
    pub shift: f64,
}

impl StableParams {
    pub fn new(alpha: f64, skew: f64, scale: f64, shift: f64) -> Result<Self> {
        let p = StableParams { alpha, skew, scale, shift };
        p.validate()?;
        Ok(p)
    }

    /// Totally skewed to the right, unit scale, no shift.
    pub fn positive(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0, 1.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 2.0) || self.alpha == 1.0 {
            return invalid(format!("stable index {} not in (0, 1) or (1, 2)", self.alpha));
        }
        if !(-1.0..=1.0).contains(&self.skew) {
            return invalid(format!("skewness {} not in [-1, 1]", self.skew));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return invalid(format!("scale {} must be positive", self.scale));
        }
        if !self.shift.is_finite() {
            return invalid("shift must be finite");
        }
        Ok(())
    }

    /// One draw by the Chambers-Mallows-Stuck transform.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        let v = FRAC_PI_2 * (2.0 * unit_open(rng) - 1.0);
        let w = exp1(rng);
        self.scale * standard_stable(self.alpha, self.skew, v, w) + self.shift
    }
}

fn standard_stable(alpha: f64, skew: f64, v: f64, w: f64) -> f64 {
    let t = skew * (FRAC_PI_2 * alpha).tan();
    let b = t.atan() / alpha;
    let s = (1.0 + t * t).powf(0.5 / alpha);
    let arg = alpha * (v + b);
    s * arg.sin() / v.cos().powf(1.0 / alpha)
        * ((v - arg).cos() / w).powf((1.0 - alpha) / alpha)
}

/// `n` independent draws, draw `i` taken from item `i` of `stream`.
pub fn sample_stable(params: &StableParams, n: usize, stream: &SeedStream) -> Result<Vec<f64>> {
    params.validate()?;
    Ok((0..n as u64).map(|i| params.sample(&mut stream.rng(i))).collect())
}

/// Law of the positive gaps between consecutive medium points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GapLaw {
    /// Positive stable with unit scale; only for index below one.
    ExactPositiveStable { beta: f64 },
    /// `P(gap > x) = (x / x_min)^(-beta)` for `x >= x_min`.
    ParetoTail { beta: f64, x_min: f64 },
    /// Deterministic gap; degenerate law used in checks.
    Constant { value: f64 },
}

impl GapLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            GapLaw::ExactPositiveStable { beta } => {
                if !(beta > 0.0 && beta < 1.0) {
                    return invalid(format!("exact positive stable gaps need index in (0, 1), got {beta}"));
                }
            }
            GapLaw::ParetoTail { beta, x_min } => {
                if !(beta > 0.0 && beta < 2.0) || beta == 1.0 {
                    return invalid(format!("gap index {beta} not in (0, 1) or (1, 2)"));
                }
                if !(x_min > 0.0 && x_min.is_finite()) {
                    return invalid(format!("x_min {x_min} must be positive"));
                }
            }
            GapLaw::Constant { value } => {
                if !(value > 0.0 && value.is_finite()) {
                    return invalid(format!("constant gap {value} must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Tail index, or `None` for the degenerate law.
    pub fn index(&self) -> Option<f64> {
        match *self {
            GapLaw::ExactPositiveStable { beta } | GapLaw::ParetoTail { beta, .. } => Some(beta),
            GapLaw::Constant { .. } => None,
        }
    }

    /// Mean gap; defined only for index above one.
    pub fn mean(&self) -> Result<f64> {
        match *self {
            GapLaw::ExactPositiveStable { beta } => Err(Error::MeanUndefined(beta)),
            GapLaw::ParetoTail { beta, x_min } => {
                if beta > 1.0 {
                    Ok(x_min * beta / (beta - 1.0))
                } else {
                    Err(Error::MeanUndefined(beta))
                }
            }
            GapLaw::Constant { value } => Ok(value),
        }
    }

    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            GapLaw::ExactPositiveStable { beta } => {
                let v = FRAC_PI_2 * (2.0 * unit_open(rng) - 1.0);
                let w = exp1(rng);
                standard_stable(beta, 1.0, v, w)
            }
            GapLaw::ParetoTail { beta, x_min } => x_min * unit_open_closed(rng).powf(-1.0 / beta),
            GapLaw::Constant { value } => value,
        }
    }
}

/// Jump magnitudes are clamped here; only reachable for indices well below 1/2.
pub const MAX_JUMP: i128 = 1 << 120;

/// Law of the integer jumps of the walk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JumpLaw {
    /// `P(|jump| >= k) = k^(-alpha)` for integers `k >= 1`; sign is `+` with
    /// probability `p_plus`.
    DiscretePareto { alpha: f64, p_plus: f64 },
    /// Deterministic step; degenerate law used in checks.
    Constant { step: i64 },
}

impl JumpLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            JumpLaw::DiscretePareto { alpha, p_plus } => {
                if !(alpha > 0.0 && alpha < 2.0) || alpha == 1.0 {
                    return invalid(format!("jump index {alpha} not in (0, 1) or (1, 2)"));
                }
                if !(0.0..=1.0).contains(&p_plus) {
                    return invalid(format!("p_plus {p_plus} not in [0, 1]"));
                }
            }
            JumpLaw::Constant { .. } => {}
        }
        Ok(())
    }

    pub fn index(&self) -> Option<f64> {
        match *self {
            JumpLaw::DiscretePareto { alpha, .. } => Some(alpha),
            JumpLaw::Constant { .. } => None,
        }
    }

    /// Mean jump; defined only for index above one.
    pub fn mean(&self) -> Result<f64> {
        match *self {
            JumpLaw::DiscretePareto { alpha, p_plus } => {
                if alpha > 1.0 {
                    Ok((2.0 * p_plus - 1.0) * riemann_zeta(alpha)?)
                } else {
                    Err(Error::MeanUndefined(alpha))
                }
            }
            JumpLaw::Constant { step } => Ok(step as f64),
        }
    }

    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> i128 {
        match *self {
            JumpLaw::DiscretePareto { alpha, p_plus } => {
                let x = unit_open_closed(rng).powf(-1.0 / alpha).floor();
                let mag = if x >= MAX_JUMP as f64 { MAX_JUMP } else { x as i128 };
                if unit_open(rng) < p_plus {
                    mag
                } else {
                    -mag
                }
            }
            JumpLaw::Constant { step } => step as i128,
        }
    }
}

const BERNOULLI_EVEN: [f64; 6] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
];

/// Riemann zeta for real `s > 1` by Euler-Maclaurin summation.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return invalid(format!("zeta needs s > 1, got {s}"));
    }
    const N: usize = 64;
    let n = N as f64;
    let head: f64 = (1..N).rev().map(|k| (k as f64).powf(-s)).sum();
    let mut total = head + n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // rising factorial s (s+1) ... (s+2j-2) over (2j)!
    let mut coef = s / 2.0;
    let mut power = n.powf(-s - 1.0);
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        total += b * coef * power;
        let k = 2.0 * (j as f64 + 1.0);
        coef *= (s + k - 1.0) * (s + k) / ((k + 1.0) * (k + 2.0));
        power /= n * n;
    }
    Ok(total)
}
