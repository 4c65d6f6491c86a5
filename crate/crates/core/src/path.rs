//! Piecewise-constant paths and the rescaled processes built from a flight.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::laws::GapLaw;
use crate::medium::Medium;
use crate::walk::{Flight, Walk};

/// How a path is evaluated exactly at a breakpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Right value at breakpoints `t >= 0`, left value at breakpoints `t < 0`.
    TwoSided,
    /// Right value everywhere.
    Cadlag,
}

/// Step function on `[start, end)`: `values[0]` before the first breakpoint,
/// `values[i]` between `breaks[i - 1]` and `breaks[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepPath {
    start: f64,
    end: f64,
    breaks: Vec<f64>,
    values: Vec<f64>,
    side: Side,
}

impl StepPath {
    pub fn new(start: f64, end: f64, breaks: Vec<f64>, values: Vec<f64>, side: Side) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && start < end) {
            return invalid(format!("bad domain [{start}, {end})"));
        }
        if values.len() != breaks.len() + 1 {
            return invalid(format!(
                "{} breakpoints need {} values, got {}",
                breaks.len(),
                breaks.len() + 1,
                values.len()
            ));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return invalid("breakpoints must be strictly increasing");
        }
        if let (Some(&first), Some(&last)) = (breaks.first(), breaks.last()) {
            if !(first > start && last < end) {
                return invalid("breakpoints must lie inside the domain");
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("values must be finite");
        }
        Ok(StepPath { start, end, breaks, values, side })
    }

    pub fn constant(start: f64, end: f64, value: f64) -> Result<Self> {
        Self::new(start, end, vec![], vec![value], Side::TwoSided)
    }

    /// Path taking `values[i]` on `[start + i h, start + (i + 1) h)` with
    /// `h = (end - start) / values.len()`.
    pub fn from_cells(start: f64, end: f64, values: Vec<f64>) -> Result<Self> {
        let m = values.len();
        if m == 0 {
            return invalid("need at least one cell");
        }
        let breaks = (1..m).map(|i| grid_point(start, end, m, i)).collect();
        Self::new(start, end, breaks, values, Side::TwoSided)?.normalized()
    }

    /// Indicator-style path: `values` between consecutive `jumps`.
    pub fn piecewise(start: f64, end: f64, jumps: &[f64], values: &[f64]) -> Result<Self> {
        Self::new(start, end, jumps.to_vec(), values.to_vec(), Side::TwoSided)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.start, self.end)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Index of the cell whose value is taken at `t`.
    #[inline]
    pub fn cell_at(&self, t: f64) -> usize {
        if self.side == Side::TwoSided && t < 0.0 {
            self.breaks.partition_point(|&b| b < t)
        } else {
            self.breaks.partition_point(|&b| b <= t)
        }
    }

    /// Value at `t`, or `None` outside `[start, end)`.
    #[inline]
    pub fn eval(&self, t: f64) -> Option<f64> {
        if t < self.start || t >= self.end || t.is_nan() {
            return None;
        }
        Some(self.values[self.cell_at(t)])
    }

    /// `(time, size)` of every jump.
    pub fn jumps(&self) -> Vec<(f64, f64)> {
        self.breaks
            .iter()
            .enumerate()
            .filter(|&(i, _)| self.values[i + 1] != self.values[i])
            .map(|(i, &b)| (b, self.values[i + 1] - self.values[i]))
            .collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Drop breakpoints where the value does not change.
    pub fn normalized(mut self) -> Result<Self> {
        let mut breaks = Vec::with_capacity(self.breaks.len());
        let mut values = Vec::with_capacity(self.values.len());
        values.push(self.values[0]);
        for (i, &b) in self.breaks.iter().enumerate() {
            let v = self.values[i + 1];
            if v != *values.last().expect("nonempty") {
                breaks.push(b);
                values.push(v);
            }
        }
        self.breaks = breaks;
        self.values = values;
        Ok(self)
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = self.values.iter().map(|&v| f(v)).collect();
        Self::new(self.start, self.end, self.breaks.clone(), values, self.side)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map_values(|v| c * v)
    }

    pub fn shift(&self, c: f64) -> Result<Self> {
        self.map_values(|v| v + c)
    }

    pub fn neg(&self) -> Result<Self> {
        self.map_values(|v| -v)
    }

    /// Right-continuous version. On a path with the two-sided convention this
    /// only changes the value taken at negative breakpoints.
    pub fn cadlag_ify(&self) -> Self {
        StepPath { side: Side::Cadlag, ..self.clone() }
    }

    /// Same path restricted to `[start, end)`, which must lie in the domain.
    pub fn restrict(&self, start: f64, end: f64) -> Result<Self> {
        if start < self.start || end > self.end || !(start < end) {
            return Err(Error::DomainMismatch(format!(
                "[{start}, {end}) is not inside [{}, {})",
                self.start, self.end
            )));
        }
        let first = self.cell_at(start);
        let lo = self.breaks.partition_point(|&b| b <= start);
        let hi = self.breaks.partition_point(|&b| b < end);
        let breaks = self.breaks[lo..hi].to_vec();
        let mut values = vec![self.values[first]];
        values.extend_from_slice(&self.values[lo + 1..hi + 1]);
        Self::new(start, end, breaks, values, self.side)
    }

    /// Values at the left endpoints `start + (end - start) i / m`.
    pub fn sample_grid(&self, m: usize) -> Vec<f64> {
        (0..m)
            .map(|i| self.values[self.cell_at(grid_point(self.start, self.end, m, i))])
            .collect()
    }
}

/// `start + (end - start) * i / m`, computed so that grid points of
/// different resolutions agree whenever they coincide exactly.
#[inline]
pub fn grid_point(start: f64, end: f64, m: usize, i: usize) -> f64 {
    start + (end - start) * (i as f64) / (m as f64)
}

/// Pointwise sum on the merged breakpoint set.
pub fn add(x: &StepPath, y: &StepPath) -> Result<StepPath> {
    if x.start != y.start || x.end != y.end {
        return Err(Error::DomainMismatch(format!(
            "[{}, {}) vs [{}, {})",
            x.start, x.end, y.start, y.end
        )));
    }
    if x.side != y.side {
        return Err(Error::DomainMismatch("side conventions differ".into()));
    }
    let mut breaks: Vec<f64> = x.breaks.iter().chain(&y.breaks).copied().collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    // the value on a cell is read at its midpoint, away from either convention
    let mut values = Vec::with_capacity(breaks.len() + 1);
    let mut left = x.start;
    for &right in breaks.iter().chain(std::iter::once(&x.end)) {
        let mid = 0.5 * (left + right);
        values.push(x.values[x.cell_at(mid)] + y.values[y.cell_at(mid)]);
        left = right;
    }
    StepPath::new(x.start, x.end, breaks, values, x.side)?.normalized()
}

/// `t -> outer(inner(t))`. Breakpoints are those of `inner`.
pub fn compose(outer: &StepPath, inner: &StepPath) -> Result<StepPath> {
    let mut values = Vec::with_capacity(inner.values.len());
    for &s in &inner.values {
        values.push(outer.eval(s).ok_or(Error::RangeEscape(s))?);
    }
    StepPath::new(inner.start, inner.end, inner.breaks.clone(), values, inner.side)
}

/// `t -> outer(slope * t)` on `[start, end)`, for `slope > 0`.
pub fn compose_linear(outer: &StepPath, slope: f64, start: f64, end: f64) -> Result<StepPath> {
    if !(slope > 0.0 && slope.is_finite()) {
        return invalid(format!("slope {slope} must be positive"));
    }
    if slope * start < outer.start {
        return Err(Error::RangeEscape(slope * start));
    }
    if slope * end > outer.end {
        return Err(Error::RangeEscape(slope * end));
    }
    let first = outer.cell_at(slope * start);
    let mut breaks = Vec::new();
    let mut values = vec![outer.values[first]];
    for (j, &b) in outer.breaks.iter().enumerate().skip(first) {
        let t = b / slope;
        if t >= end {
            break;
        }
        if t > start && breaks.last().is_none_or(|&last| t > last) {
            breaks.push(t);
            values.push(outer.values[j + 1]);
        }
    }
    StepPath::new(start, end, breaks, values, outer.side)
}

/// Normalization of the medium path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum MediumScaling {
    /// `omega / m^(1/beta)`, for gap index in (0, 1).
    Hat { beta: f64 },
    /// `omega / m`, for gap index in (1, 2).
    Bar { beta: f64 },
    /// `(omega_k - nu k) / m^(1/beta)`, for gap index in (1, 2).
    Tilde { beta: f64, nu: f64 },
}

/// Normalization of the walk path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum WalkScaling {
    /// `S / n^(1/alpha)`.
    Hat { alpha: f64 },
    /// `S / n`, for jump index in (1, 2).
    Bar { alpha: f64 },
    /// `(S_i - mu i) / n^(1/alpha)`, for jump index in (1, 2).
    Tilde { alpha: f64, mu: f64 },
}

fn check_index(name: &str, declared: f64, law: Option<f64>, lo: f64, hi: f64) -> Result<()> {
    if !(declared > lo && declared < hi) {
        return Err(Error::ModeMismatch(format!("{name} index {declared} not in ({lo}, {hi})")));
    }
    if let Some(actual) = law {
        if actual != declared {
            return Err(Error::ModeMismatch(format!(
                "{name} index {declared} differs from the law's index {actual}"
            )));
        }
    }
    Ok(())
}

/// Medium as a two-sided step path in the variable `s = k / scale`.
///
/// With `K - 1` the largest site materialized on both sides, the domain is
/// `[-K/scale, K/scale)`; for `s >= 0` the path takes site `floor(scale s)`,
/// for `s < 0` site `ceil(scale s)`.
pub fn rescale_medium(medium: &Medium, scale: f64, mode: MediumScaling) -> Result<StepPath> {
    if !(scale > 0.0 && scale.is_finite()) {
        return invalid(format!("scale {scale} must be positive"));
    }
    let law_index = medium.law().and_then(GapLaw::index);
    let (div, nu) = match mode {
        MediumScaling::Hat { beta } => {
            check_index("gap", beta, law_index, 0.0, 1.0)?;
            (scale.powf(1.0 / beta), 0.0)
        }
        MediumScaling::Bar { beta } => {
            check_index("gap", beta, law_index, 1.0, 2.0)?;
            (scale, 0.0)
        }
        MediumScaling::Tilde { beta, nu } => {
            check_index("gap", beta, law_index, 1.0, 2.0)?;
            if !nu.is_finite() {
                return Err(Error::ModeMismatch("centering needs a finite mean gap".into()));
            }
            (scale.powf(1.0 / beta), nu)
        }
    };
    let (lo, hi) = medium.range();
    let top = (-lo).min(hi);
    if top > (1 << 53) {
        return Err(Error::TooLarge("medium range exceeds exact float indexing".into()));
    }
    let top = top as i64;
    let value = |k: i64| -> f64 {
        let w = medium.get(k as i128).expect("materialized");
        (w - nu * k as f64) / div
    };
    let cells = 2 * top as usize + 1;
    let mut breaks = Vec::with_capacity(cells - 1);
    let mut values = Vec::with_capacity(cells);
    // site -k covers (-(k+1)/scale, -k/scale], site 0 covers (-1/scale, 1/scale)
    // and site k covers [k/scale, (k+1)/scale)
    for k in (1..=top).rev() {
        values.push(value(-k));
        breaks.push(-(k as f64) / scale);
    }
    values.push(value(0));
    for k in 1..=top {
        breaks.push(k as f64 / scale);
        values.push(value(k));
    }
    let edge = (top + 1) as f64 / scale;
    StepPath::new(-edge, edge, breaks, values, Side::TwoSided)
}

/// Walk as a step path on `[0, (steps + 1) / n)` with cells `[i/n, (i+1)/n)`.
pub fn rescale_walk(walk: &Walk, n: usize, mode: WalkScaling) -> Result<StepPath> {
    if n == 0 {
        return invalid("n must be positive");
    }
    let law_index = walk.law().index();
    let nf = n as f64;
    let (div, mu) = match mode {
        WalkScaling::Hat { alpha } => {
            check_index("jump", alpha, law_index, 0.0, 2.0)?;
            if alpha == 1.0 {
                return Err(Error::ModeMismatch("jump index 1 is excluded".into()));
            }
            (hat_scale(n, alpha), 0.0)
        }
        WalkScaling::Bar { alpha } => {
            check_index("jump", alpha, law_index, 1.0, 2.0)?;
            (nf, 0.0)
        }
        WalkScaling::Tilde { alpha, mu } => {
            check_index("jump", alpha, law_index, 1.0, 2.0)?;
            if !mu.is_finite() {
                return Err(Error::ModeMismatch("centering needs a finite mean jump".into()));
            }
            (hat_scale(n, alpha), mu)
        }
    };
    let positions = walk.positions();
    let values = positions
        .iter()
        .enumerate()
        .map(|(i, &s)| (s as f64 - mu * i as f64) / div)
        .collect();
    let breaks = (1..positions.len()).map(|i| i as f64 / nf).collect();
    StepPath::new(0.0, positions.len() as f64 / nf, breaks, values, Side::TwoSided)
}

/// `n^(1/alpha)`: the walk's spatial scale, and the medium time-scale under
/// which medium and walk rescalings compose into the flight rescaling.
pub fn hat_scale(n: usize, alpha: f64) -> f64 {
    (n as f64).powf(1.0 / alpha)
}

/// Result of checking the split of the centered flight into a medium term,
/// a walk term and a rounding term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionCheck {
    /// Largest `|lhs - rhs|` over the evaluation grid.
    pub residual: f64,
    /// Largest `|lhs|` over the evaluation grid.
    pub lhs_sup: f64,
    pub points: usize,
}

/// Evaluates both sides of
/// `Y_floor(nt) - mu nu n t = n^(1/beta) omega~(S-(t)) + n^(1/alpha) nu S~(t) + nu mu (floor(nt) - nt)`
/// on `points_per_cell` points in every cell `[i/n, (i+1)/n)` of `[0, T)`.
#[allow(clippy::too_many_arguments)]
pub fn fluctuation_decomposition_residual(
    flight: &Flight,
    n: usize,
    horizon: f64,
    alpha: f64,
    beta: f64,
    mu: f64,
    nu: f64,
    points_per_cell: usize,
) -> Result<DecompositionCheck> {
    if !(alpha > 1.0 && alpha < 2.0 && beta > 1.0 && beta < 2.0) {
        return Err(Error::ModeMismatch("needs both indices in (1, 2)".into()));
    }
    if mu == 0.0 || !mu.is_finite() || !nu.is_finite() {
        return Err(Error::ModeMismatch("needs a nonzero finite drift and a finite mean gap".into()));
    }
    let medium = flight
        .medium()
        .explicit()
        .ok_or_else(|| Error::Precondition("decomposition needs an explicit medium".into()))?;
    let cells = (horizon * n as f64).ceil() as usize;
    if cells > flight.steps() + 1 {
        return Err(Error::DomainMismatch(format!(
            "horizon needs {cells} cells, walk has {}",
            flight.steps() + 1
        )));
    }
    let nf = n as f64;
    let medium_tilde = rescale_medium(medium, nf, MediumScaling::Tilde { beta, nu })?;
    let walk_bar = rescale_walk(flight.walk(), n, WalkScaling::Bar { alpha })?;
    let walk_tilde = rescale_walk(flight.walk(), n, WalkScaling::Tilde { alpha, mu })?;
    let medium_term = compose(&medium_tilde, &walk_bar)?;
    let medium_factor = nf.powf(1.0 / beta);
    let walk_factor = nf.powf(1.0 / alpha);
    let targets = flight.targets();
    let per = points_per_cell.max(1);
    let mut residual: f64 = 0.0;
    let mut lhs_sup: f64 = 0.0;
    let mut points = 0;
    for i in 0..cells {
        for j in 0..per {
            let t = (i as f64 + j as f64 / per as f64) / nf;
            if t >= horizon {
                continue;
            }
            let nt = nf * t;
            let lhs = targets[i] - mu * nu * nt;
            let rhs = medium_factor * medium_term.eval(t).expect("in domain")
                + walk_factor * nu * walk_tilde.eval(t).expect("in domain")
                + nu * mu * (i as f64 - nt);
            residual = residual.max((lhs - rhs).abs());
            lhs_sup = lhs_sup.max(lhs.abs());
            points += 1;
        }
    }
    Ok(DecompositionCheck { residual, lhs_sup, points })
}
