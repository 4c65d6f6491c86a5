//! Reordering of walk cells into nondecreasing order.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::path::{grid_point, rescale_walk, WalkScaling};
use crate::walk::Walk;

use super::timechange::{AffinePiece, TimeChange};

/// Sorting permutation `p` of the walk values `S_0, ..., S_{cells-1}`, and the
/// cell bijection sending `[i/n, (i+1)/n)` onto `[p(i)/n, (p(i)+1)/n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reordering {
    pub n: usize,
    /// Number of cells, `ceil(n T)`.
    pub cells: usize,
    pub perm: Vec<usize>,
}

impl Reordering {
    /// Padded horizon `cells / n`.
    pub fn horizon(&self) -> f64 {
        self.cells as f64 / self.n as f64
    }

    /// `max_i |i - p(i)|`.
    pub fn max_shift(&self) -> usize {
        self.perm.iter().enumerate().map(|(i, &p)| i.abs_diff(p)).max().unwrap_or(0)
    }

    /// `max_i |i - p(i)| / n`.
    pub fn sup_displacement(&self) -> f64 {
        self.max_shift() as f64 / self.n as f64
    }

    pub fn time_change(&self) -> Result<TimeChange> {
        let end = self.horizon();
        let t = |i: usize| grid_point(0.0, end, self.cells, i);
        TimeChange::new(
            self.perm
                .iter()
                .enumerate()
                .map(|(i, &p)| AffinePiece { src: (t(i), t(i + 1)), dst: (t(p), t(p + 1)) })
                .collect(),
        )
    }
}

/// Stable sort of the first `ceil(n T)` walk positions by value.
pub fn reorder_bijection(walk: &Walk, n: usize, horizon: f64) -> Result<Reordering> {
    if n == 0 || !(horizon > 0.0) {
        return invalid("need n > 0 and a positive horizon");
    }
    let cells = (n as f64 * horizon).ceil() as usize;
    if cells > walk.positions().len() {
        return invalid(format!(
            "horizon needs {cells} positions, walk has {}",
            walk.positions().len()
        ));
    }
    let s = &walk.positions()[..cells];
    let mut perm: Vec<usize> = (0..cells).collect();
    perm.sort_by_key(|&i| s[i]);
    Ok(Reordering { n, cells, perm })
}

/// Per-path check of the displacement bound for the reordering.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisplacementCheck {
    /// `sup_{u in [0, nT)} |S_floor(u) - mu u| / n^(1/alpha)`.
    pub c: f64,
    /// `(2 C / mu) n^(1/alpha) + 1`.
    pub bound: f64,
    pub max_shift: usize,
    pub holds: bool,
    /// Whether the bar-scaled walk composed with the reordering is
    /// nondecreasing.
    pub monotone: bool,
}

pub fn check_displacement_bound(walk: &Walk, n: usize, horizon: f64, mu: f64, alpha: f64) -> Result<DisplacementCheck> {
    if !(mu > 0.0 && mu.is_finite()) {
        return invalid(format!("drift must be positive, got {mu}"));
    }
    let reordering = reorder_bijection(walk, n, horizon)?;
    let s = walk.positions();
    // sup over u in [k, k+1) is attained at u = k or as u -> k + 1
    let raw = (0..reordering.cells)
        .map(|k| {
            let v = s[k] as f64;
            (v - mu * k as f64).abs().max((v - mu * (k + 1) as f64).abs())
        })
        .fold(0.0, f64::max);
    let c = raw / (n as f64).powf(1.0 / alpha);
    let bound = 2.0 * raw / mu + 1.0;
    let max_shift = reordering.max_shift();

    let bar = rescale_walk(walk, n, WalkScaling::Bar { alpha })?;
    let rho = reordering.time_change()?;
    let mut monotone = true;
    let mut last = f64::NEG_INFINITY;
    for piece in rho.pieces() {
        let mid = 0.5 * (piece.src.0 + piece.src.1);
        let v = bar.eval(piece.apply(mid)).expect("inside the walk path");
        monotone &= v >= last;
        last = v;
    }
    Ok(DisplacementCheck { c, bound, max_shift, holds: (max_shift as f64) <= bound, monotone })
}
