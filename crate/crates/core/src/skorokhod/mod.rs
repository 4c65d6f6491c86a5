//! Skorokhod-type distances between step paths, with certificates.
//!
//! All estimators work on the pair sampled at `m` uniform cells (each cell
//! carries the value at its left endpoint) and report a declared slack of
//! `2 |domain| / m`.

mod j1;
mod j2;
mod j32;
mod matching;
mod merge;
mod reorder;
mod timechange;

pub use j1::d_j1_estimate;
pub use j2::{d_j2_bruteforce, d_j2_estimate, graph_hausdorff_lower, BRUTEFORCE_MAX_CELLS};
pub use j32::{d_j32_estimate, J32_MAX_CELLS};
pub use matching::max_bipartite_matching;
pub use merge::merge_time_changes;
pub use reorder::{check_displacement_bound, reorder_bijection, DisplacementCheck, Reordering};
pub use timechange::{replay, AffinePiece, Replay, TimeChange};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::path::{grid_point, StepPath};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "metric", rename_all = "snake_case")]
pub enum Metric {
    J1,
    J2,
    /// Piecewise increasing time changes with at most `runs` pieces.
    J32 { runs: usize },
}

/// Estimated distance with the time change that certifies it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub metric: Metric,
    pub value: f64,
    pub slack: f64,
    pub m: usize,
    /// Maps the second path's clock to the first's: compare `f(lambda(t))`
    /// with `g(t)`.
    pub witness: TimeChange,
}

/// Short description of a witness, for reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessSummary {
    pub pieces: usize,
    pub runs: usize,
    pub displacement: f64,
    pub mismatch: f64,
}

impl DistanceResult {
    /// Replays the witness on the sampled pair the estimate was computed on.
    pub fn replay(&self, f: &StepPath, g: &StepPath) -> Result<Replay> {
        replay(&sampled(f, self.m)?, &sampled(g, self.m)?, &self.witness)
    }

    pub fn summary(&self, f: &StepPath, g: &StepPath) -> Result<WitnessSummary> {
        let r = self.replay(f, g)?;
        Ok(WitnessSummary {
            pieces: self.witness.pieces().len(),
            runs: self.witness.runs(),
            displacement: r.displacement,
            mismatch: r.mismatch,
        })
    }
}

/// `f` read at `m` uniform left endpoints, as a step path on the same domain.
pub fn sampled(f: &StepPath, m: usize) -> Result<StepPath> {
    StepPath::from_cells(f.start(), f.end(), f.sample_grid(m))
}

pub fn slack(f: &StepPath, m: usize) -> f64 {
    2.0 * f.len() / m as f64
}

fn check_pair(f: &StepPath, g: &StepPath, m: usize) -> Result<()> {
    if m == 0 {
        return invalid("resolution m must be positive");
    }
    if f.domain() != g.domain() {
        return Err(Error::DomainMismatch(format!(
            "[{}, {}) vs [{}, {})",
            f.start(),
            f.end(),
            g.start(),
            g.end()
        )));
    }
    Ok(())
}

/// Maximal runs of equal values in a cell array, as (first cell, value).
fn runs_of(cells: &[f64]) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    for (i, &v) in cells.iter().enumerate() {
        if out.last().is_none_or(|&(_, w)| w != v) {
            out.push((i, v));
        }
    }
    out
}

/// Pieces of a cell array on `[t(lo), t(hi))`: start times, end time, values.
struct Pieces {
    starts: Vec<f64>,
    end: f64,
    values: Vec<f64>,
}

impl Pieces {
    fn new(cells: &[f64], lo: usize, hi: usize, start: f64, end: f64, m: usize) -> Self {
        let runs = runs_of(&cells[lo..hi]);
        Pieces {
            starts: runs.iter().map(|&(i, _)| grid_point(start, end, m, lo + i)).collect(),
            end: grid_point(start, end, m, hi),
            values: runs.iter().map(|&(_, v)| v).collect(),
        }
    }

    fn count(&self) -> usize {
        self.values.len()
    }

    /// Start of piece `k`, or the end time for `k == count`.
    #[inline]
    fn time(&self, k: usize) -> f64 {
        if k < self.starts.len() {
            self.starts[k]
        } else {
            self.end
        }
    }
}

const BISECTION_ROUNDS: usize = 40;

/// Least `eps` in `[lo, hi]` with `feasible(eps)`, assuming feasibility is
/// monotone and `feasible(hi)` holds. Splits geometrically once `lo > 0`
/// and stops early when the bracket is far below `resolution`.
fn bisect(mut lo: f64, mut hi: f64, resolution: f64, mut feasible: impl FnMut(f64) -> bool) -> f64 {
    if lo >= hi || feasible(lo) {
        return lo.min(hi);
    }
    for _ in 0..BISECTION_ROUNDS {
        if hi - lo <= 1e-6 * resolution {
            break;
        }
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        let mid = if mid > lo && mid < hi { mid } else { 0.5 * (lo + hi) };
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Largest candidate set searched directly; above it the bracket is first
/// narrowed numerically.
const CANDIDATE_LIMIT: usize = 1 << 20;

/// Smallest feasible tolerance for the monotone estimators. Feasibility only
/// ever compares a multiple of `h` or a value gap `|f_i - g_j|` with the
/// tolerance, so the optimum is one of those numbers; they are searched by
/// bisection over the sorted candidates in the bracket. `hi` must be
/// feasible. Probes are inflated by a relative `1e-12` to absorb rounding in
/// the time comparisons.
fn critical_search(mut lo: f64, mut hi: f64, h: f64, fv: &[f64], gv: &[f64], mut feasible: impl FnMut(f64) -> bool) -> f64 {
    let probe = |e: f64| e * (1.0 + 1e-12);
    if lo >= hi || feasible(probe(lo)) {
        return lo.min(hi);
    }
    loop {
        let inside = |c: f64| c > lo && c < hi;
        let mut candidates: Vec<f64> = (1..=fv.len()).map(|k| k as f64 * h).filter(|&c| inside(c)).collect();
        for &a in fv {
            candidates.extend(gv.iter().map(|&b| (a - b).abs()).filter(|&c| inside(c)));
            if candidates.len() > CANDIDATE_LIMIT {
                break;
            }
        }
        if candidates.len() > CANDIDATE_LIMIT {
            let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
            if feasible(probe(mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
            continue;
        }
        candidates.sort_by(f64::total_cmp);
        candidates.dedup();
        // first feasible candidate; `hi` (feasible) if there is none
        let (mut a, mut b) = (0, candidates.len());
        while a < b {
            let mid = (a + b) / 2;
            if feasible(probe(candidates[mid])) {
                b = mid;
            } else {
                a = mid + 1;
            }
        }
        return candidates.get(a).copied().unwrap_or(hi);
    }
}

/// Bisection bracket shared by the monotone estimators: any increasing (or
/// piecewise increasing) witness at `eps` yields a cell cover at `eps + h`,
/// so the graph distance minus one cell is a lower bound.
fn monotone_bracket(fv: &[f64], gv: &[f64], h: f64) -> (f64, f64) {
    let hi = fv.iter().zip(gv).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    let lo = (j2::cover_value(fv, gv, h) - h).max(0.0).min(hi);
    (lo, hi)
}
