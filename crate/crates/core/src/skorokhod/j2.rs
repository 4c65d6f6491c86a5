//! J2 distance on the cell grid.
//!
//! A bijective time change may split a cell into several pieces and merge
//! pieces of several cells, so at tolerance `eps` it exists exactly when the
//! bipartite graph "g-cell i may be sent into f-cell j" (time offset and value
//! gap both at most `eps`) has no isolated vertex. A minimum edge cover of
//! that graph, obtained from a maximum matching, is turned into the witness by
//! cutting every cell into as many equal parts as it has cover edges.

use crate::error::{Error, Result};
use crate::path::{grid_point, StepPath};

use super::matching::max_bipartite_matching;
use super::timechange::{AffinePiece, TimeChange};
use super::{bisect, check_pair, slack, DistanceResult, Metric};

pub const BRUTEFORCE_MAX_CELLS: usize = 8;

/// Edge budget for building the minimum cover; above it the witness uses one
/// nearest partner per cell instead.
const MATCHING_EDGE_BUDGET: usize = 4_000_000;

#[inline]
fn cost(own: f64, other: f64, offset: usize, h: f64) -> f64 {
    (offset as f64 * h).max((own - other).abs())
}

/// Cheapest partner of cell `i` (value `v`) among `other`.
fn nearest(v: f64, i: usize, other: &[f64], h: f64) -> (f64, usize) {
    let m = other.len();
    let mut best = (v - other[i]).abs();
    let mut arg = i;
    for d in 1..m {
        if d as f64 * h >= best {
            break;
        }
        if d <= i {
            let c = cost(v, other[i - d], d, h);
            if c < best {
                best = c;
                arg = i - d;
            }
        }
        if i + d < m {
            let c = cost(v, other[i + d], d, h);
            if c < best {
                best = c;
                arg = i + d;
            }
        }
    }
    (best, arg)
}

/// Whether cell `i` (value `v`) has a partner within `eps`.
fn has_partner(v: f64, i: usize, other: &[f64], h: f64, eps: f64) -> bool {
    let m = other.len();
    let mut d = 0;
    while d < m && d as f64 * h <= eps {
        if d <= i && (v - other[i - d]).abs() <= eps {
            return true;
        }
        if i + d < m && (v - other[i + d]).abs() <= eps {
            return true;
        }
        d += 1;
    }
    false
}

fn feasible(fv: &[f64], gv: &[f64], h: f64, eps: f64) -> bool {
    gv.iter().enumerate().all(|(i, &v)| has_partner(v, i, fv, h, eps))
        && fv.iter().enumerate().all(|(j, &v)| has_partner(v, j, gv, h, eps))
}

/// Smallest `eps` at which every cell on both sides has a partner.
pub(super) fn cover_value(fv: &[f64], gv: &[f64], h: f64) -> f64 {
    let a = gv.iter().enumerate().map(|(i, &v)| nearest(v, i, fv, h).0);
    let b = fv.iter().enumerate().map(|(j, &v)| nearest(v, j, gv, h).0);
    a.chain(b).fold(0.0, f64::max)
}

/// J2 estimate at resolution `m`.
pub fn d_j2_estimate(f: &StepPath, g: &StepPath, m: usize) -> Result<DistanceResult> {
    check_pair(f, g, m)?;
    let fv = f.sample_grid(m);
    let gv = g.sample_grid(m);
    let h = f.len() / m as f64;
    let hi = fv.iter().zip(&gv).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    let eps = bisect(0.0, hi, h, |e| feasible(&fv, &gv, h, e));

    // snap to the cost actually realized by nearest partners
    let from_g: Vec<(f64, usize)> = gv.iter().enumerate().map(|(i, &v)| nearest(v, i, &fv, h)).collect();
    let from_f: Vec<(f64, usize)> = fv.iter().enumerate().map(|(j, &v)| nearest(v, j, &gv, h)).collect();
    let value = from_g.iter().chain(&from_f).fold(0.0f64, |acc, &(c, _)| acc.max(c));
    debug_assert!(value <= eps);

    let edges = cover_edges(&fv, &gv, h, value, &from_g, &from_f);
    let witness = cover_to_time_change(&edges, m, f.start(), f.end())?;
    Ok(DistanceResult { metric: Metric::J2, value, slack: slack(f, m), m, witness })
}

/// Edge cover of the graph at tolerance `eps`, as (g-cell, f-cell) pairs.
fn cover_edges(
    fv: &[f64],
    gv: &[f64],
    h: f64,
    eps: f64,
    from_g: &[(f64, usize)],
    from_f: &[(f64, usize)],
) -> Vec<(usize, usize)> {
    let m = gv.len();
    let window = ((eps / h).floor() as usize).min(m);
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut total = 0usize;
    'build: for (i, &v) in gv.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(m - 1);
        for (j, &w) in fv.iter().enumerate().take(hi + 1).skip(lo) {
            if cost(v, w, i.abs_diff(j), h) <= eps {
                adjacency[i].push(j);
                total += 1;
                if total > MATCHING_EDGE_BUDGET {
                    adjacency.clear();
                    break 'build;
                }
            }
        }
    }
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(2 * m);
    let mut g_done = vec![false; m];
    let mut f_done = vec![false; m];
    if !adjacency.is_empty() {
        let mate = max_bipartite_matching(m, m, &adjacency);
        for (i, mj) in mate.iter().enumerate() {
            if let Some(j) = *mj {
                edges.push((i, j));
                g_done[i] = true;
                f_done[j] = true;
            }
        }
    }
    for i in 0..m {
        if !g_done[i] {
            let j = from_g[i].1;
            edges.push((i, j));
            g_done[i] = true;
            f_done[j] = true;
        }
    }
    for j in 0..m {
        if !f_done[j] {
            edges.push((from_f[j].1, j));
            f_done[j] = true;
        }
    }
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Cuts each g-cell and each f-cell into as many equal parts as it has cover
/// edges and maps parts to parts.
fn cover_to_time_change(edges: &[(usize, usize)], m: usize, start: f64, end: f64) -> Result<TimeChange> {
    let mut deg_g = vec![0usize; m];
    let mut deg_f = vec![0usize; m];
    for &(i, j) in edges {
        deg_g[i] += 1;
        deg_f[j] += 1;
    }
    let part = |cell: usize, k: usize, deg: usize| -> (f64, f64) {
        let a = grid_point(start, end, m, cell);
        let b = grid_point(start, end, m, cell + 1);
        let at = |r: usize| if r == deg { b } else { a + (b - a) * r as f64 / deg as f64 };
        (at(k), at(k + 1))
    };
    // edges are sorted by (g-cell, f-cell); order the f-side by (f-cell, g-cell)
    let mut by_f: Vec<usize> = (0..edges.len()).collect();
    by_f.sort_unstable_by_key(|&e| (edges[e].1, edges[e].0));
    let mut dst = vec![(0.0, 0.0); edges.len()];
    let mut seen = vec![0usize; m];
    for &e in &by_f {
        let j = edges[e].1;
        dst[e] = part(j, seen[j], deg_f[j]);
        seen[j] += 1;
    }
    seen.iter_mut().for_each(|s| *s = 0);
    let mut pieces = Vec::with_capacity(edges.len());
    for (e, &(i, _)) in edges.iter().enumerate() {
        let src = part(i, seen[i], deg_g[i]);
        seen[i] += 1;
        pieces.push(AffinePiece { src, dst: dst[e] });
    }
    TimeChange::new(pieces)
}

/// Exhaustive J2 on at most [`BRUTEFORCE_MAX_CELLS`] cells: the best
/// assignment of every g-cell to some f-cell and of every f-cell to some
/// g-cell, each found by enumerating all `m^m` maps.
pub fn d_j2_bruteforce(f: &StepPath, g: &StepPath, m: usize) -> Result<f64> {
    check_pair(f, g, m)?;
    if m > BRUTEFORCE_MAX_CELLS {
        return Err(Error::TooLarge(format!(
            "brute force handles at most {BRUTEFORCE_MAX_CELLS} cells, got {m}"
        )));
    }
    let fv = f.sample_grid(m);
    let gv = g.sample_grid(m);
    let h = f.len() / m as f64;
    Ok(best_map(&gv, &fv, h).max(best_map(&fv, &gv, h)))
}

fn best_map(from: &[f64], to: &[f64], h: f64) -> f64 {
    let m = from.len();
    let mut map = vec![0usize; m];
    let mut best = f64::INFINITY;
    loop {
        let c = (0..m).map(|i| cost(from[i], to[map[i]], i.abs_diff(map[i]), h)).fold(0.0, f64::max);
        best = best.min(c);
        let mut k = 0;
        loop {
            if k == m {
                return best;
            }
            map[k] += 1;
            if map[k] < m {
                break;
            }
            map[k] = 0;
            k += 1;
        }
    }
}

/// Hausdorff distance, in the max metric on (time, value), between the
/// sampled graphs `{(t_i, f(t_i))}` and `{(t_i, g(t_i))}`.
pub fn graph_hausdorff_lower(f: &StepPath, g: &StepPath, m: usize) -> Result<f64> {
    check_pair(f, g, m)?;
    let fv = f.sample_grid(m);
    let gv = g.sample_grid(m);
    let t: Vec<f64> = (0..m).map(|i| grid_point(f.start(), f.end(), m, i)).collect();
    let directed = |a: &[f64], b: &[f64]| -> f64 {
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| (t[i] - t[j]).abs().max((a[i] - b[j]).abs()))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    Ok(directed(&fv, &gv).max(directed(&gv, &fv)))
}
