//! J1 distance: increasing time changes.
//!
//! For a tolerance `eps` an increasing time change exists iff the jumps of
//! `f` can be retimed, in order, each by at most `eps`, so that at every moment
//! the current piece of `f` is within `eps` of the current piece of `g`.
//! The search runs over states (piece of f, piece of g) and keeps, for each,
//! the earliest time it can be entered; later entries are dominated because
//! every constraint further on is an upper bound on time.

use crate::error::Result;
use crate::path::StepPath;

use super::timechange::TimeChange;
use super::{critical_search, check_pair, monotone_bracket, slack, DistanceResult, Metric, Pieces};

const UNREACHED: f64 = f64::INFINITY;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Move {
    Start,
    /// g jumps, f stays.
    G,
    /// f jumps (retimed), g stays.
    F,
    /// both jump together at g's jump time.
    Both,
}

struct Row {
    lo: usize,
    time: Vec<f64>,
    from: Vec<Move>,
}

/// Decides whether `g` on `[A, B)` can be matched by an increasing time change
/// onto `f` on `[A', B')` (endpoints pinned) within `eps`. With `trace` the
/// knots of a witness are returned.
pub(super) fn align(g: &Pieces, f: &Pieces, eps: f64, trace: bool) -> Option<Vec<(f64, f64)>> {
    let (a, b) = (g.time(0), g.end);
    let (fa, fb) = (f.time(0), f.end);
    if (a - fa).abs() > eps || (b - fb).abs() > eps {
        return None;
    }
    let np = f.count();
    let nq = g.count();
    let compat = |x: usize, y: usize| (f.values[x] - g.values[y]).abs() <= eps;
    if !compat(0, 0) {
        return None;
    }
    let r = |y: usize| g.time(y);
    let s = |x: usize| f.time(x);

    let mut lo = 0usize;
    let mut hi = 0usize;
    while hi + 1 < nq && r(hi + 1) <= s(1) + eps {
        hi += 1;
    }
    let mut cur = Row { lo, time: vec![UNREACHED; hi - lo + 1], from: vec![Move::Start; hi - lo + 1] };
    cur.time[0] = a;
    let mut history: Vec<Row> = Vec::new();

    for x in 0..np {
        let (clo, chi) = (cur.lo, cur.lo + cur.time.len() - 1);
        if x + 1 < np {
            while lo + 1 < nq && r(lo + 1) < s(x + 1) - eps {
                lo += 1;
            }
            while hi + 1 < nq && r(hi + 1) <= s(x + 2) + eps {
                hi += 1;
            }
        }
        let width = if x + 1 < np { hi - lo + 1 } else { 0 };
        let mut next = Row { lo, time: vec![UNREACHED; width], from: vec![Move::Start; width] };
        let f_jump = s(x + 1);
        let mut any = false;
        for y in clo..=chi {
            let t = cur.time[y - clo];
            if t == UNREACHED {
                continue;
            }
            any = true;
            let r_next = r(y + 1);
            if y + 1 < nq && t <= r_next && r_next <= f_jump + eps && compat(x, y + 1) {
                let k = y + 1 - clo;
                if k < cur.time.len() && r_next < cur.time[k] {
                    cur.time[k] = r_next;
                    cur.from[k] = Move::G;
                }
            }
            if x + 1 < np {
                let tau = t.max(f_jump - eps);
                if tau <= (f_jump + eps).min(r_next) && compat(x + 1, y) && y >= next.lo {
                    let k = y - next.lo;
                    if k < next.time.len() && tau < next.time[k] {
                        next.time[k] = tau;
                        next.from[k] = Move::F;
                    }
                }
                if y + 1 < nq
                    && t <= r_next
                    && (r_next - f_jump).abs() <= eps
                    && compat(x + 1, y + 1)
                    && y + 1 >= next.lo
                {
                    let k = y + 1 - next.lo;
                    if k < next.time.len() && r_next < next.time[k] {
                        next.time[k] = r_next;
                        next.from[k] = Move::Both;
                    }
                }
            }
        }
        if !any {
            return None;
        }
        if x + 1 == np {
            let k = (nq - 1).checked_sub(clo)?;
            if k >= cur.time.len() || cur.time[k] == UNREACHED {
                return None;
            }
            if !trace {
                return Some(Vec::new());
            }
            history.push(cur);
            return Some(knots_from(&history, g, f));
        }
        let done = std::mem::replace(&mut cur, next);
        if trace {
            history.push(done);
        }
    }
    None
}

/// Walks the recorded moves back from the final state and turns the f-jump
/// times into knots, separating jumps that landed on the same instant.
fn knots_from(history: &[Row], g: &Pieces, f: &Pieces) -> Vec<(f64, f64)> {
    // chronological events: (time, is_fixed, f piece entered or None)
    let mut events: Vec<(f64, bool, Option<usize>)> = Vec::new();
    let mut x = history.len() - 1;
    let mut y = g.count() - 1;
    loop {
        let row = &history[x];
        let k = y - row.lo;
        match row.from[k] {
            Move::Start => break,
            Move::G => {
                events.push((g.time(y), true, None));
                y -= 1;
            }
            Move::F => {
                events.push((row.time[k], false, Some(x)));
                x -= 1;
            }
            Move::Both => {
                events.push((g.time(y), true, Some(x)));
                x -= 1;
                y -= 1;
            }
        }
    }
    events.reverse();
    let (a, b) = (g.time(0), g.end);

    let mut distinct: Vec<f64> = events.iter().map(|e| e.0).chain([a, b]).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let min_gap = distinct.windows(2).map(|w| w[1] - w[0]).fold(b - a, f64::min);
    let delta = min_gap / (2.0 * (events.len() + 2) as f64);

    let mut times: Vec<f64> = events.iter().map(|e| e.0).collect();
    let mut i = 0;
    while i < events.len() {
        let t = events[i].0;
        let mut j = i;
        while j < events.len() && events[j].0 == t {
            j += 1;
        }
        let anchor = (i..j).find(|&k| events[k].1).or(if t == b { Some(j) } else { None });
        match anchor {
            Some(p) => {
                for k in i..p {
                    times[k] = t - (p - k) as f64 * delta;
                }
                for k in p + 1..j {
                    times[k] = t + (k - p) as f64 * delta;
                }
            }
            None => {
                for k in i..j {
                    times[k] = t + (k - i + 1) as f64 * delta;
                }
            }
        }
        i = j;
    }

    let mut knots = vec![(a, f.time(0))];
    for (e, &t) in events.iter().zip(&times) {
        if let Some(x) = e.2 {
            knots.push((t, f.time(x)));
        }
    }
    knots.push((b, f.end));
    knots
}

/// J1 estimate at resolution `m`.
pub fn d_j1_estimate(f: &StepPath, g: &StepPath, m: usize) -> Result<DistanceResult> {
    check_pair(f, g, m)?;
    let fv = f.sample_grid(m);
    let gv = g.sample_grid(m);
    let h = f.len() / m as f64;
    let fp = Pieces::new(&fv, 0, m, f.start(), f.end(), m);
    let gp = Pieces::new(&gv, 0, m, f.start(), f.end(), m);
    let (lo, hi) = monotone_bracket(&fv, &gv, h);
    let value = critical_search(lo, hi, h, &fv, &gv, |e| align(&gp, &fp, e, false).is_some());
    let knots = align(&gp, &fp, value * (1.0 + 1e-12), true).expect("bisection ends on a feasible tolerance");
    let witness = TimeChange::from_knots(&knots)?;
    Ok(DistanceResult { metric: Metric::J1, value, slack: slack(f, m), m, witness })
}
