//! Distance under piecewise increasing time changes with a bounded number of
//! pieces. Each piece sends a run of g-cells increasingly onto a run of
//! f-cells; the f-runs tile the domain in any order. Piece boundaries sit on
//! the cell grid, and the search over them is exhaustive, so only small
//! grids are accepted.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::path::StepPath;

use super::j1::align;
use super::timechange::{AffinePiece, TimeChange};
use super::{critical_search, check_pair, monotone_bracket, slack, DistanceResult, Metric, Pieces};

pub const J32_MAX_CELLS: usize = 12;

struct Search<'a> {
    fv: &'a [f64],
    gv: &'a [f64],
    start: f64,
    end: f64,
    m: usize,
    eps: f64,
    limit: usize,
    best: HashMap<(usize, u32), (usize, Option<(usize, usize, usize)>)>,
    chunk_ok: HashMap<(usize, usize, usize, usize), bool>,
}

impl Search<'_> {
    fn chunk_fits(&mut self, p: usize, q: usize, u: usize, v: usize) -> bool {
        if let Some(&ok) = self.chunk_ok.get(&(p, q, u, v)) {
            return ok;
        }
        let g = Pieces::new(self.gv, p, q, self.start, self.end, self.m);
        let f = Pieces::new(self.fv, u, v, self.start, self.end, self.m);
        let ok = align(&g, &f, self.eps, false).is_some();
        self.chunk_ok.insert((p, q, u, v), ok);
        ok
    }

    /// Fewest pieces covering g-cells `p..` with the f-cells outside `used`
    /// (capped at `limit + 1`), and the first piece of an optimal choice.
    fn fewest(&mut self, p: usize, used: u32) -> (usize, Option<(usize, usize, usize)>) {
        let m = self.m;
        let full = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
        if p == m {
            return (if used == full { 0 } else { self.limit + 1 }, None);
        }
        if let Some(&known) = self.best.get(&(p, used)) {
            return known;
        }
        let h = (self.end - self.start) / m as f64;
        let mut best = (self.limit + 1, None);
        for u in 0..m {
            if used & (1 << u) != 0 || (p.abs_diff(u) as f64) * h > self.eps {
                continue;
            }
            for v in u + 1..=m {
                if used & (1 << (v - 1)) != 0 {
                    break;
                }
                for q in p + 1..=m {
                    if (q.abs_diff(v) as f64) * h > self.eps || !self.chunk_fits(p, q, u, v) {
                        continue;
                    }
                    let mask = (u..v).fold(used, |acc, c| acc | (1 << c));
                    let (rest, _) = self.fewest(q, mask);
                    if rest + 1 < best.0 {
                        best = (rest + 1, Some((q, u, v)));
                    }
                }
            }
        }
        self.best.insert((p, used), best);
        best
    }
}

/// Estimate with at most `runs` increasing pieces, on at most
/// [`J32_MAX_CELLS`] cells. One piece gives exactly the J1 estimate.
pub fn d_j32_estimate(f: &StepPath, g: &StepPath, m: usize, runs: usize) -> Result<DistanceResult> {
    check_pair(f, g, m)?;
    if runs == 0 {
        return Err(Error::InvalidParameter("need at least one run".into()));
    }
    if m > J32_MAX_CELLS {
        return Err(Error::TooLarge(format!("piecewise search handles at most {J32_MAX_CELLS} cells, got {m}")));
    }
    let fv = f.sample_grid(m);
    let gv = g.sample_grid(m);
    let h = f.len() / m as f64;
    let search = |eps: f64| Search {
        fv: &fv,
        gv: &gv,
        start: f.start(),
        end: f.end(),
        m,
        eps,
        limit: runs,
        best: HashMap::new(),
        chunk_ok: HashMap::new(),
    };
    let (lo, hi) = monotone_bracket(&fv, &gv, h);
    let value = critical_search(lo, hi, h, &fv, &gv, |e| search(e).fewest(0, 0).0 <= runs);

    let mut s = search(value * (1.0 + 1e-12));
    let mut pieces = Vec::new();
    let (mut p, mut used) = (0usize, 0u32);
    while p < m {
        let (_, choice) = s.fewest(p, used);
        let (q, u, v) = choice.expect("bisection ends on a feasible tolerance");
        let gp = Pieces::new(&gv, p, q, f.start(), f.end(), m);
        let fp = Pieces::new(&fv, u, v, f.start(), f.end(), m);
        let knots = align(&gp, &fp, value * (1.0 + 1e-12), true).expect("chunk was feasible");
        pieces.extend(knots.windows(2).map(|w| AffinePiece { src: (w[0].0, w[1].0), dst: (w[0].1, w[1].1) }));
        used = (u..v).fold(used, |acc, c| acc | (1 << c));
        p = q;
    }
    let witness = TimeChange::new(pieces)?;
    Ok(DistanceResult { metric: Metric::J32 { runs }, value, slack: slack(f, m), m, witness })
}
