use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::StepPath;

/// Increasing affine map of `[src.0, src.1)` onto `[dst.0, dst.1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub src: (f64, f64),
    pub dst: (f64, f64),
}

impl AffinePiece {
    #[inline]
    pub fn apply(&self, t: f64) -> f64 {
        let (a, b) = self.src;
        let (c, d) = self.dst;
        c + (t - a) * ((d - c) / (b - a))
    }

    /// Inverse of [`apply`](Self::apply) for `u` in the image.
    #[inline]
    pub fn invert(&self, u: f64) -> f64 {
        let (a, b) = self.src;
        let (c, d) = self.dst;
        a + (u - c) * ((b - a) / (d - c))
    }

    fn displacement(&self) -> f64 {
        (self.dst.0 - self.src.0).abs().max((self.dst.1 - self.src.1).abs())
    }
}

/// Piecewise affine bijection of `[start, end)`: the source intervals tile the
/// domain in order, the images tile it in any order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeChange {
    pieces: Vec<AffinePiece>,
}

const TILE_TOL: f64 = 1e-12;

fn check_tiling(mut spans: Vec<(f64, f64)>, start: f64, end: f64, what: &str) -> Result<()> {
    spans.sort_by(|a, b| a.0.total_cmp(&b.0));
    let scale = (end - start).abs().max(1.0);
    let mut at = start;
    for (lo, hi) in spans {
        if !(hi > lo) {
            return Err(Error::InvalidParameter(format!("empty {what} interval [{lo}, {hi})")));
        }
        if (lo - at).abs() > TILE_TOL * scale {
            return Err(Error::InvalidParameter(format!(
                "{what} intervals leave a gap or overlap near {at}"
            )));
        }
        at = hi;
    }
    if (at - end).abs() > TILE_TOL * scale {
        return Err(Error::InvalidParameter(format!("{what} intervals stop at {at}, not {end}")));
    }
    Ok(())
}

impl TimeChange {
    pub fn new(mut pieces: Vec<AffinePiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidParameter("time change needs at least one piece".into()));
        }
        pieces.sort_by(|a, b| a.src.0.total_cmp(&b.src.0));
        let start = pieces[0].src.0;
        let end = pieces.last().expect("nonempty").src.1;
        check_tiling(pieces.iter().map(|p| p.src).collect(), start, end, "source")?;
        check_tiling(pieces.iter().map(|p| p.dst).collect(), start, end, "image")?;
        Ok(TimeChange { pieces })
    }

    pub fn identity(start: f64, end: f64) -> Self {
        TimeChange { pieces: vec![AffinePiece { src: (start, end), dst: (start, end) }] }
    }

    /// Increasing piecewise-linear map through the knots `(t_k, lambda(t_k))`.
    /// First and last knots must be the domain ends.
    pub fn from_knots(knots: &[(f64, f64)]) -> Result<Self> {
        let pieces = knots
            .windows(2)
            .map(|w| AffinePiece { src: (w[0].0, w[1].0), dst: (w[0].1, w[1].1) })
            .collect();
        Self::new(pieces)
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.pieces[0].src.0, self.pieces.last().expect("nonempty").src.1)
    }

    /// True when the images appear in the same order as the sources.
    pub fn is_increasing(&self) -> bool {
        self.pieces.windows(2).all(|w| w[0].dst.1 <= w[1].dst.0 + TILE_TOL)
    }

    /// Number of maximal increasing runs.
    pub fn runs(&self) -> usize {
        1 + self
            .pieces
            .windows(2)
            .filter(|w| (w[0].dst.1 - w[1].dst.0).abs() > TILE_TOL)
            .count()
    }

    pub fn apply(&self, t: f64) -> Option<f64> {
        let (start, end) = self.domain();
        if !(t >= start && t < end) {
            return None;
        }
        let k = self.pieces.partition_point(|p| p.src.0 <= t) - 1;
        Some(self.pieces[k].apply(t))
    }

    /// `sup |lambda(t) - t|`.
    pub fn sup_displacement(&self) -> f64 {
        self.pieces.iter().fold(0.0, |acc, p| acc.max(p.displacement()))
    }

    /// The same map on `[lo, hi)`; the image must stay inside `[lo, hi)`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<Vec<AffinePiece>> {
        let mut out = Vec::new();
        for p in &self.pieces {
            let a = p.src.0.max(lo);
            let b = p.src.1.min(hi);
            if a < b {
                let dst = (
                    if a == p.src.0 { p.dst.0 } else { p.apply(a) },
                    if b == p.src.1 { p.dst.1 } else { p.apply(b) },
                );
                out.push(AffinePiece { src: (a, b), dst });
            }
        }
        check_tiling(out.iter().map(|p| p.src).collect(), lo, hi, "source")?;
        check_tiling(out.iter().map(|p| p.dst).collect(), lo, hi, "image")
            .map_err(|_| Error::Precondition(format!("map does not send [{lo}, {hi}) onto itself")))?;
        Ok(out)
    }
}

/// What a time change achieves between two paths.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Replay {
    /// `sup_t |f(lambda(t)) - g(t)|`.
    pub mismatch: f64,
    /// `sup_t |lambda(t) - t|`.
    pub displacement: f64,
}

impl Replay {
    pub fn cost(&self) -> f64 {
        self.mismatch.max(self.displacement)
    }
}

/// Exact sup-values of `lambda` as a time change from `g`'s clock to `f`'s.
/// Each piece is cut at `g`'s breakpoints and at preimages of `f`'s
/// breakpoints, and both paths are read at the midpoints of the cuts.
pub fn replay(f: &StepPath, g: &StepPath, lambda: &TimeChange) -> Result<Replay> {
    if f.domain() != g.domain() || lambda.domain() != g.domain() {
        return Err(Error::DomainMismatch("paths and time change need a common domain".into()));
    }
    let mut mismatch: f64 = 0.0;
    let mut cuts = Vec::new();
    for p in lambda.pieces() {
        cuts.clear();
        cuts.push(p.src.0);
        cuts.push(p.src.1);
        let gb = g.breaks();
        let lo = gb.partition_point(|&b| b <= p.src.0);
        let hi = gb.partition_point(|&b| b < p.src.1);
        cuts.extend_from_slice(&gb[lo..hi]);
        let fb = f.breaks();
        let lo = fb.partition_point(|&b| b <= p.dst.0);
        let hi = fb.partition_point(|&b| b < p.dst.1);
        cuts.extend(fb[lo..hi].iter().map(|&b| p.invert(b)));
        cuts.sort_by(f64::total_cmp);
        for w in cuts.windows(2) {
            if w[1] > w[0] {
                let t = 0.5 * (w[0] + w[1]);
                let fv = f.eval(p.apply(t)).ok_or(Error::RangeEscape(p.apply(t)))?;
                let gv = g.eval(t).ok_or(Error::RangeEscape(t))?;
                mismatch = mismatch.max((fv - gv).abs());
            }
        }
    }
    Ok(Replay { mismatch, displacement: lambda.sup_displacement() })
}
