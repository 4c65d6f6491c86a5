//! Gluing two time changes that act on disjoint families of intervals.

use crate::error::{Error, Result};

use super::timechange::{AffinePiece, TimeChange};

/// The bijection equal to `mu_map` on `intervals_x`, to `nu_map` on
/// `intervals_y` and to the identity elsewhere. Intervals are half-open
/// `[lo, hi)`; each map must send each of its own intervals onto itself.
pub fn merge_time_changes(
    mu_map: &TimeChange,
    nu_map: &TimeChange,
    intervals_x: &[(f64, f64)],
    intervals_y: &[(f64, f64)],
) -> Result<TimeChange> {
    let (start, end) = mu_map.domain();
    if nu_map.domain() != (start, end) {
        return Err(Error::DomainMismatch("the two time changes live on different domains".into()));
    }
    let mut tagged: Vec<(f64, f64, bool)> = intervals_x
        .iter()
        .map(|&(a, b)| (a, b, true))
        .chain(intervals_y.iter().map(|&(a, b)| (a, b, false)))
        .collect();
    tagged.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in tagged.windows(2) {
        if w[1].0 < w[0].1 {
            return Err(Error::Precondition(format!(
                "intervals [{}, {}) and [{}, {}) overlap",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
    }
    let mut pieces = Vec::new();
    let mut at = start;
    for &(a, b, is_x) in &tagged {
        if !(a >= start && b <= end && a < b) {
            return Err(Error::Precondition(format!("interval [{a}, {b}) is empty or leaves the domain")));
        }
        if a > at {
            pieces.push(AffinePiece { src: (at, a), dst: (at, a) });
        }
        let map = if is_x { mu_map } else { nu_map };
        pieces.extend(map.restrict(a, b)?);
        at = b;
    }
    if at < end {
        pieces.push(AffinePiece { src: (at, end), dst: (at, end) });
    }
    TimeChange::new(pieces)
}
