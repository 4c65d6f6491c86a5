//! The random medium: points `omega_k` on the line indexed by integer sites,
//! with `omega_0 = 0` and i.i.d. positive gaps between neighbours.
//!
//! The gap between sites `k` and `k + 1` carries label `k + 1` when `k >= 0`
//! and label `k` when `k < 0`, so labels run over the nonzero integers and
//! label `i` is always drawn from item `i` of the medium stream.

use rand_core::RngCore;
use rand_distr::{Binomial, Distribution, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::laws::{GapLaw, StableParams};
use crate::rng::{Role, SeedStream};

/// Integer site of the medium (and position of the walk).
pub type Site = i128;

/// Spans above this many sites are refused by the explicit medium.
pub const MAX_EXPLICIT_SITES: i128 = 1 << 26;

/// Segment sums over at most this many gaps are computed gap by gap.
pub const DIRECT_SUM_LIMIT: i128 = 1 << 20;

/// Expected number of gaps above the cutoff in an aggregated Pareto segment.
const AGGREGATE_BIG_GAPS: f64 = 1024.0;

#[inline]
fn gap_label(site: Site) -> Site {
    if site >= 0 {
        site + 1
    } else {
        site
    }
}

/// Gap with label `label` (nonzero).
#[inline]
pub fn sample_gap(law: &GapLaw, stream: &SeedStream, label: Site) -> f64 {
    debug_assert!(label != 0);
    law.sample(&mut stream.rng_wide(label))
}

/// Neumaier running sum.
#[derive(Clone, Copy, Debug, Default)]
struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Explicitly materialized medium over a window of sites around 0,
/// extended on demand.
#[derive(Clone, Debug)]
pub struct Medium {
    /// `None` for a medium built from given gaps, which cannot grow.
    law: Option<GapLaw>,
    stream: SeedStream,
    // pos[k] = omega_k, neg[k] = omega_{-k}
    pos: Vec<f64>,
    neg: Vec<f64>,
    pos_acc: Kahan,
    neg_acc: Kahan,
}

impl Medium {
    pub fn new(law: GapLaw, stream: SeedStream) -> Result<Self> {
        law.validate()?;
        Ok(Medium {
            law: Some(law),
            stream,
            pos: vec![0.0],
            neg: vec![0.0],
            pos_acc: Kahan::default(),
            neg_acc: Kahan::default(),
        })
    }

    /// Medium materialized on sites `lo..=hi`.
    pub fn with_range(law: GapLaw, stream: SeedStream, lo: Site, hi: Site) -> Result<Self> {
        let mut m = Self::new(law, stream)?;
        m.ensure(lo, hi)?;
        Ok(m)
    }

    /// Medium with prescribed gaps: `positive[i]` between sites `i` and
    /// `i + 1`, `negative[i]` between sites `-i - 1` and `-i`.
    pub fn from_gaps(positive: &[f64], negative: &[f64]) -> Result<Self> {
        if positive.iter().chain(negative).any(|&g| !(g > 0.0 && g.is_finite())) {
            return Err(Error::InvalidParameter("gaps must be positive and finite".into()));
        }
        let partial = |gaps: &[f64], sign: f64| {
            let mut acc = Kahan::default();
            let mut out = vec![0.0];
            for &g in gaps {
                acc.add(g);
                out.push(sign * acc.value());
            }
            (out, acc)
        };
        let (pos, pos_acc) = partial(positive, 1.0);
        let (neg, neg_acc) = partial(negative, -1.0);
        Ok(Medium { law: None, stream: SeedStream::new(0, 0, Role::Medium), pos, neg, pos_acc, neg_acc })
    }

    pub fn law(&self) -> Option<&GapLaw> {
        self.law.as_ref()
    }

    pub fn stream(&self) -> &SeedStream {
        &self.stream
    }

    /// Materialized sites, inclusive.
    pub fn range(&self) -> (Site, Site) {
        (-(self.neg.len() as Site - 1), self.pos.len() as Site - 1)
    }

    /// Extend so that every site in `lo..=hi` is materialized.
    pub fn ensure(&mut self, lo: Site, hi: Site) -> Result<()> {
        let (cur_lo, cur_hi) = self.range();
        let new_lo = lo.min(cur_lo);
        let new_hi = hi.max(cur_hi);
        let Some(law) = self.law else {
            if (new_lo, new_hi) == (cur_lo, cur_hi) {
                return Ok(());
            }
            return Err(Error::OutOfRange(if new_hi > cur_hi { new_hi } else { new_lo }));
        };
        if new_hi - new_lo + 1 > MAX_EXPLICIT_SITES {
            return Err(Error::TooLarge(format!(
                "explicit medium over sites {new_lo}..={new_hi}"
            )));
        }
        while (self.pos.len() as Site - 1) < new_hi {
            let label = self.pos.len() as Site;
            self.pos_acc.add(sample_gap(&law, &self.stream, label));
            self.pos.push(self.pos_acc.value());
        }
        while -(self.neg.len() as Site - 1) > new_lo {
            let label = -(self.neg.len() as Site);
            self.neg_acc.add(sample_gap(&law, &self.stream, label));
            self.neg.push(-self.neg_acc.value());
        }
        Ok(())
    }

    /// Medium point at `site`, extending the medium if needed.
    pub fn target(&mut self, site: Site) -> Result<f64> {
        self.ensure(site, site)?;
        self.get(site)
    }

    /// Medium point at an already materialized `site`.
    #[inline]
    pub fn get(&self, site: Site) -> Result<f64> {
        if site >= 0 {
            self.pos.get(site as usize).copied()
        } else {
            self.neg.get((-site) as usize).copied()
        }
        .ok_or(Error::OutOfRange(site))
    }

    /// Gap between sites `site` and `site + 1`.
    pub fn gap_after(&self, site: Site) -> Result<f64> {
        Ok(self.get(site + 1)? - self.get(site)?)
    }
}

/// `omega_b - omega_a` for `a <= b`, drawn without materializing the sites
/// in between.
///
/// Up to [`DIRECT_SUM_LIMIT`] gaps the sum uses the same per-gap draws as
/// [`Medium`]. Longer segments are drawn from their aggregate law: exactly for
/// stable and constant gaps, and for Pareto gaps by keeping the largest gaps
/// exact and replacing the bulk below a cutoff by a normal variable with the
/// matching mean and variance.
pub fn segment_sum(law: &GapLaw, stream: &SeedStream, a: Site, b: Site) -> f64 {
    debug_assert!(a <= b);
    let count = b - a;
    if count == 0 {
        return 0.0;
    }
    if count <= DIRECT_SUM_LIMIT {
        let mut acc = Kahan::default();
        for site in a..b {
            acc.add(sample_gap(law, stream, gap_label(site)));
        }
        return acc.value();
    }
    let seg = stream.derive(0x5345_474d).derive(a as u64 ^ ((a >> 64) as u64).rotate_left(17));
    aggregate_sum(law, count, &mut seg.rng_wide(b))
}

/// One draw of the sum of `count` i.i.d. gaps from its aggregate law: exact
/// for stable and constant gaps; for Pareto gaps the gaps above a cutoff are
/// drawn exactly and the rest is replaced by a normal variable with their
/// mean and variance. The cutoff leaves about 1024 gaps above it on average.
pub fn aggregate_sum<R: RngCore + ?Sized>(law: &GapLaw, count: i128, rng: &mut R) -> f64 {
    let c = count as f64;
    match *law {
        GapLaw::Constant { value } => c * value,
        GapLaw::ExactPositiveStable { beta } => {
            let z = StableParams::positive(beta)
                .expect("validated index")
                .sample(rng);
            c.powf(1.0 / beta) * z
        }
        GapLaw::ParetoTail { beta, x_min } => {
            if c <= AGGREGATE_BIG_GAPS {
                let mut acc = Kahan::default();
                for _ in 0..count {
                    acc.add(law.sample(rng));
                }
                return acc.value();
            }
            // cutoff u (in units of x_min) with count * u^-beta = AGGREGATE_BIG_GAPS
            let u = (c / AGGREGATE_BIG_GAPS).powf(1.0 / beta);
            let p_big = AGGREGATE_BIG_GAPS / c;
            let n_big: f64 = if count <= u64::MAX as i128 {
                Binomial::new(count as u64, p_big)
                    .expect("valid binomial")
                    .sample(rng) as f64
            } else {
                Poisson::new(AGGREGATE_BIG_GAPS)
                    .expect("valid poisson")
                    .sample(rng)
            };
            let mut big = Kahan::default();
            for _ in 0..n_big as u64 {
                big.add(u * crate::rng::unit_open_closed(rng).powf(-1.0 / beta));
            }
            let n_bulk = c - n_big;
            let tail = u.powf(-beta);
            let m1 = beta * (u.powf(1.0 - beta) - 1.0) / ((1.0 - beta) * (1.0 - tail));
            let m2 = beta * (u.powf(2.0 - beta) - 1.0) / ((2.0 - beta) * (1.0 - tail));
            let var = (m2 - m1 * m1).max(0.0);
            let g: f64 = StandardNormal.sample(rng);
            let bulk = n_bulk * m1 + (n_bulk * var).sqrt() * g;
            x_min * (big.value() + bulk.max(n_bulk))
        }
    }
}

/// Medium points known only at a finite set of sites, with the correct joint
/// law at those sites.
#[derive(Clone, Debug)]
pub struct SparseMedium {
    sites: Vec<Site>,
    values: Vec<f64>,
}

impl SparseMedium {
    pub fn new(law: &GapLaw, stream: &SeedStream, sites: &[Site]) -> Result<Self> {
        law.validate()?;
        let mut all: Vec<Site> = sites.to_vec();
        all.push(0);
        all.sort_unstable();
        all.dedup();
        let zero = all.binary_search(&0).expect("zero inserted");
        let mut values = vec![0.0; all.len()];
        for i in zero + 1..all.len() {
            values[i] = values[i - 1] + segment_sum(law, stream, all[i - 1], all[i]);
        }
        for i in (0..zero).rev() {
            values[i] = values[i + 1] - segment_sum(law, stream, all[i], all[i + 1]);
        }
        Ok(SparseMedium { sites: all, values })
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn get(&self, site: Site) -> Result<f64> {
        self.sites
            .binary_search(&site)
            .map(|i| self.values[i])
            .map_err(|_| Error::OutOfRange(site))
    }
}

/// `omega_site` alone, drawn from its marginal law.
pub fn marginal_target(law: &GapLaw, stream: &SeedStream, site: Site) -> f64 {
    if site >= 0 {
        segment_sum(law, stream, 0, site)
    } else {
        -segment_sum(law, stream, site, 0)
    }
}
