//! Monte Carlo experiments. Every report carries the model, the seed and the
//! parameters it was produced from; replicas run in parallel and are
//! collected in replica order, so reports do not depend on the thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::laws::JumpLaw;
use crate::medium::Medium;
use crate::path::{add, compose, compose_linear, rescale_medium, MediumScaling, StepPath};
use crate::rng::{combine, Role, SeedStream};
use crate::skorokhod::{
    check_displacement_bound, d_j1_estimate, d_j2_estimate, merge_time_changes, replay, slack, DisplacementCheck, TimeChange,
};
use crate::walk::{build_flight, MediumMode, Walk};

use super::model::{exact_marginal_oracle, flight_at, flight_endpoint, replica_id, FlightModel, OracleScaling};
use super::regime::{ConvergenceMode, RegimeSpec};
use super::stats::{iqr, ks_2d_test, ks_test, least_squares, median, KsReport, CALIBRATION_ROUNDS};

const LEFT: u64 = 0x6c65_6674;
const RIGHT: u64 = 0x7269_6768;
const ORACLE: u64 = 0x6f72_636c;

fn steps_at(n: usize, t: f64) -> usize {
    (n as f64 * t).floor() as usize
}

fn check_replicas(replicas: usize, min: usize) -> Result<()> {
    if replicas < min {
        return invalid(format!("need at least {min} replicas, got {replicas}"));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return invalid(format!("time {t} must be positive"));
    }
    Ok(())
}

/// What is measured at each grid point of an exponent fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// `Y_floor(nt)`.
    Flight,
    /// `Y_floor(nt) - nu mu n t`.
    Fluctuation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleStatistic {
    Iqr,
    /// Median of the absolute value; used when the limit is deterministic and
    /// the spread is of lower order than the location.
    MedianAbs,
}

/// Log-log fit of a scale statistic against `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub model: FlightModel,
    pub regime: RegimeSpec,
    pub observable: Observable,
    pub statistic: ScaleStatistic,
    pub t: f64,
    pub replicas: usize,
    pub seed: u64,
    pub n_grid: Vec<usize>,
    /// Statistic per grid point.
    pub scale: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual of the fit in log space.
    pub residual: f64,
    /// Exponent the regime table predicts for this observable.
    pub expected: f64,
}

impl ExponentFit {
    pub fn within(&self, tol: f64) -> bool {
        (self.slope - self.expected).abs() <= tol
    }
}

/// Geometric grid `lo, lo r, lo r^2, ... <= hi`.
pub fn geometric_grid(lo: usize, hi: usize, ratio: usize) -> Result<Vec<usize>> {
    if lo == 0 || ratio < 2 || hi < lo {
        return invalid(format!("bad grid {lo}:{hi}:x{ratio}"));
    }
    let mut grid = vec![lo];
    while let Some(next) = grid.last().unwrap().checked_mul(ratio) {
        if next > hi {
            break;
        }
        grid.push(next);
    }
    Ok(grid)
}

fn check_geometric(grid: &[usize]) -> Result<()> {
    if grid.len() < 5 {
        return invalid(format!("exponent fits need at least 5 grid points, got {}", grid.len()));
    }
    if grid[0] == 0 {
        return invalid("grid points must be positive");
    }
    let ratio = grid[1] as f64 / grid[0] as f64;
    let geometric = ratio > 1.0 && grid.windows(2).all(|w| ((w[1] as f64 / w[0] as f64) / ratio - 1.0).abs() < 1e-9);
    if !geometric {
        return invalid("grid must be geometric and increasing");
    }
    Ok(())
}

/// Slope of `log(statistic)` against `log n` over a geometric grid.
pub fn exponent_fit(
    model: &FlightModel,
    observable: Observable,
    t: f64,
    n_grid: &[usize],
    replicas: usize,
    seed: u64,
) -> Result<ExponentFit> {
    check_geometric(n_grid)?;
    check_time(t)?;
    check_replicas(replicas, 2)?;
    let regime = model.regime()?;
    let (statistic, expected, center) = match observable {
        Observable::Flight if regime.mode == ConvergenceMode::Deterministic => {
            (ScaleStatistic::MedianAbs, regime.gamma, 0.0)
        }
        Observable::Flight => (ScaleStatistic::Iqr, regime.gamma, 0.0),
        Observable::Fluctuation => {
            let fl = regime.fluctuation.ok_or_else(|| {
                Error::ModeMismatch("fluctuations need both indices in (1, 2) and a nonzero drift".into())
            })?;
            let (mu, nu) = (regime.mu.expect("drift"), regime.nu.expect("mean gap"));
            (ScaleStatistic::Iqr, fl.exponent, nu * mu)
        }
    };
    let mut scale = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let steps = steps_at(n, t);
        let shift = center * n as f64 * t;
        let ys: Vec<f64> = (0..replicas as u64)
            .into_par_iter()
            .map(|r| flight_endpoint(model, steps, seed, replica_id(r, n as u64)) - shift)
            .collect();
        let s = match statistic {
            ScaleStatistic::Iqr => iqr(&ys),
            ScaleStatistic::MedianAbs => median(&ys.iter().map(|y| y.abs()).collect::<Vec<_>>()),
        };
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Precondition(format!("degenerate scale statistic {s} at n = {n}")));
        }
        scale.push(s);
    }
    let lx: Vec<f64> = n_grid.iter().map(|&n| (n as f64).ln()).collect();
    let ly: Vec<f64> = scale.iter().map(|s| s.ln()).collect();
    let (slope, intercept, residual) = least_squares(&lx, &ly)?;
    Ok(ExponentFit {
        model: *model,
        regime,
        observable,
        statistic,
        t,
        replicas,
        seed,
        n_grid: n_grid.to_vec(),
        scale,
        slope,
        intercept,
        residual,
        expected,
    })
}

/// Two normalized marginals compared by a two-sample test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalReport {
    pub model: FlightModel,
    pub t: f64,
    pub n: usize,
    /// Size of the right-hand sample's `n` relative to `n` (1 for oracle tests).
    pub factor: usize,
    /// Exponent actually used for the flight samples.
    pub gamma: f64,
    pub replicas: usize,
    pub ks: KsReport,
}

/// Compares `Y^(n)(t) / n^gamma` with `Y^(fn)(t) / (fn)^gamma` over independent
/// replicas. `gamma_shift` perturbs the exponent (negative controls).
pub fn fdd_self_consistency(
    model: &FlightModel,
    t: f64,
    n: usize,
    factor: usize,
    replicas: usize,
    seed: u64,
    gamma_shift: f64,
) -> Result<MarginalReport> {
    let mut v = fdd_self_consistency_shifts(model, t, n, factor, replicas, seed, &[gamma_shift])?;
    Ok(v.remove(0))
}

/// [`fdd_self_consistency`] for several exponent shifts on the same samples.
pub fn fdd_self_consistency_shifts(
    model: &FlightModel,
    t: f64,
    n: usize,
    factor: usize,
    replicas: usize,
    seed: u64,
    gamma_shifts: &[f64],
) -> Result<Vec<MarginalReport>> {
    check_time(t)?;
    check_replicas(replicas, 1000)?;
    if n == 0 || factor == 0 {
        return invalid("n and factor must be positive");
    }
    let base = model.regime()?.gamma;
    let side = |size: usize, tag: u64| -> Vec<f64> {
        let steps = steps_at(size, t);
        (0..replicas as u64)
            .into_par_iter()
            .map(|r| flight_endpoint(model, steps, seed, replica_id(r, combine(tag, size as u64))))
            .collect()
    };
    let left = side(n, LEFT);
    let right = side(n * factor, RIGHT);
    Ok(gamma_shifts
        .iter()
        .map(|&shift| {
            let gamma = base + shift;
            let l: Vec<f64> = left.iter().map(|y| y / (n as f64).powf(gamma)).collect();
            let r: Vec<f64> = right.iter().map(|y| y / ((n * factor) as f64).powf(gamma)).collect();
            MarginalReport { model: *model, t, n, factor, gamma, replicas, ks: ks_test(&l, &r, seed) }
        })
        .collect())
}

/// Joint check at several times: each marginal, and the pair formed by the
/// last two times through a bivariate test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointReport {
    pub model: FlightModel,
    pub times: Vec<f64>,
    pub n: usize,
    pub factor: usize,
    pub gamma: f64,
    pub replicas: usize,
    pub marginals: Vec<KsReport>,
    pub joint: KsReport,
    pub verdict: bool,
}

pub fn fdd_joint(
    model: &FlightModel,
    times: &[f64],
    n: usize,
    factor: usize,
    replicas: usize,
    seed: u64,
) -> Result<JointReport> {
    if times.len() < 2 {
        return invalid("joint check needs at least two times");
    }
    for &t in times {
        check_time(t)?;
    }
    check_replicas(replicas, 2)?;
    if n == 0 || factor == 0 {
        return invalid("n and factor must be positive");
    }
    let gamma = model.regime()?.gamma;
    let side = |size: usize, tag: u64| -> Result<Vec<Vec<f64>>> {
        let at: Vec<usize> = times.iter().map(|&t| steps_at(size, t)).collect();
        let norm = (size as f64).powf(gamma);
        (0..replicas as u64)
            .into_par_iter()
            .map(|r| {
                let ys = flight_at(model, &at, seed, replica_id(r, combine(tag, size as u64)))?;
                Ok(ys.into_iter().map(|y| y / norm).collect())
            })
            .collect()
    };
    let left = side(n, LEFT)?;
    let right = side(n * factor, RIGHT)?;
    let column = |rows: &[Vec<f64>], i: usize| rows.iter().map(|r| r[i]).collect::<Vec<_>>();
    let marginals: Vec<KsReport> = (0..times.len())
        .map(|i| ks_test(&column(&left, i), &column(&right, i), combine(seed, i as u64)))
        .collect();
    let k = times.len();
    let pairs = |rows: &[Vec<f64>]| rows.iter().map(|r| (r[k - 2], r[k - 1])).collect::<Vec<_>>();
    let joint = ks_2d_test(&pairs(&left), &pairs(&right), CALIBRATION_ROUNDS, seed);
    let verdict = joint.verdict && marginals.iter().all(|m| m.verdict);
    Ok(JointReport {
        model: *model,
        times: times.to_vec(),
        n,
        factor,
        gamma,
        replicas,
        marginals,
        joint,
        verdict,
    })
}

/// Compares the simulated normalized marginal with draws from its exact law.
/// `gamma_shift` perturbs the exponent of the simulated side only.
pub fn oracle_test(
    model: &FlightModel,
    n: usize,
    t: f64,
    replicas: usize,
    seed: u64,
    gamma_shift: f64,
) -> Result<MarginalReport> {
    let mut v = oracle_test_shifts(model, n, t, replicas, seed, &[gamma_shift])?;
    Ok(v.remove(0))
}

/// [`oracle_test`] for several exponent shifts on the same samples.
pub fn oracle_test_shifts(
    model: &FlightModel,
    n: usize,
    t: f64,
    replicas: usize,
    seed: u64,
    gamma_shifts: &[f64],
) -> Result<Vec<MarginalReport>> {
    check_time(t)?;
    check_replicas(replicas, 2)?;
    let regime = model.regime()?;
    let scaling = OracleScaling::for_regime(&regime)?;
    let exact_gamma = scaling.gamma(regime.alpha, regime.beta);
    let steps = steps_at(n, t);
    let exact: Vec<f64> = (0..replicas as u64)
        .into_par_iter()
        .map(|r| exact_marginal_oracle(model, scaling, n, t, seed, replica_id(r, combine(ORACLE, n as u64))))
        .collect::<Result<_>>()?;
    let simulated: Vec<f64> = (0..replicas as u64)
        .into_par_iter()
        .map(|r| flight_endpoint(model, steps, seed, replica_id(r, combine(LEFT, n as u64))))
        .collect();
    Ok(gamma_shifts
        .iter()
        .map(|&shift| {
            let gamma = exact_gamma + shift;
            let norm = (n as f64).powf(gamma);
            let sim: Vec<f64> = simulated.iter().map(|y| y / norm).collect();
            MarginalReport { model: *model, t, n, factor: 1, gamma, replicas, ks: ks_test(&sim, &exact, seed) }
        })
        .collect())
}

/// The pair `(omega^ o S-, omega^ o (mu id))` on `[0, 1)` for one replica:
/// the rescaled medium read along the rescaled walk and along its drift line.
/// The medium uses scale `n` and normalization `n^(1/beta)`.
///
/// A negative drift is handled by mirroring the walk; the medium is
/// symmetric in law, so the pair has the law of the mirrored pair.
pub fn drift_pair(model: &FlightModel, n: usize, root: u64, replica: u64) -> Result<(StepPath, StepPath)> {
    let beta = match model.gap.index() {
        Some(b) if b < 1.0 => b,
        _ => return Err(Error::ModeMismatch("drift pair needs a gap index below 1".into())),
    };
    match model.jump {
        JumpLaw::DiscretePareto { alpha, .. } if alpha > 1.0 => {}
        JumpLaw::Constant { step } if step != 0 => {}
        _ => return Err(Error::ModeMismatch("drift pair needs a jump index in (1, 2) or a fixed step".into())),
    }
    let mu = model.jump.mean()?;
    if mu == 0.0 {
        return Err(Error::ModeMismatch("drift pair needs a nonzero drift".into()));
    }
    if n == 0 {
        return invalid("n must be positive");
    }
    let walk = Walk::simulate(model.jump, n - 1, SeedStream::new(root, replica, Role::Walk))?;
    let sign = mu.signum() as i128;
    let positions: Vec<i128> = walk.positions().iter().map(|&s| sign * s).collect();
    let mu = mu.abs();
    let (lo, hi) = (*positions.iter().min().unwrap(), *positions.iter().max().unwrap());
    let reach = (-lo).max(hi).max((mu * n as f64).ceil() as i128 + 1);
    let medium = Medium::with_range(model.gap, SeedStream::new(root, replica, Role::Medium), -reach, reach)?;
    let omega = rescale_medium(&medium, n as f64, MediumScaling::Hat { beta })?;
    let nf = n as f64;
    let walk_path = StepPath::from_cells(0.0, 1.0, positions.iter().map(|&s| s as f64 / nf).collect())?;
    let f = compose(&omega, &walk_path)?;
    let g = compose_linear(&omega, mu, 0.0, 1.0)?;
    Ok((f, g))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub n: usize,
    pub median_j2: f64,
    pub median_j1: f64,
    pub j2: Vec<f64>,
    pub j1: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct J2GapReport {
    pub model: FlightModel,
    pub m: usize,
    pub replicas: usize,
    pub seed: u64,
    pub rows: Vec<GapRow>,
    /// Median J2 distance strictly decreases along the grid.
    pub decreasing: bool,
    /// Median J2 distance is at most the median J1 distance at every `n`.
    pub ordered: bool,
}

/// Medians of the J2 and J1 distances between the two members of
/// [`drift_pair`], for each `n`, at resolution `m`.
pub fn j2_gap_experiment(
    model: &FlightModel,
    n_grid: &[usize],
    replicas: usize,
    m: usize,
    seed: u64,
) -> Result<J2GapReport> {
    check_replicas(replicas, 1)?;
    if n_grid.is_empty() {
        return invalid("empty n grid");
    }
    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let pairs: Vec<(f64, f64)> = (0..replicas as u64)
            .into_par_iter()
            .map(|r| {
                let (f, g) = drift_pair(model, n, seed, replica_id(r, n as u64))?;
                Ok((d_j2_estimate(&f, &g, m)?.value, d_j1_estimate(&f, &g, m)?.value))
            })
            .collect::<Result<_>>()?;
        let (j2, j1): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        rows.push(GapRow { n, median_j2: median(&j2), median_j1: median(&j1), j2, j1 });
    }
    let decreasing = rows.windows(2).all(|w| w[1].median_j2 < w[0].median_j2);
    let ordered = rows.iter().all(|r| r.median_j2 <= r.median_j1);
    Ok(J2GapReport { model: *model, m, replicas, seed, rows, decreasing, ordered })
}

/// Signed jump-time perturbation per path: at level `k` every jump of `x`
/// moves by `x / k`, every jump of `y` by `y / k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdditionRow {
    pub k: usize,
    pub distance: f64,
    /// `3 / k + slack`.
    pub bound: f64,
    /// Cost of the explicit witness that moves every jump back, when the
    /// moved jumps stay apart.
    pub witness_cost: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdditionReport {
    pub perturbation: Perturbation,
    pub m: usize,
    pub slack: f64,
    pub rows: Vec<AdditionRow>,
    /// Every distance is within its bound.
    pub bounded: bool,
    /// Distances do not increase with `k` by more than the slack.
    pub monotone: bool,
    /// Smallest distance over the schedule.
    pub floor: f64,
}

fn shift_jumps(p: &StepPath, delta: f64) -> Result<StepPath> {
    let breaks: Vec<f64> = p.breaks().iter().map(|b| b + delta).collect();
    if breaks.iter().any(|&b| !(b > p.start() && b < p.end())) {
        return Err(Error::Precondition(format!("shift {delta} pushes a jump out of the domain")));
    }
    StepPath::new(p.start(), p.end(), breaks, p.values().to_vec(), p.side())
}

/// Time change on the domain of `p` sending each original jump time `b` to
/// `b + delta`, affine on `[b - eps, b + delta + eps)` and the identity
/// elsewhere; also returns those intervals.
fn jump_mover(p: &StepPath, delta: f64) -> Result<(TimeChange, Vec<(f64, f64)>)> {
    let (start, end) = p.domain();
    let eps = delta.abs() / 4.0;
    let mut knots = vec![(start, start)];
    let mut intervals = Vec::new();
    for &b in p.breaks() {
        let lo = (b.min(b + delta) - eps).max(start);
        let hi = (b.max(b + delta) + eps).min(end);
        if lo <= knots.last().unwrap().0 {
            return Err(Error::Precondition("moved jumps overlap".into()));
        }
        knots.extend([(lo, lo), (b, b + delta)]);
        if hi < end {
            knots.push((hi, hi));
        }
        intervals.push((lo, hi));
    }
    if knots.last().unwrap().0 < end {
        knots.push((end, end));
    }
    Ok((TimeChange::from_knots(&knots)?, intervals))
}

fn explicit_witness(x: &StepPath, y: &StepPath, dx: f64, dy: f64, f: &StepPath, g: &StepPath) -> Option<f64> {
    let (mx, ix) = jump_mover(x, dx).ok()?;
    let (my, iy) = jump_mover(y, dy).ok()?;
    let lambda = merge_time_changes(&mx, &my, &ix, &iy).ok()?;
    replay(f, g, &lambda).ok().map(|r| r.cost())
}

fn addition_rows(
    x: &StepPath,
    y: &StepPath,
    ks: &[usize],
    perturbation: Perturbation,
    m: usize,
) -> Result<AdditionReport> {
    if ks.is_empty() || ks.contains(&0) {
        return invalid("schedule needs positive levels");
    }
    let sum = add(x, y)?;
    let sl = slack(&sum, m);
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let (dx, dy) = (perturbation.x / k as f64, perturbation.y / k as f64);
        let xk = shift_jumps(x, dx)?;
        let yk = shift_jumps(y, dy)?;
        let moved = add(&xk, &yk)?;
        let distance = d_j2_estimate(&moved, &sum, m)?.value;
        rows.push(AdditionRow {
            k,
            distance,
            bound: 3.0 / k as f64 + sl,
            witness_cost: explicit_witness(x, y, dx, dy, &moved, &sum),
        });
    }
    let bounded = rows.iter().all(|r| r.distance <= r.bound);
    let monotone = rows.windows(2).all(|w| w[1].distance <= w[0].distance + sl);
    let floor = rows.iter().map(|r| r.distance).fold(f64::INFINITY, f64::min);
    Ok(AdditionReport { perturbation, m, slack: sl, rows, bounded, monotone, floor })
}

/// Moves the jumps of `x` and `y` by `perturbation / k` for each `k` and
/// measures the J2 distance of the perturbed sum to `x + y`. The two paths
/// must not jump at a common time.
pub fn addition_continuity_experiment(
    x: &StepPath,
    y: &StepPath,
    ks: &[usize],
    perturbation: Perturbation,
    m: usize,
) -> Result<AdditionReport> {
    if let Some(t) = x.breaks().iter().find(|b| y.breaks().contains(b)) {
        return Err(Error::Precondition(format!("both paths jump at {t}")));
    }
    addition_rows(x, y, ks, perturbation, m)
}

/// Same measurement without the disjointness requirement; with a common
/// jump and opposite perturbations the distance stays away from zero.
pub fn addition_shared_jump_control(
    x: &StepPath,
    y: &StepPath,
    ks: &[usize],
    perturbation: Perturbation,
    m: usize,
) -> Result<AdditionReport> {
    addition_rows(x, y, ks, perturbation, m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionRow {
    pub alpha: f64,
    pub beta: f64,
    pub instance: u64,
    pub residual: f64,
    /// `1e-9 n nu |mu| T`.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub p_plus: f64,
    pub n: usize,
    pub horizon: f64,
    pub points_per_cell: usize,
    pub seed: u64,
    pub rows: Vec<DecompositionRow>,
    pub failures: usize,
}

/// Checks the fluctuation decomposition on `instances` flights for every
/// pair of indices, with Pareto gaps of unit scale.
#[allow(clippy::too_many_arguments)]
pub fn decomposition_suite(
    alphas: &[f64],
    betas: &[f64],
    p_plus: f64,
    n: usize,
    horizon: f64,
    instances: usize,
    points_per_cell: usize,
    seed: u64,
) -> Result<DecompositionReport> {
    check_time(horizon)?;
    let steps = (n as f64 * horizon).ceil() as usize;
    let mut rows = Vec::new();
    for &alpha in alphas {
        for &beta in betas {
            let model = FlightModel::pareto(alpha, p_plus, beta)?;
            let (mu, nu) = match (model.mu(), model.nu()) {
                (Some(mu), Some(nu)) if mu != 0.0 => (mu, nu),
                _ => return Err(Error::ModeMismatch("needs finite means and a nonzero drift".into())),
            };
            let tag = combine(alpha.to_bits(), beta.to_bits());
            let part: Vec<DecompositionRow> = (0..instances as u64)
                .into_par_iter()
                .map(|i| {
                    let flight =
                        build_flight(model.gap, model.jump, steps, seed, replica_id(i, tag), MediumMode::Explicit)?;
                    let check = crate::path::fluctuation_decomposition_residual(
                        &flight,
                        n,
                        horizon,
                        alpha,
                        beta,
                        mu,
                        nu,
                        points_per_cell,
                    )?;
                    Ok(DecompositionRow {
                        alpha,
                        beta,
                        instance: i,
                        residual: check.residual,
                        bound: 1e-9 * n as f64 * nu * mu.abs() * horizon,
                    })
                })
                .collect::<Result<_>>()?;
            rows.extend(part);
        }
    }
    let failures = rows.iter().filter(|r| !(r.residual <= r.bound)).count();
    Ok(DecompositionReport { p_plus, n, horizon, points_per_cell, seed, rows, failures })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReorderReport {
    pub jump: JumpLaw,
    pub n: usize,
    pub horizon: f64,
    pub seed: u64,
    pub checks: Vec<DisplacementCheck>,
    /// Walks on which the displacement bound holds.
    pub holding: usize,
    /// Walks on which the reordered walk is nondecreasing.
    pub monotone: usize,
}

/// Runs the reordering check on `walks` independent walks.
pub fn reorder_suite(alpha: f64, p_plus: f64, n: usize, horizon: f64, walks: usize, seed: u64) -> Result<ReorderReport> {
    check_time(horizon)?;
    let jump = JumpLaw::DiscretePareto { alpha, p_plus };
    jump.validate()?;
    let mu = jump.mean()?;
    let steps = (n as f64 * horizon).ceil() as usize;
    let checks: Vec<DisplacementCheck> = (0..walks as u64)
        .into_par_iter()
        .map(|r| {
            let walk = Walk::simulate(jump, steps, SeedStream::new(seed, r, Role::Walk))?;
            check_displacement_bound(&walk, n, horizon, mu, alpha)
        })
        .collect::<Result<_>>()?;
    let holding = checks.iter().filter(|c| c.holds).count();
    let monotone = checks.iter().filter(|c| c.monotone).count();
    Ok(ReorderReport { jump, n, horizon, seed, checks, holding, monotone })
}
