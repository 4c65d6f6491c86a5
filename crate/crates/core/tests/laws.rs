use levy_lab::lab::stats::{ks_test, median};
use levy_lab::laws::{riemann_zeta, sample_stable, GapLaw, JumpLaw, StableParams};
use levy_lab::rng::{Role, SeedStream};
use levy_lab::Error;
use proptest::prelude::*;
use statrs::function::erf::erf;

fn stream(root: u64) -> SeedStream {
    SeedStream::new(root, 0, Role::Auxiliary(1))
}

fn gaps(law: GapLaw, n: usize, root: u64) -> Vec<f64> {
    let s = stream(root);
    (0..n as u64).map(|i| law.sample(&mut s.rng(i))).collect()
}

fn jumps(law: JumpLaw, n: usize, root: u64) -> Vec<i128> {
    let s = stream(root);
    (0..n as u64).map(|i| law.sample(&mut s.rng(i))).collect()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[test]
fn stable_streams_replay() {
    let p = StableParams::new(1.5, 0.3, 2.0, -1.0).unwrap();
    let a = sample_stable(&p, 1000, &stream(9)).unwrap();
    let b = sample_stable(&p, 1000, &stream(9)).unwrap();
    assert_eq!(a, b);
    let c = sample_stable(&p, 1000, &stream(10)).unwrap();
    assert_ne!(a, c);
}

#[test]
fn excluded_indices_are_rejected() {
    for alpha in [1.0, 0.0, 2.0, 2.5, -0.5, f64::NAN] {
        assert!(matches!(StableParams::positive(alpha), Err(Error::InvalidParameter(_))), "{alpha}");
    }
    assert!(StableParams::new(1.5, 1.2, 1.0, 0.0).is_err());
    assert!(StableParams::new(1.5, 0.0, 0.0, 0.0).is_err());
    assert!(GapLaw::ExactPositiveStable { beta: 1.5 }.validate().is_err());
    assert!(GapLaw::ParetoTail { beta: 1.0, x_min: 1.0 }.validate().is_err());
    assert!(JumpLaw::DiscretePareto { alpha: 1.0, p_plus: 0.5 }.validate().is_err());
    assert!(JumpLaw::DiscretePareto { alpha: 1.5, p_plus: 1.1 }.validate().is_err());
}

#[test]
fn one_sided_stable_is_positive() {
    let p = StableParams::positive(0.5).unwrap();
    let xs = sample_stable(&p, 100_000, &stream(1)).unwrap();
    assert!(xs.iter().all(|&x| x > 0.0));
}

#[test]
fn symmetric_stable_median_is_zero() {
    let p = StableParams::new(1.5, 0.0, 1.0, 0.0).unwrap();
    let xs = sample_stable(&p, 100_000, &stream(2)).unwrap();
    let m = median(&xs);
    assert!(m.abs() < 0.02, "median {m}");
}

#[test]
fn levy_tail_matches_closed_form() {
    // index 1/2, unit scale is the Levy law with P(X > x) = erf(sqrt(1 / (2x)))
    let expected = erf((1.0f64 / 8.0).sqrt());
    let n = 1_000_000;
    let p = StableParams::positive(0.5).unwrap();
    let xs = sample_stable(&p, n, &stream(3)).unwrap();
    let hit = xs.iter().filter(|&&x| x > 4.0).count() as f64 / n as f64;
    let se = (expected * (1.0 - expected) / n as f64).sqrt();
    assert!((hit - expected).abs() < 3.0 * se, "empirical {hit}, expected {expected}");
}

#[test]
fn pareto_gaps_respect_support() {
    let xs = gaps(GapLaw::ParetoTail { beta: 0.5, x_min: 1.0 }, 100_000, 4);
    assert!(xs.iter().all(|&x| x >= 1.0));
    let ys = gaps(GapLaw::ParetoTail { beta: 1.3, x_min: 2.5 }, 100_000, 4);
    assert!(ys.iter().all(|&x| x >= 2.5));
}

/// Mean of a positive variable as the integral of its survival function,
/// with `x = e^s` on the Pareto part.
fn survival_integral(beta: f64, x_min: f64) -> f64 {
    let steps = 200_000;
    let top = 200.0 / beta;
    let h = top / steps as f64;
    let f = |s: f64| s.exp() * (-beta * s).exp();
    let mut acc = 0.5 * (f(0.0) + f(top));
    for i in 1..steps {
        acc += f(i as f64 * h);
    }
    x_min * (1.0 + acc * h)
}

#[test]
fn pareto_mean_matches_survival_integral() {
    let law = GapLaw::ParetoTail { beta: 1.5, x_min: 1.0 };
    let oracle = survival_integral(1.5, 1.0);
    assert!((oracle - 3.0).abs() < 1e-6, "oracle {oracle}");
    assert!((law.mean().unwrap() - oracle).abs() < 1e-6);
    let m = mean(&gaps(law, 1_000_000, 5));
    assert!((m - oracle).abs() < 0.15, "sample mean {m}");
    assert!(matches!(GapLaw::ParetoTail { beta: 0.7, x_min: 1.0 }.mean(), Err(Error::MeanUndefined(_))));
}

#[test]
fn pareto_survival_at_ten() {
    let beta = 1.5;
    let n = 1_000_000;
    let xs = gaps(GapLaw::ParetoTail { beta, x_min: 1.0 }, n, 6);
    let p = 10f64.powf(-beta);
    let hit = xs.iter().filter(|&&x| x > 10.0).count() as f64 / n as f64;
    let se = (p * (1.0 - p) / n as f64).sqrt();
    assert!((hit - p).abs() < 3.0 * se, "empirical {hit}, expected {p}");
}

#[test]
fn positive_stable_sums_scale_exactly() {
    let beta = 0.7;
    let law = GapLaw::ExactPositiveStable { beta };
    let replicas = 4000u64;
    for (j, k) in [2u64, 10, 100].into_iter().enumerate() {
        let sums = stream(100 + j as u64);
        let single = stream(200 + j as u64);
        let lhs: Vec<f64> = (0..replicas)
            .map(|r| (0..k).map(|i| law.sample(&mut sums.rng(r * k + i))).sum())
            .collect();
        let scale = (k as f64).powf(1.0 / beta);
        let rhs: Vec<f64> = (0..replicas).map(|r| scale * law.sample(&mut single.rng(r))).collect();
        let report = ks_test(&lhs, &rhs, 300 + k);
        assert!(report.verdict, "k={k}: {report:?}");
    }
}

#[test]
fn forced_sign_jumps_are_positive() {
    let xs = jumps(JumpLaw::DiscretePareto { alpha: 1.5, p_plus: 1.0 }, 100_000, 7);
    assert!(xs.iter().all(|&x| x >= 1));
    let ys = jumps(JumpLaw::DiscretePareto { alpha: 0.6, p_plus: 0.3 }, 100_000, 7);
    assert!(ys.iter().all(|&x| x != 0));
}

#[test]
fn symmetric_jumps_have_zero_mean() {
    let xs = jumps(JumpLaw::DiscretePareto { alpha: 1.5, p_plus: 0.5 }, 1_000_000, 8);
    let m = xs.iter().map(|&x| x as f64).sum::<f64>() / xs.len() as f64;
    assert!(m.abs() < 0.02, "mean {m}");
}

/// `sum_{k <= terms} k^(-s)`, smallest terms first.
fn zeta_partial(s: f64, terms: u64) -> f64 {
    (1..=terms).rev().map(|k| (k as f64).powf(-s)).sum()
}

#[test]
fn drifted_jump_mean_matches_series() {
    let oracle = 0.5 * zeta_partial(1.5, 100_000_000);
    assert!((oracle - 1.3062).abs() < 1e-3, "oracle {oracle}");
    let law = JumpLaw::DiscretePareto { alpha: 1.5, p_plus: 0.75 };
    // the partial sum misses a tail of about 2 / sqrt(1e8)
    assert!((law.mean().unwrap() - oracle).abs() < 2e-4);
    let batch_mean = |root| jumps(law, 1_000_000, root).iter().map(|&x| x as f64).sum::<f64>() / 1e6;
    let m = batch_mean(0);
    assert!((m - oracle).abs() < 0.05, "mean {m}");
    // the mean has infinite variance; a median of batch means is the robust view
    let batches: Vec<f64> = (100..109).map(batch_mean).collect();
    let mm = median(&batches);
    assert!((mm - oracle).abs() < 0.02, "median of batch means {mm}");
}

#[test]
fn zeta_matches_partial_sums_with_tail() {
    for s in [1.1, 1.2, 1.5, 1.8, 2.0, 3.0] {
        let n = 1_000_000u64;
        // Euler-Maclaurin tail beyond n
        let nf = n as f64;
        let tail = nf.powf(1.0 - s) / (s - 1.0) - 0.5 * nf.powf(-s) + s / 12.0 * nf.powf(-s - 1.0);
        let oracle = zeta_partial(s, n) + tail;
        let z = riemann_zeta(s).unwrap();
        assert!((z - oracle).abs() < 1e-9 * oracle, "s={s}: {z} vs {oracle}");
    }
    assert!((riemann_zeta(2.0).unwrap() - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-13);
    assert!(riemann_zeta(1.0).is_err());
}

proptest! {
    #[test]
    fn gap_draws_replay(root in any::<u64>(), item in any::<u64>(), beta in 0.05f64..0.95) {
        let s = SeedStream::new(root, 3, Role::Medium);
        for law in [GapLaw::ExactPositiveStable { beta }, GapLaw::ParetoTail { beta, x_min: 1.0 }] {
            let a = law.sample(&mut s.rng(item));
            let b = law.sample(&mut s.rng(item));
            prop_assert_eq!(a.to_bits(), b.to_bits());
            prop_assert!(a > 0.0);
        }
    }

    #[test]
    fn jump_magnitude_law(alpha in 0.3f64..1.9, root in any::<u64>()) {
        prop_assume!((alpha - 1.0).abs() > 1e-3);
        let law = JumpLaw::DiscretePareto { alpha, p_plus: 0.5 };
        let s = SeedStream::new(root, 0, Role::Walk);
        for i in 0..64 {
            let x = law.sample(&mut s.rng(i));
            prop_assert!(x != 0);
        }
    }
}
