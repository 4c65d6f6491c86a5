use levy_lab::lab::stats::ks_test;
use levy_lab::laws::{GapLaw, JumpLaw};
use levy_lab::medium::{
    aggregate_sum, marginal_target, segment_sum, Medium, Site, SparseMedium, MAX_EXPLICIT_SITES,
};
use levy_lab::rng::{Role, SeedStream};
use levy_lab::walk::{build_flight, walk_endpoint, Flight, MediumMode, MediumStore, Walk};
use levy_lab::Error;
use proptest::prelude::*;

const UNIT: GapLaw = GapLaw::Constant { value: 1.0 };
const STEP: JumpLaw = JumpLaw::Constant { step: 1 };

fn medium_stream(root: u64) -> SeedStream {
    SeedStream::new(root, 0, Role::Medium)
}

fn walk_stream(root: u64) -> SeedStream {
    SeedStream::new(root, 0, Role::Walk)
}

#[test]
fn origin_is_zero() {
    let mut m = Medium::new(GapLaw::ParetoTail { beta: 0.6, x_min: 1.0 }, medium_stream(1)).unwrap();
    assert_eq!(m.target(0).unwrap(), 0.0);
    m.ensure(-100, 100).unwrap();
    assert_eq!(m.get(0).unwrap(), 0.0);
}

#[test]
fn unit_gaps_give_the_integers() {
    let m = Medium::with_range(UNIT, medium_stream(2), -50, 50).unwrap();
    for k in -50..=50 {
        assert_eq!(m.get(k).unwrap(), k as f64);
    }
}

#[test]
fn prescribed_gaps() {
    let m = Medium::from_gaps(&[1.0, 3.0], &[2.0]).unwrap();
    assert_eq!(m.get(2).unwrap(), 4.0);
    assert_eq!(m.get(-1).unwrap(), -2.0);
    assert_eq!(m.gap_after(1).unwrap(), 3.0);
    assert_eq!(m.range(), (-1, 2));
    // a medium given by its gaps cannot grow
    let mut frozen = m.clone();
    assert!(matches!(frozen.target(3), Err(Error::OutOfRange(3))));
    assert!(frozen.ensure(-1, 1).is_ok());
    assert!(Medium::from_gaps(&[1.0, 0.0], &[]).is_err());
}

#[test]
fn prescribed_flight() {
    let medium = Medium::from_gaps(&[1.0, 3.0], &[2.0]).unwrap();
    let walk = Walk::from_positions(STEP, walk_stream(0), vec![0, 2, -1]).unwrap();
    let flight = Flight::new(walk, MediumStore::Explicit(medium)).unwrap();
    assert_eq!(flight.targets(), &[0.0, 4.0, -2.0]);
    assert!(Walk::from_positions(STEP, walk_stream(0), vec![1, 2]).is_err());
}

#[test]
fn unit_medium_flight_follows_the_walk() {
    let flight = build_flight(
        UNIT,
        JumpLaw::DiscretePareto { alpha: 1.3, p_plus: 0.4 },
        2000,
        3,
        7,
        MediumMode::Auto,
    )
    .unwrap();
    for (&s, &y) in flight.walk().positions().iter().zip(flight.targets()) {
        assert_eq!(y, s as f64);
    }
}

#[test]
fn constant_step_walk() {
    let w = Walk::simulate(STEP, 3, walk_stream(0)).unwrap();
    assert_eq!(w.positions(), &[0, 1, 2, 3]);
    let empty = Walk::simulate(JumpLaw::DiscretePareto { alpha: 1.5, p_plus: 0.75 }, 0, walk_stream(0)).unwrap();
    assert_eq!(empty.positions(), &[0]);
    assert_eq!(empty.steps(), 0);
}

#[test]
fn walk_replays() {
    let law = JumpLaw::DiscretePareto { alpha: 1.5, p_plus: 0.75 };
    let a = Walk::simulate(law, 1 << 12, walk_stream(11)).unwrap();
    let b = Walk::simulate(law, 1 << 12, walk_stream(11)).unwrap();
    assert_eq!(a.positions(), b.positions());
    assert_eq!(a.range(), b.range());
    assert_eq!(walk_endpoint(&law, 1 << 12, &walk_stream(11)), a.position(1 << 12));
    let mut c = Walk::simulate(law, 100, walk_stream(11)).unwrap();
    c.extend(1 << 12);
    assert_eq!(c.positions(), a.positions());
}

#[test]
fn medium_ignores_the_walk_stream() {
    let gap = GapLaw::ParetoTail { beta: 1.4, x_min: 1.0 };
    let jump = JumpLaw::DiscretePareto { alpha: 1.5, p_plus: 0.5 };
    let root = 5;
    let reference = Medium::with_range(gap, SeedStream::new(root, 0, Role::Medium), -3000, 3000).unwrap();
    for walk_root in 0..4 {
        let walk = Walk::simulate(jump, 500, SeedStream::new(walk_root, 0, Role::Walk)).unwrap();
        let (lo, hi) = walk.range();
        let medium = Medium::with_range(gap, SeedStream::new(root, 0, Role::Medium), lo, hi).unwrap();
        for k in lo.max(-3000)..=hi.min(3000) {
            assert_eq!(medium.get(k).unwrap(), reference.get(k).unwrap());
        }
    }
    // build_flight reads the medium role of the same (root, replica)
    let flight = build_flight(gap, jump, 500, root, 0, MediumMode::Explicit).unwrap();
    let m = flight.medium().explicit().unwrap();
    let (lo, hi) = m.range();
    for k in lo.max(-3000)..=hi.min(3000) {
        assert_eq!(m.get(k).unwrap(), reference.get(k).unwrap());
    }
}

#[test]
fn explicit_range_is_bounded() {
    let r = Medium::with_range(UNIT, medium_stream(0), 0, MAX_EXPLICIT_SITES);
    assert!(matches!(r, Err(Error::TooLarge(_))));
}

#[test]
fn sparse_and_explicit_media_agree() {
    let law = GapLaw::ParetoTail { beta: 0.8, x_min: 1.0 };
    let flight = build_flight(law, JumpLaw::DiscretePareto { alpha: 1.2, p_plus: 0.5 }, 3000, 9, 1, MediumMode::Explicit)
        .unwrap();
    let sparse = build_flight(law, JumpLaw::DiscretePareto { alpha: 1.2, p_plus: 0.5 }, 3000, 9, 1, MediumMode::Sparse)
        .unwrap();
    assert!(sparse.medium().explicit().is_none());
    for (a, b) in flight.targets().iter().zip(sparse.targets()) {
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn short_segments_use_the_medium_gaps() {
    let law = GapLaw::ExactPositiveStable { beta: 0.6 };
    let s = medium_stream(12);
    let m = Medium::with_range(law, s, -5000, 5000).unwrap();
    for (a, b) in [(-5000, 5000), (-17, -3), (0, 1), (4, 4000), (-1, 0)] {
        let direct = m.get(b).unwrap() - m.get(a).unwrap();
        let seg = segment_sum(&law, &s, a, b);
        assert!((seg - direct).abs() <= 1e-12 * direct.abs(), "[{a}, {b}]: {seg} vs {direct}");
    }
    assert_eq!(marginal_target(&law, &s, 0), 0.0);
    assert!((marginal_target(&law, &s, -40) - m.get(-40).unwrap()).abs() < 1e-12 * m.get(-40).unwrap().abs());
}

#[test]
fn long_segments_replay() {
    let law = GapLaw::ParetoTail { beta: 1.5, x_min: 1.0 };
    let s = medium_stream(13);
    let a: Site = -(1 << 40);
    let b: Site = 1 << 50;
    let x = segment_sum(&law, &s, a, b);
    assert_eq!(x, segment_sum(&law, &s, a, b));
    assert!(x >= (b - a) as f64);
    let sparse = SparseMedium::new(&law, &s, &[a, b, 7]).unwrap();
    assert_eq!(sparse.get(0).unwrap(), 0.0);
    assert!(sparse.get(a).unwrap() < 0.0 && sparse.get(b).unwrap() > sparse.get(7).unwrap());
    assert!(sparse.get(8).is_err());
}

/// Sum of `count` gaps one by one, independent of the medium code.
fn direct_sum(law: &GapLaw, count: u64, stream: &SeedStream, replica: u64) -> f64 {
    let base = replica * count;
    (0..count).map(|i| law.sample(&mut stream.rng(base + i))).sum()
}

#[test]
fn aggregated_pareto_segments_match_direct_sums() {
    let count = 20_000u64;
    let replicas = 2000u64;
    for (j, beta) in [0.7, 1.5].into_iter().enumerate() {
        let law = GapLaw::ParetoTail { beta, x_min: 1.0 };
        let direct_stream = SeedStream::new(40 + j as u64, 0, Role::Auxiliary(2));
        let agg_stream = SeedStream::new(50 + j as u64, 0, Role::Auxiliary(3));
        let direct: Vec<f64> = (0..replicas).map(|r| direct_sum(&law, count, &direct_stream, r)).collect();
        let agg: Vec<f64> = (0..replicas)
            .map(|r| aggregate_sum(&law, count as i128, &mut agg_stream.rng(r)))
            .collect();
        let report = ks_test(&direct, &agg, 60 + j as u64);
        assert!(report.verdict, "beta {beta}: {report:?}");
    }
}

#[test]
fn aggregated_stable_segments_match_direct_sums() {
    let count = 500u64;
    let replicas = 2000u64;
    let law = GapLaw::ExactPositiveStable { beta: 0.5 };
    let direct_stream = SeedStream::new(70, 0, Role::Auxiliary(2));
    let agg_stream = SeedStream::new(71, 0, Role::Auxiliary(3));
    let direct: Vec<f64> = (0..replicas).map(|r| direct_sum(&law, count, &direct_stream, r)).collect();
    let agg: Vec<f64> = (0..replicas)
        .map(|r| aggregate_sum(&law, count as i128, &mut agg_stream.rng(r)))
        .collect();
    let report = ks_test(&direct, &agg, 72);
    assert!(report.verdict, "{report:?}");
    assert_eq!(aggregate_sum(&UNIT, 1 << 40, &mut agg_stream.rng(0)), (1u64 << 40) as f64);
}

proptest! {
    #[test]
    fn medium_is_strictly_increasing(root in any::<u64>(), beta in 0.2f64..1.9) {
        prop_assume!((beta - 1.0).abs() > 1e-3);
        let law = GapLaw::ParetoTail { beta, x_min: 1.0 };
        let m = Medium::with_range(law, medium_stream(root), -300, 300).unwrap();
        for k in -300..300 {
            prop_assert!(m.get(k + 1).unwrap() > m.get(k).unwrap());
        }
    }

    #[test]
    fn lazy_growth_matches_eager(root in any::<u64>(), sites in prop::collection::vec(-2000i128..2000, 1..20)) {
        let law = GapLaw::ExactPositiveStable { beta: 0.7 };
        let eager = Medium::with_range(law, medium_stream(root), -2000, 2000).unwrap();
        let mut lazy = Medium::new(law, medium_stream(root)).unwrap();
        for &k in &sites {
            prop_assert_eq!(lazy.target(k).unwrap(), eager.get(k).unwrap());
        }
        let (lo, hi) = lazy.range();
        for k in lo..=hi {
            prop_assert_eq!(lazy.get(k).unwrap(), eager.get(k).unwrap());
        }
    }

    #[test]
    fn flight_targets_are_medium_points(root in any::<u64>(), replica in 0u64..100, alpha in 0.6f64..1.9) {
        prop_assume!((alpha - 1.0).abs() > 1e-3);
        let flight = build_flight(
            GapLaw::ParetoTail { beta: 1.3, x_min: 1.0 },
            JumpLaw::DiscretePareto { alpha, p_plus: 0.6 },
            300,
            root,
            replica,
            MediumMode::Auto,
        ).unwrap();
        prop_assert_eq!(flight.targets()[0], 0.0);
        for (&s, &y) in flight.walk().positions().iter().zip(flight.targets()) {
            prop_assert_eq!(y, flight.medium().get(s).unwrap());
        }
    }
}
