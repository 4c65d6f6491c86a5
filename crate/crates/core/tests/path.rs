use levy_lab::laws::{GapLaw, JumpLaw};
use levy_lab::medium::Medium;
use levy_lab::path::{
    add, compose, compose_linear, fluctuation_decomposition_residual, hat_scale, rescale_medium, rescale_walk,
    MediumScaling, Side, StepPath, WalkScaling,
};
use levy_lab::rng::{Role, SeedStream};
use levy_lab::walk::{build_flight, MediumMode, Walk};
use levy_lab::Error;
use proptest::prelude::*;

fn walk_stream(root: u64) -> SeedStream {
    SeedStream::new(root, 0, Role::Walk)
}

fn unit_medium(k: i128) -> Medium {
    Medium::with_range(GapLaw::Constant { value: 1.0 }, SeedStream::new(0, 0, Role::Medium), -k, k).unwrap()
}

#[test]
fn hat_medium_on_unit_gaps() {
    let beta = 0.5;
    let w = rescale_medium(&unit_medium(8), 4.0, MediumScaling::Hat { beta }).unwrap();
    assert_eq!(w.eval(0.5), Some(2.0 / 4f64.powf(1.0 / beta)));
    assert_eq!(w.eval(0.0), Some(0.0));
    // negative side takes ceil(n s)
    assert_eq!(w.eval(-0.3), Some(-1.0 / 16.0));
    assert_eq!(w.domain(), (-9.0 / 4.0, 9.0 / 4.0));
}

#[test]
fn tilde_medium_vanishes_on_mean_gaps() {
    let m = Medium::with_range(GapLaw::Constant { value: 1.5 }, SeedStream::new(0, 0, Role::Medium), -40, 40).unwrap();
    let w = rescale_medium(&m, 8.0, MediumScaling::Tilde { beta: 1.5, nu: 1.5 }).unwrap();
    assert!(w.values().iter().all(|&v| v == 0.0));
}

#[test]
fn tilde_medium_negative_branch() {
    let m = Medium::from_gaps(&[1.0], &[2.0]).unwrap();
    let w = rescale_medium(&m, 1.0, MediumScaling::Tilde { beta: 1.5, nu: 1.5 }).unwrap();
    assert_eq!(w.eval(-1.0), Some(-0.5));
    let bar = rescale_medium(&m, 1.0, MediumScaling::Bar { beta: 1.5 }).unwrap();
    assert_eq!(bar.eval(-1.0), Some(-2.0));
    assert_eq!(bar.eval(1.0), Some(1.0));
}

#[test]
fn medium_mode_must_fit_the_index() {
    let law = GapLaw::ParetoTail { beta: 0.7, x_min: 1.0 };
    let m = Medium::with_range(law, SeedStream::new(1, 0, Role::Medium), -10, 10).unwrap();
    assert!(rescale_medium(&m, 4.0, MediumScaling::Hat { beta: 0.7 }).is_ok());
    assert!(matches!(rescale_medium(&m, 4.0, MediumScaling::Bar { beta: 0.7 }), Err(Error::ModeMismatch(_))));
    assert!(matches!(rescale_medium(&m, 4.0, MediumScaling::Hat { beta: 0.6 }), Err(Error::ModeMismatch(_))));
    assert!(matches!(
        rescale_medium(&m, 4.0, MediumScaling::Tilde { beta: 1.5, nu: 3.0 }),
        Err(Error::ModeMismatch(_))
    ));
}

#[test]
fn bar_walk_on_unit_steps() {
    let w = Walk::simulate(JumpLaw::Constant { step: 1 }, 20, walk_stream(0)).unwrap();
    let s = rescale_walk(&w, 10, WalkScaling::Bar { alpha: 1.5 }).unwrap();
    assert_eq!(s.eval(0.35), Some(0.3));
    assert_eq!(s.domain(), (0.0, 2.1));
}

#[test]
fn tilde_walk_vanishes_on_mean_steps() {
    let w = Walk::simulate(JumpLaw::Constant { step: 2 }, 50, walk_stream(0)).unwrap();
    let s = rescale_walk(&w, 7, WalkScaling::Tilde { alpha: 1.5, mu: 2.0 }).unwrap();
    assert!(s.values().iter().all(|&v| v == 0.0));
}

#[test]
fn hat_walk_starts_at_zero() {
    let law = JumpLaw::DiscretePareto { alpha: 0.8, p_plus: 0.5 };
    let w = Walk::simulate(law, 100, walk_stream(3)).unwrap();
    let s = rescale_walk(&w, 16, WalkScaling::Hat { alpha: 0.8 }).unwrap();
    assert_eq!(s.eval(0.0), Some(0.0));
    assert!(matches!(rescale_walk(&w, 16, WalkScaling::Bar { alpha: 0.8 }), Err(Error::ModeMismatch(_))));
}

#[test]
fn centering_is_consistent() {
    let alpha = 1.5;
    let law = JumpLaw::DiscretePareto { alpha, p_plus: 0.75 };
    let mu = law.mean().unwrap();
    for root in 0..10 {
        let n = 1000;
        let w = Walk::simulate(law, 2 * n, walk_stream(root)).unwrap();
        let tilde = rescale_walk(&w, n, WalkScaling::Tilde { alpha, mu }).unwrap();
        let c = hat_scale(n, alpha);
        for i in 0..=2 * n {
            let t = i as f64 / n as f64 + 0.3 / n as f64;
            let k = (n as f64 * t).floor() as usize;
            let s = w.position(k) as f64;
            let back = c * tilde.eval(t).unwrap() + mu * k as f64;
            let size = s.abs() + mu * k as f64;
            assert!((back - s).abs() <= 4.0 * f64::EPSILON * size.max(1.0), "{back} vs {s}");
        }
    }
}

#[test]
fn composition_reproduces_the_flight() {
    let alpha = 1.5;
    let beta = 0.7;
    let gap = GapLaw::ParetoTail { beta, x_min: 1.0 };
    let jump = JumpLaw::DiscretePareto { alpha, p_plus: 0.75 };
    let mut checked = 0;
    for replica in 0..10u64 {
        let n = 64 << (replica % 5);
        let flight = build_flight(gap, jump, 2 * n, 17, replica, MediumMode::Explicit).unwrap();
        let medium = flight.medium().explicit().unwrap();
        let outer = rescale_medium(medium, hat_scale(n, alpha), MediumScaling::Hat { beta }).unwrap();
        let inner = rescale_walk(flight.walk(), n, WalkScaling::Hat { alpha }).unwrap();
        let y = compose(&outer, &inner).unwrap();
        let norm = (n as f64).powf(1.0 / (alpha * beta));
        let stream = SeedStream::new(replica, 0, Role::Auxiliary(9));
        for j in 0..100 {
            let t = 2.0 * levy_lab::rng::unit_open(&mut stream.rng(j));
            let k = (n as f64 * t).floor() as usize;
            let got = y.eval(t).unwrap();
            let want = flight.targets()[k] / norm;
            // same medium point; the normalizations differ only in rounding
            assert!((got - want).abs() <= 16.0 * f64::EPSILON * want.abs(), "t={t}: {got} vs {want}");
            let exact = flight.targets()[k] / hat_scale(n, alpha).powf(1.0 / beta);
            assert_eq!(got, exact);
            checked += 1;
        }
    }
    assert_eq!(checked, 1000);
}

#[test]
fn composition_with_a_sampled_identity() {
    let outer = StepPath::piecewise(-1.0, 2.0, &[0.25, 0.6, 1.3], &[4.0, -1.0, 2.0, 7.0]).unwrap();
    let m = 20;
    let inner = StepPath::from_cells(0.0, 1.0, (0..m).map(|i| i as f64 / m as f64).collect()).unwrap();
    let c = compose(&outer, &inner).unwrap();
    for i in 0..m {
        let t = i as f64 / m as f64;
        assert_eq!(c.eval(t), outer.eval(t));
    }
    let escape = StepPath::constant(0.0, 1.0, 5.0).unwrap();
    assert!(matches!(compose(&outer, &escape), Err(Error::RangeEscape(_))));
    let lin = compose_linear(&outer, 2.0, 0.0, 0.9).unwrap();
    assert_eq!(lin.eval(0.2), outer.eval(0.4));
    assert_eq!(lin.eval(0.65), outer.eval(1.3));
}

#[test]
fn addition_examples() {
    let x = StepPath::piecewise(0.0, 1.0, &[0.3, 0.7], &[1.0, -2.0, 0.5]).unwrap();
    let zero = StepPath::constant(0.0, 1.0, 0.0).unwrap();
    assert_eq!(add(&x, &zero).unwrap(), x);
    let cancel = add(&x, &x.neg().unwrap()).unwrap();
    assert_eq!(cancel.breaks(), &[] as &[f64]);
    assert_eq!(cancel.values(), &[0.0]);
    let other = StepPath::constant(0.0, 2.0, 0.0).unwrap();
    assert!(matches!(add(&x, &other), Err(Error::DomainMismatch(_))));
}

#[test]
fn cadlag_version() {
    let right = StepPath::piecewise(0.0, 1.0, &[0.5], &[1.0, 2.0]).unwrap();
    let r = right.cadlag_ify();
    for t in [0.0, 0.25, 0.5, 0.75] {
        assert_eq!(r.eval(t), right.eval(t));
    }
    let two_sided = StepPath::piecewise(-1.0, 1.0, &[-0.5, 0.5], &[1.0, 3.0, 2.0]).unwrap();
    assert_eq!(two_sided.eval(-0.5), Some(1.0));
    let c = two_sided.cadlag_ify();
    assert_eq!(c.eval(-0.5), Some(3.0));
    assert_eq!(c.side(), Side::Cadlag);
    assert_eq!(c.cadlag_ify(), c);
}

#[test]
fn cadlag_difference_is_the_gap() {
    let negative = [0.5, 2.0, 0.25, 7.0, 1.5];
    let medium = Medium::from_gaps(&[1.0, 1.0, 1.0, 1.0, 1.0], &negative).unwrap();
    let n = 4.0;
    let beta = 0.5;
    let w = rescale_medium(&medium, n, MediumScaling::Hat { beta }).unwrap();
    let c = w.cadlag_ify();
    let norm = n.powf(1.0 / beta);
    for j in -4i32..0 {
        let s = j as f64 / n;
        let diff = c.eval(s).unwrap() - w.eval(s).unwrap();
        let zeta = negative[(-j - 1) as usize];
        assert!((diff - zeta / norm).abs() < 1e-15, "j={j}: {diff}");
    }
}

#[test]
fn two_sided_paths_are_continuous_at_zero() {
    let law = GapLaw::ParetoTail { beta: 0.4, x_min: 1.0 };
    for root in 0..5 {
        let m = Medium::with_range(law, SeedStream::new(root, 0, Role::Medium), -30, 30).unwrap();
        let w = rescale_medium(&m, 10.0, MediumScaling::Hat { beta: 0.4 }).unwrap();
        let at = w.eval(0.0);
        assert_eq!(w.eval(-1e-9), at);
        assert_eq!(w.eval(1e-9), at);
    }
}

#[test]
fn constant_instance_decomposes_exactly() {
    let nu = 1.5;
    let mu = 2i64;
    let n = 1 << 10;
    let flight = build_flight(
        GapLaw::Constant { value: nu },
        JumpLaw::Constant { step: mu },
        n,
        0,
        0,
        MediumMode::Explicit,
    )
    .unwrap();
    let check = fluctuation_decomposition_residual(&flight, n, 1.0, 1.5, 1.5, mu as f64, nu, 4).unwrap();
    assert_eq!(check.residual, 0.0);
    assert_eq!(check.points, 4 * n);
}

#[test]
fn decomposition_holds_at_any_grid_density() {
    let (alpha, beta) = (1.2, 1.8);
    let gap = GapLaw::ParetoTail { beta, x_min: 1.0 };
    let jump = JumpLaw::DiscretePareto { alpha, p_plus: 0.75 };
    let (mu, nu) = (jump.mean().unwrap(), gap.mean().unwrap());
    let n = 1 << 12;
    let bound = 1e-9 * n as f64 * nu * mu.abs();
    for replica in 0..3 {
        let flight = build_flight(gap, jump, n, 21, replica, MediumMode::Explicit).unwrap();
        for per in [1, 3, 8] {
            let check = fluctuation_decomposition_residual(&flight, n, 1.0, alpha, beta, mu, nu, per).unwrap();
            assert!(check.residual <= bound, "per={per}: {}", check.residual);
        }
    }
    let flight = build_flight(gap, jump, 16, 0, 0, MediumMode::Explicit).unwrap();
    assert!(matches!(
        fluctuation_decomposition_residual(&flight, 16, 1.0, 0.8, beta, mu, nu, 1),
        Err(Error::ModeMismatch(_))
    ));
    assert!(fluctuation_decomposition_residual(&flight, 16, 1.0, alpha, beta, 0.0, nu, 1).is_err());
}

fn arb_path(start: f64, end: f64) -> impl Strategy<Value = StepPath> {
    (prop::collection::vec(0.001f64..0.999, 0..8), prop::collection::vec(-5.0f64..5.0, 9)).prop_map(
        move |(mut fr, vals)| {
            fr.sort_by(f64::total_cmp);
            fr.dedup();
            let breaks: Vec<f64> = fr.iter().map(|u| start + (end - start) * u).collect();
            let values = vals[..breaks.len() + 1].to_vec();
            StepPath::piecewise(start, end, &breaks, &values).unwrap()
        },
    )
}

fn monotone(p: &StepPath) -> bool {
    p.values().windows(2).all(|w| w[0] <= w[1])
}

fn sorted_path(p: StepPath) -> StepPath {
    let mut v = p.values().to_vec();
    v.sort_by(f64::total_cmp);
    StepPath::piecewise(p.start(), p.end(), p.breaks(), &v).unwrap()
}

proptest! {
    #[test]
    fn monotone_composition(outer in arb_path(-5.0, 5.1), inner in arb_path(0.0, 1.0)) {
        let c = compose(&sorted_path(outer), &sorted_path(inner)).unwrap();
        prop_assert!(monotone(&c));
    }

    #[test]
    fn sum_jumps_come_from_the_summands(x in arb_path(-1.0, 1.0), y in arb_path(-1.0, 1.0)) {
        let s = add(&x, &y).unwrap();
        for (t, _) in s.jumps() {
            prop_assert!(x.breaks().contains(&t) || y.breaks().contains(&t));
        }
        for t in [-0.9, -0.5, -0.1, 0.0, 0.2, 0.77] {
            prop_assert_eq!(s.eval(t).unwrap(), x.eval(t).unwrap() + y.eval(t).unwrap());
        }
    }

    #[test]
    fn cadlag_is_idempotent(x in arb_path(-1.0, 1.0)) {
        let c = x.cadlag_ify();
        prop_assert_eq!(c.cadlag_ify(), c.clone());
        for &b in x.breaks() {
            let right = x.eval(b + 1e-12).unwrap();
            prop_assert_eq!(c.eval(b).unwrap(), right);
        }
    }
}
