use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twoweight::constants::*;
use twoweight::dyadic::{Grid, GridParams};
use twoweight::measure::{Interval, Measure1D, Measure2D};
use twoweight::Error;

fn unit() -> Interval {
    Interval::new(0.0, 1.0)
}

fn no_tau() -> Measure2D {
    Measure2D::half_plane(&[]).unwrap()
}

/// Standard grid in which no interval is bad.
fn all_good_grid() -> Grid {
    Grid::standard(GridParams::new(0.5, 40, -20, 0).unwrap()).unwrap()
}

#[test]
fn a2_single_pair() {
    let sigma = Measure1D::line(&[(2.0, 1.0)]).unwrap();
    let tau = Measure2D::half_plane(&[(0.5, 0.5, 1.0)]).unwrap();
    let w = a2_constant(&sigma, &tau, &[unit()]).unwrap();
    assert_abs_diff_eq!(w.value, 0.25, epsilon = 1e-15);
    assert_eq!(w.witness, Some(unit()));
    assert_eq!(a2_terms(&sigma, &tau, &unit()), (0.25, 0.0));
    assert_eq!(a2_constant(&sigma, &no_tau(), &[unit()]).unwrap().value, 0.0);
    assert!(matches!(a2_constant(&sigma, &tau, &[]), Err(Error::Invalid(_))));
}

#[test]
fn testing_single_pair() {
    let sigma = Measure1D::line(&[(0.5, 1.0)]).unwrap();
    let tau = Measure2D::half_plane(&[(0.5, 0.5, 1.0)]).unwrap();
    let (f, b) = testing_constants(&sigma, &tau, &[unit()]).unwrap();
    assert_abs_diff_eq!(f.value, 2.0, epsilon = 1e-14);
    assert_abs_diff_eq!(b.value, 2.0, epsilon = 1e-14);
    let n = direct_norm(&sigma, &tau, 1e-12).unwrap().norm;
    assert!(f.value <= n + 1e-9 && b.value <= n + 1e-9);
    let (f, b) = testing_constants(&sigma, &no_tau(), &[unit()]).unwrap();
    assert_eq!((f.value, b.value), (0.0, 0.0));
}

#[test]
fn shared_point_mass_is_singular() {
    let sigma = Measure1D::line(&[(0.5, 1.0)]).unwrap();
    let tau = Measure2D::half_plane(&[(0.5, 0.0, 1.0)]).unwrap();
    assert!(matches!(characterization(&sigma, &tau, &[unit()], 1e-10), Err(Error::Singular(_))));
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> (Measure1D, Measure2D) {
    let s = Measure1D::line(&(0..n).map(|_| (rng.gen_range(0.0..1.0), rng.gen_range(0.1..1.0))).collect::<Vec<_>>())
        .unwrap();
    let t = Measure2D::half_plane(
        &(0..n).map(|_| (rng.gen_range(0.0..1.0), rng.gen_range(0.01..0.5), rng.gen_range(0.1..1.0))).collect::<Vec<_>>(),
    )
    .unwrap();
    (s, t)
}

#[test]
fn report_invariants_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let params = GridParams::new(0.5, 2, -16, 2).unwrap();
    for seed in 0..20 {
        let (s, t) = random_instance(&mut rng, 12);
        let family = interval_family(&s, &t, params, 4, seed).unwrap();
        let r = characterization(&s, &t, &family, 1e-10).unwrap();
        assert!(r.a2 >= 0.0 && r.t_forward >= 0.0 && r.t_backward >= 0.0);
        assert_abs_diff_eq!(r.r_char, r.a2.sqrt() + r.t_forward.max(r.t_backward), epsilon = 1e-15);
        assert!(r.t_forward <= r.n_direct * (1.0 + 1e-9) + 1e-9);
        assert!(r.t_backward <= r.n_direct * (1.0 + 1e-9) + 1e-9);
        assert!(r.a2 <= 16.0 * r.n_direct * r.n_direct);
    }
}

#[test]
fn energy_line_examples() {
    let g = all_good_grid();
    let i = g.interval(0, 0).unwrap();
    let one = Measure1D::line(&[(0.3, 1.0)]).unwrap();
    assert_eq!(energy_line(&one, &g, &i), 0.0);
    let two = Measure1D::line(&[(0.3, 1.0), (0.7, 1.0)]).unwrap();
    assert_abs_diff_eq!(energy_line(&two, &g, &i), 0.2, epsilon = 1e-14);
    assert_eq!(energy_line(&Measure1D::line(&[(3.0, 1.0)]).unwrap(), &g, &i), 0.0);
}

#[test]
fn energy_line_is_at_most_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let params = GridParams::new(0.5, 2, -20, 0).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(2..40);
        let s = Measure1D::line(&(0..n).map(|_| (rng.gen_range(-2.0..2.0), rng.gen_range(0.01..1.0))).collect::<Vec<_>>())
            .unwrap();
        let g = twoweight::suite::admissible_grid(params, &s, &no_tau(), &mut rng).unwrap();
        for k in -6..=0 {
            for iv in g.intervals_meeting(&s.positions(), k).unwrap() {
                worst = worst.max(energy_line(&s, &g, &iv));
            }
        }
    }
    assert!(worst <= 1.001, "max energy {worst}");
}

#[test]
fn energy_plane_examples() {
    let one = Measure2D::half_plane(&[(0.3, 0.25, 1.0)]).unwrap();
    assert_eq!(energy_plane(&one, &unit()), 0.0);
    let two = Measure2D::half_plane(&[(0.3, 0.25, 1.0), (0.7, 0.25, 1.0)]).unwrap();
    assert_abs_diff_eq!(energy_plane(&two, &unit()), 0.2, epsilon = 1e-15);
    let moved = Measure2D::half_plane(&[(5.3, 0.25, 1.0), (5.7, 0.25, 1.0)]).unwrap();
    assert_abs_diff_eq!(energy_plane(&moved, &Interval::new(5.0, 6.0)), 0.2, epsilon = 1e-14);
}

proptest! {
    #[test]
    fn energy_plane_forms_agree(seed in 0u64..5000, n in 1usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tau = Measure2D::half_plane(
            &(0..n).map(|_| (rng.gen_range(0.0..1.0), rng.gen_range(0.001..1.0), rng.gen_range(0.1..1.0))).collect::<Vec<_>>(),
        ).unwrap();
        let a = energy_plane(&tau, &unit());
        let b = energy_plane_pairwise(&tau, &unit());
        prop_assert!((a - b).abs() <= 1e-10);
        let shift = rng.gen_range(-10.0..10.0);
        let moved = Measure2D::half_plane(
            &tau.atoms().iter().map(|x| (x.position[0] + shift, x.position[1], x.mass)).collect::<Vec<_>>(),
        ).unwrap();
        prop_assert!((energy_plane(&moved, &Interval::new(shift, 1.0 + shift)) - a).abs() <= 1e-10);
    }
}

#[test]
fn energy_inequality_examples() {
    let g = all_good_grid();
    let i0 = g.interval(0, 0).unwrap();
    let part = g.children(&i0).unwrap();
    let one = Measure1D::line(&[(0.3, 1.0)]).unwrap();
    let tau = Measure2D::half_plane(&[(0.3, 0.01, 1.0), (0.8, 0.01, 1.0)]).unwrap();
    let r = energy_inequality_report(&one, &tau, &g, &i0, &part, EnergyInequality::First, 1.0).unwrap();
    assert_eq!((r.lhs, r.ratio), (0.0, 0.0));
    let sigma = Measure1D::line(&[(0.1, 1.0), (0.45, 1.0), (0.6, 1.0)]).unwrap();
    let r = energy_inequality_report(&sigma, &tau, &g, &i0, &part, EnergyInequality::Second, 1.0).unwrap();
    assert_eq!(r.lhs, 0.0);
    let bad = [g.interval(-1, 0).unwrap()];
    assert!(matches!(
        energy_inequality_report(&sigma, &tau, &g, &i0, &bad, EnergyInequality::First, 1.0),
        Err(Error::Hypothesis(_))
    ));
}

#[test]
fn energy_inequality_ratio_is_finite() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let params = GridParams::new(0.5, 2, -20, 0).unwrap();
    for seed in 0..10 {
        let (s, t) = random_instance(&mut rng, 32);
        let g = twoweight::suite::admissible_grid(params, &s, &t, &mut rng).unwrap();
        let family = interval_family(&s, &t, params, 2, seed).unwrap();
        let r_char = characterization(&s, &t, &family, 1e-10).unwrap().r_char;
        let i0 = g.locate(0.5, 0).unwrap();
        let part = g.children(&i0).unwrap();
        for which in [EnergyInequality::First, EnergyInequality::Second] {
            let r = energy_inequality_report(&s, &t, &g, &i0, &part, which, r_char).unwrap();
            assert!(r.lhs >= 0.0);
            if r.mass > 0.0 {
                assert!(r.ratio.is_finite());
            }
        }
    }
}

#[test]
fn v_region_examples() {
    assert!(v_region(&unit(), [0.5, 0.1]).in_v);
    assert!(!v_region(&unit(), [2.0, 0.5]).in_v);
    let top = v_region(&unit(), [1.5, 0.6]);
    assert!(top.in_v && top.in_top && !top.in_bottom);
    let bottom = v_region(&unit(), [1.05, 0.1]);
    assert!(bottom.in_v && bottom.in_bottom && !bottom.in_top);
    let inside = v_region(&unit(), [0.5, 0.5]);
    assert!(inside.in_v && !inside.in_top && !inside.in_bottom);
}

#[test]
fn monotonicity_with_zero_phi() {
    let g = all_good_grid();
    let sigma = Measure1D::line(&[(0.501, 1.0), (0.503, 2.0), (0.511, 1.0)]).unwrap();
    let tau = Measure2D::half_plane(&[(3.0, 0.1, 1.0), (-2.0, 0.5, 1.0)]).unwrap();
    let small = g.interval(-6, 32).unwrap();
    let cfg = MonotonicityI { sigma: &sigma, tau: &tau, grid: &g, big: unit(), small, phi: &[0.0, 0.0], f: None };
    let r = monotonicity_i(&cfg).unwrap();
    for v in [r.mono_i2.unwrap(), r.mono.unwrap()] {
        assert!(v.iter().all(|&x| x == 0.0));
    }
    let cfg = MonotonicityI { big: Interval::new(0.45, 0.55), ..cfg };
    assert!(matches!(monotonicity_i(&cfg), Err(Error::Hypothesis(_))));
    let far = Measure1D::line(&[(3.0, 1.0), (0.5, 1.0)]).unwrap();
    let tau2 = Measure2D::half_plane(&[(0.505, 0.001, 1.0), (0.51, 0.002, 1.0)]).unwrap();
    let ii = MonotonicityII { sigma: &far, tau: &tau2, big: unit(), small: small.span(), f: &[0.0, 0.0] };
    let r = monotonicity_ii(&ii).unwrap();
    assert_eq!((r.upper, r.lower), (Some(0.0), Some(0.0)));
    let ii = MonotonicityII { f: &[1.0, 0.0], ..ii };
    assert!(matches!(monotonicity_ii(&ii), Err(Error::Hypothesis(_))));
}

#[test]
fn bigger_sign_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let big = unit();
    let small = Interval::new(0.5, 0.5 + 1.0 / 64.0);
    let mut samples = Vec::new();
    while samples.len() < 10_000 {
        let t = rng.gen_range(small.left..small.right);
        let x = [rng.gen_range(-3.0..4.0), rng.gen_range(0.001..2.0)];
        if !v_region(&big, x).in_v {
            samples.push((t, x));
        }
    }
    let r = bigger_check(&big, &small, &samples).unwrap();
    assert!(r.all_nonnegative);
    assert!(r.c_observed > 0.0);
    assert!(bigger_check(&big, &small, &[(0.5, [0.5, 0.1])]).is_err());
}

#[test]
fn hardy_examples() {
    let w = Measure1D::line(&[(2.0, 1.0)]).unwrap();
    let s = Measure1D::line(&[(1.0, 1.0)]).unwrap();
    let r = hardy(&w, &s).unwrap();
    assert_abs_diff_eq!(r.b, 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(r.direct_norm, 1.0, epsilon = 1e-12);
    let r = hardy(&w, &Measure1D::line(&[]).unwrap()).unwrap();
    assert_eq!((r.b, r.direct_norm), (0.0, 0.0));
    assert!(hardy(&Measure1D::line(&[(0.0, 1.0)]).unwrap(), &s).is_err());
}

proptest! {
    #[test]
    fn hardy_ratio_band(seed in 0u64..5000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || Measure1D::line(&(0..16).map(|_| (rng.gen_range(0.01..10.0), rng.gen_range(0.01..1.0))).collect::<Vec<_>>()).unwrap();
        let (w, s) = (draw(), draw());
        let r = hardy(&w, &s).unwrap();
        prop_assert!(r.direct_norm >= r.b - 1e-9);
        if r.b > 0.0 {
            prop_assert!(r.ratio() <= 4.0);
        }
    }
}

#[test]
fn weak_boundedness_examples() {
    let sigma = Measure1D::line(&[(0.5, 2.0)]).unwrap();
    let tau = Measure2D::half_plane(&[(1.5, 0.5, 3.0)]).unwrap();
    let (i, j) = (unit(), Interval::new(1.0, 2.0));
    let a2 = 0.7;
    let r = weak_boundedness_ratio(&sigma, &tau, &i, &j, a2).unwrap();
    let k = (1.0f64 + 0.25).sqrt().recip();
    assert_abs_diff_eq!(r, k * 6f64.sqrt() / a2.sqrt(), epsilon = 1e-12);
    let r = weak_boundedness_ratio(&sigma, &tau, &Interval::new(-1.0, 0.0), &unit(), a2).unwrap();
    assert_eq!(r, 0.0);
    assert!(matches!(weak_boundedness_ratio(&sigma, &tau, &unit(), &Interval::new(0.5, 1.5), a2), Err(Error::Hypothesis(_))));
}
