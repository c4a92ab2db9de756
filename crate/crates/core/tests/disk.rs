use std::f64::consts::{PI, TAU};

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twoweight::disk::*;
use twoweight::kernels::{operator_norm, KernelKind, Weighted};
use twoweight::Error;

fn cz(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_blaschke(rng: &mut ChaCha8Rng, d: usize) -> InnerFunction {
    InnerFunction::blaschke((0..d).map(|_| Complex64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..TAU))).collect())
        .unwrap()
}

fn angle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

#[test]
fn inner_function_values() {
    let z = InnerFunction::blaschke(vec![cz(0.0, 0.0)]).unwrap();
    assert_abs_diff_eq!((z.eval(cz(0.5, 0.0)).unwrap() - cz(0.5, 0.0)).norm(), 0.0, epsilon = 1e-15);
    let s = 0.7;
    let sing = InnerFunction::new(vec![], vec![(0.0, s)]).unwrap();
    assert_abs_diff_eq!((sing.eval(cz(0.0, 0.0)).unwrap() - cz((-s).exp(), 0.0)).norm(), 0.0, epsilon = 1e-15);
    assert!(matches!(sing.eval(cz(1.0, 0.0)), Err(Error::Singular(_))));
    assert!(InnerFunction::blaschke(vec![cz(1.0, 0.0)]).is_err());
    assert!(InnerFunction::new(vec![], vec![(0.0, -1.0)]).is_err());
}

#[test]
fn inner_functions_are_unimodular_on_the_circle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for d in 1..=8 {
        let mut theta = random_blaschke(&mut rng, d);
        theta.singular = vec![(1.0, 0.3), (4.0, 2.0)];
        for j in 0..100 {
            let phi = TAU * (j as f64 + 0.5) / 100.0;
            if angle_dist(phi, 1.0) < 1e-3 || angle_dist(phi, 4.0) < 1e-3 {
                continue;
            }
            assert_abs_diff_eq!(theta.eval(Complex64::from_polar(1.0, phi)).unwrap().norm(), 1.0, epsilon = 1e-10);
        }
    }
}

#[test]
fn clark_measures_of_powers() {
    let z = InnerFunction::blaschke(vec![cz(0.0, 0.0)]).unwrap();
    let s = clark_measure(&z).unwrap();
    assert_eq!(s.len(), 1);
    assert!(angle_dist(s.atoms()[0].position, 0.0) < 1e-12);
    assert_abs_diff_eq!(s.atoms()[0].mass, 1.0, epsilon = 1e-12);

    let z2 = InnerFunction::blaschke(vec![cz(0.0, 0.0); 2]).unwrap();
    let s = clark_measure(&z2).unwrap();
    assert_eq!(s.len(), 2);
    let mut pos: Vec<f64> = s.positions();
    pos.sort_by(|a, b| angle_dist(*a, 0.0).total_cmp(&angle_dist(*b, 0.0)));
    assert!(angle_dist(pos[0], 0.0) < 1e-12 && angle_dist(pos[1], PI) < 1e-12);
    for a in s.atoms() {
        assert_abs_diff_eq!(a.mass, 0.5, epsilon = 1e-12);
    }
    assert!(clark_measure(&InnerFunction::blaschke(vec![]).unwrap()).is_err());
    assert!(clark_measure(&InnerFunction::new(vec![cz(0.0, 0.0)], vec![(1.0, 1.0)]).unwrap()).is_err());
}

#[test]
fn clark_identity_at_z_squared() {
    // (1 - |θ|²)/|1 - θ|² at z = 1/2 for θ = z² is 5/3
    let z2 = InnerFunction::blaschke(vec![cz(0.0, 0.0); 2]).unwrap();
    let s = clark_measure(&z2).unwrap();
    let rhs: f64 = s.atoms().iter().map(|a| a.mass * 0.75 / (Complex64::from_polar(1.0, a.position) - 0.5).norm_sqr()).sum();
    assert_abs_diff_eq!(rhs, 5.0 / 3.0, epsilon = 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn clark_identity_holds(seed in 0u64..100_000, d in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta = random_blaschke(&mut rng, d);
        let s = clark_measure(&theta).unwrap();
        prop_assert_eq!(s.len(), d);
        prop_assert!(clark_residual(&theta, &s, &residual_grid()).unwrap() < 1e-8);
        let t0 = theta.eval(cz(0.0, 0.0)).unwrap();
        let want = (1.0 - t0.norm_sqr()) / (1.0 - t0).norm_sqr();
        prop_assert!((s.total_mass() - want).abs() < 1e-8 * want.max(1.0));
        for a in s.atoms() {
            let v = theta.eval(Complex64::from_polar(1.0, a.position)).unwrap();
            prop_assert!((v - 1.0).norm() < 1e-9);
        }
    }
}

#[test]
fn nu_measure_examples() {
    let z = InnerFunction::blaschke(vec![cz(0.0, 0.0)]).unwrap();
    let nu = nu_measure(&z, &disk_measure(&[(0.5, 0.0, 2.0)]).unwrap()).unwrap();
    assert_abs_diff_eq!(nu.total_mass(), 0.5, epsilon = 1e-15);
    let nu = nu_measure(&z, &disk_measure(&[(0.0, 0.0, 1.0)]).unwrap()).unwrap();
    assert_abs_diff_eq!(nu.total_mass(), 1.0, epsilon = 1e-15);
    let nu = nu_measure(&z, &disk_measure(&[(1.0, 0.0, 3.0)]).unwrap()).unwrap();
    assert_eq!(nu.total_mass(), 0.0);
    let sing = InnerFunction::new(vec![], vec![(0.0, 1.0)]).unwrap();
    assert!(nu_measure(&sing, &disk_measure(&[(1.0, 0.0, 1.0)]).unwrap()).is_err());

    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for d in 1..=6 {
        let theta = random_blaschke(&mut rng, d);
        let mu = disk_measure(
            &(0..20)
                .map(|_| {
                    let w = Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..TAU));
                    (w.re, w.im, rng.gen_range(0.1..1.0))
                })
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(nu_measure(&theta, &mu).unwrap().total_mass() <= 4.0 * mu.total_mass());
    }
}

#[test]
fn disk_constants_single_pair() {
    let sigma = circle_measure(&[(PI, 1.0)]).unwrap();
    let tau = disk_measure(&[(0.5, 0.0, 1.0)]).unwrap();
    // at z = 1/2: P_z(-1) = 1/3, Pτ(z) = 4/3, and τ sits in the box of I_z
    assert_abs_diff_eq!(a2_sample(&sigma, &tau, cz(0.5, 0.0)).unwrap(), 4.0 / 9.0, epsilon = 1e-14);
    assert_eq!(a2_sample(&sigma, &tau, cz(0.0, 0.0)), None);
    let zs = default_z_samples(&sigma, &tau, 8, 16);
    let arcs = arc_family(&sigma, &tau, 8, 4, 7);
    let r = disk_constants(&sigma, &tau, &zs, &arcs, 1e-12).unwrap();
    assert_abs_diff_eq!(r.global, 1.0, epsilon = 1e-15);
    assert!(r.a2_sup >= 4.0 / 9.0 - 1e-14);
    assert!(r.t_forward <= r.n_direct + 1e-9 && r.t_backward <= r.n_direct + 1e-9);
    assert_eq!(r.p_tau_convention, P_TAU_CONVENTION);

    let empty = disk_measure(&[]).unwrap();
    let r = disk_constants(&sigma, &empty, &zs, &arcs, 1e-12).unwrap();
    assert_eq!((r.global, r.a2_sup, r.t_forward, r.t_backward, r.n_direct), (0.0, 0.0, 0.0, 0.0, 0.0));
    assert!(disk_constants(&sigma, &tau, &[], &arcs, 1e-12).is_err());
}

#[test]
fn disk_testing_is_dominated_by_the_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..10 {
        let sigma = circle_measure(&(0..12).map(|_| (rng.gen_range(0.0..TAU), rng.gen_range(0.1..1.0))).collect::<Vec<_>>())
            .unwrap();
        let tau = disk_measure(
            &(0..12)
                .map(|_| {
                    let w = Complex64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..TAU));
                    (w.re, w.im, rng.gen_range(0.1..1.0))
                })
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let zs = default_z_samples(&sigma, &tau, 6, 16);
        let arcs = arc_family(&sigma, &tau, 6, 2, 1);
        let r = disk_constants(&sigma, &tau, &zs, &arcs, 1e-12).unwrap();
        assert!(r.t_forward <= r.n_direct * (1.0 + 1e-9) + 1e-9);
        assert!(r.t_backward <= r.n_direct * (1.0 + 1e-9) + 1e-9);
    }
}

#[test]
fn pullback_examples() {
    let base = disk_measure(&[(0.0, 0.5, 1.0), (0.3, -0.2, 2.0)]).unwrap();
    let id = pullback(&[cz(0.0, 0.0), cz(1.0, 0.0)], &base).unwrap();
    assert_eq!(id.points(), base.points());
    let zero = pullback(&[cz(0.0, 0.0)], &base).unwrap();
    assert_eq!(zero.len(), 1);
    assert_eq!(zero.atoms()[0].position, [0.0, 0.0]);
    assert_abs_diff_eq!(zero.total_mass(), 3.0, epsilon = 1e-15);
    let sq = pullback(&[cz(0.0, 0.0), cz(0.0, 0.0), cz(1.0, 0.0)], &disk_measure(&[(0.0, 0.5, 1.0)]).unwrap()).unwrap();
    assert_abs_diff_eq!(sq.atoms()[0].position[0], -0.25, epsilon = 1e-15);
    assert_abs_diff_eq!(sq.atoms()[0].position[1], 0.0, epsilon = 1e-15);
    assert!(matches!(pullback(&[cz(3.0, 0.0)], &base), Err(Error::MapOutOfDomain(_))));
}

#[test]
fn compactness_profiles() {
    let sigma = circle_measure(&[(0.0, 1.0), (2.0, 0.5)]).unwrap();
    let tau = disk_measure(&[(0.5, 0.0, 1.0), (-0.2, 0.3, 1.0)]).unwrap();
    let radii = [0.5, 0.8, 0.9, 0.99, 0.999, 0.9999];
    let lengths = [0.5, 0.25, 0.1, 0.01];
    let arcs = arc_family(&sigma, &tau, 10, 4, 3);
    let p = compactness_profile(&sigma, &tau, &radii, &lengths, &arcs, 64).unwrap();
    for t in [&p.a2, &p.forward, &p.backward] {
        assert!(t.windows(2).all(|w| w[1].1 <= w[0].1));
    }
    // τ stays inside |w| ≤ 1/2, so short arcs see nothing
    assert_eq!(p.forward.last().unwrap().1, 0.0);
    assert_eq!(p.backward.last().unwrap().1, 0.0);
    // along the radius to an atom ζ of mass m, the A₂ term tends to
    // 4 m Σ τ(w)/|1 - ζ̄ w|² rather than 0
    let one = circle_measure(&[(0.0, 1.0)]).unwrap();
    let tau1 = disk_measure(&[(0.5, 0.0, 1.0)]).unwrap();
    let v = a2_sample(&one, &tau1, cz(1.0 - 1e-7, 0.0)).unwrap();
    assert!((v - 16.0).abs() < 1e-4, "{v}");
}

#[test]
fn compactness_profile_with_accumulating_mass() {
    let sigma = circle_measure(&[(0.0, 1.0)]).unwrap();
    let tau = disk_measure(&(1..=12).map(|j| (1.0 - 0.5f64.powi(j), 0.0, 0.5f64.powi(j))).collect::<Vec<_>>()).unwrap();
    let radii = [0.5, 0.9, 0.99, 0.999];
    let arcs = arc_family(&sigma, &tau, 12, 4, 3);
    let p = compactness_profile(&sigma, &tau, &radii, &[0.1, 0.01, 0.001], &arcs, 32).unwrap();
    assert!(p.a2.last().unwrap().1 > 0.1);
}

#[test]
fn kernel_probe_examples() {
    let z2 = InnerFunction::blaschke(vec![cz(0.0, 0.0); 2]).unwrap();
    assert_eq!(kernel_probe(&z2, &disk_measure(&[]).unwrap(), &[cz(0.5, 0.0)]).unwrap().value, 0.0);
    let mu = disk_measure(&[(0.25, 0.0, 1.0)]).unwrap();
    // k(z) = (1 - z²/4)/(1 - z/2) at z = 1/4, over ‖k‖² = (1 - 1/16)/(1 - 1/4)
    let k = (1.0 - 0.015625) / 0.875;
    assert_abs_diff_eq!(kernel_probe(&z2, &mu, &[cz(0.5, 0.0)]).unwrap().value, k * k / 1.25, epsilon = 1e-14);
    assert!(kernel_probe(&z2, &mu, &[cz(1.0, 0.0)]).is_err());
}

#[test]
fn kernel_probe_is_below_the_clark_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for d in 1..=6 {
        let theta = random_blaschke(&mut rng, d);
        let mu = disk_measure(
            &(0..10)
                .map(|_| {
                    let w = Complex64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..TAU));
                    (w.re, w.im, rng.gen_range(0.1..1.0))
                })
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let sigma = clark_measure(&theta).unwrap();
        let nu = nu_measure(&theta, &mu).unwrap();
        let n = operator_norm(&KernelKind::DiskCauchy, &Weighted::from(&sigma), &Weighted::from(&nu), 1e-12).unwrap().norm;
        let probe = kernel_probe(&theta, &mu, &default_lambdas(6, 16)).unwrap().value;
        assert!(probe <= n * n * (1.0 + 1e-8), "probe {probe} vs 𝒩² {}", n * n);
    }
}

#[test]
fn conjugate_poisson_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    for _ in 0..1000 {
        let z = Complex64::from_polar(rng.gen_range(0.0..0.999), rng.gen_range(0.0..TAU));
        let w = Complex64::from_polar(1.0, rng.gen_range(0.0..TAU));
        let lhs = 2.0 / (1.0 - z * w.conj());
        assert!((lhs - poisson_pair(z, w)).norm() <= 1e-12 * lhs.norm());
    }
}
