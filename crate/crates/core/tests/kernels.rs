use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twoweight::kernels::{apply, bilinear_form, operator_norm, ramp, weighted_matrix, KernelKind, KernelValue, Weighted};
use twoweight::linalg::{largest_singular_value, Matrix, DEFAULT_TOL};
use twoweight::measure::{Measure1D, Measure2D};
use twoweight::Error;

fn vector(v: KernelValue) -> [f64; 2] {
    match v {
        KernelValue::Vector(a) => a,
        other => panic!("expected a vector, got {other:?}"),
    }
}

fn scalar(v: KernelValue) -> f64 {
    match v {
        KernelValue::Scalar(a) => a,
        other => panic!("expected a scalar, got {other:?}"),
    }
}

#[test]
fn riesz_values() {
    assert_eq!(vector(KernelKind::Riesz.eval([0.0, 1.0], [0.0, 0.0]).unwrap()), [0.0, 1.0]);
    let v = vector(KernelKind::Riesz.eval([3.0, 4.0], [0.0, 0.0]).unwrap());
    assert_abs_diff_eq!(v[0], 0.12, epsilon = 1e-15);
    assert_abs_diff_eq!(v[1], 0.16, epsilon = 1e-15);
    assert!(matches!(KernelKind::Riesz.eval([1.0, 0.0], [1.0, 0.0]), Err(Error::Singular(_))));
    assert!(matches!(KernelKind::Cauchy.eval([1.0, 0.0], [1.0, 0.0]), Err(Error::Singular(_))));
}

#[test]
fn disk_kernels_at_origin() {
    let w = [0.6, 0.8];
    let p = scalar(KernelKind::DiskPoisson.eval([0.0, 0.0], w).unwrap());
    let q = scalar(KernelKind::DiskConjugatePoisson.eval([0.0, 0.0], w).unwrap());
    assert_abs_diff_eq!(p, 1.0, epsilon = 1e-15);
    assert_eq!(q, 0.0);
    let c = match KernelKind::DiskCauchy.eval([0.0, 0.0], w).unwrap() {
        KernelValue::Complex(z) => z,
        _ => unreachable!(),
    };
    assert_abs_diff_eq!(2.0 * c.re, 1.0 + p, epsilon = 1e-15);
}

#[test]
fn disk_cauchy_splits_into_poisson_parts() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let r = rng.gen_range(0.0..0.99f64);
        let z = Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU));
        let w = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        let (x, t) = ([z.re, z.im], [w.re, w.im]);
        let p = scalar(KernelKind::DiskPoisson.eval(x, t).unwrap());
        let q = scalar(KernelKind::DiskConjugatePoisson.eval(x, t).unwrap());
        // 2/(1 - w̄z) = 1 + P + iQ on the circle
        let lhs = 2.0 / (1.0 - w.conj() * z);
        assert!((lhs - Complex64::new(1.0 + p, q)).norm() < 1e-12 * lhs.norm().max(1.0));
    }
}

#[test]
fn t_tau_and_poisson_average_examples() {
    let tau = Weighted::from(&Measure2D::half_plane(&[(0.0, 1.0, 1.0)]).unwrap());
    let v = apply(&KernelKind::TTau, &tau, &[1.0], &[[0.0, 1.0]]).unwrap();
    assert_abs_diff_eq!(scalar(v[0]), 0.5, epsilon = 1e-15);
    let sigma = Weighted::from(&Measure1D::line(&[(2.0, 1.0)]).unwrap());
    // I = [0, 1) encoded as center 0.5, length 1
    let v = apply(&KernelKind::PoissonAverage, &sigma, &[1.0], &[[0.5, 1.0]]).unwrap();
    assert_abs_diff_eq!(scalar(v[0]), 0.25, epsilon = 1e-15);
    let v = apply(&KernelKind::Riesz, &sigma, &[0.0], &[[2.0, 0.0], [0.0, 1.0]]).unwrap();
    assert!(v.iter().all(|x| x.abs() == 0.0));
}

#[test]
fn single_pair_bilinear_form() {
    let s = Weighted::from(&Measure1D::line(&[(0.5, 1.0)]).unwrap());
    let t = Weighted::from(&Measure2D::half_plane(&[(0.5, 0.5, 1.0)]).unwrap());
    match bilinear_form(&KernelKind::Cauchy, &s, &[1.0], &t, &[1.0]).unwrap() {
        KernelValue::Complex(z) => {
            assert_abs_diff_eq!(z.re, 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(z.im, 2.0, epsilon = 1e-15);
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(bilinear_form(&KernelKind::Cauchy, &s, &[0.0], &t, &[1.0]).unwrap().abs(), 0.0);
    assert_eq!(bilinear_form(&KernelKind::Cauchy, &s, &[1.0], &t, &[0.0]).unwrap().abs(), 0.0);
}

#[test]
fn rank_one_norms() {
    let tol = DEFAULT_TOL;
    let s = Weighted::from(&Measure1D::line(&[(0.0, 1.0)]).unwrap());
    let t = Weighted::from(&Measure2D::half_plane(&[(0.0, 1.0, 1.0)]).unwrap());
    assert_abs_diff_eq!(operator_norm(&KernelKind::Riesz, &s, &t, tol).unwrap().norm, 1.0, epsilon = 1e-12);
    let s = Weighted::from(&Measure1D::line(&[(0.5, 1.0)]).unwrap());
    let t = Weighted::from(&Measure2D::half_plane(&[(0.5, 0.5, 1.0)]).unwrap());
    assert_abs_diff_eq!(operator_norm(&KernelKind::Riesz, &s, &t, tol).unwrap().norm, 2.0, epsilon = 1e-12);
    assert_abs_diff_eq!(operator_norm(&KernelKind::Cauchy, &s, &t, tol).unwrap().norm, 2.0, epsilon = 1e-12);
}

fn random_pair(rng: &mut ChaCha8Rng, n: usize, m: usize) -> (Weighted, Weighted) {
    let s = Measure1D::line(&(0..n).map(|_| (rng.gen_range(0.0..1.0), rng.gen_range(0.1..1.0))).collect::<Vec<_>>())
        .unwrap();
    let t = Measure2D::half_plane(
        &(0..m).map(|_| (rng.gen_range(0.0..1.0), rng.gen_range(0.01..0.5), rng.gen_range(0.1..1.0))).collect::<Vec<_>>(),
    )
    .unwrap();
    (Weighted::from(&s), Weighted::from(&t))
}

fn svd_norm(m: &Matrix) -> f64 {
    DMatrix::from_row_slice(m.rows, m.cols, &m.data).singular_values().max()
}

fn transpose(m: &Matrix) -> Matrix {
    Matrix::from_fn(m.cols, m.rows, |i, j| m.get(j, i))
}

#[test]
fn norm_agrees_with_dense_svd() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for kind in [KernelKind::Riesz, KernelKind::Cauchy, KernelKind::TTau, KernelKind::RieszTruncated { alpha: 0.05, beta: 0.3 }] {
        for _ in 0..10 {
            let n = rng.gen_range(1..20);
            let m = rng.gen_range(1..20);
            let (s, t) = random_pair(&mut rng, n, m);
            let mat = weighted_matrix(&kind, &s, &t).unwrap();
            let want = svd_norm(&mat);
            let got = operator_norm(&kind, &s, &t, 1e-12).unwrap().norm;
            assert!((got - want).abs() <= 1e-8 * want.max(1e-300), "{kind:?}: {got} vs {want}");
            let dual = largest_singular_value(&transpose(&mat), 1e-12).unwrap().norm;
            assert!((dual - want).abs() <= 1e-8 * want.max(1e-300));
        }
    }
}

#[test]
fn doubling_tau_scales_norm_by_sqrt2() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (s, t) = random_pair(&mut rng, 12, 15);
    let t2 = Weighted { points: t.points.clone(), masses: t.masses.iter().map(|m| 2.0 * m).collect() };
    let a = operator_norm(&KernelKind::Cauchy, &s, &t, 1e-12).unwrap().norm;
    let b = operator_norm(&KernelKind::Cauchy, &s, &t2, 1e-12).unwrap().norm;
    assert!((b / a - 2f64.sqrt()).abs() < 1e-8);
}

#[test]
fn adding_atoms_never_decreases_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let (s, t) = random_pair(&mut rng, 16, 16);
        let small_s = Weighted { points: s.points[..8].to_vec(), masses: s.masses[..8].to_vec() };
        let small_t = Weighted { points: t.points[..8].to_vec(), masses: t.masses[..8].to_vec() };
        let big = operator_norm(&KernelKind::Cauchy, &s, &t, 1e-12).unwrap().norm;
        let small = operator_norm(&KernelKind::Cauchy, &small_s, &small_t, 1e-12).unwrap().norm;
        assert!(small <= big * (1.0 + 1e-9));
    }
}

#[test]
fn truncated_kernel_profile() {
    let (alpha, beta) = (0.1, 0.4);
    let kind = KernelKind::RieszTruncated { alpha, beta };
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..1000 {
        let rho = rng.gen_range(0.0..1.0f64);
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let x = [rho * phi.cos(), rho * phi.sin()];
        let v = vector(kind.eval(x, [0.0, 0.0]).unwrap());
        if rho > alpha && rho < beta {
            assert_eq!(v, vector(KernelKind::Riesz.eval(x, [0.0, 0.0]).unwrap()));
        }
        if rho <= alpha / 2.0 || rho >= 2.0 * beta {
            assert_eq!(v, [0.0, 0.0]);
        }
        // size bound
        assert!(v[0].hypot(v[1]) <= (1.0 + 1e-12) / rho);
    }
    // C¹ joins
    for &knot in &[alpha / 2.0, alpha, beta, 2.0 * beta] {
        let h = 1e-7;
        let (l, r) = (ramp(knot - h, alpha, beta), ramp(knot + h, alpha, beta));
        assert!((l - r).abs() < 1e-6);
        let dl = (ramp(knot - h, alpha, beta) - ramp(knot - 2.0 * h, alpha, beta)) / h;
        let dr = (ramp(knot + 2.0 * h, alpha, beta) - ramp(knot + h, alpha, beta)) / h;
        assert!((dl - dr).abs() < 1e-3 / knot);
    }
    assert!(KernelKind::RieszTruncated { alpha: 0.5, beta: 0.1 }.validate().is_err());
}

proptest! {
    #[test]
    fn riesz_gradient_bound(x0 in -5.0..5.0f64, x1 in 0.01..5.0f64, t in -5.0..5.0f64) {
        let h = 1e-5;
        let k = |p: [f64; 2]| vector(KernelKind::Riesz.eval(p, [t, 0.0]).unwrap());
        let d = [x0 - t, x1];
        let d2 = d[0] * d[0] + d[1] * d[1];
        prop_assume!(d2.sqrt() > 1e-3);
        // exact Jacobian of d/|d|²
        let exact = [
            [(d[1] * d[1] - d[0] * d[0]) / (d2 * d2), -2.0 * d[0] * d[1] / (d2 * d2)],
            [-2.0 * d[0] * d[1] / (d2 * d2), (d[0] * d[0] - d[1] * d[1]) / (d2 * d2)],
        ];
        let mut frob = 0.0;
        for j in 0..2 {
            let mut p = [x0, x1];
            let mut m = [x0, x1];
            p[j] += h * d2.sqrt();
            m[j] -= h * d2.sqrt();
            let (kp, km) = (k(p), k(m));
            for i in 0..2 {
                let fd = (kp[i] - km[i]) / (2.0 * h * d2.sqrt());
                prop_assert!((fd - exact[i][j]).abs() <= 1e-3 / d2);
                frob += fd * fd;
            }
        }
        prop_assert!(frob.sqrt() <= 4.0 / d2);
    }

    #[test]
    fn bilinear_matches_apply(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, t) = random_pair(&mut rng, 10, 12);
        let f: Vec<f64> = (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g: Vec<f64> = (0..12).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for kind in [KernelKind::Riesz, KernelKind::Cauchy, KernelKind::THat] {
            let b = bilinear_form(&kind, &s, &f, &t, &g).unwrap().components();
            let tf = apply(&kind, &s, &f, &t.points).unwrap();
            let mut want = vec![0.0; b.len()];
            for ((v, &m), &w) in tf.iter().zip(&t.masses).zip(&g) {
                for (c, x) in v.components().into_iter().enumerate() {
                    want[c] += x * m * w;
                }
            }
            for (a, b) in b.iter().zip(&want) {
                prop_assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
            }
        }
    }
}
