use defconn::curvature::BIANCHI_TOL;
use defconn::linalg::{Mat3, Vec3};
use defconn::sampling::{random_bianchi_operator, random_rotation, stream_rng};
use defconn::sectional::sectional_value;
use defconn::verify::{trace_identity_error, trace_identity_suite};
use defconn::{CurvatureOperator, Error};
use nalgebra::{Matrix6, Vector6};
use proptest::prelude::*;

fn op(seed: u64, std: f64) -> CurvatureOperator {
    random_bianchi_operator(&mut stream_rng(seed, 7), std)
}

fn dist(x: &CurvatureOperator, y: &CurvatureOperator) -> f64 {
    (x.a() - y.a()).norm() + (x.b() - y.b()).norm() + (x.c() - y.c()).norm()
}

/// Curvature operator in the coordinate basis e01, e02, e03, e23, e31, e12.
fn coordinate_operator(r: &CurvatureOperator) -> Matrix6<f64> {
    let mut block = Matrix6::zeros();
    block.fixed_view_mut::<3, 3>(0, 0).copy_from(r.a());
    block.fixed_view_mut::<3, 3>(0, 3).copy_from(&r.b().transpose());
    block.fixed_view_mut::<3, 3>(3, 0).copy_from(r.b());
    block.fixed_view_mut::<3, 3>(3, 3).copy_from(r.c());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut p = Matrix6::zeros();
    for i in 0..3 {
        p[(i, i)] = h;
        p[(i, i + 3)] = h;
        p[(i + 3, i)] = h;
        p[(i + 3, i + 3)] = -h;
    }
    p.transpose() * block * p
}

fn wedge(e: &[f64; 4], f: &[f64; 4]) -> Vector6<f64> {
    let w = |i: usize, j: usize| e[i] * f[j] - e[j] * f[i];
    Vector6::new(w(0, 1), w(0, 2), w(0, 3), w(2, 3), w(3, 1), w(1, 2))
}

#[test]
fn bianchi_is_enforced() {
    let a = Mat3::identity();
    let c = Mat3::identity() * 2.0;
    assert!(matches!(
        CurvatureOperator::new(a, Mat3::zeros(), c, false),
        Err(Error::BianchiViolation { .. })
    ));
    assert!(CurvatureOperator::new(a, Mat3::zeros(), c, true).is_ok());
    let nudge = Mat3::identity() * (0.1 * BIANCHI_TOL);
    assert!(CurvatureOperator::new(a + nudge, Mat3::zeros(), a, false).is_ok());
    let mut bad = Mat3::identity();
    bad[(0, 1)] = f64::NAN;
    assert!(matches!(
        CurvatureOperator::new(bad, Mat3::zeros(), a, true),
        Err(Error::NonFinite(_))
    ));
}

#[test]
fn trace_identity_on_random_operators() {
    let rep = trace_identity_suite(1000, 11);
    assert_eq!(rep.samples, 1000);
    assert!(rep.max_abs_error < 1e-12, "{}", rep.max_abs_error);
}

#[test]
fn coordinate_diagonal_readback() {
    let k = [-0.5, -1.0, -1.5, 0.25, 2.0, -3.0];
    let r = CurvatureOperator::from_sectional_diagonal(k).unwrap();
    let m = coordinate_operator(&r);
    for i in 0..6 {
        assert!((m[(i, i)] - k[i]).abs() < 1e-15);
    }
    let axes = [Vec3::x(), Vec3::y(), Vec3::z()];
    for i in 0..3 {
        let lo = sectional_value(&r, &axes[i], &axes[i]).unwrap();
        let hi = sectional_value(&r, &axes[i], &-axes[i]).unwrap();
        assert!((lo - 2.0 * k[i]).abs() < 1e-14);
        assert!((hi - 2.0 * k[i + 3]).abs() < 1e-14);
    }
}

#[test]
fn ricci_spectrum_constructor() {
    let r = CurvatureOperator::from_ricci_spectrum([3.0, 1.0, 1.0, -1.0], Mat3::zeros(), Mat3::zeros()).unwrap();
    assert!((r.scalar_curvature() - 4.0).abs() < 1e-15);
    assert!((r.b() - Mat3::from_diagonal(&Vec3::new(1.0, 1.0, 0.0))).norm() < 1e-15);
    assert!((r.a() - Mat3::identity() / 3.0).norm() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn decomposition_round_trip(seed in any::<u64>(), std in 0.01f64..3.0) {
        let r = op(seed, std);
        let back = r.decompose().reassemble(false).unwrap();
        prop_assert!(dist(&r, &back) < 1e-12 * (1.0 + std));
        let p = r.decompose();
        prop_assert!(p.w_plus.trace().abs() < 1e-12 && p.w_minus.trace().abs() < 1e-12);
    }

    #[test]
    fn reversal_is_an_involution(seed in any::<u64>()) {
        let r = op(seed, 1.0);
        prop_assert_eq!(r.reverse_orientation().reverse_orientation(), r);
        prop_assert!((r.reverse_orientation().scalar_curvature() - r.scalar_curvature()).abs() < 1e-12);
        prop_assert!(trace_identity_error(&r) < 1e-12);
    }

    #[test]
    fn block_form_matches_plane_curvature(seed in any::<u64>()) {
        // Random orthonormal pair in R^4 by Gram-Schmidt; compare with the
        // coordinate-basis quadratic form on the wedge.
        let r = op(seed, 1.0);
        let mut rng = stream_rng(seed, 8);
        let g: [f64; 8] = std::array::from_fn(|_| rand_distr::Distribution::<f64>::sample(&rand_distr::StandardNormal, &mut rng));
        let mut e = [g[0], g[1], g[2], g[3]];
        let ne = e.iter().map(|x| x * x).sum::<f64>().sqrt();
        e.iter_mut().for_each(|x| *x /= ne);
        let mut f = [g[4], g[5], g[6], g[7]];
        let d: f64 = (0..4).map(|i| e[i] * f[i]).sum();
        (0..4).for_each(|i| f[i] -= d * e[i]);
        let nf = f.iter().map(|x| x * x).sum::<f64>().sqrt();
        f.iter_mut().for_each(|x| *x /= nf);
        let w = wedge(&e, &f);
        let k = (w.transpose() * coordinate_operator(&r) * w)[(0, 0)];
        let h = std::f64::consts::SQRT_2;
        let u = Vec3::new(w[0] + w[3], w[1] + w[4], w[2] + w[5]) / h;
        let v = Vec3::new(w[0] - w[3], w[1] - w[4], w[2] - w[5]) / h;
        let s = sectional_value(&r, &(u * h), &(v * h)).unwrap();
        prop_assert!((s - 2.0 * k).abs() < 1e-10 * (1.0 + k.abs()));
    }

    #[test]
    fn rotation_preserves_invariants(seed in any::<u64>()) {
        let r = op(seed, 1.0);
        let mut rng = stream_rng(seed, 9);
        let (p, q) = (random_rotation(&mut rng), random_rotation(&mut rng));
        let rr = r.rotated(&p, &q);
        prop_assert!(rr.validated().is_ok());
        let (x, y) = (r.decompose(), rr.decompose());
        prop_assert!((x.s - y.s).abs() < 1e-10);
        prop_assert!((x.w_plus.norm() - y.w_plus.norm()).abs() < 1e-10);
        prop_assert!((x.ric0.norm() - y.ric0.norm()).abs() < 1e-10);
    }

    #[test]
    fn diagonal_constructor_satisfies_bianchi(k in proptest::array::uniform6(-5.0f64..5.0)) {
        let r = CurvatureOperator::from_sectional_diagonal(k).unwrap();
        prop_assert!((r.a().trace() - r.c().trace()).abs() < 1e-14);
        let total: f64 = k.iter().sum();
        prop_assert!((r.scalar_curvature() - 2.0 * total).abs() < 1e-12);
    }
}
