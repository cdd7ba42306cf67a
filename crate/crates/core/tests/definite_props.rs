use defconn::definite::{
    bochner_condition, classify, d_operator, eigen_sum_dominance, ricci_operator_spectrum,
    ricci_positive_check, tame_pointwise, taming_margin, DSignature, Orientation, Sign, TamedStructure,
    Verdict, DEFAULT_GRID, DEFAULT_REFINE, DEFAULT_TOL,
};
use defconn::linalg::{fibonacci_sphere, sym_eigenvalues, Mat3, Vec3};
use defconn::sampling::{gaussian_matrix, random_bianchi_operator, random_rotation, stream_rng};
use defconn::verify::{eigen_sum_suite, ricci_positive_suite};
use defconn::CurvatureOperator;
use proptest::prelude::*;

fn op(seed: u64, std: f64) -> CurvatureOperator {
    random_bianchi_operator(&mut stream_rng(seed, 21), std)
}

#[test]
fn space_form_classification() {
    let s4 = classify(&CurvatureOperator::round(), DEFAULT_TOL);
    assert_eq!(s4.verdict, Verdict::Definite);
    assert_eq!(s4.d_signature, DSignature::Plus3);
    assert_eq!((s4.orientation, s4.sign), (Orientation::Same, Sign::Positive));
    let h4 = classify(&CurvatureOperator::hyperbolic(), DEFAULT_TOL);
    assert_eq!((h4.orientation, h4.sign), (Orientation::Same, Sign::Negative));
    assert!((h4.margin - 1.0).abs() < 1e-15);
}

#[test]
fn boundary_witness_is_flagged() {
    let c = classify(&CurvatureOperator::boundary_witness(), DEFAULT_TOL);
    assert!(c.boundary);
    assert_eq!(c.verdict, Verdict::Indefinite);
    assert!(c.margin.abs() < 1e-12);
}

#[test]
fn opposite_orientation_from_dominant_ricci() {
    // A = 0 and B invertible gives D = -B^T B.
    let b = Mat3::from_diagonal(&Vec3::new(1.0, 2.0, -0.5));
    let r = CurvatureOperator::new(Mat3::zeros(), b, Mat3::zeros(), false).unwrap();
    let c = classify(&r, DEFAULT_TOL);
    assert_eq!(c.d_signature, DSignature::Minus3);
    assert_eq!((c.orientation, c.sign), (Orientation::Opposite, Sign::Negative));
    let c = classify(&r.scaled(-1.0), DEFAULT_TOL);
    assert_eq!(c.sign, Sign::Positive);
}

#[test]
fn ricci_operator_examples() {
    assert_eq!(ricci_operator_spectrum([1.0; 4]), [1.0 - 4.0 / 6.0; 6]);
    let e = ricci_operator_spectrum([6.0, 0.0, 0.0, 0.0]);
    assert_eq!(e, [2.0, 2.0, 2.0, -1.0, -1.0, -1.0]);
    let r = CurvatureOperator::from_ricci_spectrum([3.0, 1.0, 1.0, -1.0], Mat3::zeros(), Mat3::zeros()).unwrap();
    let chk = ricci_positive_check([3.0, 1.0, 1.0, -1.0], &Mat3::zeros()).unwrap();
    let d = sym_eigenvalues(&d_operator(&r));
    assert!((d[0] - (1.0 / 9.0 - 1.0)).abs() < 1e-14);
    assert!(!chk.premises);
}

#[test]
fn bochner_and_pointwise_taming() {
    assert!(bochner_condition(&CurvatureOperator::round()));
    assert!(!bochner_condition(&CurvatureOperator::hyperbolic()));
    assert!(tame_pointwise(1.0, &Vec3::new(0.5, 0.5, 0.5)));
    assert!(!tame_pointwise(1.0, &Vec3::new(1.0, 0.0, 0.0)));
    assert!(tame_pointwise(-2.0, &Vec3::new(1.0, 1.0, 1.0)));
}

#[test]
fn taming_margin_of_space_forms() {
    let t = taming_margin(&CurvatureOperator::round(), DEFAULT_GRID, DEFAULT_REFINE, DEFAULT_TOL);
    assert!((t.margin - 1.0).abs() < 1e-12);
    assert_eq!(t.tamed_structure, TamedStructure::Jplus);
    let t = taming_margin(&CurvatureOperator::hyperbolic(), DEFAULT_GRID, DEFAULT_REFINE, DEFAULT_TOL);
    assert_eq!(t.tamed_structure, TamedStructure::Jminus);
}

#[test]
fn indefinite_a_is_untamed_yet_d_positive() {
    let a = Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
    let r = CurvatureOperator::new(a, Mat3::zeros(), Mat3::identity() / 3.0, false).unwrap();
    let t = taming_margin(&r, DEFAULT_GRID, DEFAULT_REFINE, DEFAULT_TOL);
    assert!(t.margin.abs() < 1e-9, "{}", t.margin);
    assert_eq!(t.tamed_structure, TamedStructure::None);
    // The minimizer lies on the null cone v1² + v2² = v3².
    let v = t.argmin_v;
    assert!((v[0] * v[0] + v[1] * v[1] - v[2] * v[2]).abs() < 1e-6);
    assert!(sym_eigenvalues(&d_operator(&r)).iter().all(|&x| x > 0.0));
}

#[test]
fn lemma_suites_have_no_counterexamples() {
    let e = eigen_sum_suite(2000, 3);
    assert_eq!((e.samples, e.counterexamples), (2000, 0));
    let r = ricci_positive_suite(2000, 3).unwrap();
    assert_eq!((r.samples, r.counterexamples), (2000, 0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn classification_is_frame_invariant(seed in any::<u64>(), std in 0.05f64..2.0) {
        let r = op(seed, std);
        let mut rng = stream_rng(seed, 22);
        let rr = r.rotated(&random_rotation(&mut rng), &random_rotation(&mut rng));
        let (c, cr) = (classify(&r, DEFAULT_TOL), classify(&rr, DEFAULT_TOL));
        for i in 0..3 {
            prop_assert!((c.d_eigenvalues[i] - cr.d_eigenvalues[i]).abs() < 1e-9 * (1.0 + c.d_eigenvalues[i].abs()));
        }
        if c.margin > 1e-6 {
            prop_assert_eq!((c.verdict, c.orientation, c.sign), (cr.verdict, cr.orientation, cr.sign));
        }
    }

    #[test]
    fn classification_under_scaling(seed in any::<u64>(), k in 0.1f64..10.0) {
        let r = op(seed, 1.0);
        let c = classify(&r, 0.0);
        let up = classify(&r.scaled(k), 0.0);
        let down = classify(&r.scaled(-k), 0.0);
        prop_assert_eq!(c.d_signature, up.d_signature);
        prop_assert_eq!(c.d_signature, down.d_signature);
        prop_assert_eq!(c.sign, up.sign);
        let flipped = match c.sign { Sign::Positive => Sign::Negative, Sign::Negative => Sign::Positive, s => s };
        prop_assert_eq!(down.sign, flipped);
    }

    #[test]
    fn d_form_is_norm_difference(seed in any::<u64>()) {
        let r = op(seed, 1.0);
        let d = d_operator(&r);
        let pts = fibonacci_sphere(1000);
        let mut worst = f64::INFINITY;
        for v in &pts {
            let q = v.dot(&(d * v));
            let diff = (r.a() * v).norm_squared() - (r.b() * v).norm_squared();
            prop_assert!((q - diff).abs() < 1e-10 * (1.0 + q.abs()));
            worst = worst.min(diff);
        }
        let lo = sym_eigenvalues(&d)[0];
        prop_assert!(worst >= lo - 1e-10);
        if lo > 0.0 {
            prop_assert!(pts.iter().all(|v| (r.a() * v).norm() > (r.b() * v).norm()));
        }
    }

    #[test]
    fn taming_implies_same_orientation(seed in any::<u64>()) {
        // Bias toward tamed operators: dominant A, small B.
        let mut rng = stream_rng(seed, 23);
        let base = random_bianchi_operator(&mut rng, 0.3);
        let b = gaussian_matrix(&mut rng, 0.15);
        let r = CurvatureOperator::new(*base.a(), b, *base.c(), false).unwrap();
        let t = taming_margin(&r, 24, DEFAULT_REFINE, DEFAULT_TOL);
        if t.margin > DEFAULT_TOL {
            let c = classify(&r, DEFAULT_TOL);
            prop_assert_eq!(c.verdict, Verdict::Definite);
            prop_assert_eq!(c.orientation, Orientation::Same);
            let ea = sym_eigenvalues(r.a());
            prop_assert!(ea[0] > 0.0 || ea[2] < 0.0);
            let expect = if ea[0] > 0.0 { TamedStructure::Jplus } else { TamedStructure::Jminus };
            prop_assert_eq!(t.tamed_structure, expect);
        }
    }

    #[test]
    fn taming_margin_is_an_upper_bound_of_the_minimum(seed in any::<u64>()) {
        let r = op(seed, 1.0);
        let t = taming_margin(&r, 16, DEFAULT_REFINE, DEFAULT_TOL);
        let v = Vec3::from(t.argmin_v);
        let at = v.dot(&(r.a() * v)).abs() - (r.b() * v).norm();
        prop_assert!((at - t.margin).abs() < 1e-12);
        let brute = fibonacci_sphere(40_000)
            .iter()
            .map(|v| v.dot(&(r.a() * v)).abs() - (r.b() * v).norm())
            .fold(f64::INFINITY, f64::min);
        prop_assert!(t.margin <= brute + 1e-12);
        prop_assert!(t.margin >= brute - 0.05);
    }

    #[test]
    fn eigen_sum_lemma(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 24);
        let a = gaussian_matrix(&mut rng, 1.0);
        let b = gaussian_matrix(&mut rng, 0.4);
        let (a, b) = ((a + a.transpose()) * 0.5, (b + b.transpose()) * 0.5);
        let e = eigen_sum_dominance(&a, &b);
        if e.holds_hypothesis {
            prop_assert!(e.sum_abs_a > e.sum_abs_b);
        }
    }
}
