use defconn::topology::{
    chern_numbers, chern_numbers_complex_orientation, hitchin_thorpe_gate, twistor_degree, DSign,
    SurfaceData, TwistorSign,
};
use num_rational::Ratio;
use proptest::prelude::*;

#[test]
fn projective_three_space() {
    // Classical Chern numbers of CP^3: c1 = 4h, c2 = 6h^2, c3 = 4h^3.
    let (c1, c2, c3) = (4i64, 6i64, 4i64);
    let t = chern_numbers(2, 0, TwistorSign::Positive);
    assert_eq!(t.c1_cubed, c1 * c1 * c1);
    assert_eq!(t.c1_c2, c1 * c2);
    assert_eq!(t.c3, c3);
    assert_eq!(t.c2_omega, 12);
    assert_eq!(t.k_cubed, Ratio::from_integer(1));
}

#[test]
fn flag_manifold() {
    // Flag manifold F(1,2; 3) over CP^2 in the orientation with tau = -1:
    // c1^3 = 48, c1c2 = 24, c3 = 6.
    let t = chern_numbers(3, -1, TwistorSign::Positive);
    assert_eq!((t.c1_cubed, t.c1_c2, t.c3), (48, 24, 6));
}

#[test]
fn complex_hyperbolic_orientation_flip() {
    // Ball quotient with chi = 3 tau_complex.
    let t = chern_numbers_complex_orientation(3, 1);
    assert_eq!(t.tau, -1);
    assert_eq!((t.c1_cubed, t.c1_c2), (0, 0));
    assert_eq!(t.c2_omega, 0);
    assert_eq!(t.k_cubed, Ratio::new(3, 4));
}

#[test]
fn gate_examples() {
    assert!(hitchin_thorpe_gate(2, 0, DSign::Dpos).admissible);
    assert!(!hitchin_thorpe_gate(2, 0, DSign::Dneg).admissible);
    assert!(hitchin_thorpe_gate(0, -2, DSign::Dneg).admissible);
    assert!(!hitchin_thorpe_gate(0, 0, DSign::Dneg).admissible);
    assert!(!hitchin_thorpe_gate(2, -2, DSign::Dpos).admissible);
}

#[test]
fn adjunction_examples() {
    for n in 0..10 {
        let d = twistor_degree(&SurfaceData::sphere(-n));
        assert_eq!(d.degree, 2 - n);
        assert_eq!(d.adjunction_negative_ok, n >= 3);
    }
    let torus = twistor_degree(&SurfaceData::new(0, 0, 0).unwrap());
    assert_eq!(torus.degree, 0);
    assert!(!torus.adjunction_negative_ok && !torus.adjunction_positive_ok);
    let line = twistor_degree(&SurfaceData::sphere(1));
    assert_eq!(line.degree, 3);
    assert!(line.adjunction_positive_ok);
    let nodal = twistor_degree(&SurfaceData::new(2, 4, 1).unwrap());
    assert_eq!(nodal.degree, 4);
}

#[test]
fn invalid_surfaces() {
    assert!(SurfaceData::new(1, 0, 0).is_err());
    assert!(SurfaceData::new(4, 0, 0).is_err());
    assert!(SurfaceData::new(2, 0, -1).is_err());
}

proptest! {
    #[test]
    fn negative_branch_is_calabi_yau(chi in -1000i64..1000, tau in -1000i64..1000) {
        let t = chern_numbers(chi, tau, TwistorSign::Negative);
        prop_assert_eq!(t.c1_cubed, 0);
        prop_assert_eq!(t.c1_c2, 0);
        prop_assert_eq!(t.c3, 2 * chi);
    }

    #[test]
    fn positive_branch_matches_k_cubed(chi in -1000i64..1000, tau in -1000i64..1000) {
        let t = chern_numbers(chi, tau, TwistorSign::Positive);
        prop_assert_eq!(Ratio::from_integer(t.c1_cubed), t.k_cubed * 64);
        prop_assert_eq!(t.c1_c2 % 12, 0);
    }

    #[test]
    fn gate_is_monotone(chi in -100i64..100, tau in -100i64..100, dchi in 0i64..10, dtau in 0i64..10) {
        let lo = hitchin_thorpe_gate(chi, tau, DSign::Dpos).admissible;
        let hi = hitchin_thorpe_gate(chi + dchi, tau + dtau, DSign::Dpos).admissible;
        prop_assert!(!lo || hi);
    }

    #[test]
    fn degree_formula(k in -20i64..=1, si in -50i64..50, d in 0i64..20) {
        let euler = 2 * k;
        let deg = twistor_degree(&SurfaceData::new(euler, si, d).unwrap());
        prop_assert_eq!(deg.degree, euler + si - 2 * d);
        prop_assert_eq!(deg.adjunction_negative_ok, deg.degree < 0);
        prop_assert_eq!(deg.adjunction_positive_ok, deg.degree > 0);
    }
}
