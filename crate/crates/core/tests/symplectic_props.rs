use fockbath::stats::log_log_slope;
use fockbath::symplectic::{
    hamilton_step, jacobian_bracket, poisson_bracket, to_normal_coordinates, Basis, Exact,
    OscillatorParams, PhasePoint, PhasePolynomial, Var,
};
use proptest::prelude::*;

fn term(pairs: usize, max_deg: u32) -> impl Strategy<Value = (Vec<u32>, Exact)> {
    (
        prop::collection::vec(0..=max_deg, 2 * pairs),
        -3i64..=3,
        -3i64..=3,
        any::<bool>(),
    )
        .prop_filter_map("degree too high", move |(mut e, re, im, surd)| {
            // spread the degree budget over the slots
            let mut budget = max_deg;
            for x in e.iter_mut() {
                *x = (*x).min(budget);
                budget -= *x;
            }
            let mut c = Exact::gaussian(re, im);
            if surd {
                c = c * Exact::inv_sqrt2();
            }
            Some((e, c))
        })
}

fn poly(pairs: usize, max_deg: u32, basis: Basis) -> impl Strategy<Value = PhasePolynomial> {
    prop::collection::vec(term(pairs, max_deg), 1..5)
        .prop_map(move |ts| PhasePolynomial::from_terms(pairs, basis, ts).unwrap())
}

fn basis() -> impl Strategy<Value = Basis> {
    prop_oneof![Just(Basis::Canonical), Just(Basis::Normal)]
}

fn triple(
    max_deg: u32,
) -> impl Strategy<Value = (PhasePolynomial, PhasePolynomial, PhasePolynomial)> {
    (1usize..=2, basis()).prop_flat_map(move |(n, b)| {
        (
            poly(n, max_deg, b),
            poly(n, max_deg, b),
            poly(n, max_deg, b),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bracket_is_antisymmetric((f, g, _) in triple(4)) {
        let fg = poisson_bracket(&f, &g).unwrap();
        let gf = poisson_bracket(&g, &f).unwrap();
        prop_assert!((&fg + &gf).is_zero());
    }

    #[test]
    fn bracket_obeys_leibniz((f, g, h) in triple(4)) {
        let lhs = poisson_bracket(&f.mul(&g).unwrap(), &h).unwrap();
        let rhs = &f.mul(&poisson_bracket(&g, &h).unwrap()).unwrap()
            + &poisson_bracket(&f, &h).unwrap().mul(&g).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_obeys_jacobi((f, g, h) in triple(3)) {
        let b = |x: &PhasePolynomial, y: &PhasePolynomial| poisson_bracket(x, y).unwrap();
        let sum = &(&b(&f, &b(&g, &h)) + &b(&g, &b(&h, &f))) + &b(&h, &b(&f, &g));
        prop_assert!(sum.is_zero());
    }

    #[test]
    fn normal_transform_is_homomorphism((f, g, _) in (1usize..=2).prop_flat_map(|n| {
        (poly(n, 4, Basis::Canonical), poly(n, 4, Basis::Canonical), Just(()))
    })) {
        let lhs = to_normal_coordinates(&f.mul(&g).unwrap()).unwrap();
        let rhs = to_normal_coordinates(&f).unwrap().mul(&to_normal_coordinates(&g).unwrap()).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        prop_assert_eq!(lhs.to_canonical().unwrap(), f.mul(&g).unwrap());
    }

    #[test]
    fn bracket_agrees_across_bases((f, g, _) in (1usize..=2).prop_flat_map(|n| {
        (poly(n, 3, Basis::Canonical), poly(n, 3, Basis::Canonical), Just(()))
    })) {
        let canonical = poisson_bracket(&f, &g).unwrap();
        let normal = poisson_bracket(&f.to_normal().unwrap(), &g.to_normal().unwrap()).unwrap();
        prop_assert_eq!(normal.to_canonical().unwrap(), canonical);
    }
}

#[test]
fn normal_pair_bracket_is_i() {
    for pairs in 1..=3 {
        for k in 0..pairs {
            let z = PhasePolynomial::z_in_canonical(pairs, k).unwrap();
            let zb = PhasePolynomial::zbar_in_canonical(pairs, k).unwrap();
            let j = jacobian_bracket(&zb, &z, (Var::Q(k), Var::P(k))).unwrap();
            assert_eq!(
                j,
                PhasePolynomial::constant(pairs, Basis::Canonical, Exact::i())
            );
        }
    }
}

#[test]
fn leapfrog_energy_error_is_second_order() {
    let params = OscillatorParams::new(1.3).unwrap();
    let x0 = PhasePoint::new(0.8, -0.4);
    let e0 = params.energy(x0);
    let steps = [0.2, 0.1, 0.05, 0.025, 0.0125];
    let errs: Vec<f64> = steps
        .iter()
        .map(|&dt| {
            let n = (params.period() / dt).ceil() as usize;
            let mut x = x0;
            let mut worst: f64 = 0.0;
            for _ in 0..n {
                x = hamilton_step(x, &params, dt, 0.0);
                worst = worst.max((params.energy(x) - e0).abs());
            }
            worst
        })
        .collect();
    let slope = log_log_slope(&steps, &errs);
    assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
}
