use fockbath::bargmann::CoherentParam;
use fockbath::bargmann::{inner_product, FockVector, InnerProductMethod};
use fockbath::bath::{
    geometric_steps, gibbs_inner_product, gibbs_invariance_slope, gradient, partition_estimate,
    sample_equilibrium, sphere_pushforward_check, tilt_center, tilt_measure, variation_split,
    z_power, BathParams, PartitionMethod, SphereParams, VariationGenerator,
};
use fockbath::symplectic::{Exact, PhasePolynomial};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn antisymmetric(dim: usize) -> impl Strategy<Value = VariationGenerator> {
    prop::collection::vec(-2.0f64..2.0, dim * dim).prop_map(move |v| {
        let a = DMatrix::from_vec(dim, dim, v);
        VariationGenerator::new(&a - a.transpose()).unwrap()
    })
}

/// Oscillators plus a small anharmonic `q₀⁴` term.
fn hamiltonian(pairs: usize, omega: f64, quartic: i64) -> PhasePolynomial {
    let h = PhasePolynomial::oscillator_hamiltonian(pairs, omega).unwrap();
    let q4 = PhasePolynomial::var(pairs, fockbath::symplectic::Var::Q(0))
        .unwrap()
        .pow(4)
        .unwrap()
        .scale(&Exact::from_ratio(quartic, 10));
    &h + &q4
}

fn setup() -> impl Strategy<Value = (PhasePolynomial, Vec<f64>, VariationGenerator, Vec<f64>)> {
    (1usize..=3, 0.2f64..3.0, 0i64..=3).prop_flat_map(|(n, w, k)| {
        (
            Just(hamiltonian(n, w, k)),
            prop::collection::vec(-2.0f64..2.0, 2 * n),
            antisymmetric(2 * n),
            prop::collection::vec(-1.0f64..1.0, 2 * n),
        )
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn antisymmetric_generators_preserve_energy((h, x, gen, _) in setup()) {
        let g = gradient(&h, &x).unwrap();
        let og = gen.apply(&g);
        let scale = dot(&g, &g) * gen.matrix().amax();
        prop_assert!(dot(&g, &og).abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn split_reconstructs_variation((h, x, gen, dx) in setup()) {
        let s = variation_split(&x, &h, &gen, &dx).unwrap();
        for (i, d) in dx.iter().enumerate() {
            prop_assert!((s.perp[i] + s.par[i] - d).abs() <= 1e-12);
        }
        let gnorm = dot(&s.gradient, &s.gradient).sqrt();
        prop_assert!(dot(&s.perp, &s.gradient).abs() <= 1e-12 * gnorm.max(1.0));
    }

    #[test]
    fn analytic_planck_constant(n in 1usize..=4, beta in 0.1f64..5.0, w in 0.1f64..5.0) {
        let h = PhasePolynomial::oscillator_hamiltonian(n, w).unwrap();
        let r = partition_estimate(&h, beta, PartitionMethod::Analytic).unwrap();
        prop_assert!((r.h * beta * w - 2.0 * PI).abs() <= 1e-12 * 2.0 * PI);
        prop_assert_eq!(r.std_err, 0.0);
    }

    #[test]
    fn gibbs_inner_product_is_bargmann(
        cf in prop::collection::vec((-2i64..=2, -2i64..=2), 1..6),
        cg in prop::collection::vec((-2i64..=2, -2i64..=2), 1..6),
        beta in 0.3f64..3.0,
        w in 0.3f64..3.0,
    ) {
        let bath = BathParams::new(beta, w).unwrap();
        let hbar = bath.hbar();
        let build = |c: &[(i64, i64)]| {
            let mut poly = PhasePolynomial::zero(1, fockbath::symplectic::Basis::Canonical);
            // z^n = √(n!ħ^n) e_n
            let mut fock = Vec::new();
            let mut norm = 1.0;
            for (n, &(re, im)) in c.iter().enumerate() {
                if n > 0 {
                    norm *= (n as f64 * hbar).sqrt();
                }
                poly = &poly + &z_power(n as u32).unwrap().scale(&Exact::gaussian(re, im));
                fock.push(Complex64::new(re as f64, im as f64) * norm);
            }
            (poly, fock)
        };
        let (pf, mut vf) = build(&cf);
        let (pg, mut vg) = build(&cg);
        let n = vf.len().max(vg.len());
        vf.resize(n, Complex64::new(0.0, 0.0));
        vg.resize(n, Complex64::new(0.0, 0.0));
        let ff = FockVector::new(vf, hbar).unwrap();
        let fg = FockVector::new(vg, hbar).unwrap();
        let via_gibbs = gibbs_inner_product(&pf, &pg, &bath).unwrap();
        let via_bargmann = inner_product(&ff, &fg, InnerProductMethod::Quadrature).unwrap().value;
        prop_assert!((via_gibbs - via_bargmann).norm() <= 1e-10 * via_bargmann.norm().max(1.0));
    }
}

#[test]
fn taylor_slope_is_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut next = || rng.random_range(-1.0..1.0);
    let steps = geometric_steps(1e-4, 1e-2, 9);
    for trial in 0..100 {
        let n = 1 + trial % 3;
        let h = hamiltonian(n, 0.5 + trial as f64 * 0.02, (trial % 4) as i64);
        let a = DMatrix::from_fn(2 * n, 2 * n, |_, _| next());
        let gen = VariationGenerator::new(&a - a.transpose()).unwrap();
        let x: Vec<f64> = (0..2 * n).map(|_| 1.5 * next()).collect();
        let t = gibbs_invariance_slope(&x, &h, &gen, &steps).unwrap();
        assert!(
            (t.slope - 2.0).abs() <= 0.1,
            "trial {trial}: slope {}",
            t.slope
        );
    }
}

#[test]
fn equilibrium_moments() {
    let bath = BathParams::new(0.7, 1.9).unwrap();
    let hbar = bath.hbar();
    let s = sample_equilibrium(&bath, 200_000, 5).unwrap();
    assert!(s.mean_z.within(Complex64::new(0.0, 0.0), 4.0));
    assert!(s.mean_abs2.within(hbar, 4.0));
    assert!(s.mean_abs4.within(2.0 * hbar * hbar, 4.0));
}

#[test]
fn tilted_measure_is_shifted_gibbs() {
    let bath = BathParams::new(1.2, 0.8).unwrap();
    let c = CoherentParam::new(0.6, -0.3);
    let s = tilt_measure(&bath, c, 200_000, 9).unwrap();
    assert!(s.mean.within(tilt_center(&bath, c), 4.0));
    let half = 0.5 * bath.hbar();
    for k in 0..2 {
        assert!((s.covariance[k][k] - half).abs() <= 4.0 * s.covariance_std_err[k]);
    }
}

#[test]
fn monte_carlo_planck_constant() {
    let h = PhasePolynomial::oscillator_hamiltonian(1, 1.4).unwrap();
    let beta = 0.9;
    let r = partition_estimate(
        &h,
        beta,
        PartitionMethod::MonteCarlo {
            samples: 400_000,
            seed: 3,
            proposal_scale: 1.2,
        },
    )
    .unwrap();
    let oracle = 2.0 * PI / (beta * 1.4);
    assert!(
        (r.h - oracle).abs() <= 3.0 * r.std_err,
        "{} vs {oracle}",
        r.h
    );
}

#[test]
fn sphere_pushforward_matches_gibbs() {
    for (beta, w, seed) in [(1.0, 1.0, 1u64), (0.4, 2.5, 2)] {
        let bath = BathParams::new(beta, w).unwrap();
        let sphere = SphereParams::matching(&bath).unwrap();
        let r = sphere_pushforward_check(&sphere, 50_000, seed).unwrap();
        assert!(
            r.ks_phi < r.ks_threshold && r.ks_abs2 < r.ks_threshold,
            "{r:?}"
        );
        assert!((r.h_sphere - bath.planck()).abs() <= 1e-12 * bath.planck());
    }
}
