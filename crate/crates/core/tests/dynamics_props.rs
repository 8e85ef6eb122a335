use fockbath::bargmann::{coherent_vector, CoherentParam, FockVector, Ordering};
use fockbath::dynamics::{
    damped_solution, ensemble_evolve, evolve_damped, evolve_exact, fit_envelope_rate, profile_of,
    schrodinger_evolve, transport_solve, DampingParams, EnsembleSpec, FrictionTarget,
    TransportScheme,
};
use fockbath::symplectic::{hamilton_step, OscillatorParams, PhasePoint};
use num_complex::Complex64;
use proptest::prelude::*;

fn vector() -> impl Strategy<Value = FockVector> {
    (1usize..=16, 0.3f64..2.0).prop_flat_map(|(n, hbar)| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n + 1).prop_map(move |v| {
            FockVector::new(
                v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect(),
                hbar,
            )
            .unwrap()
        })
    })
}

fn close(a: &FockVector, b: &FockVector, tol: f64) -> bool {
    a.sub(b).unwrap().norm() <= tol * a.norm().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evolution_is_unitary(f in vector(), w in 0.1f64..4.0, t in -20.0f64..20.0) {
        let p = OscillatorParams::new(w).unwrap();
        let g = evolve_exact(&f, t, &p);
        prop_assert!((g.norm() - f.norm()).abs() <= 1e-12 * f.norm().max(1.0));
    }

    #[test]
    fn evolution_obeys_group_law(f in vector(), w in 0.1f64..4.0, s in -10.0f64..10.0, t in -10.0f64..10.0) {
        let p = OscillatorParams::new(w).unwrap();
        let two = evolve_exact(&evolve_exact(&f, s, &p), t, &p);
        prop_assert!(close(&two, &evolve_exact(&f, s + t, &p), 1e-12));
        let sym = |g: &FockVector, t| schrodinger_evolve(g, t, Ordering::Symmetric, &p).unwrap();
        prop_assert!(close(&sym(&sym(&f, s), t), &sym(&f, s + t), 1e-12));
    }

    #[test]
    fn orderings_differ_by_zero_point_phase(f in vector(), w in 0.1f64..4.0, t in 0.0f64..10.0) {
        let p = OscillatorParams::new(w).unwrap();
        let n = schrodinger_evolve(&f, t, Ordering::Normal, &p).unwrap();
        let s = schrodinger_evolve(&f, t, Ordering::Symmetric, &p).unwrap();
        prop_assert!(close(&n, &evolve_exact(&f, t, &p), 1e-12));
        let phase = Complex64::from_polar(1.0, -0.5 * w * t);
        prop_assert!(close(&s, &n.scale(phase), 1e-12));
    }

    #[test]
    fn transport_matches_quantum_evolution(f in vector(), w in 0.2f64..3.0, wt in 0.0f64..10.0, r in 0.3f64..1.5) {
        let p = OscillatorParams::new(w).unwrap();
        let t = wt / w;
        let start = profile_of(&f, r, 128, 0.0).unwrap();
        let moved = transport_solve(&start, t, &p, TransportScheme::Spectral).unwrap();
        let quantum = profile_of(&evolve_exact(&f, t, &p), r, 128, t).unwrap();
        let scale = start.l2_distance(&profile_of(&FockVector::zero(f.truncation(), f.hbar()).unwrap(), r, 128, 0.0).unwrap()).unwrap();
        prop_assert!(moved.l2_distance(&quantum).unwrap() <= 1e-8 * scale.max(1.0));
    }

    #[test]
    fn damped_amplitudes_decay(f in vector(), w in 0.2f64..3.0, a in 0.001f64..0.5, t in 0.0f64..20.0) {
        let p = OscillatorParams::new(w).unwrap();
        let d = DampingParams::new(a).unwrap();
        let g = evolve_damped(&f, t, &p, &d);
        for (n, (x, y)) in g.coeffs().iter().zip(f.coeffs()).enumerate() {
            let expected = (-0.5 * a * n as f64 * t).exp() * y.norm();
            prop_assert!((x.norm() - expected).abs() <= 1e-12 * y.norm().max(1e-300));
        }
    }

    #[test]
    fn damped_solution_matches_integrator(q0 in -2.0f64..2.0, v0 in -2.0f64..2.0, w in 0.5f64..2.0, ratio in 0.0f64..0.1) {
        let a = ratio * w;
        let p = OscillatorParams::new(w).unwrap();
        let d = DampingParams::new(a).unwrap();
        let t_end = 5.0;
        let dt = 1e-3;
        let mut x = PhasePoint::new(q0, v0 / w);
        for _ in 0..5000 {
            x = hamilton_step(x, &p, dt, a);
        }
        let exact = damped_solution(q0, v0, &p, &d, t_end).unwrap();
        prop_assert!(!exact.outside_weak_damping);
        // the closed form keeps ω where the true frequency is √(ω² − α²/4)
        let amp = q0.abs() + v0.abs() / w + 1e-3;
        let drift = 2.0 * (a * a / (8.0 * w) * t_end + a / w) * amp;
        prop_assert!((exact.point.q - x.q).abs() <= 1e-4 + drift);
    }
}

#[test]
fn envelope_rate_is_half_alpha() {
    for w in [0.5, 1.0, 2.0] {
        let p = OscillatorParams::new(w).unwrap();
        let d = DampingParams::new(0.01 * w).unwrap();
        let fit = fit_envelope_rate(
            PhasePoint::new(1.0, 0.0),
            &p,
            &d,
            20.0 * d.relaxation_time(),
            0.01 / w,
            10,
        )
        .unwrap();
        let oracle = 0.005 * w;
        assert!(
            (fit.rate - oracle).abs() <= 0.01 * oracle,
            "w={w}: {}",
            fit.rate
        );
    }
}

#[test]
fn coherent_ensemble_circles() {
    let p = OscillatorParams::new(1.3).unwrap();
    for (hbar, c, seed) in [
        (1.0, CoherentParam::new(0.5, 0.0), 1u64),
        (0.5, CoherentParam::new(0.4, -0.7), 2),
    ] {
        let f = coherent_vector(c, 40, hbar, 1e-14)
            .unwrap()
            .vector
            .normalized()
            .unwrap();
        let times: Vec<f64> = (0..8).map(|k| 0.7 * k as f64).collect();
        let spec = EnsembleSpec {
            samples: 20_000,
            times: times.clone(),
            dt: 0.01,
            seed,
            friction: FrictionTarget::CoherentPart,
        };
        let run = ensemble_evolve(&f, &p, &DampingParams::none(), &spec).unwrap();
        for m in &run.moments {
            let oracle = c.value().conj() * hbar * Complex64::from_polar(1.0, -1.3 * m.time);
            assert!(
                m.mean_z.within(oracle, 4.0),
                "t={}: {:?} vs {oracle}",
                m.time,
                m.mean_z
            );
            let abs2 = hbar * (1.0 + hbar * c.value().norm_sqr());
            assert!(m.mean_abs2.within(abs2, 4.0), "t={}", m.time);
        }
    }
}
