//! End-to-end acceptance criteria. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fockbath::bargmann::{
    annihilation_matrix, coherent_vector, commutator, creation_matrix, gram_matrix,
    hamiltonian_matrix, quadrature_operators, CoherentParam, FockVector, InnerProductMethod,
    Ordering,
};
use fockbath::bath::{
    geometric_steps, gibbs_invariance_slope, gradient, partition_estimate,
    sphere_pushforward_check, BathParams, PartitionMethod, SphereParams, VariationGenerator,
};
use fockbath::chain::{
    continuum_error, integrate_chain, mode_commutator_check, sample_thermal_chain,
    spectral_dispersion, ChainParams,
};
use fockbath::dynamics::{
    ensemble_evolve, evolve_damped, evolve_exact, fit_envelope_rate, profile_of,
    schrodinger_evolve, transport_solve, DampingParams, EnsembleSpec, FrictionTarget,
    TransportScheme,
};
use fockbath::symplectic::{hamilton_step, OscillatorParams, PhasePoint, PhasePolynomial};
use fockbath::Result;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn within_time(limit: Option<Duration>, elapsed: Duration) -> bool {
    limit.is_none_or(|l| elapsed < l)
}

fn orthonormality() -> Result<Outcome> {
    let quad = gram_matrix(16, 1.0, InnerProductMethod::Quadrature)?;
    let dev = quad.max_deviation_from_identity();
    let mc = gram_matrix(
        16,
        1.0,
        InnerProductMethod::MonteCarlo {
            samples: 1_000_000,
            seed: 2024,
        },
    )?;
    let z = mc.max_z_score().unwrap_or(f64::INFINITY);
    outcome(
        dev <= 1e-10 && z <= 3.0,
        format!("quadrature deviation {dev:.2e}, Monte Carlo max {z:.2} SE"),
    )
}

fn commutators() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for n in 1..=64 {
        for hbar in [1.0, 0.5, 2.0] {
            let a = annihilation_matrix(hbar, n)?.matrix;
            let ad = creation_matrix(hbar, n)?.matrix;
            let c = commutator(&a, &ad);
            let (q, p) = quadrature_operators(hbar, n)?;
            let qp = commutator(&q.matrix, &p.matrix);
            for i in 0..n {
                for j in 0..n {
                    let d = if i == j { hbar } else { 0.0 };
                    worst = worst.max((c[(i, j)] - Complex64::new(d, 0.0)).norm());
                    worst = worst.max((qp[(i, j)] - Complex64::new(0.0, d)).norm());
                }
            }
        }
    }
    outcome(worst <= 1e-12, format!("max interior residual {worst:.2e}"))
}

fn ordering_gap() -> Result<Outcome> {
    let params = OscillatorParams::new(1.7)?;
    let hbar = 0.8;
    let n = 24;
    let hn = hamiltonian_matrix(Ordering::Normal, &params, hbar, n)?;
    let hs = hamiltonian_matrix(Ordering::Symmetric, &params, hbar, n)?;
    let gap = &hs.matrix - &hn.matrix;
    let half = 0.5 * hbar * params.omega();
    let mut worst: f64 = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            let d = if i == j { half } else { 0.0 };
            worst = worst.max((gap[(i, j)] - Complex64::new(d, 0.0)).norm());
        }
    }
    let f = coherent_vector(CoherentParam::new(0.9, -0.4), n, hbar, 1e-6)?
        .vector
        .normalized()?;
    let mut phase_err: f64 = 0.0;
    for k in 0..20 {
        let t = 0.37 * k as f64;
        let a = schrodinger_evolve(&f, t, Ordering::Normal, &params)?;
        let b = schrodinger_evolve(&f, t, Ordering::Symmetric, &params)?;
        let rotated = a.scale(Complex64::from_polar(1.0, -0.5 * params.omega() * t));
        phase_err = phase_err.max(b.sub(&rotated)?.norm());
    }
    outcome(
        worst <= 1e-12 && phase_err <= 1e-12,
        format!("gap deviation {worst:.2e}, phase mismatch {phase_err:.2e}"),
    )
}

fn transport() -> Result<Outcome> {
    let params = OscillatorParams::new(1.3)?;
    let f = coherent_vector(CoherentParam::new(0.8, 0.3), 40, 1.0, 1e-12)?
        .vector
        .add(&FockVector::basis(3, 40, 1.0)?)?
        .normalized()?;
    let grid = 512;
    let start = profile_of(&f, 1.0, grid, 0.0)?;
    let mut worst: f64 = 0.0;
    for k in 0..=50 {
        let t = 10.0 / params.omega() * k as f64 / 50.0;
        let moved = transport_solve(&start, t, &params, TransportScheme::Spectral)?;
        let quantum = schrodinger_evolve(&f, t, Ordering::Normal, &params)?;
        let target = profile_of(&quantum, 1.0, grid, t)?;
        worst = worst.max(moved.l2_distance(&target)?);
    }
    outcome(worst <= 1e-8, format!("max L2 distance {worst:.2e}"))
}

fn coherent_ensemble() -> Result<Outcome> {
    let params = OscillatorParams::new(1.0)?;
    let hbar = 1.0;
    let c = CoherentParam::new(0.5, 0.0);
    let f = coherent_vector(c, 40, hbar, 1e-14)?.vector.normalized()?;
    let times: Vec<f64> = (0..20).map(|k| k as f64 * 2.0 * PI / 19.0).collect();
    let spec = EnsembleSpec {
        samples: 100_000,
        times,
        dt: 0.01,
        seed: 77,
        friction: FrictionTarget::CoherentPart,
    };
    let run = ensemble_evolve(&f, &params, &DampingParams::none(), &spec)?;
    let mut worst: f64 = 0.0;
    let mut pass = run.moments.len() == 20;
    for m in &run.moments {
        let oracle = c.value().conj() * hbar * Complex64::from_polar(1.0, -params.omega() * m.time);
        let d = m.mean_z.value - oracle;
        worst = worst
            .max(d.re.abs() / m.mean_z.std_err_re)
            .max(d.im.abs() / m.mean_z.std_err_im);
        pass &= m.mean_z.within(oracle, 4.0);
    }
    outcome(pass, format!("max deviation {worst:.2} SE over 20 times"))
}

fn partition() -> Result<Outcome> {
    let (beta, w) = (0.8, 1.5);
    let h = PhasePolynomial::oscillator_hamiltonian(1, w)?;
    let oracle = 2.0 * PI / (beta * w);
    let analytic = partition_estimate(&h, beta, PartitionMethod::Analytic)?;
    let mc = partition_estimate(
        &h,
        beta,
        PartitionMethod::MonteCarlo {
            samples: 1_000_000,
            seed: 11,
            proposal_scale: 1.0,
        },
    )?;
    let rel = (mc.h - oracle).abs() / oracle;
    let exact = (analytic.h - oracle).abs() / oracle;
    outcome(
        rel <= 0.01 && exact <= 1e-12,
        format!("Monte Carlo relative error {rel:.2e}, analytic {exact:.2e}"),
    )
}

fn gibbs_variations() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let pairs = 2;
    let dim = 2 * pairs;
    let h = PhasePolynomial::oscillator_hamiltonian(pairs, 1.3)?;
    let steps = geometric_steps(1e-4, 1e-2, 9);
    let mut worst: f64 = 0.0;
    let mut slope_dev: f64 = 0.0;
    for _ in 0..100 {
        let a = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
        let generator = VariationGenerator::new(&a - a.transpose())?;
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        let g = gradient(&h, &x)?;
        let og = generator.apply(&g);
        let r: f64 = g.iter().zip(&og).map(|(a, b)| a * b).sum();
        worst = worst.max(r.abs());
        let t = gibbs_invariance_slope(&x, &h, &generator, &steps)?;
        slope_dev = slope_dev.max((t.slope - 2.0).abs());
    }
    outcome(
        worst <= 1e-12 && slope_dev <= 0.1,
        format!("max residual {worst:.2e}, max slope deviation {slope_dev:.3}"),
    )
}

fn damping() -> Result<Outcome> {
    let params = OscillatorParams::new(1.0)?;
    let alpha = 0.01 * params.omega();
    let damp = DampingParams::new(alpha)?;
    let fit = fit_envelope_rate(
        PhasePoint::new(1.0, 0.0),
        &params,
        &damp,
        20.0 * damp.relaxation_time(),
        0.01,
        10,
    )?;
    let rel = (fit.rate - 0.5 * alpha).abs() / (0.5 * alpha);

    // Fock amplitudes and the integrator's conserved energy both decrease
    let f = coherent_vector(CoherentParam::new(0.6, 0.2), 30, 1.0, 1e-12)?.vector;
    let mut monotone = true;
    let mut prev: Vec<f64> = f.coeffs().iter().map(|c| c.norm()).collect();
    for k in 1..50 {
        let g = evolve_damped(&f, k as f64, &params, &damp);
        let now: Vec<f64> = g.coeffs().iter().map(|c| c.norm()).collect();
        monotone &= now.iter().zip(&prev).all(|(a, b)| a <= b);
        prev = now;
    }
    let dt = 0.05;
    let mut x = PhasePoint::new(1.0, 0.0);
    let mut shadow = params.shadow_energy(x, dt);
    for _ in 0..5000 {
        x = hamilton_step(x, &params, dt, alpha);
        let s = params.shadow_energy(x, dt);
        monotone &= s <= shadow;
        shadow = s;
    }

    let mut y = PhasePoint::new(1.0, 0.0);
    let s0 = params.shadow_energy(y, dt);
    let mut drift: f64 = 0.0;
    for _ in 0..5000 {
        y = hamilton_step(y, &params, dt, 0.0);
        drift = drift.max((params.shadow_energy(y, dt) - s0).abs() / s0);
    }
    let undamped = evolve_exact(&f, 37.0, &params);
    let norm_drift = (undamped.norm() - f.norm()).abs();
    outcome(
        rel <= 0.01 && monotone && drift <= 1e-12 && norm_drift <= 1e-12,
        format!(
            "rate error {:.3}%, monotone {monotone}, undamped energy drift {drift:.1e}",
            100.0 * rel
        ),
    )
}

fn chain_spectrum() -> Result<Outcome> {
    let p = ChainParams::new(256, 1.0, 1.0, 1.0, 1.0)?;
    let s = sample_thermal_chain(&p, 1.0, 5)?;
    let duration = 200.0 * 2.0 * PI / p.omega0();
    let traj = integrate_chain(&s, &p, duration, 0.05, 0.0, 10)?;
    let r = spectral_dispersion(&traj)?;
    let tol = 2.0 * PI / duration;
    let err = r.max_error();
    outcome(
        r.unresolved() == 0 && err <= tol,
        format!(
            "max peak error {err:.2e} vs resolution {tol:.2e}, unresolved {}",
            r.unresolved()
        ),
    )
}

fn continuum() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for k in [0.5, 1.0, 2.0] {
        for mass in [0.0, 0.7] {
            let coarse = ChainParams::continuum(64, 0.1, mass, 1.0)?;
            let fine = ChainParams::continuum(128, 0.05, mass, 1.0)?;
            let ratio = continuum_error(k, &coarse)? / continuum_error(k, &fine)?;
            worst = worst.max((ratio - 4.0).abs() / 4.0);
        }
    }
    outcome(
        worst <= 0.2,
        format!("max ratio deviation {:.2}%", 100.0 * worst),
    )
}

fn mode_commutators() -> Result<Outcome> {
    let r = mode_commutator_check(3, 5, 0.7)?;
    let uniform = r.mode_hbar.iter().all(|h| *h == r.mode_hbar[0]);
    outcome(
        r.exact_zero && r.max_residual == 0.0 && uniform,
        format!(
            "dimension {}, max residual {}, exact {}",
            r.dimension, r.max_residual, r.exact_zero
        ),
    )
}

fn sphere() -> Result<Outcome> {
    let bath = BathParams::new(1.3, 0.9)?;
    let sphere = SphereParams::matching(&bath)?;
    let r = sphere_pushforward_check(&sphere, 100_000, 314)?;
    let h_err = (r.h_sphere - bath.planck()).abs() / bath.planck();
    outcome(
        r.ks_phi < r.ks_threshold && r.ks_abs2 < r.ks_threshold && h_err <= 1e-12,
        format!(
            "KS phase {:.4}, KS radius {:.4}, threshold {:.4}",
            r.ks_phi, r.ks_abs2, r.ks_threshold
        ),
    )
}

type Criterion = (&'static str, fn() -> Result<Outcome>, Option<Duration>);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (
            "orthonormal basis",
            orthonormality,
            Some(Duration::from_secs(10)),
        ),
        ("ladder commutators", commutators, None),
        ("ordering gap", ordering_gap, None),
        (
            "transport equals quantum flow",
            transport,
            Some(Duration::from_secs(5)),
        ),
        (
            "coherent ensemble",
            coherent_ensemble,
            Some(Duration::from_secs(30)),
        ),
        ("Planck constant from Gibbs", partition, None),
        ("Gibbs-preserving variations", gibbs_variations, None),
        ("damping", damping, None),
        (
            "chain dispersion spectrum",
            chain_spectrum,
            Some(Duration::from_secs(60)),
        ),
        ("continuum limit", continuum, None),
        ("mode commutators", mode_commutators, None),
        ("sphere pushforward", sphere, None),
    ];
    let mut failures = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && within_time(*limit, elapsed), o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let timing = match limit {
            Some(l) => format!("{:.2}s / {}s", elapsed.as_secs_f64(), l.as_secs()),
            None => format!("{:.2}s", elapsed.as_secs_f64()),
        };
        println!(
            "{} {:>2} {name}: {detail} [{timing}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1
        );
        if !pass {
            failures += 1;
        }
    }
    println!("{} of 12 criteria passed", 12 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
