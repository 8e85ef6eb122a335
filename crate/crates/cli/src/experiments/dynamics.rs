//! Oscillator dynamics experiments: evolve, damp, ensemble.

use std::f64::consts::{PI, SQRT_2};

use clap::{Args, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use fockbath::bargmann::{coherent_vector, CoherentParam, Ordering};
use fockbath::dynamics::{
    damped_solution, damping_fidelity, ensemble_evolve, evolve_damped, evolve_exact,
    fit_envelope_rate, profile_of, schrodinger_evolve, transport_solve, DampingParams,
    EnsembleSpec, FrictionTarget, TransportScheme,
};
use fockbath::symplectic::{hamilton_step, OscillatorParams, PhasePoint};
use fockbath::Result;

use super::{parse_count, time_grid};
use crate::report::{Check, Outcome, Table};

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Spectral,
    Upwind,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvolveArgs {
    #[arg(long, default_value_t = 1.3)]
    pub omega: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, default_value_t = 40, value_parser = parse_count)]
    pub truncation: usize,
    /// Coherent parameter of the initial state.
    #[arg(long, default_value_t = 0.8, allow_negative_numbers = true)]
    pub re: f64,
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub im: f64,
    /// Circle `|z| = radius` on which profiles are compared.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 512, value_parser = parse_count)]
    pub grid: usize,
    #[arg(long, default_value_t = 51, value_parser = parse_count)]
    pub times: usize,
    /// Final time; defaults to `10/omega`.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, value_enum, default_value_t = Scheme::Spectral)]
    pub scheme: Scheme,
    /// Step of the upwind scheme.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Largest accepted L2 distance between transported and evolved profiles.
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
}

pub fn evolve(a: &EvolveArgs) -> Result<Outcome> {
    let mut out = Outcome::new(
        "classical transport (d/dt + omega d/dphi) f = 0 equals normal-ordered Schrodinger evolution; symmetric ordering adds the phase exp(-i omega t / 2)",
    );
    let params = OscillatorParams::new(a.omega)?;
    let f = coherent_vector(
        CoherentParam::new(a.re, a.im),
        a.truncation,
        a.hbar,
        fockbath::bargmann::DEFAULT_TAIL_TOLERANCE,
    )?
    .vector
    .normalized()?;
    let scheme = match a.scheme {
        Scheme::Spectral => TransportScheme::Spectral,
        Scheme::Upwind => TransportScheme::Upwind { dt: a.dt },
    };
    let t_max = a.t_max.unwrap_or(10.0 / a.omega);
    let start = profile_of(&f, a.radius, a.grid, 0.0)?;
    let mut table = Table::new(
        "profiles",
        &["time", "l2_distance", "phase_mismatch", "norm_drift"],
    );
    let (mut worst, mut worst_phase, mut worst_norm): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for t in time_grid(a.times, t_max) {
        let moved = transport_solve(&start, t, &params, scheme)?;
        let normal = schrodinger_evolve(&f, t, Ordering::Normal, &params)?;
        let symmetric = schrodinger_evolve(&f, t, Ordering::Symmetric, &params)?;
        let d = moved.l2_distance(&profile_of(&normal, a.radius, a.grid, t)?)?;
        let rotated = normal.scale(Complex64::from_polar(1.0, -0.5 * a.omega * t));
        let phase = symmetric.sub(&rotated)?.norm();
        let nd = (evolve_exact(&f, t, &params).norm() - f.norm()).abs();
        worst = worst.max(d);
        worst_phase = worst_phase.max(phase);
        worst_norm = worst_norm.max(nd);
        table.push(&[t, d, phase, nd]);
    }
    out.check(Check::new(
        "max L2 distance transport vs Schrodinger",
        worst,
        0.0,
        a.tolerance,
    ));
    out.check(Check::new(
        "symmetric minus phase-rotated normal evolution",
        worst_phase,
        0.0,
        1e-12,
    ));
    out.check(Check::new(
        "unitarity of exact evolution",
        worst_norm,
        0.0,
        1e-12,
    ));
    out.table(table);
    Ok(out)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DampArgs {
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Friction coefficient; defaults to `0.01 omega`.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    /// Run length in units of the relaxation time `2/alpha`.
    #[arg(long, default_value_t = 20.0)]
    pub relaxation_times: f64,
    /// Run length used when `alpha = 0`.
    #[arg(long, default_value_t = 100.0)]
    pub undamped_duration: f64,
    #[arg(long, default_value_t = 10, value_parser = parse_count)]
    pub stride: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub q0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub p0: f64,
    #[arg(long, default_value_t = 30, value_parser = parse_count)]
    pub truncation: usize,
}

pub fn damp(a: &DampArgs) -> Result<Outcome> {
    let mut out = Outcome::new(
        "damped oscillator q = c1 exp(-i(omega - i alpha/2)t) + c2 exp(i(omega + i alpha/2)t): envelope decays at alpha/2",
    );
    let params = OscillatorParams::new(a.omega)?;
    let alpha = a.alpha.unwrap_or(0.01 * a.omega);
    let damping = DampingParams::new(alpha)?;
    let duration = if alpha > 0.0 {
        a.relaxation_times * damping.relaxation_time()
    } else {
        a.undamped_duration
    };
    let start = PhasePoint::new(a.q0, a.p0);
    let fit = fit_envelope_rate(start, &params, &damping, duration, a.dt, a.stride)?;
    let oracle = 0.5 * alpha;
    out.check(Check::new(
        "fitted envelope rate equals alpha/2",
        fit.rate,
        oracle,
        (0.01 * oracle).max(1e-6),
    ));

    let mut envelope = Table::new(
        "envelope",
        &["time", "radius", "closed_form_q", "integrator_q"],
    );
    let steps = (duration / a.dt).round() as usize;
    let mut x = start;
    let mut shadow = params.shadow_energy(x, a.dt);
    let s0 = shadow;
    let mut rises = 0usize;
    let mut drift: f64 = 0.0;
    for n in 0..=steps {
        if n > 0 {
            x = hamilton_step(x, &params, a.dt, alpha);
            let s = params.shadow_energy(x, a.dt);
            if s > shadow {
                rises += 1;
            }
            shadow = s;
            drift = drift.max((s - s0).abs() / s0.abs().max(f64::MIN_POSITIVE));
        }
        if n % a.stride == 0 {
            let t = n as f64 * a.dt;
            let exact = damped_solution(a.q0, a.omega * a.p0, &params, &damping, t)?;
            envelope.push(&[t, x.norm(), exact.point.q, x.q]);
        }
    }
    if alpha > 0.0 {
        out.check(Check::new(
            "shadow energy rises under friction",
            rises as f64,
            0.0,
            0.0,
        ));
    } else {
        out.check(Check::new(
            "undamped shadow energy relative drift",
            drift,
            0.0,
            1e-12,
        ));
    }

    let f = coherent_vector(
        CoherentParam::new(0.6, 0.2),
        a.truncation,
        1.0,
        fockbath::bargmann::DEFAULT_TAIL_TOLERANCE,
    )?
    .vector;
    let times = time_grid(51, duration);
    let mut increases = 0usize;
    let mut prev: Vec<f64> = f.coeffs().iter().map(|c| c.norm()).collect();
    for &t in &times[1..] {
        let now: Vec<f64> = evolve_damped(&f, t, &params, &damping)
            .coeffs()
            .iter()
            .map(|c| c.norm())
            .collect();
        increases += now.iter().zip(&prev).filter(|(n, p)| n > p).count();
        prev = now;
    }
    out.check(Check::new(
        "Fock amplitudes that grow",
        increases as f64,
        0.0,
        0.0,
    ));
    let mut fidelity = Table::new("fidelity", &["time", "distance"]);
    for p in damping_fidelity(&f, &params, &damping, &times) {
        fidelity.push(&[p.time, p.distance]);
    }
    out.table(envelope);
    out.table(fidelity);
    Ok(out)
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Friction {
    /// Damp only the mean of the density.
    Coherent,
    /// Damp every particle.
    Particle,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EnsembleArgs {
    #[arg(long, default_value_t = 100_000, value_parser = parse_count)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub im: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 20, value_parser = parse_count)]
    pub times: usize,
    /// Final report time; defaults to one period.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 40, value_parser = parse_count)]
    pub truncation: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Friction::Coherent)]
    pub friction: Friction,
}

pub fn ensemble(a: &EnsembleArgs) -> Result<Outcome> {
    let mut out = Outcome::new(
        "particles drawn from |f_c|^2 dmu follow the classical flow; the tilted Gaussian is centred at hbar cbar, so <z>(t) = hbar cbar exp(-i omega t)",
    );
    let params = OscillatorParams::new(a.omega)?;
    let damping = DampingParams::new(a.alpha)?;
    let c = CoherentParam::new(a.re, a.im);
    let f = coherent_vector(
        c,
        a.truncation,
        a.hbar,
        fockbath::bargmann::DEFAULT_TAIL_TOLERANCE,
    )?
    .vector
    .normalized()?;
    let t_max = a.t_max.unwrap_or(2.0 * PI / a.omega);
    let spec = EnsembleSpec {
        samples: a.samples,
        times: time_grid(a.times, t_max),
        dt: a.dt,
        seed: a.seed,
        friction: match a.friction {
            Friction::Coherent => FrictionTarget::CoherentPart,
            Friction::Particle => FrictionTarget::WholeParticle,
        },
    };
    let run = ensemble_evolve(&f, &params, &damping, &spec)?;
    let m0 = c.value().conj() * a.hbar;
    let mut table = Table::new(
        "moments",
        &[
            "time",
            "mean_re",
            "mean_im",
            "mean_re_std_err",
            "mean_im_std_err",
            "oracle_re",
            "oracle_im",
            "abs2",
            "abs2_std_err",
        ],
    );
    for m in &run.moments {
        // closed-form damped flow of the centre, p = q' / omega
        let s = damped_solution(
            SQRT_2 * m0.re,
            a.omega * SQRT_2 * m0.im,
            &params,
            &damping,
            m.time,
        )?;
        let oracle = Complex64::new(s.point.q, s.point.p) / SQRT_2;
        let est = m.mean_z;
        out.check(Check::sigma(
            format!("Re <z>({:.4})", m.time),
            est.value.re,
            est.std_err_re,
            oracle.re,
            4.0,
        ));
        out.check(Check::sigma(
            format!("Im <z>({:.4})", m.time),
            est.value.im,
            est.std_err_im,
            oracle.im,
            4.0,
        ));
        // fluctuations keep their equilibrium size unless friction hits them
        let abs2_known = a.alpha == 0.0 || matches!(a.friction, Friction::Coherent);
        if abs2_known {
            out.check(Check::sigma(
                format!("<|z|^2>({:.4})", m.time),
                m.mean_abs2.value,
                m.mean_abs2.std_err,
                a.hbar + oracle.norm_sqr(),
                4.0,
            ));
        }
        table.push(&[
            m.time,
            est.value.re,
            est.value.im,
            est.std_err_re,
            est.std_err_im,
            oracle.re,
            oracle.im,
            m.mean_abs2.value,
            m.mean_abs2.std_err,
        ]);
    }
    out.table(table);
    Ok(out)
}
