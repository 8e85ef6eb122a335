//! Evolution of non-equilibrium oscillator states.
//!
//! A state is a holomorphic amplitude `f(z)`; the classical flow
//! `ż = -iωz` transports it as `f(z e^{-iωt})`, i.e. `c_n ↦ c_n e^{-iωnt}`.
//! On a circle `|z| = r` this is the advection `(∂_t + ω∂_φ) f = 0`.

mod ensemble;

pub use ensemble::{
    ensemble_evolve, fock_mean, sample_fock_density, EnsembleMoments, EnsembleRun, EnsembleSpec,
    EnsembleState, FrictionTarget,
};

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::bargmann::{basis_values, hamiltonian_matrix, FockVector, Ordering};
use crate::error::{domain, parameter, Result};
use crate::stats::linear_fit;
use crate::symplectic::{hamilton_step, OscillatorParams, PhasePoint};

/// `c_n ↦ c_n e^{-iωnt}`.
pub fn evolve_exact(f: &FockVector, t: f64, params: &OscillatorParams) -> FockVector {
    let w = params.omega();
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| c * Complex64::from_polar(1.0, -w * n as f64 * t))
        .collect();
    FockVector::new(coeffs, f.hbar()).expect("phases keep coefficients finite")
}

/// `f ↦ e^{-iĤt/ħ} f` with the diagonal Hamiltonian of the given ordering.
///
/// Normal ordering reproduces [`evolve_exact`]; symmetric ordering adds the
/// global phase `e^{-iωt/2}`, which is kept rather than divided out.
pub fn schrodinger_evolve(
    f: &FockVector,
    t: f64,
    ordering: Ordering,
    params: &OscillatorParams,
) -> Result<FockVector> {
    let hbar = f.hbar();
    let h = hamiltonian_matrix(ordering, params, hbar, f.truncation())?;
    let coeffs = f
        .coeffs()
        .iter()
        .zip(h.diagonal())
        .map(|(c, e)| c * Complex64::from_polar(1.0, -e.re * t / hbar))
        .collect();
    FockVector::new(coeffs, hbar)
}

/// Samples of `f` on the circle `|z| = radius` at `φ_j = 2πj/G`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularProfile {
    pub samples: Vec<Complex64>,
    pub radius: f64,
    pub time: f64,
}

impl AngularProfile {
    pub fn from_fn(grid: usize, radius: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        if grid < 4 {
            return parameter(format!("angular grid needs at least 4 points, got {grid}"));
        }
        let samples = (0..grid)
            .map(|j| f(2.0 * PI * j as f64 / grid as f64))
            .collect();
        Ok(AngularProfile {
            samples,
            radius,
            time: 0.0,
        })
    }

    /// Profile of a Fock amplitude on the circle of the given radius.
    pub fn from_fock(f: &FockVector, radius: f64, grid: usize) -> Result<Self> {
        Self::from_fn(grid, radius, |phi| {
            f.eval(Complex64::from_polar(radius, phi))
        })
    }

    pub fn grid(&self) -> usize {
        self.samples.len()
    }

    /// Root-mean-square distance `√(Σ|a_j − b_j|²/G)` on a shared grid.
    pub fn l2_distance(&self, other: &AngularProfile) -> Result<f64> {
        if self.grid() != other.grid() {
            return domain("profiles live on different grids");
        }
        let s: f64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((s / self.grid() as f64).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TransportScheme {
    /// Exact phase shift of every Fourier harmonic.
    Spectral,
    /// First-order upwind differences with time step `dt`.
    Upwind { dt: f64 },
}

/// Solves `(∂_t + ω∂_φ) f = 0` on the circle for a duration `t`.
pub fn transport_solve(
    profile: &AngularProfile,
    t: f64,
    params: &OscillatorParams,
    scheme: TransportScheme,
) -> Result<AngularProfile> {
    if !(t.is_finite() && t >= 0.0) {
        return parameter(format!("transport time must be finite and >= 0, got {t}"));
    }
    let g = profile.grid();
    let w = params.omega();
    let samples = match scheme {
        TransportScheme::Spectral => {
            let mut planner = FftPlanner::<f64>::new();
            let mut buf = profile.samples.clone();
            planner.plan_fft_forward(g).process(&mut buf);
            for (j, c) in buf.iter_mut().enumerate() {
                let k = if j < g.div_ceil(2) {
                    j as f64
                } else {
                    j as f64 - g as f64
                };
                *c *= Complex64::from_polar(1.0 / g as f64, -k * w * t);
            }
            planner.plan_fft_inverse(g).process(&mut buf);
            buf
        }
        TransportScheme::Upwind { dt } => {
            if !(dt.is_finite() && dt > 0.0) {
                return parameter(format!("upwind dt must be > 0, got {dt}"));
            }
            let dphi = 2.0 * PI / g as f64;
            let courant = w * dt / dphi;
            if courant > 1.0 {
                return parameter(format!("CFL violated: Courant number {courant} > 1"));
            }
            let steps = (t / dt - 1e-9).ceil().max(0.0) as usize;
            let mut f = profile.samples.clone();
            if steps > 0 {
                let nu = w * (t / steps as f64) / dphi;
                let mut next = f.clone();
                for _ in 0..steps {
                    for j in 0..g {
                        let left = f[(j + g - 1) % g];
                        next[j] = f[j] - (f[j] - left) * nu;
                    }
                    std::mem::swap(&mut f, &mut next);
                }
            }
            f
        }
    };
    Ok(AngularProfile {
        samples,
        radius: profile.radius,
        time: profile.time + t,
    })
}

/// Friction rate `α ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampingParams {
    alpha: f64,
}

impl DampingParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return parameter(format!("friction must be finite and >= 0, got {alpha}"));
        }
        Ok(DampingParams { alpha })
    }

    pub fn none() -> Self {
        DampingParams { alpha: 0.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `1/α`, infinite without friction.
    pub fn relaxation_time(&self) -> f64 {
        if self.alpha == 0.0 {
            f64::INFINITY
        } else {
            1.0 / self.alpha
        }
    }
}

/// Weakly damped trajectory value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampedState {
    /// `(q, p)` with `p = q̇/ω`.
    pub point: PhasePoint,
    pub velocity: f64,
    /// Oscillation envelope `2|c₁| e^{-αt/2}`.
    pub envelope: f64,
    /// Set when `α ≥ 0.1ω`, outside the weak-friction regime.
    pub outside_weak_damping: bool,
}

/// Evaluates `q(t) = c₁e^{-i(ω - iα/2)t} + c₂e^{i(ω + iα/2)t}` with
/// `c₁, c₂` fixed by `q(0) = q0`, `q̇(0) = v0`.
pub fn damped_solution(
    q0: f64,
    v0: f64,
    params: &OscillatorParams,
    damping: &DampingParams,
    t: f64,
) -> Result<DampedState> {
    let w = params.omega();
    if w <= 0.0 {
        return parameter("damped solution needs omega > 0");
    }
    let a = damping.alpha();
    let i = Complex64::i();
    // c1 + c2 = q0, c1 - c2 = i(v0 + αq0/2)/ω
    let diff = i * ((v0 + 0.5 * a * q0) / w);
    let c1 = (q0 + diff) * 0.5;
    let c2 = (Complex64::new(q0, 0.0) - diff) * 0.5;
    let s1 = -i * (w - i * (a / 2.0));
    let s2 = i * (w + i * (a / 2.0));
    let e1 = (s1 * t).exp();
    let e2 = (s2 * t).exp();
    let q = c1 * e1 + c2 * e2;
    let v = c1 * s1 * e1 + c2 * s2 * e2;
    Ok(DampedState {
        point: PhasePoint::new(q.re, v.re / w),
        velocity: v.re,
        envelope: 2.0 * c1.norm() * (-0.5 * a * t).exp(),
        outside_weak_damping: a >= 0.1 * w,
    })
}

/// Amplitude transported by the weakly damped flow `ż = -(iω + α/2) z`:
/// `c_n ↦ c_n e^{-(iω + α/2) n t}`.
pub fn evolve_damped(
    f: &FockVector,
    t: f64,
    params: &OscillatorParams,
    damping: &DampingParams,
) -> FockVector {
    let rate = Complex64::new(0.5 * damping.alpha(), params.omega());
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| c * (-rate * (n as f64 * t)).exp())
        .collect();
    FockVector::new(coeffs, f.hbar()).expect("decaying phases keep coefficients finite")
}

/// `‖f_damped(t) − f_ideal(t)‖` against undamped evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityPoint {
    pub time: f64,
    pub distance: f64,
}

pub fn damping_fidelity(
    f: &FockVector,
    params: &OscillatorParams,
    damping: &DampingParams,
    times: &[f64],
) -> Vec<FidelityPoint> {
    times
        .iter()
        .map(|&t| {
            let d = evolve_damped(f, t, params, damping)
                .sub(&evolve_exact(f, t, params))
                .expect("same space")
                .norm();
            FidelityPoint {
                time: t,
                distance: d,
            }
        })
        .collect()
}

/// Envelope decay fitted from a leapfrog trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeFit {
    /// Fitted decay rate of `|x(t)|`; the weak-friction oracle is `α/2`.
    pub rate: f64,
    pub times: Vec<f64>,
    pub radii: Vec<f64>,
}

/// Integrates the damped oscillator with [`hamilton_step`] and fits the
/// decay rate of `ln √(q² + p²)`.
pub fn fit_envelope_rate(
    start: PhasePoint,
    params: &OscillatorParams,
    damping: &DampingParams,
    duration: f64,
    dt: f64,
    stride: usize,
) -> Result<EnvelopeFit> {
    if !(dt > 0.0 && duration > 0.0) || stride == 0 {
        return parameter("envelope fit needs dt > 0, duration > 0, stride > 0");
    }
    let steps = (duration / dt).round() as usize;
    let mut x = start;
    let mut times = vec![0.0];
    let mut radii = vec![x.norm()];
    for n in 1..=steps {
        x = hamilton_step(x, params, dt, damping.alpha());
        if n % stride == 0 {
            times.push(n as f64 * dt);
            radii.push(x.norm());
        }
    }
    let logs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let (slope, _) = linear_fit(&times, &logs);
    Ok(EnvelopeFit {
        rate: -slope,
        times,
        radii,
    })
}

/// Values of `f` at grid points of a circle, via the Fock basis directly.
pub fn profile_of(f: &FockVector, radius: f64, grid: usize, time: f64) -> Result<AngularProfile> {
    let mut p = AngularProfile::from_fn(grid, radius, |phi| {
        let z = Complex64::from_polar(radius, phi);
        basis_values(f.truncation(), z, f.hbar())
            .iter()
            .zip(f.coeffs())
            .map(|(e, c)| e * c)
            .sum()
    })?;
    p.time = time;
    Ok(p)
}
