//! Leapfrog integration of the chain, spectral frequency measurement and
//! relaxation runs.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::modes::normal_modes;
use super::{chain_energy, stiffness_apply, ChainParams, ChainState};
use crate::error::{parameter, Error, Result};
use crate::stats::linear_fit;

/// Strided snapshots of a chain trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub params: ChainParams,
    pub dt: f64,
    pub stride: usize,
    pub friction: f64,
    pub states: Vec<ChainState>,
    pub energies: Vec<f64>,
    /// Modified energy `H − (dt²/8m)|Kq|²`, conserved exactly by the
    /// undamped leapfrog and non-increasing with friction.
    pub shadow_energies: Vec<f64>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.time).collect()
    }

    /// True when the shadow energy never rises between snapshots beyond
    /// rounding.
    pub fn shadow_monotone(&self) -> bool {
        let scale = self.shadow_energies.first().copied().unwrap_or(0.0).abs();
        self.shadow_energies
            .windows(2)
            .all(|w| w[1] <= w[0] + 1e-12 * scale.max(f64::MIN_POSITIVE))
    }

    /// Largest `|E(t) − E(0)|/E(0)`.
    pub fn max_relative_energy_error(&self) -> f64 {
        let e0 = self.energies[0];
        if e0 == 0.0 {
            return self.energies.iter().fold(0.0, |a, e| a.max(e.abs()));
        }
        self.energies
            .iter()
            .fold(0.0, |a, e| a.max(((e - e0) / e0).abs()))
    }
}

fn shadow_energy(state: &ChainState, params: &ChainParams, dt: f64, kq: &mut [f64]) -> Result<f64> {
    stiffness_apply(&state.q, params, kq);
    let k2: f64 = kq.iter().map(|v| v * v).sum();
    Ok(chain_energy(state, params)? - dt * dt * k2 / (8.0 * params.mass()))
}

/// Integrates for `duration` with per-site friction `α`, keeping every
/// `stride`-th state. Each step is: friction half-step, kick, drift, kick,
/// friction half-step.
pub fn integrate_chain(
    state: &ChainState,
    params: &ChainParams,
    duration: f64,
    dt: f64,
    friction: f64,
    stride: usize,
) -> Result<Trajectory> {
    state.check(params)?;
    if !(dt.is_finite() && dt > 0.0) || stride == 0 {
        return parameter("integration needs dt > 0 and stride >= 1");
    }
    if !(duration.is_finite() && duration >= 0.0) {
        return parameter(format!("duration must be >= 0, got {duration}"));
    }
    if !(friction.is_finite() && friction >= 0.0) {
        return parameter(format!("friction must be >= 0, got {friction}"));
    }
    let bound = 2.0 / params.omega_max();
    if dt >= bound {
        return Err(Error::Instability(format!(
            "dt = {dt} at or above the stability bound 2/omega_max = {bound}"
        )));
    }
    let n = params.sites();
    let m = params.mass();
    let steps = (duration / dt).round() as usize;
    let decay = (-0.5 * friction * dt).exp();
    let half = 0.5 * dt;

    let mut q = state.q.clone();
    let mut p = state.p.clone();
    let mut kq = vec![0.0; n];
    let t0 = state.time;
    let e0 = chain_energy(state, params)?;
    let mut traj = Trajectory {
        params: *params,
        dt,
        stride,
        friction,
        states: vec![state.clone()],
        energies: vec![e0],
        shadow_energies: vec![shadow_energy(state, params, dt, &mut kq)?],
    };
    stiffness_apply(&q, params, &mut kq);
    for step in 1..=steps {
        for i in 0..n {
            p[i] = p[i] * decay - half * kq[i];
            q[i] += dt * p[i] / m;
        }
        stiffness_apply(&q, params, &mut kq);
        for i in 0..n {
            p[i] = (p[i] - half * kq[i]) * decay;
        }
        if step % stride == 0 {
            let s = ChainState {
                q: q.clone(),
                p: p.clone(),
                time: t0 + step as f64 * dt,
            };
            let e = chain_energy(&s, params)?;
            if !e.is_finite() || (friction == 0.0 && e0 > 0.0 && e > 10.0 * e0) {
                return Err(Error::Instability(format!(
                    "energy grew from {e0} to {e} by t = {}",
                    s.time
                )));
            }
            let mut scratch = vec![0.0; n];
            traj.shadow_energies
                .push(shadow_energy(&s, params, dt, &mut scratch)?);
            traj.energies.push(e);
            traj.states.push(s);
        }
    }
    Ok(traj)
}

/// Measured oscillation frequency of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModePeak {
    pub index: usize,
    pub k: f64,
    pub omega_theory: f64,
    /// `None` when the spectrum has no clear peak.
    pub omega_measured: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub peaks: Vec<ModePeak>,
    /// Bin width `2π/T`.
    pub resolution: f64,
    pub duration: f64,
}

impl SpectralReport {
    /// Largest `|measured − theory|` over resolved modes.
    pub fn max_error(&self) -> f64 {
        self.peaks
            .iter()
            .filter_map(|p| p.omega_measured.map(|w| (w - p.omega_theory).abs()))
            .fold(0.0, f64::max)
    }

    pub fn unresolved(&self) -> usize {
        self.peaks
            .iter()
            .filter(|p| p.omega_measured.is_none())
            .count()
    }
}

/// Peak-to-median ratio below which a spectrum counts as flat.
const PEAK_CONTRAST: f64 = 10.0;

/// Hann-windowed FFT in time of every mode amplitude with parabolic peak
/// interpolation. Snapshots must be evenly spaced.
pub fn spectral_dispersion(traj: &Trajectory) -> Result<SpectralReport> {
    let len = traj.states.len();
    if len < 8 {
        return parameter("spectral measurement needs at least 8 snapshots");
    }
    let spacing = traj.dt * traj.stride as f64;
    let times = traj.times();
    if times
        .windows(2)
        .any(|w| ((w[1] - w[0]) - spacing).abs() > 1e-9 * spacing)
    {
        return parameter("snapshots are not evenly spaced");
    }
    let params = &traj.params;
    let modes: Vec<Vec<Complex64>> = traj
        .states
        .iter()
        .map(|s| normal_modes(s, params).map(|m| m.amplitudes))
        .collect::<Result<_>>()?;
    let duration = len as f64 * spacing;
    let resolution = 2.0 * PI / duration;
    let fft = FftPlanner::new().plan_fft_forward(len);
    let window: Vec<f64> = (0..len)
        .map(|t| 0.5 - 0.5 * (2.0 * PI * t as f64 / (len - 1) as f64).cos())
        .collect();
    let mut peaks = Vec::with_capacity(params.sites());
    for j in 0..params.sites() {
        let omega_theory = params.mode_omega(j);
        let k = params.mode_k(j);
        if omega_theory == 0.0 {
            peaks.push(ModePeak {
                index: j,
                k,
                omega_theory,
                omega_measured: None,
            });
            continue;
        }
        // ȧ = −iωa, so the conjugate series peaks at +ω
        let mut buf: Vec<Complex64> = modes
            .iter()
            .zip(&window)
            .map(|(m, w)| m[j].conj() * w)
            .collect();
        fft.process(&mut buf);
        let mags: Vec<f64> = buf[..len / 2].iter().map(|c| c.norm()).collect();
        let (ipk, &ypk) = mags
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty spectrum");
        let mut sorted = mags.clone();
        sorted.sort_by(f64::total_cmp);
        let median = sorted[sorted.len() / 2];
        let resolved = ypk > 0.0 && ypk > PEAK_CONTRAST * median && ipk > 0 && ipk + 1 < mags.len();
        let omega_measured = resolved.then(|| {
            let (l, r) = (mags[ipk - 1], mags[ipk + 1]);
            let denom = l - 2.0 * ypk + r;
            let shift = if denom != 0.0 {
                0.5 * (l - r) / denom
            } else {
                0.0
            };
            (ipk as f64 + shift) * resolution
        });
        peaks.push(ModePeak {
            index: j,
            k,
            omega_theory,
            omega_measured,
        });
    }
    Ok(SpectralReport {
        peaks,
        resolution,
        duration,
    })
}

/// Fitted envelope decay of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeRate {
    pub index: usize,
    pub k: f64,
    pub rate: f64,
    pub initial_amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxReport {
    pub alpha: f64,
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    pub shadow_energies: Vec<f64>,
    /// Rates of modes carrying at least `1e-6` of the largest amplitude.
    pub mode_rates: Vec<ModeRate>,
    pub energy_ratio: f64,
    /// `e^{-αT}`.
    pub expected_energy_ratio: f64,
    pub monotone: bool,
}

/// Runs the chain with friction and fits `ln|a_j(t)|` of every excited
/// mode; the weak-friction oracle is rate `α/2`.
pub fn chain_relax(
    state: &ChainState,
    params: &ChainParams,
    alpha: f64,
    duration: f64,
    dt: f64,
    stride: usize,
) -> Result<RelaxReport> {
    let traj = integrate_chain(state, params, duration, dt, alpha, stride)?;
    let times = traj.times();
    let modes: Vec<Vec<Complex64>> = traj
        .states
        .iter()
        .map(|s| normal_modes(s, params).map(|m| m.amplitudes))
        .collect::<Result<_>>()?;
    let a0: Vec<f64> = modes[0].iter().map(|a| a.norm()).collect();
    let biggest = a0.iter().copied().fold(0.0, f64::max);
    let mut mode_rates = Vec::new();
    for (j, &amp) in a0.iter().enumerate() {
        if amp == 0.0 || amp < 1e-6 * biggest || params.mode_omega(j) == 0.0 {
            continue;
        }
        let logs: Vec<f64> = modes.iter().map(|m| m[j].norm().ln()).collect();
        let (slope, _) = linear_fit(&times, &logs);
        mode_rates.push(ModeRate {
            index: j,
            k: params.mode_k(j),
            rate: -slope,
            initial_amplitude: amp,
        });
    }
    let e0 = traj.energies[0];
    let e_end = *traj.energies.last().expect("at least one snapshot");
    let elapsed = times.last().expect("at least one snapshot") - times[0];
    Ok(RelaxReport {
        alpha,
        monotone: traj.shadow_monotone(),
        energy_ratio: if e0 > 0.0 { e_end / e0 } else { 1.0 },
        expected_energy_ratio: (-alpha * elapsed).exp(),
        times,
        energies: traj.energies,
        shadow_energies: traj.shadow_energies,
        mode_rates,
    })
}

#[cfg(test)]
mod tests {
    use super::super::sample_thermal_chain;
    use super::*;

    #[test]
    fn zero_state_stays_zero() {
        let p = ChainParams::new(8, 1.0, 1.0, 1.0, 1.0).unwrap();
        let t = integrate_chain(&ChainState::zero(&p), &p, 5.0, 0.1, 0.0, 5).unwrap();
        assert!(t
            .states
            .iter()
            .all(|s| s.q.iter().chain(&s.p).all(|v| *v == 0.0)));
    }

    #[test]
    fn two_site_antisymmetric_frequency() {
        let p = ChainParams::new(2, 1.0, 0.5, 0.8, 1.0).unwrap();
        let w = p.omega_max();
        let s = ChainState::new(vec![0.3, -0.3], vec![0.0, 0.0]).unwrap();
        let dt = 1e-3;
        let period = 2.0 * PI / w;
        let t = integrate_chain(&s, &p, period, dt, 0.0, 1).unwrap();
        let end = t.states.last().unwrap();
        // one period returns the state, up to the leapfrog phase error
        assert!((end.q[0] - 0.3).abs() < 1e-5, "{}", end.q[0]);
        assert!((end.q[0] + end.q[1]).abs() < 1e-14);
    }

    #[test]
    fn step_above_bound_is_rejected() {
        let p = ChainParams::new(8, 1.0, 1.0, 1.0, 1.0).unwrap();
        let dt = 2.0 / p.omega_max();
        assert!(matches!(
            integrate_chain(&ChainState::zero(&p), &p, 1.0, dt, 0.0, 1),
            Err(Error::Instability(_))
        ));
    }

    #[test]
    fn friction_drains_energy() {
        let p = ChainParams::new(16, 1.0, 1.0, 1.0, 1.0).unwrap();
        let s = sample_thermal_chain(&p, 1.0, 2).unwrap();
        let alpha = 0.2;
        let t = integrate_chain(&s, &p, 10.0 / alpha, 0.05, alpha, 10).unwrap();
        assert!(t.shadow_monotone());
        assert!(t.energies.last().unwrap() / t.energies[0] < 1e-3);
    }

    #[test]
    fn undamped_shadow_energy_is_conserved() {
        let p = ChainParams::new(16, 1.0, 0.6, 1.3, 1.0).unwrap();
        let s = sample_thermal_chain(&p, 1.0, 5).unwrap();
        let t = integrate_chain(&s, &p, 50.0, 0.1, 0.0, 10).unwrap();
        let s0 = t.shadow_energies[0];
        assert!(t
            .shadow_energies
            .iter()
            .all(|e| (e - s0).abs() < 1e-12 * s0));
    }

    #[test]
    fn flat_band_peaks() {
        let p = ChainParams::new(8, 1.0, 2.0, 0.0, 1.0).unwrap();
        let s = sample_thermal_chain(&p, 1.0, 1).unwrap();
        let w0 = p.omega0();
        let duration = 100.0 * 2.0 * PI / w0;
        let t = integrate_chain(&s, &p, duration, 0.01, 0.0, 10).unwrap();
        let r = spectral_dispersion(&t).unwrap();
        assert_eq!(r.unresolved(), 0);
        assert!(r.peaks.iter().all(|pk| pk.omega_theory == w0));
        assert!(
            r.max_error() < r.resolution,
            "{} vs {}",
            r.max_error(),
            r.resolution
        );
    }
}
