//! Normal-mode transform of the periodic chain.
//!
//! `Q_j = N^{-1/2} Σ_n q_n e^{-2πijn/N}` (same for `P_j`), and
//! `a_j = (√(mω_j) Q_j + i P_j/√(mω_j))/√2`, so that `ȧ_j = −iω_j a_j` and
//! `H = Σ_j ω_j |a_j|²`. The `a_j` alone carry the reality constraint through
//! `Q_{−j} = Q̄_j`; a mode with `ω_j = 0` is kept as a free pair `(Q_0, P_0)`.

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

use super::{ChainParams, ChainState};
use crate::error::{domain, parameter, Result};
use crate::stats;

/// Centre-of-mass pair of a chain without on-site stiffness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeMode {
    pub q: f64,
    pub p: f64,
}

/// Mode amplitudes in FFT order (`j = 0..N`, wavenumbers from
/// [`ChainParams::mode_k`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSet {
    pub params: ChainParams,
    pub k: Vec<f64>,
    pub omega: Vec<f64>,
    /// `a_j`; zero at a free mode.
    pub amplitudes: Vec<Complex64>,
    pub free: Option<FreeMode>,
    /// `λ_j = ω_j/ω(0)` once rescaled.
    pub lambda: Option<Vec<f64>>,
    pub time: f64,
}

impl ModeSet {
    /// `Σ ω_j|a_j|² + P_0²/2m`, or `ω(0) Σ|ã_j|²` after rescaling.
    pub fn energy(&self) -> f64 {
        let free = self
            .free
            .map_or(0.0, |f| 0.5 * f.p * f.p / self.params.mass());
        let osc: f64 = match &self.lambda {
            None => self
                .omega
                .iter()
                .zip(&self.amplitudes)
                .map(|(w, a)| w * a.norm_sqr())
                .sum(),
            Some(_) => {
                self.params.omega0() * self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>()
            }
        };
        osc + free
    }

    /// Inverse transform back to site coordinates.
    pub fn to_state(&self) -> Result<ChainState> {
        let amps: Vec<Complex64> = match &self.lambda {
            None => self.amplitudes.clone(),
            Some(l) => self
                .amplitudes
                .iter()
                .zip(l)
                .map(|(a, l)| a / l.sqrt())
                .collect(),
        };
        let n = amps.len();
        let m = self.params.mass();
        let mut qh = vec![Complex64::new(0.0, 0.0); n];
        let mut ph = qh.clone();
        for j in 0..n {
            let w = self.omega[j];
            if w == 0.0 {
                let f = self.free.unwrap_or(FreeMode { q: 0.0, p: 0.0 });
                qh[j] = Complex64::new(f.q, 0.0);
                ph[j] = Complex64::new(f.p, 0.0);
                continue;
            }
            let mirror = amps[(n - j) % n].conj();
            let s = (m * w).sqrt();
            qh[j] = (amps[j] + mirror) / (SQRT_2 * s);
            ph[j] = (amps[j] - mirror) * Complex64::new(0.0, -s / SQRT_2);
        }
        let q = inverse_dft(qh);
        let p = inverse_dft(ph);
        let mut st = ChainState::new(q, p)?;
        st.time = self.time;
        Ok(st)
    }
}

fn forward_dft(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let s = 1.0 / (n as f64).sqrt();
    buf.iter().map(|c| c * s).collect()
}

fn inverse_dft(mut buf: Vec<Complex64>) -> Vec<f64> {
    let n = buf.len();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let s = 1.0 / (n as f64).sqrt();
    buf.iter().map(|c| c.re * s).collect()
}

pub(crate) fn from_qp_hat(
    params: &ChainParams,
    qh: &[Complex64],
    ph: &[Complex64],
    time: f64,
) -> ModeSet {
    let n = params.sites();
    let m = params.mass();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); n];
    let mut omega = vec![0.0; n];
    let mut free = None;
    for j in 0..n {
        let w = params.mode_omega(j);
        omega[j] = w;
        if w == 0.0 {
            free = Some(FreeMode {
                q: qh[j].re,
                p: ph[j].re,
            });
            continue;
        }
        let s = (m * w).sqrt();
        amplitudes[j] = (qh[j] * s + Complex64::i() * ph[j] / s) / SQRT_2;
    }
    ModeSet {
        params: *params,
        k: (0..n).map(|j| params.mode_k(j)).collect(),
        omega,
        amplitudes,
        free,
        lambda: None,
        time,
    }
}

/// Discrete Fourier transform of `(q, p)` combined into mode amplitudes.
pub fn normal_modes(state: &ChainState, params: &ChainParams) -> Result<ModeSet> {
    state.check(params)?;
    let qh = forward_dft(&state.q);
    let ph = forward_dft(&state.p);
    Ok(from_qp_hat(params, &qh, &ph, state.time))
}

/// `ã_j = √λ_j a_j` with `λ_j = ω_j/ω(0)`, so `H = ω(0) Σ|ã_j|²`.
pub fn rescale_modes(modes: &ModeSet) -> Result<ModeSet> {
    if modes.lambda.is_some() {
        return domain("modes are already rescaled");
    }
    let w0 = modes.params.omega0();
    if w0 == 0.0 {
        return domain("rescaling needs on-site stiffness gamma > 0");
    }
    let lambda: Vec<f64> = modes.omega.iter().map(|w| w / w0).collect();
    let mut out = modes.clone();
    out.amplitudes = modes
        .amplitudes
        .iter()
        .zip(&lambda)
        .map(|(a, l)| a * l.sqrt())
        .collect();
    out.lambda = Some(lambda);
    Ok(out)
}

/// Gibbs-distributed chain state at inverse temperature `β`, drawn mode by
/// mode: `⟨|Q_j|²⟩ = 1/(βmω_j²)`, `⟨|P_j|²⟩ = m/β`. A free mode gets only a
/// thermal momentum.
pub fn sample_thermal_chain(params: &ChainParams, beta: f64, seed: u64) -> Result<ChainState> {
    if !(beta.is_finite() && beta > 0.0) {
        return parameter(format!("beta must be > 0, got {beta}"));
    }
    let n = params.sites();
    let m = params.mass();
    let mut rng = stats::substream(seed, 0);
    let mut qh = vec![Complex64::new(0.0, 0.0); n];
    let mut ph = qh.clone();
    for j in 0..=n / 2 {
        let w = params.mode_omega(j);
        let var_q = if w == 0.0 {
            0.0
        } else {
            1.0 / (beta * m * w * w)
        };
        let var_p = m / beta;
        let self_conjugate = j == 0 || j == n / 2;
        let (q, p) = if self_conjugate {
            let g: f64 = StandardNormal.sample(&mut rng);
            let h: f64 = StandardNormal.sample(&mut rng);
            (
                Complex64::new(var_q.sqrt() * g, 0.0),
                Complex64::new(var_p.sqrt() * h, 0.0),
            )
        } else {
            (
                stats::complex_gaussian(&mut rng, 0.5 * var_q),
                stats::complex_gaussian(&mut rng, 0.5 * var_p),
            )
        };
        qh[j] = q;
        ph[j] = p;
        if !self_conjugate {
            qh[n - j] = q.conj();
            ph[n - j] = p.conj();
        }
    }
    ChainState::new(inverse_dft(qh), inverse_dft(ph))
}
