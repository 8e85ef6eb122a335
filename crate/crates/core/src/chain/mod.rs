//! Periodic chain of coupled oscillators as a lattice scalar field.
//!
//! `H = ½ Σ_n (p_n²/m + γ̃(q_n − q_{n−1})² + γ q_n²)` with `q_{-1} ≡ q_{N-1}`.
//! Plane waves `e^{ikna}` on the grid `k_j = 2πj/(Na)` diagonalize it with
//! `ω(k)² = γ/m + 4(γ̃/m) sin²(ka/2)`.

mod fock;
mod integrate;
mod modes;

pub use fock::{mode_commutator_check, ModeCommutatorReport, MODE_DIMENSION_CAP};
pub use integrate::{
    chain_relax, integrate_chain, spectral_dispersion, ModePeak, ModeRate, RelaxReport,
    SpectralReport, Trajectory,
};
pub use modes::{normal_modes, rescale_modes, sample_thermal_chain, FreeMode, ModeSet};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, parameter, Result};

/// Chain constants: `N` sites of mass `m`, on-site stiffness `γ`, coupling
/// `γ̃` and spacing `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    sites: usize,
    mass: f64,
    gamma: f64,
    gamma_c: f64,
    spacing: f64,
}

impl ChainParams {
    pub fn new(sites: usize, mass: f64, gamma: f64, gamma_c: f64, spacing: f64) -> Result<Self> {
        if sites < 2 || !sites.is_power_of_two() {
            return parameter(format!(
                "site count must be a power of two >= 2, got {sites}"
            ));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return parameter(format!("mass must be > 0, got {mass}"));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return parameter(format!("lattice spacing must be > 0, got {spacing}"));
        }
        if !(gamma.is_finite() && gamma >= 0.0 && gamma_c.is_finite() && gamma_c >= 0.0) {
            return parameter("stiffnesses must be finite and >= 0");
        }
        if gamma == 0.0 && gamma_c == 0.0 {
            return parameter("on-site and coupling stiffness cannot both vanish");
        }
        Ok(ChainParams {
            sites,
            mass,
            gamma,
            gamma_c,
            spacing,
        })
    }

    /// Continuum scaling `a²γ̃/m = 1`, `γ/m = M²`.
    pub fn continuum(sites: usize, spacing: f64, field_mass: f64, mass: f64) -> Result<Self> {
        if !(field_mass.is_finite() && field_mass >= 0.0) {
            return parameter(format!("field mass must be >= 0, got {field_mass}"));
        }
        Self::new(
            sites,
            mass,
            mass * field_mass * field_mass,
            mass / (spacing * spacing),
            spacing,
        )
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn gamma_c(&self) -> f64 {
        self.gamma_c
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Zone edge `Δ = π/a`.
    pub fn zone_edge(&self) -> f64 {
        PI / self.spacing
    }

    fn omega_sq(&self, k: f64) -> f64 {
        let s = (0.5 * k * self.spacing).sin();
        self.gamma / self.mass + 4.0 * self.gamma_c / self.mass * s * s
    }

    /// Wavenumber of mode `j` in FFT order, folded into `(−Δ, Δ]`.
    pub fn mode_k(&self, j: usize) -> f64 {
        let n = self.sites as i64;
        let j = j as i64;
        let signed = if j > n / 2 { j - n } else { j };
        2.0 * PI * signed as f64 / (n as f64 * self.spacing)
    }

    /// `ω(k_j)` without the zone check.
    pub fn mode_omega(&self, j: usize) -> f64 {
        self.omega_sq(self.mode_k(j)).sqrt()
    }

    pub fn omega0(&self) -> f64 {
        (self.gamma / self.mass).sqrt()
    }

    /// `ω(Δ)`, the largest mode frequency.
    pub fn omega_max(&self) -> f64 {
        ((self.gamma + 4.0 * self.gamma_c) / self.mass).sqrt()
    }
}

/// `ω(k) = √(γ/m + 4(γ̃/m) sin²(πk/2Δ))` for `|k| ≤ Δ`.
pub fn dispersion(k: f64, params: &ChainParams) -> Result<f64> {
    let edge = params.zone_edge();
    if !k.is_finite() || k.abs() > edge * (1.0 + 1e-14) {
        return domain(format!("wavenumber {k} outside the zone |k| <= {edge}"));
    }
    Ok(params.omega_sq(k).sqrt())
}

/// Field mass `M` of the continuum limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumParams {
    pub field_mass: f64,
}

/// `|ω(k)² − (k² + M²)|` at fixed physical `k`, for a chain obeying
/// `a²γ̃/m = 1`. The lattice error is `k⁴a²/12` to leading order.
pub fn continuum_error(k_phys: f64, params: &ChainParams) -> Result<f64> {
    let scale = params.spacing * params.spacing * params.gamma_c / params.mass;
    if (scale - 1.0).abs() > 1e-12 {
        return domain(format!(
            "continuum scaling a^2 gamma_c / m = 1 violated: {scale}"
        ));
    }
    let m2 = params.gamma / params.mass;
    let w = dispersion(k_phys, params)?;
    Ok((w * w - (k_phys * k_phys + m2)).abs())
}

impl ContinuumParams {
    pub fn of(params: &ChainParams) -> Self {
        ContinuumParams {
            field_mass: params.omega0(),
        }
    }
}

/// Displacements and momenta of every site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub time: f64,
}

impl ChainState {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() {
            return domain("q and p have different lengths");
        }
        if q.iter().chain(&p).any(|v| !v.is_finite()) {
            return domain("chain state has non-finite entries");
        }
        Ok(ChainState { q, p, time: 0.0 })
    }

    pub fn zero(params: &ChainParams) -> Self {
        ChainState {
            q: vec![0.0; params.sites],
            p: vec![0.0; params.sites],
            time: 0.0,
        }
    }

    pub(crate) fn check(&self, params: &ChainParams) -> Result<()> {
        if self.q.len() != params.sites || self.p.len() != params.sites {
            return domain(format!(
                "state has {} sites, chain has {}",
                self.q.len(),
                params.sites
            ));
        }
        Ok(())
    }
}

/// `Kq`, the negative of the force.
pub(crate) fn stiffness_apply(q: &[f64], params: &ChainParams, out: &mut [f64]) {
    let n = q.len();
    for i in 0..n {
        let l = q[(i + n - 1) % n];
        let r = q[(i + 1) % n];
        out[i] = params.gamma * q[i] + params.gamma_c * (2.0 * q[i] - l - r);
    }
}

/// `½ Σ (p_n²/m + γ̃(q_n − q_{n−1})² + γ q_n²)`, periodic.
pub fn chain_energy(state: &ChainState, params: &ChainParams) -> Result<f64> {
    state.check(params)?;
    let n = state.q.len();
    let mut e = 0.0;
    for i in 0..n {
        let d = state.q[i] - state.q[(i + n - 1) % n];
        e += state.p[i] * state.p[i] / params.mass
            + params.gamma_c * d * d
            + params.gamma * state.q[i] * state.q[i];
    }
    Ok(0.5 * e)
}
