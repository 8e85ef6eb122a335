use serde::{Deserialize, Serialize};

use crate::error::{parameter, Result};

/// Point `(q, p)` of a single-pair phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

impl PhasePoint {
    pub fn new(q: f64, p: f64) -> Self {
        PhasePoint { q, p }
    }

    pub fn norm(&self) -> f64 {
        self.q.hypot(self.p)
    }
}

/// Harmonic oscillator `H = (a p² + b q²)/2` with `ω = √(ab)`.
///
/// In rescaled variables `a = b = ω`, giving `H = ω(p² + q²)/2`.
/// Built from a raw mass `m` and stiffness `γ`, `a = 1/m` and `b = γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    omega: f64,
    kinetic: f64,
    stiffness: f64,
}

impl OscillatorParams {
    /// Oscillator in rescaled variables. `omega = 0` is the frozen limit.
    pub fn new(omega: f64) -> Result<Self> {
        if !omega.is_finite() || omega < 0.0 {
            return parameter(format!("omega must be finite and >= 0, got {omega}"));
        }
        Ok(OscillatorParams {
            omega,
            kinetic: omega,
            stiffness: omega,
        })
    }

    /// Oscillator in physical variables; `gamma = 0` is a free particle.
    pub fn from_mass_stiffness(mass: f64, gamma: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return parameter(format!("mass must be finite and > 0, got {mass}"));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return parameter(format!("stiffness must be finite and >= 0, got {gamma}"));
        }
        Ok(OscillatorParams {
            omega: (gamma / mass).sqrt(),
            kinetic: 1.0 / mass,
            stiffness: gamma,
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega
    }

    pub fn energy(&self, x: PhasePoint) -> f64 {
        0.5 * (self.kinetic * x.p * x.p + self.stiffness * x.q * x.q)
    }

    /// Energy conserved exactly by the undamped kick-drift-kick map.
    pub fn shadow_energy(&self, x: PhasePoint, dt: f64) -> f64 {
        let force = self.stiffness * x.q;
        self.energy(x) - dt * dt * self.kinetic * force * force / 8.0
    }

    /// `a` in `H = (a p² + b q²)/2`.
    pub fn kinetic(&self) -> f64 {
        self.kinetic
    }

    /// `b` in `H = (a p² + b q²)/2`.
    pub fn stiffness(&self) -> f64 {
        self.stiffness
    }
}

/// One step of `q̇ = a p`, `ṗ = -b q - α p`.
///
/// Strang splitting: half-step momentum decay `e^{-α dt/2}`, an undamped
/// kick-drift-kick leapfrog step, then the second decay half-step. With
/// `friction = 0` the decay factor is exactly `1.0` and the step is the
/// plain symplectic leapfrog. Requires `dt > 0`.
pub fn hamilton_step(
    x: PhasePoint,
    params: &OscillatorParams,
    dt: f64,
    friction: f64,
) -> PhasePoint {
    debug_assert!(dt > 0.0, "dt must be positive");
    debug_assert!(friction >= 0.0, "friction must be non-negative");
    let decay = (-0.5 * friction * dt).exp();
    let half = 0.5 * dt;
    let mut p = x.p * decay;
    p -= half * params.stiffness * x.q;
    let q = x.q + dt * params.kinetic * p;
    p -= half * params.stiffness * q;
    p *= decay;
    PhasePoint { q, p }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_period_returns_to_start() {
        let params = OscillatorParams::new(2.5).unwrap();
        let dt = params.period() / 1024.0;
        let start = PhasePoint::new(1.0, 0.0);
        let mut x = start;
        for _ in 0..1024 {
            x = hamilton_step(x, &params, dt, 0.0);
        }
        assert!((x.q - start.q).hypot(x.p - start.p) < 1e-4);
    }

    #[test]
    fn free_particle_drifts_linearly() {
        let params = OscillatorParams::from_mass_stiffness(2.0, 0.0).unwrap();
        assert_eq!(params.omega(), 0.0);
        let mut x = PhasePoint::new(0.5, 3.0);
        for n in 1..=10 {
            x = hamilton_step(x, &params, 0.1, 0.0);
            assert_eq!(x.p, 3.0);
            assert!((x.q - (0.5 + 1.5 * 0.1 * n as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn friction_drives_to_rest() {
        let params = OscillatorParams::new(1.0).unwrap();
        let mut x = PhasePoint::new(1.0, 1.0);
        for _ in 0..200_000 {
            x = hamilton_step(x, &params, 0.01, 0.1);
        }
        assert!(x.norm() < 1e-40);
    }

    #[test]
    fn undamped_step_has_unit_jacobian() {
        let params = OscillatorParams::new(1.3).unwrap();
        let dt = 0.07;
        let a = hamilton_step(PhasePoint::new(1.0, 0.0), &params, dt, 0.0);
        let b = hamilton_step(PhasePoint::new(0.0, 1.0), &params, dt, 0.0);
        // linear map: columns are images of unit vectors
        let det = a.q * b.p - a.p * b.q;
        assert!((det - 1.0).abs() < 1e-14);
    }

    #[test]
    fn damped_step_contracts_area_exactly() {
        let params = OscillatorParams::new(1.0).unwrap();
        let (dt, alpha) = (0.05, 0.3);
        let a = hamilton_step(PhasePoint::new(1.0, 0.0), &params, dt, alpha);
        let b = hamilton_step(PhasePoint::new(0.0, 1.0), &params, dt, alpha);
        let det = a.q * b.p - a.p * b.q;
        assert!((det - (-alpha * dt).exp()).abs() < 1e-14);
    }

    #[test]
    fn shadow_energy_is_conserved() {
        let params = OscillatorParams::from_mass_stiffness(1.5, 4.0).unwrap();
        let dt = 0.1;
        let mut x = PhasePoint::new(0.3, -0.8);
        let s0 = params.shadow_energy(x, dt);
        for _ in 0..10_000 {
            x = hamilton_step(x, &params, dt, 0.0);
        }
        assert!((params.shadow_energy(x, dt) - s0).abs() < 1e-12);
        assert!((params.omega() - (4.0f64 / 1.5).sqrt()).abs() < 1e-15);
    }
}
