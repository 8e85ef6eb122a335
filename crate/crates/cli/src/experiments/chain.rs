//! Oscillator-chain experiments: chain-dispersion, continuum, rescale,
//! mode-commutator, relax.

use std::f64::consts::PI;

use clap::Args;
use serde::Serialize;

use fockbath::chain::{
    chain_energy, chain_relax, continuum_error, integrate_chain, mode_commutator_check,
    normal_modes, rescale_modes, sample_thermal_chain, spectral_dispersion, ChainParams,
};
use fockbath::{Error, Result};

use super::parse_count;
use crate::report::{cell, Check, Outcome, Table};

#[derive(Debug, Clone, Args, Serialize)]
pub struct ChainArgs {
    /// Number of sites (power of two).
    #[arg(long, default_value_t = 256, value_parser = parse_count)]
    pub sites: usize,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    /// On-site stiffness.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Nearest-neighbour coupling.
    #[arg(long, default_value_t = 1.0)]
    pub gamma_c: f64,
    #[arg(long, default_value_t = 1.0)]
    pub spacing: f64,
    /// Inverse temperature of the initial thermal state.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long)]
    pub seed: u64,
}

impl ChainArgs {
    fn params(&self) -> Result<ChainParams> {
        ChainParams::new(
            self.sites,
            self.mass,
            self.gamma,
            self.gamma_c,
            self.spacing,
        )
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DispersionArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Run length in periods of the slowest nonzero mode.
    #[arg(long, default_value_t = 200.0)]
    pub periods: f64,
    #[arg(long, default_value_t = 0.05)]
    pub dt: f64,
    #[arg(long, default_value_t = 10, value_parser = parse_count)]
    pub stride: usize,
}

pub fn dispersion(a: &DispersionArgs) -> Result<Outcome> {
    let mut out = Outcome::new(
        "plane waves on the chain oscillate at omega(k)^2 = gamma/m + 4 (gamma_c/m) sin^2(k a/2)",
    );
    let p = a.chain.params()?;
    // slowest nonzero frequency sets the run length
    let reference = (0..p.sites())
        .map(|j| p.mode_omega(j))
        .filter(|w| *w > 0.0)
        .fold(f64::INFINITY, f64::min);
    let duration = a.periods * 2.0 * PI / reference;
    let s = sample_thermal_chain(&p, a.chain.beta, a.chain.seed)?;
    let traj = integrate_chain(&s, &p, duration, a.dt, 0.0, a.stride)?;
    let r = spectral_dispersion(&traj)?;
    let tol = 2.0 * PI / duration;
    out.check(Check::new(
        "modes without a resolved peak",
        r.unresolved() as f64,
        0.0,
        0.0,
    ));
    out.check(Check::new(
        "max |omega_measured - omega(k)|",
        r.max_error(),
        0.0,
        tol,
    ));
    let mut table = Table::new("peaks", &["j", "k", "omega_theory", "omega_measured"]);
    for pk in &r.peaks {
        table.push(&[
            pk.index as f64,
            pk.k,
            pk.omega_theory,
            pk.omega_measured.unwrap_or(f64::NAN),
        ]);
    }
    out.table(table);
    Ok(out)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ContinuumArgs {
    /// Comma-separated physical wavenumbers.
    #[arg(long, default_value = "0.5,1,2", value_delimiter = ',')]
    pub k: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub field_mass: f64,
    /// Sites of the coarse chain; the fine one has twice as many.
    #[arg(long, default_value_t = 64, value_parser = parse_count)]
    pub sites: usize,
    /// Spacing of the coarse chain; the fine one has half.
    #[arg(long, default_value_t = 0.1)]
    pub spacing: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
}

pub fn continuum(a: &ContinuumArgs) -> Result<Outcome> {
    let mut out = Outcome::new(
        "with a^2 gamma_c/m = 1 the lattice dispersion tends to omega^2 = k^2 + M^2 with error k^4 a^2/12",
    );
    if a.k.is_empty() {
        return Err(Error::Parameter("need at least one wavenumber".into()));
    }
    let coarse = ChainParams::continuum(a.sites, a.spacing, a.field_mass, a.mass)?;
    let fine = ChainParams::continuum(2 * a.sites, 0.5 * a.spacing, a.field_mass, a.mass)?;
    let mut table = Table::new(
        "errors",
        &[
            "k",
            "error_coarse",
            "error_fine",
            "ratio",
            "leading_order_coarse",
        ],
    );
    for &k in &a.k {
        let e1 = continuum_error(k, &coarse)?;
        let e2 = continuum_error(k, &fine)?;
        let ratio = e1 / e2;
        out.check(Check::relative(
            format!("error ratio at k = {k} when a is halved"),
            ratio,
            4.0,
            0.2,
        ));
        table.push(&[k, e1, e2, ratio, k.powi(4) * a.spacing * a.spacing / 12.0]);
    }
    out.table(table);
    Ok(out)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RescaleArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
}

pub fn rescale(a: &RescaleArgs) -> Result<Outcome> {
    let mut out = Outcome::new(
        "a_j = (sqrt(m omega) Q + i P/sqrt(m omega))/sqrt 2 diagonalizes H = sum omega_j |a_j|^2; rescaled amplitudes give H = omega(0) sum |a~_j|^2",
    );
    let p = a.chain.params()?;
    let s = sample_thermal_chain(&p, a.chain.beta, a.chain.seed)?;
    let e = chain_energy(&s, &p)?;
    let modes = normal_modes(&s, &p)?;
    out.check(Check::relative(
        "sum omega_j |a_j|^2 = H",
        modes.energy(),
        e,
        1e-12,
    ));
    let back = modes.to_state()?;
    let round = back
        .q
        .iter()
        .zip(&s.q)
        .chain(back.p.iter().zip(&s.p))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    out.check(Check::new(
        "inverse transform round trip",
        round,
        0.0,
        1e-12,
    ));
    let scaled = rescale_modes(&modes)?;
    out.check(Check::relative(
        "omega(0) sum |a~_j|^2 = H",
        scaled.energy(),
        e,
        1e-12,
    ));
    let lambda = scaled.lambda.clone().unwrap_or_default();
    out.check(Check::new("lambda_0", lambda[0], 1.0, 0.0));
    let mut table = Table::new(
        "modes",
        &["j", "k", "omega", "lambda", "abs_a", "abs_a_rescaled"],
    );
    for (j, l) in lambda.iter().enumerate() {
        table.push(&[
            j as f64,
            modes.k[j],
            modes.omega[j],
            *l,
            modes.amplitudes[j].norm(),
            scaled.amplitudes[j].norm(),
        ]);
    }
    out.table(table);
    Ok(out)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModeCommutatorArgs {
    #[arg(long, default_value_t = 3, value_parser = parse_count)]
    pub modes: usize,
    /// Highest occupation kept per mode.
    #[arg(long, default_value_t = 5, value_parser = parse_count)]
    pub levels: usize,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
}

pub fn mode_commutator(a: &ModeCommutatorArgs) -> Result<Outcome> {
    let mut out = Outcome::new(
        "independent chain modes quantize as [a_j, a_l+] = hbar delta_jl with one common hbar",
    );
    let r = mode_commutator_check(a.modes, a.levels, a.hbar)?;
    out.check(Check::new("max residual", r.max_residual, 0.0, 0.0));
    out.check(Check::new(
        "residuals not cancelled exactly",
        if r.exact_zero { 0.0 } else { 1.0 },
        0.0,
        0.0,
    ));
    let spread = r
        .mode_hbar
        .iter()
        .map(|h| (h - a.hbar).abs())
        .fold(0.0, f64::max);
    out.check(Check::new("spread of per-mode hbar", spread, 0.0, 0.0));
    let mut table = Table::new("residuals", &["j", "l", "residual"]);
    for (j, row) in r.residuals.iter().enumerate() {
        for (l, v) in row.iter().enumerate() {
            table.push(&[j as f64, l as f64, *v]);
        }
    }
    out.table(table);
    Ok(out)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RelaxArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Run length; defaults to `10/alpha`, or 200 without friction.
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub dt: f64,
    #[arg(long, default_value_t = 10, value_parser = parse_count)]
    pub stride: usize,
}

pub fn relax(a: &RelaxArgs) -> Result<Outcome> {
    let mut out = Outcome::new(
        "friction on every site damps each mode envelope at alpha/2 and drains energy; without friction the leapfrog shadow energy is conserved",
    );
    let p = a.chain.params()?;
    let s = sample_thermal_chain(&p, a.chain.beta, a.chain.seed)?;
    let duration = a
        .duration
        .unwrap_or(if a.alpha > 0.0 { 10.0 / a.alpha } else { 200.0 });
    let r = chain_relax(&s, &p, a.alpha, duration, a.dt, a.stride)?;
    let s0 = r.shadow_energies[0];
    if a.alpha == 0.0 {
        let drift = r
            .shadow_energies
            .iter()
            .map(|e| ((e - s0) / s0).abs())
            .fold(0.0, f64::max);
        out.check(Check::new(
            "shadow energy relative drift",
            drift,
            0.0,
            1e-12,
        ));
    } else {
        out.check(Check::new(
            "shadow energy rises under friction",
            if r.monotone { 0.0 } else { 1.0 },
            0.0,
            0.0,
        ));
        let oracle = 0.5 * a.alpha;
        // E(t) carries an oscillating O(alpha/omega) correction to exp(-alpha t)
        let slowest = (0..p.sites())
            .map(|j| p.mode_omega(j))
            .filter(|w| *w > 0.0)
            .fold(f64::INFINITY, f64::min);
        let x = a.alpha / slowest;
        let worst = r
            .mode_rates
            .iter()
            .map(|m| m.rate)
            .max_by(|x, y| (x - oracle).abs().total_cmp(&(y - oracle).abs()))
            .unwrap_or(f64::NAN);
        out.check(Check::relative(
            "worst mode envelope rate = alpha/2",
            worst,
            oracle,
            0.01 + x * x,
        ));
        out.check(Check::relative(
            "energy ratio E(T)/E(0) = exp(-alpha T)",
            r.energy_ratio,
            r.expected_energy_ratio,
            1e-3 + 0.5 * x,
        ));
    }
    let mut series = Table::new("energy", &["time", "energy", "shadow_energy"]);
    for i in 0..r.times.len() {
        series.push(&[r.times[i], r.energies[i], r.shadow_energies[i]]);
    }
    let mut rates = Table::new("mode_rates", &["j", "k", "rate", "initial_amplitude"]);
    for m in &r.mode_rates {
        rates.push_cells(vec![
            m.index.to_string(),
            cell(m.k),
            cell(m.rate),
            cell(m.initial_amplitude),
        ]);
    }
    out.table(series);
    out.table(rates);
    Ok(out)
}
