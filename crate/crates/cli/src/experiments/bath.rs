//! Thermal-bath experiments: partition, variation, tilt, sphere.

use std::f64::consts::PI;

use clap::Args;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use fockbath::bargmann::CoherentParam;
use fockbath::bath::{
    geometric_steps, gibbs_invariance_slope, partition_estimate, sample_equilibrium, sphere_points,
    sphere_pushforward_check, tilt_center, tilt_measure, variation_split, BathParams,
    PartitionMethod, SphereParams, VariationGenerator,
};
use fockbath::symplectic::PhasePolynomial;
use fockbath::Result;

use super::{parse_count, require_seed};
use crate::report::{cell, Check, Outcome, Table};

#[derive(Debug, Clone, Args, Serialize)]
pub struct PartitionArgs {
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Number of identical oscillator pairs.
    #[arg(long, default_value_t = 1, value_parser = parse_count)]
    pub pairs: usize,
    /// Monte Carlo samples; 0 runs only the closed form.
    #[arg(long, default_value_t = 0, value_parser = parse_count)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Standard deviation of the Gaussian proposal per coordinate.
    #[arg(long, default_value_t = 1.0)]
    pub proposal_scale: f64,
}

pub fn partition(a: &PartitionArgs) -> Result<Outcome> {
    let mut out =
        Outcome::new("Z = integral of exp(-beta H) dq dp gives h = Z^(1/n) = 2 pi / (beta omega)");
    let h = PhasePolynomial::oscillator_hamiltonian(a.pairs, a.omega)?;
    let oracle = 2.0 * PI / (a.beta * a.omega);
    let analytic = partition_estimate(&h, a.beta, PartitionMethod::Analytic)?;
    out.check(Check::relative("closed-form h", analytic.h, oracle, 1e-12));
    let mut table = Table::new("estimates", &["method", "z", "z_std_err", "h", "h_std_err"]);
    table.push_cells(vec![
        "analytic".into(),
        cell(analytic.z),
        cell(analytic.z_std_err),
        cell(analytic.h),
        cell(analytic.std_err),
    ]);
    if a.samples > 0 {
        let seed = require_seed(a.seed, "Monte Carlo partition function")?;
        let mc = partition_estimate(
            &h,
            a.beta,
            PartitionMethod::MonteCarlo {
                samples: a.samples,
                seed,
                proposal_scale: a.proposal_scale,
            },
        )?;
        out.check(
            Check::relative("Monte Carlo h within 1%", mc.h, oracle, 0.01).with_std_err(mc.std_err),
        );
        out.check(Check::sigma(
            "Monte Carlo h within 3 SE of closed form",
            mc.h,
            mc.std_err,
            analytic.h,
            3.0,
        ));
        table.push_cells(vec![
            "monte_carlo".into(),
            cell(mc.z),
            cell(mc.z_std_err),
            cell(mc.h),
            cell(mc.std_err),
        ]);
    }
    out.table(table);
    Ok(out)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VariationArgs {
    #[arg(long, default_value_t = 2, value_parser = parse_count)]
    pub pairs: usize,
    #[arg(long, default_value_t = 1.3)]
    pub omega: f64,
    /// Random antisymmetric generators to test.
    #[arg(long, default_value_t = 100, value_parser = parse_count)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-4)]
    pub step_min: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub step_max: f64,
    #[arg(long, default_value_t = 9, value_parser = parse_count)]
    pub steps: usize,
}

pub fn variation(a: &VariationArgs) -> Result<Outcome> {
    let mut out = Outcome::new(
        "variations dx = Omega grad H with antisymmetric Omega keep H, hence the Gibbs weight, fixed to first order",
    );
    if a.pairs == 0 || a.trials == 0 {
        return Err(fockbath::Error::Parameter(
            "variation needs pairs >= 1 and trials >= 1".into(),
        ));
    }
    let h = PhasePolynomial::oscillator_hamiltonian(a.pairs, a.omega)?;
    let dim = 2 * a.pairs;
    let steps = geometric_steps(a.step_min, a.step_max, a.steps);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut table = Table::new(
        "trials",
        &[
            "trial",
            "constraint_residual",
            "perp_dot_grad",
            "taylor_slope",
        ],
    );
    let (mut worst_res, mut worst_perp, mut worst_rebuild, mut worst_slope): (f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 2.0);
    for trial in 0..a.trials {
        let m = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
        let generator = VariationGenerator::new(&m - m.transpose())?;
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        let dx: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let split = variation_split(&x, &h, &generator, &dx)?;
        let perp: f64 = split
            .perp
            .iter()
            .zip(&split.gradient)
            .map(|(p, g)| p * g)
            .sum();
        let rebuild = (0..dim)
            .map(|i| (split.perp[i] + split.par[i] - dx[i]).abs())
            .fold(0.0, f64::max);
        let taylor = gibbs_invariance_slope(&x, &h, &generator, &steps)?;
        worst_res = worst_res.max(split.constraint_residual.abs());
        worst_perp = worst_perp.max(perp.abs());
        worst_rebuild = worst_rebuild.max(rebuild);
        if (taylor.slope - 2.0).abs() > (worst_slope - 2.0).abs() {
            worst_slope = taylor.slope;
        }
        table.push(&[trial as f64, split.constraint_residual, perp, taylor.slope]);
    }
    out.check(Check::new(
        "max |grad H . Omega grad H|",
        worst_res,
        0.0,
        1e-12,
    ));
    out.check(Check::new("max |dx_perp . grad H|", worst_perp, 0.0, 1e-12));
    out.check(Check::new(
        "max |dx_perp + dx_par - dx|",
        worst_rebuild,
        0.0,
        1e-12,
    ));
    out.check(Check::new("worst Taylor slope", worst_slope, 2.0, 0.1));
    out.table(table);
    Ok(out)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TiltArgs {
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub re: f64,
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub im: f64,
    #[arg(long, default_value_t = 100_000, value_parser = parse_count)]
    pub samples: usize,
    #[arg(long)]
    pub seed: u64,
}

pub fn tilt(a: &TiltArgs) -> Result<Outcome> {
    let mut out = Outcome::new(
        "completing the square: exp(cz + cbar zbar - |z|^2/hbar) is a Gaussian centred at hbar cbar with the equilibrium covariance",
    );
    let bath = BathParams::new(a.beta, a.omega)?;
    let hbar = bath.hbar();
    let eq = sample_equilibrium(&bath, a.samples, a.seed)?;
    out.check(Check::sigma(
        "equilibrium Re <z>",
        eq.mean_z.value.re,
        eq.mean_z.std_err_re,
        0.0,
        4.0,
    ));
    out.check(Check::sigma(
        "equilibrium Im <z>",
        eq.mean_z.value.im,
        eq.mean_z.std_err_im,
        0.0,
        4.0,
    ));
    out.check(Check::sigma(
        "equilibrium <|z|^2> = hbar",
        eq.mean_abs2.value,
        eq.mean_abs2.std_err,
        hbar,
        4.0,
    ));
    out.check(Check::sigma(
        "equilibrium <|z|^4> = 2 hbar^2",
        eq.mean_abs4.value,
        eq.mean_abs4.std_err,
        2.0 * hbar * hbar,
        4.0,
    ));

    let c = CoherentParam::new(a.re, a.im);
    // separate stream family from the equilibrium draw
    let t = tilt_measure(&bath, c, a.samples, a.seed ^ 0x5eed_7117)?;
    let centre = tilt_center(&bath, c);
    out.check(Check::sigma(
        "tilted Re <z> = hbar Re cbar",
        t.mean.value.re,
        t.mean.std_err_re,
        centre.re,
        4.0,
    ));
    out.check(Check::sigma(
        "tilted Im <z> = hbar Im cbar",
        t.mean.value.im,
        t.mean.std_err_im,
        centre.im,
        4.0,
    ));
    for (k, axis) in ["Re", "Im"].iter().enumerate() {
        out.check(Check::sigma(
            format!("tilted Var {axis} z = hbar/2"),
            t.covariance[k][k],
            t.covariance_std_err[k],
            0.5 * hbar,
            4.0,
        ));
    }
    let mut table = Table::new("points", &["re", "im"]);
    for z in &t.points {
        table.push(&[z.re, z.im]);
    }
    out.table(table);
    Ok(out)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SphereArgs {
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Sphere radius; defaults to the area-matching `R^2 = 1/(2 beta omega)`.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = PI)]
    pub theta_max: f64,
    #[arg(long, default_value_t = 100_000, value_parser = parse_count)]
    pub samples: usize,
    #[arg(long)]
    pub seed: u64,
}

pub fn sphere(a: &SphereArgs) -> Result<Outcome> {
    let mut out = Outcome::new(
        "uniform measure on the sphere pushed to the z-plane is the Gibbs measure; matching area 4 pi R^2 = 2 pi/(beta omega) gives h_sphere = h",
    );
    let bath = BathParams::new(a.beta, a.omega)?;
    let matching = SphereParams::matching(&bath)?;
    let sphere = SphereParams::new(a.radius.unwrap_or(matching.radius()), a.beta, a.theta_max)?;
    let r = sphere_pushforward_check(&sphere, a.samples, a.seed)?;
    out.check(Check::below(
        "KS statistic of the phase",
        r.ks_phi,
        r.ks_threshold,
    ));
    out.check(Check::below(
        "KS statistic of |z|^2",
        r.ks_abs2,
        r.ks_threshold,
    ));
    if a.radius.is_none() {
        out.check(Check::relative(
            "h_sphere = 2 pi/(beta omega)",
            r.h_sphere,
            bath.planck(),
            1e-12,
        ));
    }
    // empirical against theoretical CDF of |z|^2 at sample quantiles
    let mut abs2: Vec<f64> = sphere_points(&sphere, a.samples, a.seed)?
        .iter()
        .map(Complex64::norm_sqr)
        .collect();
    abs2.sort_by(f64::total_cmp);
    let mut table = Table::new("abs2_cdf", &["abs2", "empirical", "theory"]);
    if !abs2.is_empty() {
        for q in 0..=100 {
            let i = ((abs2.len() - 1) * q) / 100;
            table.push(&[
                abs2[i],
                (i + 1) as f64 / abs2.len() as f64,
                sphere.abs2_cdf(abs2[i]),
            ]);
        }
    }
    out.table(table);
    Ok(out)
}
