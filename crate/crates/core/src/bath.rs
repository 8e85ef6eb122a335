//! Gibbs equilibrium of an oscillator bath: sampling, partition function
//! and Planck constant, the phase-space inner product, equilibrium-
//! preserving variations, coherent tilts and the sphere projection.
//!
//! Boltzmann's constant is 1, so `β` has units of inverse energy and
//! `ħ = 1/(βω)` carries units of action.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bargmann::CoherentParam;
use crate::error::{domain, parameter, Error, Result};
use crate::stats::{
    self, chunked, ks_statistic, log_log_slope, ComplexEstimate, ComplexMoments, Estimate, Moments,
};
use crate::symplectic::{PhasePolynomial, Var};

/// Inverse temperature and oscillator frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathParams {
    beta: f64,
    omega: f64,
}

impl BathParams {
    pub fn new(beta: f64, omega: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return parameter(format!("beta must be finite and > 0, got {beta}"));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return parameter(format!("omega must be finite and > 0, got {omega}"));
        }
        Ok(BathParams { beta, omega })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `ħ = 1/(βω)`.
    pub fn hbar(&self) -> f64 {
        1.0 / (self.beta * self.omega)
    }

    /// `h = 2πħ`.
    pub fn planck(&self) -> f64 {
        2.0 * PI * self.hbar()
    }
}

/// Equilibrium draws with their low moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSample {
    pub points: Vec<Complex64>,
    pub mean_z: ComplexEstimate,
    pub mean_abs2: Estimate,
    pub mean_abs4: Estimate,
}

fn draw_shifted(n: usize, seed: u64, center: Complex64, variance: f64) -> Vec<Complex64> {
    chunked(n, |chunk, range| {
        let mut rng = stats::substream(seed, chunk as u64);
        range
            .map(|_| center + stats::complex_gaussian(&mut rng, variance))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// I.i.d. draws from `e^{-|z|²/ħ}/(πħ)`.
pub fn sample_equilibrium(
    bath: &BathParams,
    samples: usize,
    seed: u64,
) -> Result<EquilibriumSample> {
    if samples == 0 {
        return parameter("need at least one sample");
    }
    let points = draw_shifted(samples, seed, Complex64::new(0.0, 0.0), 0.5 * bath.hbar());
    let mut z = ComplexMoments::default();
    let (mut a2, mut a4) = (Moments::default(), Moments::default());
    for p in &points {
        let r2 = p.norm_sqr();
        z.push(*p);
        a2.push(r2);
        a4.push(r2 * r2);
    }
    Ok(EquilibriumSample {
        points,
        mean_z: z.estimate(),
        mean_abs2: a2.estimate(),
        mean_abs4: a4.estimate(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PartitionMethod {
    /// Closed-form Gaussian integral; quadratic `H` only.
    Analytic,
    /// Importance sampling with an isotropic Gaussian of standard
    /// deviation `proposal_scale` in every canonical coordinate.
    MonteCarlo {
        samples: usize,
        seed: u64,
        proposal_scale: f64,
    },
}

/// Partition function and the action scale `h = Z^{1/n}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanckResult {
    pub z: f64,
    pub z_std_err: f64,
    /// Degrees of freedom (canonical pairs).
    pub n: usize,
    pub h: f64,
    /// Standard error of `h` by the delta method, zero for the analytic path.
    pub std_err: f64,
}

/// `H = c₀ + ½ xᵀKx` over `x = (q₀, p₀, q₁, p₁, …)`.
struct Quadratic {
    constant: f64,
    k: DMatrix<f64>,
}

fn real_coefficient(c: &crate::symplectic::Exact) -> Result<f64> {
    if !c.is_real() {
        return domain("Hamiltonian has a non-real coefficient");
    }
    Ok(c.to_complex().re)
}

fn quadratic_form(h: &PhasePolynomial) -> Result<Quadratic> {
    let h = h.to_canonical()?;
    let dim = 2 * h.pairs();
    let mut k = DMatrix::zeros(dim, dim);
    let mut constant = 0.0;
    for (e, c) in h.terms() {
        let c = real_coefficient(c)?;
        let slots: Vec<usize> = e
            .iter()
            .enumerate()
            .flat_map(|(i, &m)| std::iter::repeat_n(i, m as usize))
            .collect();
        match slots.as_slice() {
            [] => constant = c,
            [i, j] if i == j => k[(*i, *i)] = 2.0 * c,
            [i, j] => {
                k[(*i, *j)] = c;
                k[(*j, *i)] = c;
            }
            _ => return domain("analytic partition function needs a quadratic Hamiltonian"),
        }
    }
    Ok(Quadratic { constant, k })
}

/// Real-valued fast evaluator for a canonical polynomial.
struct RealPoly {
    terms: Vec<(Vec<u32>, f64)>,
}

impl RealPoly {
    fn new(h: &PhasePolynomial) -> Result<Self> {
        let h = h.to_canonical()?;
        let terms = h
            .terms()
            .map(|(e, c)| Ok((e.to_vec(), real_coefficient(c)?)))
            .collect::<Result<_>>()?;
        Ok(RealPoly { terms })
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(x)
                    .fold(*c, |acc, (&m, &v)| acc * v.powi(m as i32))
            })
            .sum()
    }
}

/// `Z = ∫ e^{-βH} d^n q d^n p` and `h = Z^{1/n}`.
pub fn partition_estimate(
    h: &PhasePolynomial,
    beta: f64,
    method: PartitionMethod,
) -> Result<PlanckResult> {
    if !(beta.is_finite() && beta > 0.0) {
        return parameter(format!("beta must be finite and > 0, got {beta}"));
    }
    let n = h.pairs();
    if n == 0 {
        return parameter("partition function needs at least one pair");
    }
    match method {
        PartitionMethod::Analytic => {
            let quad = quadratic_form(h)?;
            let chol = Cholesky::new(quad.k.clone())
                .ok_or_else(|| Error::Domain("quadratic form is not positive definite".into()))?;
            let log_det: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
            let log_z = n as f64 * (2.0 * PI / beta).ln() - 0.5 * log_det - beta * quad.constant;
            let z = log_z.exp();
            Ok(PlanckResult {
                z,
                z_std_err: 0.0,
                n,
                h: (log_z / n as f64).exp(),
                std_err: 0.0,
            })
        }
        PartitionMethod::MonteCarlo {
            samples,
            seed,
            proposal_scale: s,
        } => {
            if samples < 2 {
                return parameter("Monte Carlo partition function needs at least 2 samples");
            }
            if !(s.is_finite() && s > 0.0) {
                return parameter(format!("proposal scale must be > 0, got {s}"));
            }
            let poly = RealPoly::new(h)?;
            let dim = 2 * n;
            // log of the proposal normalization (2πs²)^{n}
            let log_norm = n as f64 * (2.0 * PI * s * s).ln();
            let parts = chunked(samples, |chunk, range| {
                let mut rng = stats::substream(seed, chunk as u64);
                let mut m = Moments::default();
                let mut x = vec![0.0; dim];
                for _ in range {
                    let mut r2 = 0.0;
                    for v in x.iter_mut() {
                        let g: f64 = rng.sample(rand_distr::StandardNormal);
                        *v = s * g;
                        r2 += g * g;
                    }
                    m.push((-beta * poly.eval(&x) + 0.5 * r2 + log_norm).exp());
                }
                m
            });
            let mut acc = Moments::default();
            parts.iter().for_each(|m| acc.merge(m));
            let est = acc.estimate();
            if !(est.value.is_finite() && est.value > 0.0 && est.std_err.is_finite()) {
                return Err(Error::Consistency(format!(
                    "importance weights degenerate: Z = {}, std err = {}",
                    est.value, est.std_err
                )));
            }
            let h_val = est.value.powf(1.0 / n as f64);
            Ok(PlanckResult {
                z: est.value,
                z_std_err: est.std_err,
                n,
                h: h_val,
                std_err: h_val * est.std_err / (n as f64 * est.value),
            })
        }
    }
}

/// `(k−1)!!` for even `k`, zero for odd `k`.
fn gaussian_moment(k: u32, variance: f64) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let double_fact: f64 = (1..k).step_by(2).map(f64::from).product();
    double_fact * variance.powi(k as i32 / 2)
}

/// `Z⁻¹ ∫ f̄ g e^{-βH} dq dp` for `H = ω Σ(q² + p²)/2`, evaluated term by
/// term from the Gaussian moments `⟨q^{2k}⟩ = (2k−1)!! ħ^k`.
pub fn gibbs_inner_product(
    f: &PhasePolynomial,
    g: &PhasePolynomial,
    bath: &BathParams,
) -> Result<Complex64> {
    if f.pairs() != g.pairs() {
        return domain("inner product of polynomials on different phase spaces");
    }
    let product = f.to_canonical()?.conj().mul(&g.to_canonical()?)?;
    let hbar = bath.hbar();
    Ok(product
        .terms()
        .map(|(e, c)| {
            let m: f64 = e.iter().map(|&k| gaussian_moment(k, hbar)).product();
            c.to_complex() * m
        })
        .sum())
}

/// Antisymmetric `2n × 2n` generator of a variation `δx = Ω∇H δt`.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationGenerator {
    omega: DMatrix<f64>,
}

impl VariationGenerator {
    /// Accepts only matrices with `Ωᵀ = −Ω` exactly.
    pub fn new(omega: DMatrix<f64>) -> Result<Self> {
        if !omega.is_square() || !omega.nrows().is_multiple_of(2) || omega.nrows() == 0 {
            return domain(format!(
                "generator must be 2n x 2n, got {} x {}",
                omega.nrows(),
                omega.ncols()
            ));
        }
        let n = omega.nrows();
        for i in 0..n {
            for j in 0..n {
                if omega[(i, j)] != -omega[(j, i)] {
                    return domain(format!("generator is not antisymmetric at ({i}, {j})"));
                }
            }
        }
        Ok(VariationGenerator { omega })
    }

    /// Block-diagonal symplectic `J`, which gives Hamilton's equations.
    pub fn symplectic(pairs: usize) -> Self {
        let mut m = DMatrix::zeros(2 * pairs, 2 * pairs);
        for k in 0..pairs {
            m[(2 * k, 2 * k + 1)] = 1.0;
            m[(2 * k + 1, 2 * k)] = -1.0;
        }
        VariationGenerator { omega: m }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.omega
    }

    pub fn dim(&self) -> usize {
        self.omega.nrows()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.omega[(i, j)] * v[j]).sum())
            .collect()
    }
}

/// `∇H` at a real point `x = (q₀, p₀, q₁, p₁, …)`.
pub fn gradient(h: &PhasePolynomial, x: &[f64]) -> Result<Vec<f64>> {
    let h = h.to_canonical()?;
    if x.len() != 2 * h.pairs() {
        return domain(format!(
            "point has {} coordinates, expected {}",
            x.len(),
            2 * h.pairs()
        ));
    }
    (0..h.pairs())
        .flat_map(|k| [Var::Q(k), Var::P(k)])
        .map(|v| Ok(h.derivative(v)?.eval_real(x)?.re))
        .collect()
}

/// `δx = δx_⊥ + δx_∥` relative to `∇H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationSplit {
    /// Level-set component, preserving the Gibbs weight to first order.
    pub perp: Vec<f64>,
    /// Component along `∇H`, producing a non-equilibrium state.
    pub par: Vec<f64>,
    pub gradient: Vec<f64>,
    /// `∇H·Ω∇H` for the supplied generator.
    pub constraint_residual: f64,
}

pub fn variation_split(
    x: &[f64],
    h: &PhasePolynomial,
    generator: &VariationGenerator,
    dx: &[f64],
) -> Result<VariationSplit> {
    let g = gradient(h, x)?;
    if dx.len() != g.len() || generator.dim() != g.len() {
        return domain("variation, point and generator dimensions disagree");
    }
    let og = generator.apply(&g);
    let constraint_residual: f64 = g.iter().zip(&og).map(|(a, b)| a * b).sum();
    let g2: f64 = g.iter().map(|v| v * v).sum();
    let par: Vec<f64> = if g2 == 0.0 {
        vec![0.0; g.len()]
    } else {
        let s = g.iter().zip(dx).map(|(a, b)| a * b).sum::<f64>() / g2;
        g.iter().map(|v| s * v).collect()
    };
    let perp = dx.iter().zip(&par).map(|(d, p)| d - p).collect();
    Ok(VariationSplit {
        perp,
        par,
        gradient: g,
        constraint_residual,
    })
}

/// Taylor test of `|H(x + Ω∇H δt) − H(x)|` over a range of `δt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorTest {
    pub steps: Vec<f64>,
    pub changes: Vec<f64>,
    /// Log-log slope; 2 for an equilibrium-preserving generator.
    pub slope: f64,
}

pub fn gibbs_invariance_slope(
    x: &[f64],
    h: &PhasePolynomial,
    generator: &VariationGenerator,
    steps: &[f64],
) -> Result<TaylorTest> {
    if steps.len() < 2 || steps.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return parameter("Taylor test needs at least two positive steps");
    }
    let g = gradient(h, x)?;
    if generator.dim() != g.len() {
        return domain("generator and point dimensions disagree");
    }
    let dir = generator.apply(&g);
    let poly = RealPoly::new(h)?;
    let h0 = poly.eval(x);
    let changes: Vec<f64> = steps
        .iter()
        .map(|&dt| {
            let y: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + d * dt).collect();
            (poly.eval(&y) - h0).abs()
        })
        .collect();
    if changes.contains(&0.0) {
        return Err(Error::Consistency(
            "energy change vanished; Taylor slope undefined".into(),
        ));
    }
    Ok(TaylorTest {
        steps: steps.to_vec(),
        slope: log_log_slope(steps, &changes),
        changes,
    })
}

/// Geometric grid of `count` steps between `lo` and `hi`.
pub fn geometric_steps(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let r = (hi / lo).ln();
    (0..count)
        .map(|i| lo * (r * i as f64 / (count - 1).max(1) as f64).exp())
        .collect()
}

/// Samples of the tilted Gibbs density `∝ e^{cz + c̄z̄ − |z|²/ħ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltSample {
    pub points: Vec<Complex64>,
    pub mean: ComplexEstimate,
    /// Sample covariance `[[xx, xy], [xy, yy]]` of `(Re z, Im z)`.
    pub covariance: [[f64; 2]; 2],
    /// Standard errors of the diagonal covariance entries.
    pub covariance_std_err: [f64; 2],
}

/// Completing the square, the tilted density is a Gaussian centred at
/// `ħc̄` with the equilibrium covariance `ħ/2` per component.
pub fn tilt_center(bath: &BathParams, c: CoherentParam) -> Complex64 {
    c.value().conj() * bath.hbar()
}

pub fn tilt_measure(
    bath: &BathParams,
    c: CoherentParam,
    samples: usize,
    seed: u64,
) -> Result<TiltSample> {
    if samples < 2 {
        return parameter("tilted sample needs at least 2 points");
    }
    let points = draw_shifted(samples, seed, tilt_center(bath, c), 0.5 * bath.hbar());
    let mut m = ComplexMoments::default();
    points.iter().for_each(|p| m.push(*p));
    let mean = m.estimate();
    let mu = mean.value;
    let (mut xx, mut yy, mut xy) = (Moments::default(), Moments::default(), Moments::default());
    for p in &points {
        let d = p - mu;
        xx.push(d.re * d.re);
        yy.push(d.im * d.im);
        xy.push(d.re * d.im);
    }
    let bessel = samples as f64 / (samples as f64 - 1.0);
    let (exx, eyy) = (xx.estimate(), yy.estimate());
    Ok(TiltSample {
        points,
        mean,
        covariance: [
            [exx.value * bessel, xy.mean() * bessel],
            [xy.mean() * bessel, eyy.value * bessel],
        ],
        covariance_std_err: [exx.std_err, eyy.std_err],
    })
}

/// Sphere of radius `R` projected onto the `z`-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereParams {
    radius: f64,
    beta: f64,
    theta_max: f64,
}

impl SphereParams {
    pub fn new(radius: f64, beta: f64, theta_max: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return parameter(format!("sphere radius must be > 0, got {radius}"));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return parameter(format!("beta must be > 0, got {beta}"));
        }
        if !(theta_max.is_finite() && (0.0..=PI).contains(&theta_max)) {
            return parameter(format!("theta_max must lie in [0, pi], got {theta_max}"));
        }
        Ok(SphereParams {
            radius,
            beta,
            theta_max,
        })
    }

    /// Whole sphere, cut only where the map is undefined.
    pub fn full(radius: f64, beta: f64) -> Result<Self> {
        Self::new(radius, beta, PI)
    }

    /// Radius with `4πR² = 2π/(βω)`, i.e. `R² = 1/(2βω)`.
    pub fn matching(bath: &BathParams) -> Result<Self> {
        Self::full(
            (1.0 / (2.0 * bath.beta() * bath.omega())).sqrt(),
            bath.beta(),
        )
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Largest admissible `u = sin²(θ/2)`: the log argument must stay `≥ 1`.
    pub fn u_max(&self) -> f64 {
        let s = (0.5 * self.theta_max).sin();
        (s * s).min(1.0 / (2.0 * self.beta * self.radius * self.radius))
    }

    /// `|z|² = β⁻¹ ln(1/(2βR² sin²(θ/2)))`.
    pub fn abs2(&self, theta: f64) -> f64 {
        let s = (0.5 * theta).sin();
        -(2.0 * self.beta * self.radius * self.radius * s * s).ln() / self.beta
    }

    /// Smallest `|z|²` reached, at the edge of the admissible cap.
    pub fn abs2_min(&self) -> f64 {
        -(2.0 * self.beta * self.radius * self.radius * self.u_max()).ln() / self.beta
    }

    /// Exponential law of rate `β` restricted to `|z|² ≥ abs2_min`.
    pub fn abs2_cdf(&self, x: f64) -> f64 {
        let x0 = self.abs2_min();
        if x <= x0 {
            0.0
        } else {
            1.0 - (-self.beta * (x - x0)).exp()
        }
    }

    /// `h = 4πR²`.
    pub fn h_sphere(&self) -> f64 {
        4.0 * PI * self.radius * self.radius
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereReport {
    pub samples: usize,
    pub u_max: f64,
    pub abs2_min: f64,
    pub ks_phi: f64,
    pub ks_abs2: f64,
    /// 99% asymptotic threshold; comparison is left to the caller.
    pub ks_threshold: f64,
    pub h_sphere: f64,
}

/// Draws `(φ, θ)` uniformly by area on the admissible cap and returns the
/// image points in the `z`-plane.
pub fn sphere_points(sphere: &SphereParams, samples: usize, seed: u64) -> Result<Vec<Complex64>> {
    let u_max = sphere.u_max();
    if u_max <= 0.0 {
        return domain("admissible region of the sphere is empty");
    }
    // uniform area ⇔ cos θ uniform on [1 − 2u_max, 1]
    let cos_min = 1.0 - 2.0 * u_max;
    Ok(chunked(samples, |chunk, range| {
        let mut rng = stats::substream(seed, chunk as u64);
        range
            .map(|_| {
                let phi = 2.0 * PI * rng.random::<f64>();
                let v = 1.0 - rng.random::<f64>();
                let theta = (1.0 - v * (1.0 - cos_min)).clamp(-1.0, 1.0).acos();
                Complex64::from_polar(sphere.abs2(theta).sqrt(), phi)
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect())
}

pub fn sphere_pushforward_check(
    sphere: &SphereParams,
    samples: usize,
    seed: u64,
) -> Result<SphereReport> {
    if samples == 0 {
        return parameter("need at least one sample");
    }
    let pts = sphere_points(sphere, samples, seed)?;
    let phis: Vec<f64> = pts.iter().map(|z| z.arg().rem_euclid(2.0 * PI)).collect();
    let abs2: Vec<f64> = pts.iter().map(|z| z.norm_sqr()).collect();
    Ok(SphereReport {
        samples,
        u_max: sphere.u_max(),
        abs2_min: sphere.abs2_min(),
        ks_phi: ks_statistic(&phis, |x| (x / (2.0 * PI)).clamp(0.0, 1.0)),
        ks_abs2: ks_statistic(&abs2, |x| sphere.abs2_cdf(x)),
        ks_threshold: stats::ks_threshold_99(samples),
        h_sphere: sphere.h_sphere(),
    })
}

/// `H` for a single oscillator pair, as the bath uses it.
pub fn bath_hamiltonian(bath: &BathParams) -> Result<PhasePolynomial> {
    PhasePolynomial::oscillator_hamiltonian(1, bath.omega())
}

/// Holomorphic monomial `z^n` of one pair in canonical coordinates.
pub fn z_power(n: u32) -> Result<PhasePolynomial> {
    PhasePolynomial::z_in_canonical(1, 0)?.pow(n)
}
