//! Bargmann–Fock space of holomorphic functions square-integrable against
//! the Gaussian measure `dμ = e^{-|z|²/ħ} d²z / (πħ)`.
//!
//! Functions are stored as coefficient vectors in the orthonormal basis
//! `e_n(z) = z^n / √(n! ħ^n)`, truncated at level `N`.

mod coherent;
mod operators;
mod quadrature;

pub use coherent::{
    coherent_span_residual, coherent_span_residuals, coherent_vector, kernel_eval,
    CoherentExpansion, CoherentParam, KernelEvaluation, SpanResidual, DEFAULT_TAIL_TOLERANCE,
};
pub use operators::{
    annihilation_matrix, commutator, creation_matrix, hamiltonian_matrix, ladder,
    quadrature_operators, LadderKind, OperatorLabel, OperatorMatrix, Ordering,
};
pub use quadrature::GaussLaguerre;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, parameter, Result};
use crate::stats::{self, ComplexEstimate, ComplexMoments};

/// Default Fock truncation level.
pub const DEFAULT_TRUNCATION: usize = 32;

/// Tolerance for the "normalized" flag on a [`FockVector`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Gaussian measure of width `ħ` on the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BargmannMeasure {
    hbar: f64,
}

impl BargmannMeasure {
    pub fn new(hbar: f64) -> Result<Self> {
        check_hbar(hbar)?;
        Ok(BargmannMeasure { hbar })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Density with respect to Lebesgue measure `dx dy`.
    pub fn density(&self, z: Complex64) -> f64 {
        (-z.norm_sqr() / self.hbar).exp() / (PI * self.hbar)
    }

    /// Draws a point: real and imaginary parts have variance `ħ/2`.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        stats::complex_gaussian(rng, 0.5 * self.hbar)
    }

    /// Draws from the widened measure of width `sħ` and returns the point
    /// with its weight `dμ/dμ_s = s e^{−|z|²(1−1/s)/ħ}`.
    pub fn sample_weighted<R: rand::Rng + ?Sized>(
        &self,
        rng: &mut R,
        scale: f64,
    ) -> (Complex64, f64) {
        let z = stats::complex_gaussian(rng, 0.5 * self.hbar * scale);
        let w = scale * (-z.norm_sqr() * (1.0 - 1.0 / scale) / self.hbar).exp();
        (z, w)
    }
}

/// Proposal width for Monte Carlo over polynomials of degree `≤ N`.
///
/// The second moment of `|e_N|²` under `μ_s` scales as
/// `s/(2 − 1/s)^{2N+1}`, minimized at `s = N + 1`. Every weighted integrand
/// is then bounded, so the sample standard error is trustworthy.
pub fn proposal_scale(truncation: usize) -> f64 {
    (truncation + 1) as f64
}

fn check_hbar(hbar: f64) -> Result<()> {
    if hbar.is_finite() && hbar > 0.0 {
        Ok(())
    } else {
        parameter(format!("hbar must be finite and > 0, got {hbar}"))
    }
}

/// `ln n!` by direct summation.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Normalized basis function `e_n(z) = z^n / √(n! ħ^n)`.
///
/// Levels above 20 are evaluated in log space to avoid overflow in `n!`.
pub fn basis_eval(n: usize, z: Complex64, hbar: f64) -> Complex64 {
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if n <= 20 {
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        return z.powu(n as u32) / (fact * hbar.powi(n as i32)).sqrt();
    }
    let r = z.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let nf = n as f64;
    let log_mag = nf * r.ln() - 0.5 * ln_factorial(n) - 0.5 * nf * hbar.ln();
    Complex64::from_polar(log_mag.exp(), nf * z.arg())
}

/// `[e_0(z), …, e_N(z)]` by the stable recursion `e_n = e_{n-1}·z/√(nħ)`.
pub fn basis_values(truncation: usize, z: Complex64, hbar: f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(truncation + 1);
    let mut e = Complex64::new(1.0, 0.0);
    out.push(e);
    for n in 1..=truncation {
        e = e * z / (n as f64 * hbar).sqrt();
        out.push(e);
    }
    out
}

/// Truncated element `f = Σ_{n≤N} c_n e_n` of the Fock space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockVector {
    coeffs: Vec<Complex64>,
    hbar: f64,
}

impl FockVector {
    pub fn new(coeffs: Vec<Complex64>, hbar: f64) -> Result<Self> {
        check_hbar(hbar)?;
        if coeffs.is_empty() {
            return parameter("a Fock vector needs at least the n = 0 coefficient");
        }
        if coeffs
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return parameter("Fock coefficients must be finite");
        }
        Ok(FockVector { coeffs, hbar })
    }

    pub fn zero(truncation: usize, hbar: f64) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); truncation + 1], hbar)
    }

    /// Basis vector `e_n` inside truncation `N`.
    pub fn basis(n: usize, truncation: usize, hbar: f64) -> Result<Self> {
        if n > truncation {
            return domain(format!("level {n} above truncation {truncation}"));
        }
        let mut v = Self::zero(truncation, hbar)?;
        v.coeffs[n] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORMALIZATION_TOLERANCE
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return domain("cannot normalize the zero vector");
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, a: Complex64) -> Self {
        FockVector {
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
            hbar: self.hbar,
        }
    }

    /// Pointwise value `f(z)`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        basis_values(self.truncation(), z, self.hbar)
            .iter()
            .zip(&self.coeffs)
            .map(|(e, c)| e * c)
            .sum()
    }

    /// Coefficient-space inner product `Σ c̄_n d_n`.
    pub fn dot(&self, other: &FockVector) -> Result<Complex64> {
        self.check_same_space(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn sub(&self, other: &FockVector) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(FockVector {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
            hbar: self.hbar,
        })
    }

    pub fn add(&self, other: &FockVector) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(FockVector {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
            hbar: self.hbar,
        })
    }

    pub(crate) fn check_same_space(&self, other: &FockVector) -> Result<()> {
        if self.coeffs.len() != other.coeffs.len() {
            return domain(format!(
                "truncation mismatch: {} vs {}",
                self.truncation(),
                other.truncation()
            ));
        }
        if self.hbar != other.hbar {
            return domain(format!("hbar mismatch: {} vs {}", self.hbar, other.hbar));
        }
        Ok(())
    }
}

/// Tensor rule on the plane: `z = √(ħ s) e^{iφ}` with Gauss–Laguerre in `s`
/// and the uniform trapezoid in `φ`.
///
/// For truncation `N` it uses `N + 1` radial and `2N + 3` angular nodes,
/// which integrates `f̄ g` exactly for any `f, g` of degree `≤ N`.
#[derive(Debug, Clone)]
pub struct BargmannQuadrature {
    points: Vec<Complex64>,
    weights: Vec<f64>,
}

impl BargmannQuadrature {
    pub fn new(truncation: usize, hbar: f64) -> Result<Self> {
        check_hbar(hbar)?;
        let radial = GaussLaguerre::new(truncation + 1)?;
        let angular = 2 * truncation + 3;
        let mut points = Vec::with_capacity(radial.len() * angular);
        let mut weights = Vec::with_capacity(radial.len() * angular);
        for (&s, &w) in radial.nodes.iter().zip(&radial.weights) {
            let r = (hbar * s).sqrt();
            for k in 0..angular {
                let phi = 2.0 * PI * k as f64 / angular as f64;
                points.push(Complex64::from_polar(r, phi));
                weights.push(w / angular as f64);
            }
        }
        Ok(BargmannQuadrature { points, weights })
    }

    pub fn integrate(&self, g: impl Fn(Complex64) -> Complex64) -> Complex64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| g(z) * w)
            .sum()
    }

    pub fn points(&self) -> impl Iterator<Item = (Complex64, f64)> + '_ {
        self.points
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
    }
}

/// How to evaluate `∫ dμ f̄ g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InnerProductMethod {
    Quadrature,
    MonteCarlo { samples: usize, seed: u64 },
}

/// `(f, g) = ∫ dμ f̄(z) g(z)`.
///
/// The quadrature path is exact up to rounding and reports zero standard
/// error; the Monte Carlo path importance-samples a widened Gaussian (see
/// [`proposal_scale`]).
pub fn inner_product(
    f: &FockVector,
    g: &FockVector,
    method: InnerProductMethod,
) -> Result<ComplexEstimate> {
    f.check_same_space(g)?;
    let hbar = f.hbar;
    match method {
        InnerProductMethod::Quadrature => {
            let rule = BargmannQuadrature::new(f.truncation(), hbar)?;
            let value = rule.integrate(|z| f.eval(z).conj() * g.eval(z));
            Ok(ComplexEstimate {
                value,
                std_err_re: 0.0,
                std_err_im: 0.0,
            })
        }
        InnerProductMethod::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return parameter("Monte Carlo inner product needs at least 2 samples");
            }
            let measure = BargmannMeasure::new(hbar)?;
            let scale = proposal_scale(f.truncation());
            let parts = stats::chunked(samples, |c, range| {
                let mut rng = stats::substream(seed, c as u64);
                let mut m = ComplexMoments::default();
                for _ in range {
                    let (z, w) = measure.sample_weighted(&mut rng, scale);
                    m.push(f.eval(z).conj() * g.eval(z) * w);
                }
                m
            });
            let mut total = ComplexMoments::default();
            for p in &parts {
                total.merge(p);
            }
            Ok(total.estimate())
        }
    }
}

/// Gram matrix of `{e_0, …, e_N}` with optional per-entry standard errors.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub values: DMatrix<Complex64>,
    /// Combined standard error `√(σ_re² + σ_im²)` per entry (Monte Carlo only).
    pub std_err: Option<DMatrix<f64>>,
}

impl GramMatrix {
    pub fn max_deviation_from_identity(&self) -> f64 {
        let n = self.values.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.values[(i, j)] - target).norm());
            }
        }
        worst
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.values.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max(self.values[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// Largest `|G_nm − δ_nm| / σ_nm` (Monte Carlo only).
    pub fn max_z_score(&self) -> Option<f64> {
        let se = self.std_err.as_ref()?;
        let n = self.values.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                let d = (self.values[(i, j)] - target).norm();
                worst = worst.max(d / se[(i, j)]);
            }
        }
        Some(worst)
    }
}

/// Gram matrix `(e_n, e_m)` for `n, m ≤ n_max`.
pub fn gram_matrix(n_max: usize, hbar: f64, method: InnerProductMethod) -> Result<GramMatrix> {
    check_hbar(hbar)?;
    let dim = n_max + 1;
    match method {
        InnerProductMethod::Quadrature => {
            let rule = BargmannQuadrature::new(n_max, hbar)?;
            let mut g = DMatrix::<Complex64>::zeros(dim, dim);
            for (z, w) in rule.points() {
                let e = basis_values(n_max, z, hbar);
                for i in 0..dim {
                    let ci = e[i].conj() * w;
                    for j in 0..dim {
                        g[(i, j)] += ci * e[j];
                    }
                }
            }
            Ok(GramMatrix {
                values: g,
                std_err: None,
            })
        }
        InnerProductMethod::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return parameter("Monte Carlo Gram matrix needs at least 2 samples");
            }
            let measure = BargmannMeasure::new(hbar)?;
            let scale = proposal_scale(n_max);
            let cells = dim * dim;
            // per cell: Σre, Σim, Σre², Σim²
            let parts = stats::chunked(samples, |c, range| {
                let mut rng = stats::substream(seed, c as u64);
                let mut acc = vec![0.0f64; 4 * cells];
                for _ in range {
                    let (z, w) = measure.sample_weighted(&mut rng, scale);
                    let e = basis_values(n_max, z, hbar);
                    for i in 0..dim {
                        let ci = e[i].conj() * w;
                        for (j, ej) in e.iter().enumerate() {
                            let v = ci * ej;
                            let k = 4 * (i * dim + j);
                            acc[k] += v.re;
                            acc[k + 1] += v.im;
                            acc[k + 2] += v.re * v.re;
                            acc[k + 3] += v.im * v.im;
                        }
                    }
                }
                acc
            });
            let mut total = vec![0.0f64; 4 * cells];
            for p in &parts {
                for (t, v) in total.iter_mut().zip(p) {
                    *t += v;
                }
            }
            let n = samples as f64;
            let mut values = DMatrix::<Complex64>::zeros(dim, dim);
            let mut se = DMatrix::<f64>::zeros(dim, dim);
            let var = |s: f64, s2: f64| ((s2 - s * s / n) / (n - 1.0)).max(0.0);
            for i in 0..dim {
                for j in 0..dim {
                    let k = 4 * (i * dim + j);
                    values[(i, j)] = Complex64::new(total[k] / n, total[k + 1] / n);
                    let v = var(total[k], total[k + 2]) + var(total[k + 1], total[k + 3]);
                    se[(i, j)] = (v / n).sqrt();
                }
            }
            Ok(GramMatrix {
                values,
                std_err: Some(se),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_eval_examples() {
        assert_eq!(basis_eval(0, c(3.0, -2.0), 0.7), c(1.0, 0.0));
        assert_eq!(basis_eval(1, c(1.0, 0.0), 1.0), c(1.0, 0.0));
        // (1+i)²/√2 = 2i/√2 = √2 i
        let v = basis_eval(2, c(1.0, 1.0), 1.0);
        assert!((v - c(0.0, 2f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn log_path_agrees_with_recursion() {
        let z = c(1.3, -0.4);
        let rec = basis_values(40, z, 0.8);
        for n in [21, 30, 40] {
            let direct = basis_eval(n, z, 0.8);
            assert!((direct - rec[n]).norm() <= 1e-12 * rec[n].norm());
        }
    }

    #[test]
    fn quadrature_gram_is_identity() {
        for hbar in [0.5, 1.0, 2.0] {
            let g = gram_matrix(12, hbar, InnerProductMethod::Quadrature).unwrap();
            assert!(g.max_deviation_from_identity() < 1e-10);
        }
    }

    #[test]
    fn vacuum_has_unit_norm() {
        let e0 = FockVector::basis(0, 4, 1.0).unwrap();
        let v = inner_product(&e0, &e0, InnerProductMethod::Quadrature).unwrap();
        assert!((v.value - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn inner_product_truncation_mismatch() {
        let a = FockVector::basis(0, 4, 1.0).unwrap();
        let b = FockVector::basis(0, 5, 1.0).unwrap();
        assert!(inner_product(&a, &b, InnerProductMethod::Quadrature).is_err());
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let a = FockVector::new(vec![c(0.5, 0.1), c(0.2, -0.3), c(0.0, 0.4)], 1.0).unwrap();
        let m = InnerProductMethod::MonteCarlo {
            samples: 20_000,
            seed: 11,
        };
        let x = inner_product(&a, &a, m).unwrap();
        let y = inner_product(&a, &a, m).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn measure_rejects_bad_hbar() {
        assert!(BargmannMeasure::new(0.0).is_err());
        assert!(FockVector::new(vec![c(1.0, 0.0)], -1.0).is_err());
        assert!(FockVector::new(vec![], 1.0).is_err());
    }
}
