//! Coherent vectors `f_c(z) = e^{cz}`, the reproducing kernel, and
//! least-squares spans of coherent families.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{inner_product, ln_factorial, FockVector, InnerProductMethod};
use crate::error::{domain, parameter, Error, Result};

/// Default bound on probability mass lost past the truncation.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

/// Relative agreement required between the two kernel evaluation paths.
const KERNEL_AGREEMENT: f64 = 1e-10;

/// Tikhonov parameter relative to the Gram matrix norm.
const TIKHONOV_RELATIVE: f64 = 1e-12;

/// Minimum dimensionless separation `|c_i − c_j|·√ħ` before a warning.
const MIN_SEPARATION: f64 = 0.05;

/// Tilt parameter `c` of `f_c(z) = e^{cz}` (units of `z⁻¹`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentParam(pub Complex64);

impl CoherentParam {
    pub fn new(re: f64, im: f64) -> Self {
        CoherentParam(Complex64::new(re, im))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }
}

/// Truncated coherent vector together with the mass it leaves out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentExpansion {
    pub vector: FockVector,
    /// `e^{ħ|c|²} − Σ_{n≤N} |c_n|²`, summed directly over the tail.
    pub tail_mass: f64,
    /// `e^{ħ|c|²}`, the squared norm of the untruncated series.
    pub full_norm_sqr: f64,
}

fn coherent_coeffs(c: Complex64, truncation: usize, hbar: f64) -> Vec<Complex64> {
    let w = c * hbar.sqrt();
    let mut out = Vec::with_capacity(truncation + 1);
    let mut term = Complex64::new(1.0, 0.0);
    out.push(term);
    for n in 1..=truncation {
        term = term * w / (n as f64).sqrt();
        out.push(term);
    }
    out
}

/// `Σ_{n>N} x^n/n!` without cancellation against `e^x`.
fn poisson_tail(x: f64, truncation: usize) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mut n = truncation + 1;
    let mut term = ((n as f64) * x.ln() - ln_factorial(n)).exp();
    let mut sum = 0.0;
    loop {
        sum += term;
        n += 1;
        term *= x / n as f64;
        if term <= 1e-18 * sum || term == 0.0 {
            break;
        }
    }
    sum
}

/// Coefficients `c_n = (c√ħ)^n/√n!` of `e^{cz}` up to level `N`.
///
/// Fails when the discarded mass exceeds `tail_tolerance`.
pub fn coherent_vector(
    c: CoherentParam,
    truncation: usize,
    hbar: f64,
    tail_tolerance: f64,
) -> Result<CoherentExpansion> {
    let x = hbar * c.0.norm_sqr();
    let tail_mass = poisson_tail(x, truncation);
    if tail_mass > tail_tolerance {
        return Err(Error::Truncation {
            tail_mass,
            tolerance: tail_tolerance,
        });
    }
    Ok(CoherentExpansion {
        vector: FockVector::new(coherent_coeffs(c.0, truncation, hbar), hbar)?,
        tail_mass,
        full_norm_sqr: x.exp(),
    })
}

/// Result of the reproducing-kernel check at `w = ħc`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelEvaluation {
    pub point: Complex64,
    /// `(f_{c̄}, ψ)` by quadrature.
    pub via_inner_product: Complex64,
    /// `ψ(ħc)` by direct series evaluation.
    pub direct: Complex64,
    pub discrepancy: f64,
    pub tail_mass: f64,
}

/// Evaluates `ψ` through the kernel `f_{c̄}(z) = e^{c̄z}`.
///
/// With the inner product antilinear in its first slot,
/// `(f_{c̄}, ψ) = Σ_n ψ_n (ħc)^n/√(n!ħ^n) = ψ(ħc)`, which reduces to
/// `ψ(c)` at `ħ = 1`. Both sides are computed independently and must agree.
pub fn kernel_eval(
    c: CoherentParam,
    psi: &FockVector,
    tail_tolerance: f64,
) -> Result<KernelEvaluation> {
    let hbar = psi.hbar();
    let kernel = coherent_vector(
        CoherentParam(c.0.conj()),
        psi.truncation(),
        hbar,
        tail_tolerance,
    )?;
    let via = inner_product(&kernel.vector, psi, InnerProductMethod::Quadrature)?.value;
    let point = c.0 * hbar;
    let direct = psi.eval(point);
    let discrepancy = (via - direct).norm();
    if discrepancy > KERNEL_AGREEMENT * direct.norm().max(1.0) {
        return Err(Error::Consistency(format!(
            "kernel evaluation paths disagree by {discrepancy:e} at {point}"
        )));
    }
    Ok(KernelEvaluation {
        point,
        via_inner_product: via,
        direct,
        discrepancy,
        tail_mass: kernel.tail_mass,
    })
}

/// Least-squares distance from `ψ` to the span of coherent vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanResidual {
    pub points: usize,
    pub residual: f64,
    pub weights: Vec<Complex64>,
    pub regularization: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub warnings: Vec<String>,
}

fn check_points(points: &[CoherentParam], hbar: f64) -> Result<Vec<String>> {
    if points.is_empty() {
        return parameter("coherent span needs at least one point");
    }
    let mut warnings = Vec::new();
    for i in 0..points.len() {
        for j in 0..i {
            let d = (points[i].0 - points[j].0).norm();
            if d == 0.0 {
                return domain(format!("coherent points {j} and {i} coincide"));
            }
            if d * hbar.sqrt() < MIN_SEPARATION {
                warnings.push(format!(
                    "points {j} and {i} closer than {MIN_SEPARATION}/sqrt(hbar)"
                ));
            }
        }
    }
    Ok(warnings)
}

fn project(
    psi: &FockVector,
    columns: &[Vec<Complex64>],
    mut warnings: Vec<String>,
) -> Result<SpanResidual> {
    let dim = psi.coeffs().len();
    let k = columns.len();
    let v = DMatrix::from_fn(dim, k, |i, j| columns[j][i]);
    let target = DVector::from_column_slice(psi.coeffs());
    let gram = v.adjoint() * &v;
    let rhs = v.adjoint() * &target;
    let lambda = TIKHONOV_RELATIVE * gram.norm();
    let eig = SymmetricEigen::new(gram.clone());
    let min_eig = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let max_eig = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    if min_eig < lambda {
        warnings.push(format!(
            "Gram matrix numerically singular: smallest eigenvalue {min_eig:e} below regularization {lambda:e}"
        ));
    }
    let reg = gram + DMatrix::<Complex64>::identity(k, k) * Complex64::new(lambda, 0.0);
    let chol = Cholesky::new(reg).ok_or_else(|| {
        Error::Consistency("regularized Gram matrix is not positive definite".into())
    })?;
    let weights = chol.solve(&rhs);
    let resid = target - &v * &weights;
    Ok(SpanResidual {
        points: k,
        residual: resid.norm(),
        weights: weights.iter().copied().collect(),
        regularization: lambda,
        min_eigenvalue: min_eig,
        max_eigenvalue: max_eig,
        warnings,
    })
}

/// Residual of the Tikhonov-regularized projection of `ψ` onto
/// `span{f_{c_k}}`, with each `f_{c_k}` projected into `ψ`'s truncation.
pub fn coherent_span_residual(psi: &FockVector, points: &[CoherentParam]) -> Result<SpanResidual> {
    let warnings = check_points(points, psi.hbar())?;
    let cols: Vec<Vec<Complex64>> = points
        .iter()
        .map(|c| coherent_coeffs(c.0, psi.truncation(), psi.hbar()))
        .collect();
    project(psi, &cols, warnings)
}

/// Residuals for the growing prefixes `points[..1]`, `points[..2]`, ….
pub fn coherent_span_residuals(
    psi: &FockVector,
    points: &[CoherentParam],
) -> Result<Vec<SpanResidual>> {
    check_points(points, psi.hbar())?;
    (1..=points.len())
        .map(|k| coherent_span_residual(psi, &points[..k]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_tilt_is_vacuum() {
        let e = coherent_vector(CoherentParam::new(0.0, 0.0), 6, 1.3, 1e-12).unwrap();
        assert_eq!(e.vector, FockVector::basis(0, 6, 1.3).unwrap());
        assert_eq!(e.tail_mass, 0.0);
    }

    #[test]
    fn unit_tilt_tail_below_1e_15() {
        let e = coherent_vector(CoherentParam::new(1.0, 0.0), 30, 1.0, 1e-12).unwrap();
        assert!(e.tail_mass < 1e-15);
        assert!((e.vector.norm_sqr() + e.tail_mass - e.full_norm_sqr).abs() < 1e-14);
    }

    #[test]
    fn large_tail_is_rejected() {
        let r = coherent_vector(CoherentParam::new(3.0, 0.0), 8, 1.0, 1e-12);
        assert!(matches!(r, Err(Error::Truncation { .. })));
    }

    #[test]
    fn kernel_on_vacuum_and_e1() {
        let hbar = 0.6;
        let e0 = FockVector::basis(0, 10, hbar).unwrap();
        let k = kernel_eval(CoherentParam::new(0.4, -0.2), &e0, 1e-6).unwrap();
        assert!((k.direct - cx(1.0, 0.0)).norm() < 1e-14);
        assert!((k.via_inner_product - cx(1.0, 0.0)).norm() < 1e-12);

        let e1 = FockVector::basis(1, 10, hbar).unwrap();
        let k = kernel_eval(CoherentParam::new(0.4, -0.2), &e1, 1e-6).unwrap();
        let w = k.point;
        assert!((k.direct - w / hbar.sqrt()).norm() < 1e-14);
    }

    #[test]
    fn span_of_member_is_exact() {
        let hbar = 1.0;
        let pts = [CoherentParam::new(0.3, 0.1), CoherentParam::new(-0.5, 0.4)];
        let psi = FockVector::new(coherent_coeffs(pts[1].0, 8, hbar), hbar).unwrap();
        let r = coherent_span_residual(&psi, &pts).unwrap();
        assert!(r.residual < 1e-10, "{}", r.residual);
    }

    #[test]
    fn single_orthogonal_point_leaves_full_norm() {
        // f_0 = e_0 is orthogonal to e_3
        let psi = FockVector::basis(3, 6, 1.0).unwrap().scale(cx(2.0, 0.0));
        let r = coherent_span_residual(&psi, &[CoherentParam::new(0.0, 0.0)]).unwrap();
        assert!((r.residual - psi.norm()).abs() < 1e-15);
    }

    #[test]
    fn duplicate_points_rejected() {
        let psi = FockVector::basis(1, 4, 1.0).unwrap();
        let p = CoherentParam::new(0.1, 0.1);
        assert!(coherent_span_residual(&psi, &[p, p]).is_err());
        assert!(coherent_span_residual(&psi, &[]).is_err());
    }
}
