//! Ladder operators, quadratures and oscillator Hamiltonians as matrices on
//! the truncated Fock space.
//!
//! `â = ħ d/dz` lowers `e_n ↦ √(nħ) e_{n-1}`; `â⁺ = z·` raises
//! `e_n ↦ √((n+1)ħ) e_{n+1}`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FockVector;
use crate::error::{domain, parameter, Error, Result};
use crate::symplectic::OscillatorParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LadderKind {
    Annihilate,
    Create,
}

/// Operator ordering of the quadratic Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ordering {
    /// `ω â⁺â`, spectrum `ħωn`.
    Normal,
    /// `ω(â⁺â + ââ⁺)/2`, spectrum `ħω(n + 1/2)`.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorLabel {
    Annihilate,
    Create,
    Position,
    Momentum,
    HamiltonianNormal,
    HamiltonianSymmetric,
}

/// Dense `(N+1)×(N+1)` operator on Fock coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub label: OperatorLabel,
    pub hbar: f64,
    pub matrix: DMatrix<Complex64>,
}

impl OperatorMatrix {
    pub fn truncation(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn apply(&self, f: &FockVector) -> Result<FockVector> {
        if f.truncation() != self.truncation() || f.hbar() != self.hbar {
            return domain("operator and vector live in different truncated spaces");
        }
        let v = nalgebra::DVector::from_column_slice(f.coeffs());
        let out = &self.matrix * v;
        FockVector::new(out.iter().copied().collect(), self.hbar)
    }

    pub fn max_hermitian_defect(&self) -> f64 {
        let adj = self.matrix.adjoint();
        (&self.matrix - adj)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for ((i, j), v) in self.matrix.iter().enumerate().map(|(k, v)| {
            let n = self.matrix.nrows();
            ((k % n, k / n), v)
        }) {
            if i != j {
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        self.matrix.diagonal().iter().copied().collect()
    }
}

fn check(hbar: f64) -> Result<()> {
    if hbar.is_finite() && hbar > 0.0 {
        Ok(())
    } else {
        parameter(format!("hbar must be finite and > 0, got {hbar}"))
    }
}

fn lowering(hbar: f64, dim: usize) -> DMatrix<Complex64> {
    let mut a = DMatrix::<Complex64>::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64 * hbar).sqrt(), 0.0);
    }
    a
}

pub fn annihilation_matrix(hbar: f64, truncation: usize) -> Result<OperatorMatrix> {
    check(hbar)?;
    Ok(OperatorMatrix {
        label: OperatorLabel::Annihilate,
        hbar,
        matrix: lowering(hbar, truncation + 1),
    })
}

pub fn creation_matrix(hbar: f64, truncation: usize) -> Result<OperatorMatrix> {
    check(hbar)?;
    Ok(OperatorMatrix {
        label: OperatorLabel::Create,
        hbar,
        matrix: lowering(hbar, truncation + 1).adjoint(),
    })
}

/// `AB − BA`.
pub fn commutator(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a * b - b * a
}

/// Applies `â` or `â⁺` to a vector.
///
/// Raising a vector with weight on the top level `N` would push it past
/// the truncation; that is reported as an error instead of dropping it.
pub fn ladder(kind: LadderKind, f: &FockVector) -> Result<FockVector> {
    let hbar = f.hbar();
    let c = f.coeffs();
    let n_max = f.truncation();
    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![zero; c.len()];
    match kind {
        LadderKind::Annihilate => {
            for n in 1..=n_max {
                out[n - 1] = c[n] * (n as f64 * hbar).sqrt();
            }
        }
        LadderKind::Create => {
            if c[n_max] != zero {
                return Err(Error::TruncationOverflow { truncation: n_max });
            }
            for n in 0..n_max {
                out[n + 1] = c[n] * ((n + 1) as f64 * hbar).sqrt();
            }
        }
    }
    FockVector::new(out, hbar)
}

/// `q̂ = (â⁺ + â)/√2`, `p̂ = i(â⁺ − â)/√2`.
pub fn quadrature_operators(
    hbar: f64,
    truncation: usize,
) -> Result<(OperatorMatrix, OperatorMatrix)> {
    check(hbar)?;
    if truncation < 1 {
        return parameter("quadrature operators need truncation N >= 1");
    }
    let a = lowering(hbar, truncation + 1);
    let ad = a.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = (&ad + &a) * Complex64::new(s, 0.0);
    let p = (&ad - &a) * Complex64::new(0.0, s);
    Ok((
        OperatorMatrix {
            label: OperatorLabel::Position,
            hbar,
            matrix: q,
        },
        OperatorMatrix {
            label: OperatorLabel::Momentum,
            hbar,
            matrix: p,
        },
    ))
}

/// Oscillator Hamiltonian in the chosen ordering.
///
/// Built from the ladder matrices; the symmetric product `ââ⁺` is formed one
/// level beyond the truncation and then cropped so the top diagonal entry
/// is not corrupted by the cut.
pub fn hamiltonian_matrix(
    ordering: Ordering,
    params: &OscillatorParams,
    hbar: f64,
    truncation: usize,
) -> Result<OperatorMatrix> {
    check(hbar)?;
    let dim = truncation + 1;
    let a = lowering(hbar, dim + 1);
    let ad = a.adjoint();
    let number = &ad * &a;
    let w = Complex64::new(params.omega(), 0.0);
    let (full, label) = match ordering {
        Ordering::Normal => (number * w, OperatorLabel::HamiltonianNormal),
        Ordering::Symmetric => (
            (number + &a * &ad) * (w * 0.5),
            OperatorLabel::HamiltonianSymmetric,
        ),
    };
    Ok(OperatorMatrix {
        label,
        hbar,
        matrix: full.view((0, 0), (dim, dim)).into_owned(),
    })
}
