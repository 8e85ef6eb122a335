//! Ladder operators on a tensor product of truncated mode Fock spaces.
//!
//! Matrix elements are `√(nħ)`, kept as exact radicands so a commutator on
//! an interior state either cancels exactly or leaves an exact remainder.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{parameter, Error, Result};

/// Largest tensor-product dimension that is enumerated.
pub const MODE_DIMENSION_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeCommutatorReport {
    pub modes: usize,
    pub truncation: usize,
    pub dimension: usize,
    /// `ħ` used by every mode.
    pub mode_hbar: Vec<f64>,
    /// `max |([â_j, â⁺_l] − ħδ_jl)ψ|` over interior basis states.
    pub residuals: Vec<Vec<f64>>,
    pub max_residual: f64,
    /// Every residual cancelled exactly in rational arithmetic.
    pub exact_zero: bool,
}

/// `Σ c_r √r` keyed by radicand; perfect squares fold into `r = 1`.
#[derive(Default)]
struct SurdSum(BTreeMap<BigRational, BigRational>);

fn exact_sqrt(r: &BigRational) -> Option<BigRational> {
    let (n, d) = (r.numer(), r.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| BigRational::new(sn, sd))
}

impl SurdSum {
    /// Adds `coeff·√radicand`.
    fn add(&mut self, coeff: BigRational, radicand: BigRational) {
        if coeff.is_zero() || radicand.is_zero() {
            return;
        }
        let (c, r) = match exact_sqrt(&radicand) {
            Some(s) => (coeff * s, BigRational::one()),
            None => (coeff, radicand),
        };
        let entry = self.0.entry(r.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.0.remove(&r);
        }
    }

    fn magnitude(&self) -> f64 {
        self.0
            .iter()
            .map(|(r, c)| {
                c.to_f64().unwrap_or(f64::INFINITY) * r.to_f64().unwrap_or(f64::INFINITY).sqrt()
            })
            .sum::<f64>()
            .abs()
    }
}

fn rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Parameter(format!("non-finite value {x}")))
}

/// Builds `â_j`, `â⁺_l` on `modes` copies of a level-`truncation` Fock space
/// with one shared `ħ` and checks `[â_j, â⁺_l] = ħδ_jl` on every basis state
/// whose raised image stays inside the truncation.
pub fn mode_commutator_check(
    modes: usize,
    truncation: usize,
    hbar: f64,
) -> Result<ModeCommutatorReport> {
    if modes == 0 || truncation == 0 {
        return parameter("need at least one mode and truncation >= 1");
    }
    if !(hbar.is_finite() && hbar > 0.0) {
        return parameter(format!("hbar must be > 0, got {hbar}"));
    }
    let levels = truncation + 1;
    let dimension = levels
        .checked_pow(modes as u32)
        .filter(|&d| d <= MODE_DIMENSION_CAP)
        .ok_or(Error::Dimension {
            dim: levels.saturating_pow(modes as u32),
            cap: MODE_DIMENSION_CAP,
        })?;
    let h = rational(hbar)?;
    let level = |n: usize| BigRational::from_integer(BigInt::from(n)) * &h;

    let mut residuals = vec![vec![0.0f64; modes]; modes];
    let mut exact_zero = true;
    let mut state = vec![0usize; modes];
    for _ in 0..dimension {
        for j in 0..modes {
            for l in 0..modes {
                if state[l] == truncation {
                    continue;
                }
                // images keyed by the resulting occupation vector
                let mut out: BTreeMap<Vec<usize>, SurdSum> = BTreeMap::new();
                // â_j â⁺_l ψ
                let mut up = state.clone();
                up[l] += 1;
                let r_up = level(up[l]);
                if up[j] > 0 {
                    let r_down = level(up[j]);
                    let mut img = up.clone();
                    img[j] -= 1;
                    out.entry(img)
                        .or_default()
                        .add(BigRational::one(), r_up * r_down);
                }
                // −â⁺_l â_j ψ
                if state[j] > 0 {
                    let r_down = level(state[j]);
                    let mut mid = state.clone();
                    mid[j] -= 1;
                    let r_up = level(mid[l] + 1);
                    let mut img = mid;
                    img[l] += 1;
                    out.entry(img)
                        .or_default()
                        .add(-BigRational::one(), r_down * r_up);
                }
                if j == l {
                    out.entry(state.clone())
                        .or_default()
                        .add(-h.clone(), BigRational::one());
                }
                for v in out.values() {
                    if !v.0.is_empty() {
                        exact_zero = false;
                        residuals[j][l] = residuals[j][l].max(v.magnitude());
                    }
                }
            }
        }
        // next occupation vector, mode 0 fastest
        for slot in state.iter_mut() {
            *slot += 1;
            if *slot < levels {
                break;
            }
            *slot = 0;
        }
    }
    let max_residual = residuals.iter().flatten().copied().fold(0.0, f64::max);
    Ok(ModeCommutatorReport {
        modes,
        truncation,
        dimension,
        mode_hbar: vec![hbar; modes],
        residuals,
        max_residual,
        exact_zero,
    })
}
