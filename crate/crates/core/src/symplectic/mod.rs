//! Poisson and Jacobian brackets on exact phase polynomials, the classical
//! Liouville operator, normal coordinates, and a symplectic step for the
//! (optionally damped) harmonic oscillator.
//!
//! The symplectic form factor is fixed to one on every canonical pair.

mod exact;
mod flow;
mod poly;

pub use exact::Exact;
pub use flow::{hamilton_step, OscillatorParams, PhasePoint};
pub use poly::{Basis, PhasePolynomial, Var, DEFAULT_DEGREE_CAP};

use crate::error::{domain, Result};

/// Brings `g` into `f`'s coordinate basis.
fn align(f: &PhasePolynomial, g: &PhasePolynomial) -> Result<PhasePolynomial> {
    if f.pairs() != g.pairs() {
        return domain(format!(
            "brackets need a shared ring: {} pairs vs {} pairs",
            f.pairs(),
            g.pairs()
        ));
    }
    g.in_basis(f.basis())
}

/// `∂(f, g)/∂(x, y)` for two distinct variables of `f`'s basis.
pub fn jacobian_bracket(
    f: &PhasePolynomial,
    g: &PhasePolynomial,
    pair: (Var, Var),
) -> Result<PhasePolynomial> {
    let g = align(f, g)?;
    let (x, y) = pair;
    if x == y {
        return domain(format!(
            "jacobian bracket needs distinct variables, got {x} twice"
        ));
    }
    let lhs = f.derivative(x)?.mul(&g.derivative(y)?)?;
    let rhs = f.derivative(y)?.mul(&g.derivative(x)?)?;
    Ok(&lhs - &rhs)
}

/// Poisson bracket `{f, g}` summed over all canonical pairs.
///
/// Polynomials in normal coordinates use `{f, g} = -i Σ ∂(f, g)/∂(z_k, z̄_k)`,
/// the same bracket expressed through the non-canonical change of variables.
/// The result is written in `f`'s basis.
pub fn poisson_bracket(f: &PhasePolynomial, g: &PhasePolynomial) -> Result<PhasePolynomial> {
    let g = align(f, g)?;
    let mut acc = PhasePolynomial::zero(f.pairs(), f.basis());
    for k in 0..f.pairs() {
        let term = jacobian_bracket(f, &g, f.pair_vars(k))?;
        acc = &acc + &term;
    }
    Ok(match f.basis() {
        Basis::Canonical => acc,
        Basis::Normal => acc.scale(&-Exact::i()),
    })
}

/// The classical Liouville operator `f ↦ {f, H}` for a fixed Hamiltonian.
#[derive(Debug, Clone)]
pub struct LiouvilleOperator {
    hamiltonian: PhasePolynomial,
}

impl LiouvilleOperator {
    pub fn new(hamiltonian: PhasePolynomial) -> Self {
        LiouvilleOperator { hamiltonian }
    }

    pub fn hamiltonian(&self) -> &PhasePolynomial {
        &self.hamiltonian
    }

    pub fn apply(&self, f: &PhasePolynomial) -> Result<PhasePolynomial> {
        poisson_bracket(f, &self.hamiltonian)
    }
}

/// Applies the Liouville operator of `h` to `f`; identical to `{f, h}`.
pub fn liouville_apply(h: &PhasePolynomial, f: &PhasePolynomial) -> Result<PhasePolynomial> {
    LiouvilleOperator::new(h.clone()).apply(f)
}

/// Rewrites `f(q, p)` in terms of `z = (q + ip)/√2`, `z̄ = (q - ip)/√2`.
pub fn to_normal_coordinates(f: &PhasePolynomial) -> Result<PhasePolynomial> {
    f.to_normal()
}
