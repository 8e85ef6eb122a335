//! Quantum-mechanical structure built from classical harmonic oscillators
//! in a thermal bath.
//!
//! * [`symplectic`]: exact phase polynomials, Poisson brackets, Liouville
//!   operator, normal coordinates, leapfrog step.
//! * [`bargmann`]: Gaussian-measure Fock space of holomorphic functions.
//! * [`dynamics`]: evolution of non-equilibrium states.
//! * [`bath`]: Gibbs sampling, partition function and action scale.
//! * [`chain`]: periodic oscillator chain as a lattice field.

pub mod bargmann;
pub mod bath;
pub mod chain;
pub mod dynamics;
pub mod error;
pub mod stats;
pub mod symplectic;

pub use error::{Error, Result};
