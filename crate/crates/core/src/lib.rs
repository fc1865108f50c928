//! Equilibrium reduced states of open quantum systems and refined
//! Bloch-Redfield dynamics.
//!
//! The crate covers the second-order (weak-coupling) mean-force Gibbs state,
//! the Hamiltonian of mean force in its direct and exponential forms, the
//! high-temperature Hamiltonian of mean force, a numerically exact reference
//! for a qubit coupled to a single oscillator, full/secular Bloch-Redfield
//! generators built on any reference Hamiltonian, and a high-temperature HEOM
//! propagator for the Drude-Lorentz bath.

pub mod bath;
pub mod error;
pub mod exact;
pub mod fit;
pub mod heom;
pub mod master_eq;
pub mod mean_force;
pub mod ode;
pub mod operators;
pub mod quadrature;

pub use error::{Error, Result};
