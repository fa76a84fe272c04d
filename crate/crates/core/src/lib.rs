//! Speed limits for measurement outcome probabilities in finite-dimensional
//! quantum systems.
//!
//! The crate measures how fast the outcome distribution of a fixed
//! measurement can change under Hamiltonian dynamics, and checks that speed
//! against a family of upper bounds: trade-off bounds pairing an energy cost
//! with a commutator-based measurement uncertainty, a classical Fisher
//! information bound, quasiprobability identities that reproduce the
//! uncertainty term from the imaginary part of an auxiliary distribution,
//! qubit closed forms, a bipartite correlation witness built from optimized
//! local measurements, and minimum-time bounds for driven and thermalizing
//! dynamics.
//!
//! Everything works on dense matrices at dimensions up to a few tensor-product
//! factors, with deterministic seeded randomness throughout so ensemble checks
//! are reproducible.

pub mod athermality;
pub mod correlation;
pub mod error;
pub mod kdq;
pub mod linalg;
pub mod quantum;
pub mod qubit;
mod search;
pub mod speedlimit;
pub mod tolerances;

pub use error::{Error, Result};
