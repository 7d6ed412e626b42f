//! Bell inequalities for qubits built from the Cauchy–Schwarz inequality.
//!
//! * [`bellpoly`]: exact multilinear polynomials in dichotomic observables.
//! * [`lhvlab`]: exhaustive local-hidden-variable analysis, root spectra,
//!   `S_n` classification and facet certification.
//! * [`csderive`]: the Cauchy–Schwarz derivation engine.
//! * [`catalog`]: built-in inequalities.
//! * [`qviolation`]: quantum values, see-saw optimisation, GHZ scans and
//!   Werner-state visibility thresholds.

pub mod bellpoly;
pub mod catalog;
pub mod csderive;
pub mod error;
pub mod lhvlab;
pub mod qviolation;
pub mod rational;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use rational::Rational;
