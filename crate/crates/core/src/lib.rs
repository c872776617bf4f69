//! Numerical laboratory for nonlocal boxes, process matrices, causal games
//! and oscillator entanglement entropy.

pub mod boxes;
pub mod causal_rac;
pub mod entropy;
pub mod error;
pub mod info;
pub mod info_causality;
pub mod linalg;
pub mod localization;
pub mod process;
pub mod quadrature;
pub mod quantum_chsh;
pub mod rng;
pub mod simplex;

pub use error::{Error, Result};
pub use linalg::{Operator, Pauli, PureState};
