//! Fermionic-quantum orthogonalization of Clifford systems.
//!
//! Two backends share one set of generic algorithms: an exact truncated
//! formal algebra (`formal`) and dense real matrices (`matrix`). Both
//! implement [`algebra::Algebra`].

pub mod algebra;
pub mod analytic;
pub mod block2;
pub mod cli;
pub mod clifford;
pub mod error;
pub mod formal;
pub mod gram_schmidt;
pub mod jet;
pub mod matrix;
pub mod omega;
pub mod rational;
pub mod serialize;
pub mod ring;
pub mod tpoly;

pub use error::{Error, Result};
pub use formal::FormalElement;
pub use matrix::DenseMatrix;
pub use rational::Rational;
pub use tpoly::TPoly;
