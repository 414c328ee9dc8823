//! Exact truncated algebra over Clifford generators and typed perturbation letters.

pub mod element;
pub mod eval;
pub mod word;

pub use element::{FormalElement, DEFAULT_DEGREE_CAP};
pub use word::{mono_mul, Letter, Mask, Word};
