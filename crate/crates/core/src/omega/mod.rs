//! ω-orthogonalization: the fixed-point iteration, its coefficient tables,
//! custom coefficient operations and the conform extension.

pub mod conform;
pub mod counts;
pub mod custom;
pub mod deform;
pub mod properties;
pub mod step;
pub mod tables;

pub use step::{iterate, o_omega, step, step_residual, FGsOp, GsOp, IdentityOp, OmegaOp, TupleOp};
pub use tables::{extract_omega_tables, varpi_symmetry_check, CoeffTable, PTables, TableKey};
pub use counts::{coeff_count, coeff_count_enumerated, CountKind};
pub use custom::{custom_fq_eval, custom_orth_eval, FreeCoeffData};
pub use conform::{conform_extend, conform_extend_block};
pub use properties::{property_checks, PropertyReport};
pub use deform::{omega_deform, omega_r, DeformResult};
