//! Backend-generic geometry of Clifford systems: decompositions, actions and connections.

pub mod actions;
pub mod connection;
pub mod decomp;
pub mod repr;
pub mod system;

pub use actions::FPair;
pub use connection::{ConnectionData, EtaForm, PredicateKind};
pub use decomp::Side;
pub use system::{CliffordSystem, FloatingSystem};
