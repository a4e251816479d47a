//! Ihara zeta functions of periodic cubical lattices, their cyclotomic-like factors,
//! and brute-force oracles that check the closed forms.

pub mod algebra;
pub mod error;
pub mod lattice;
pub mod limits;
pub mod numtheory;
pub mod oracle;
pub mod orbits;
pub mod psi;
pub mod report;
pub mod verify;
pub mod zeta;

pub use error::{Error, Result};
pub use limits::Limits;
