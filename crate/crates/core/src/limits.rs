//! Desk-scale resource bounds.
//!
//! `CUBEZETA_MAX_DEGREE`, when set to a positive integer, replaces every
//! default bound below.

use crate::error::{Error, Result};

/// Environment variable overriding the default bounds.
pub const MAX_DEGREE_ENV: &str = "CUBEZETA_MAX_DEGREE";

/// Default bound on the degree of a cyclotomic-like polynomial.
pub const DEFAULT_PSI_DEGREE: u64 = 10_000;
/// Default bound on the size of an index box `J_{d_1} x ... x J_{d_q}`.
pub const DEFAULT_ORBIT_BOX: u64 = 1_000_000;
/// Default bound on the number of cells in an explicitly assembled complex.
pub const DEFAULT_ASSEMBLED_CELLS: u64 = 5_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub psi_degree: u64,
    pub orbit_box: u64,
    pub assembled_cells: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            psi_degree: DEFAULT_PSI_DEGREE,
            orbit_box: DEFAULT_ORBIT_BOX,
            assembled_cells: DEFAULT_ASSEMBLED_CELLS,
        }
    }
}

impl Limits {
    /// Defaults, overridden by the environment variable when it parses.
    pub fn from_env() -> Self {
        match std::env::var(MAX_DEGREE_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<u64>().ok())
        {
            Some(v) if v > 0 => Limits {
                psi_degree: v,
                orbit_box: v,
                assembled_cells: v,
            },
            _ => Limits::default(),
        }
    }

    pub(crate) fn check(value: u64, bound: u64, what: &str) -> Result<()> {
        if value > bound {
            Err(Error::Resource(format!(
                "{what} = {value} exceeds bound {bound}"
            )))
        } else {
            Ok(())
        }
    }
}
