//! CGP invariants, GPPV q-series and the radial limit for negative-definite
//! plumbed 3-manifolds.

pub mod asymptotics;
pub mod cgp;
pub mod constants;
pub mod context;
pub mod error;
pub mod model;
pub mod precision;
pub mod qseries;
pub mod radial;
pub mod reciprocity;

pub use error::{Error, Result};

/// Exact rational used for all lattice data and exponents.
pub type Rat = num_rational::Ratio<i128>;
