//! Numerical laboratory around the ordinates of Riemann zeta zeros on the
//! critical line: certified zero tables, unit phases attached to each zero,
//! compactly supported bump calculus, oscillatory integrals with stationary
//! phase, and the prime/zero duality sums built from them.
//!
//! Everything here is deterministic: fixed summation orders, fixed panel
//! subdivision, and ordered parallel merges, so outputs are byte-identical
//! across runs and worker counts.

pub mod arith;
pub mod bump;
pub mod characters;
pub mod dd;
pub mod error;
pub mod fit;
pub mod hardy;
pub mod jets;
pub mod opcalc;
pub mod oscint;
pub mod quad;
pub mod sums;
pub mod table_io;
pub mod theta;
pub mod zeros;

pub use error::Error;
pub type Result<T> = std::result::Result<T, Error>;
