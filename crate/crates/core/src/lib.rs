//! Exact divisor theory on finite multigraphs, metrized curve complexes, and
//! vertical log-semistable curves over the standard logarithmic point.
//!
//! Everything here is exact integer arithmetic: chip-firing and Baker–Norine
//! ranks on multigraphs, finite models of genus-0/1 components, divisor
//! classes on metrized curve complexes, line-bundle classes on log curves
//! together with the quotient onto the complex Picard group, and sweep
//! drivers that turn the Riemann–Roch identity, Clifford bound, and the
//! Picard comparison statements into falsifiable batch checks.

pub mod component;
pub mod complex;
pub mod divisor;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod linalg;
pub mod logcurve;
pub mod monoid;
pub mod sweep;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
