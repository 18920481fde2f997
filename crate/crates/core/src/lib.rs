//! S-unit equations, Fermat criteria and density sieves for real quadratic
//! fields `Q(√d)`.
//!
//! The crate decides, for squarefree `d`, whether the valuation conditions
//! at the primes above 2 are met by every solution of `λ + μ = 1` in
//! S-units, and provides the counting machinery behind the density
//! statements over the family of all such fields.

pub mod cli;
pub mod criterion;
pub mod density;
pub mod error;
pub mod factor;
pub mod frey;
pub mod mersenne;
pub mod quadfield;
pub mod sunit;

pub use error::{Error, Result};
pub use quadfield::{QuadElement, SquarefreeD};

/// Version tag embedded in every JSON report.
pub const SCHEMA_VERSION: u32 = 1;

/// Serializes a big integer as a decimal string so JSON consumers never
/// round it through a double.
pub fn serde_bigint<S: serde::Serializer>(n: &num_bigint::BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(n)
}

/// Serializes any displayable value as its string form.
pub fn serde_display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}
