//! Binary Pólya necklaces and the exact periodic-orbit expansion of a
//! one-dimensional ray-splitting well.
//!
//! The crate is organised in four layers:
//!
//! - [`necklaces`]: canonical cyclic words over `{L, R}`, counting and
//!   enumeration, primitive decomposition and the orbit statistics
//!   `n_L, n_R, n, α, β, γ, χ`.
//! - [`algebra`]: exact rational polynomials in the reflection coefficient
//!   `r`, Chebyshev polynomials and elimination of `t` through `t² = 1 − r²`.
//! - [`identities`]: both sides of the necklace sum rules, built from
//!   enumeration and compared exactly.
//! - [`spectral`]: the secular equation, its roots (direct scan and the
//!   Chebyshev factorisation for rational frequency ratios), and smoothed
//!   densities of states from the roots and from the necklace trace formula.

pub mod algebra;
pub mod error;
pub mod identities;
pub mod necklaces;
pub mod spectral;

pub use error::{Error, Result};
