//! # supercomplexity
//!
//! Parameter-free generalized entropies and the complexity measures built on
//! top of them.
//!
//! The two effective logarithms
//!
//! | kind | ln_kind(x) |
//! |------|------------|
//! | [`LogKind::Natural`] | ln x |
//! | [`LogKind::Plus`] | -(1 - x^x)/x |
//! | [`LogKind::Minus`] | -(x^(-x) - 1)/x |
//!
//! generate the entropies `H± = -Σ p ln±(p)`, which sandwich the Shannon
//! entropy (`H+ ≤ H ≤ H-`) and coincide with it when every probability is
//! small. The crate is organized as:
//!
//! - [`efflog`]: effective logarithms, their series, numerical inverses and
//!   the fitted polynomial exponentials.
//! - [`entropy`]: distributions, `H±`, Shannon entropy, relative entropies.
//! - [`superstat`]: Boltzmann factors, Gamma-like mixing densities, forward
//!   Laplace transforms and the entropic-form integral.
//! - [`coding`]: code lengths, Kraft sums and the coding-theorem checkers.
//! - [`toyuniv`]: a small prefix-free machine whose algorithmic probability
//!   can be computed exactly by enumeration.
//!
//! All quantities are in natural units (nats). Divide by `ln 2` for bits.

pub mod coding;
pub mod efflog;
pub mod entropy;
mod error;
pub mod numeric;
pub mod superstat;
pub mod toyuniv;

pub use error::{Error, Result};

pub use coding::{CodeLengths, CostFunction, LengthSource};
pub use efflog::{eff_exp, eff_exp_poly, eff_log, eff_log_series, LogKind, PolyApprox};
pub use entropy::{entropy, entropy_series, rel_entropy, rel_entropy_series, Distribution};
pub use superstat::{BoltzmannSpec, Family, MixingDensity};
pub use toyuniv::{Bits, EnumerationReport};

/// Default number of series terms. Terms are bounded by `(1/e)^k / k!`.
pub const DEFAULT_K_MAX: usize = 30;
