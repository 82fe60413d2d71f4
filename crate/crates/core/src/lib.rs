//! Weighted piecewise-linear tree maps and Thurston-type obstructions.
//!
//! The crate models a finite tree with a marked vertex set, a
//! map sending each segment of a finer subdivision affinely onto an edge,
//! and positive segment weights. From that data it computes the transition
//! matrix, certifies bounds on its spectral radius with exact rational
//! witnesses, enumerates periodic orbits, analyses the Cantor-multicurve
//! condition, and performs the self-grafting construction that produces new
//! tree maps with more Julia-type periodic vertex cycles.
//!
//! All algorithms are generic over [`Scalar`]; the aliases at the crate root
//! fix the exact rational instantiation.

pub mod dot;
pub mod error;
pub mod fixtures;
pub mod graft;
pub mod io;
pub mod orbits;
pub mod scalar;
pub mod spectral;
pub mod tree;

pub use error::{Error, Result, Violation};
pub use scalar::Scalar;

/// Exact rationals with arbitrary-precision numerator and denominator.
pub type Rational = num_rational::BigRational;

pub type TreeMap = tree::MarkedTreeMap<Rational>;
pub type RationalMatrix = spectral::Matrix<Rational>;
pub type Point = tree::TreePoint<Rational>;
pub type Certificate = spectral::SpectralCertificate<Rational>;
pub type Estimate = spectral::SpectralEstimate<Rational>;
