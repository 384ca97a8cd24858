//! Algebraic and combinatorial invariants of distance-regular graphs.
//!
//! The crate works at two levels. From an intersection array alone it
//! computes exact intersection numbers, the spectrum, Krein parameters,
//! Q-polynomial orderings and the scalars attached to them. From a concrete
//! graph it builds the Bose–Mesner and subconstituent matrices, checks the
//! matrix identities they satisfy, and decomposes the standard module into
//! irreducible modules for the subconstituent algebra.

#![allow(clippy::needless_range_loop)]

pub mod array;
pub mod duality;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod residual;
pub mod spectral;
pub mod tmodules;
pub mod tolerance;

pub use array::{
    feasibility_report, intersection_numbers, parse_array, FeasibilityCheck, FeasibilityReport,
    IntersectionArray, IntersectionNumbers, Rational,
};
pub use error::{Error, Result};
pub use residual::{Residual, ResidualReport};
pub use spectral::{
    cosine_sequence, eigenvalues, multiplicities, spectral_data, spectral_intersection_numbers,
    verify_orthogonality, CosineSequence, OrthogonalityReport, RecurrenceArray, SpectralData,
};
pub use tolerance::Tolerance;
