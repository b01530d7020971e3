//! Reference models for measuring group imbalance in citation networks.
//!
//! Observed citations between papers are compared against three null
//! models that redistribute every citation at random while keeping, in
//! turn, more of the network's structure:
//!
//! * random draws (RD): the number of citations each paper makes;
//! * homophilic draws (HD): additionally, citation counts between papers
//!   of each rank, country and topic;
//! * preferential draws (PD): additionally, approximately, the spread of
//!   citations received per paper.
//!
//! Model arithmetic is generic over [`Scalar`]; [`ExactExpectedCitations`]
//! keeps every expectation as an exact fraction.

pub mod corpus;
mod error;
pub mod imbalance;
pub mod ranking;
pub mod refmodels;
pub mod scalar;
pub mod synth;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use corpus::{AttributeSet, CitationNetwork, GenderCategory, Paper};
pub use refmodels::{ModelKind, ModelSpec};

/// Rational number type used for exact model arithmetic.
pub type Rational = num_rational::BigRational;

/// Expected citations in double precision.
pub type ExpectedCitationsF64 = refmodels::ExpectedCitations<f64>;
/// Expected citations in single precision.
pub type ExpectedCitationsF32 = refmodels::ExpectedCitations<f32>;
/// Expected citations as exact fractions.
pub type ExactExpectedCitations = refmodels::ExpectedCitations<Rational>;
/// Contribution group with double-precision weight.
pub type ContributionGroupF64 = refmodels::ContributionGroup<f64>;
