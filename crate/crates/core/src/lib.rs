//! Spanning-forest broadcast on a simulated multiple-access channel with
//! collision detection.
//!
//! Each station holds one edge of an unknown graph. Stations broadcast on a
//! shared channel that reports silence, a single heard message, or a
//! collision, and together they reveal a spanning forest.

pub mod adversary;
pub mod channel;
pub mod error;
pub mod graph;
pub mod harness;
pub mod oracle;
pub mod seed;
pub mod station;
pub mod weight;

pub use error::{Error, Result};

/// Exact weights.
pub type Rational = num_rational::BigRational;
pub type RationalGraph = graph::Graph<Rational>;
pub type IntGraph = graph::Graph<u64>;
