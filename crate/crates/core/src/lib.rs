//! Demographic bias probing for sentiment classifiers across languages.
//!
//! The crate expands parallel probing templates into samples, attaches
//! positive-sentiment probabilities from any model, computes group-comparison
//! metrics and nonparametric significance tests, and runs the monolingual
//! versus multilingual comparison protocol.

pub mod corpus;
pub mod domain;
pub mod experiments;
pub mod metrics;
pub mod scoring;
pub mod stats;

pub use domain::{Attribute, Gender, SentimentLabel};
