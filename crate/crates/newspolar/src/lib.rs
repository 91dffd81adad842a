//! Batch toolkit for comparing how partisan sub-corpora of a news archive
//! talk about the same subject.
//!
//! The library partitions a document collection by outlet partisanship,
//! scores every article with a lexicon-and-rule sentiment model, aggregates
//! monthly time series per partisan bucket (three-month moving average,
//! Akima gap interpolation), trains subword skip-gram embeddings for two
//! sub-corpora, aligns the spaces with an orthogonal Procrustes transform,
//! and mines frequency-ranked word pairs whose cross-corpus translation
//! differs — the machine half of a divergent-usage review workflow.
//!
//! Every stage is deterministic given a seed and a single worker. The
//! `cli` module wires the stages into subcommands; the `examples/`
//! directory holds one runnable example per capability.

pub mod alignment;
pub mod analytics;
pub mod cli;
pub mod corpus;
pub mod embeddings;
mod error;
pub mod sentiment;
pub mod synthetic;

pub use error::{Error, Result};
