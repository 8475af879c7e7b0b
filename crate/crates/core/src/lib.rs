//! Representative-subset selection and contamination scanning for evaluation
//! benchmarks.
//!
//! The crate is organised around four pieces:
//!
//! - [`corpus`]: ingestion of text corpora, image-token corpora, embedding
//!   matrices and score tables, plus the word tokenizer shared by everything
//!   downstream.
//! - [`coreset`]: farthest-first (k-center greedy) selection of a lite subset
//!   over concatenated embeddings, with an exhaustive solver for small inputs.
//! - [`decontam`]: n-gram lookup indexes over training text and image tokens,
//!   and scanners that label benchmark instances by contamination category.
//! - [`scoring`]: per-dataset normalisation to 0..100, aggregation, and
//!   Pearson/Spearman correlation between full and lite runs.

pub mod coreset;
pub mod corpus;
pub mod decontam;
mod error;
pub mod hash;
pub mod json;
pub mod lite;
pub mod scoring;

pub use error::{Error, Result};
