//! Smooth q-grams and their application to overlap detection among long,
//! error-prone sequencing reads.
//!
//! A smooth q-gram is obtained by CGK-embedding a q-gram into Hamming space
//! and keeping a fixed random subset of `m` coordinates. Identical q-grams
//! always produce identical smooth q-grams; q-grams at small edit distance
//! collide with a probability given by [`embedding::match_probability`].
//!
//! The crate is organised as:
//!
//! - [`model`]: parameters, per-round randomness and shared domain types
//! - [`embedding`]: CGK embedding and smooth q-gram generation
//! - [`edit`]: thresholded (banded) and full edit distance
//! - [`index`]: signatures, frequency filter, subsampling, bucket search and
//!   the standalone similar-pair join
//! - [`overlap`]: candidate verification, shared-substring recovery and the
//!   end-to-end overlap detector
//! - [`fasta`], [`output`], [`sim`], [`eval`]: ingestion, the overlap TSV
//!   format, the read simulator and the accuracy harness

pub mod edit;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod fasta;
pub mod index;
pub mod model;
pub mod output;
pub mod overlap;
pub mod sim;

pub use error::{Error, Result};
pub use model::{derive_randomness, Params, Randomness, Read, ReadSet, Signature, SmoothQGram};
