//! Building blocks for constructing and evaluating many-to-many
//! multilingual summarization corpora: segmentation and tokenization over a
//! fixed language inventory, ROUGE metrics, gap-sentence selection,
//! denoising-style input corruption, pseudo-pair generation behind a
//! pluggable translation provider, leakage-free dataset splitting with
//! temperature-based direction sampling, and evaluation utilities
//! (language identification, per-direction score reports, embedding-drift
//! analysis).
//!
//! ```
//! use m2ms_core::rouge::rouge_n;
//!
//! let score = rouge_n(&["the", "cat", "sat"], &["the", "cat"], 1);
//! assert!((score.f1 - 0.8).abs() < 1e-12);
//! ```

#![warn(missing_docs)]

pub mod corpusops;
pub mod error;
pub mod evalkit;
pub mod gsg;
pub mod noising;
pub mod provider;
pub mod pseudogen;
pub mod rouge;
pub mod seeding;
pub mod textcore;

pub use error::{Error, ProviderError};
pub use textcore::{Document, Language};
