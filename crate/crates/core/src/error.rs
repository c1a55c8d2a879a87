//! Error types shared across the library.

use std::fmt;

use crate::textcore::Language;

/// Errors raised by corpus construction and evaluation operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A language code outside the supported inventory was supplied.
    UnsupportedLanguage(String),
    /// A document does not have enough sentences for the requested operation.
    DegenerateDocument(String),
    /// A sentence index points outside the document.
    IndexOutOfRange {
        /// Offending index.
        index: usize,
        /// Container length.
        len: usize,
    },
    /// An input that must be non-empty was empty.
    EmptyInput,
    /// Source and target language must differ for this operation.
    SameLanguage(Language),
    /// A translation provider call failed; `context` identifies the text involved.
    Provider {
        /// Text (or snippet) whose translation failed.
        context: String,
        /// Underlying wire failure.
        source: ProviderError,
    },
    /// Vectors of mismatched dimensionality were combined.
    DimensionMismatch {
        /// Dimensionality required.
        expected: usize,
        /// Dimensionality found.
        got: usize,
    },
    /// A required language has no data in the input.
    MissingLanguage(Language),
    /// Language identification was asked to classify empty text.
    EmptyText,
    /// No language profile matched the input text.
    Unclassifiable,
    /// Every direction count is zero, so no weights can be formed.
    AllEmpty,
    /// An evaluation was requested over an empty pair list.
    EmptyPairs,
    /// A configuration value violates its documented range.
    InvalidConfig(String),
    /// A record or data file could not be parsed.
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnsupportedLanguage(code) => write!(f, "unsupported language code: {code:?}"),
            Error::DegenerateDocument(id) => {
                write!(f, "document {id:?} has fewer than two sentences")
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "sentence index {index} out of range for document of {len}")
            }
            Error::EmptyInput => write!(f, "input must not be empty"),
            Error::SameLanguage(lang) => {
                write!(
                    f,
                    "source and target language must differ (both {})",
                    lang.code()
                )
            }
            Error::Provider { context, source } => {
                write!(f, "translation provider failed on {context:?}: {source}")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::MissingLanguage(lang) => {
                write!(f, "no data for required language {}", lang.code())
            }
            Error::EmptyText => write!(f, "cannot identify the language of empty text"),
            Error::Unclassifiable => write!(f, "text matched no language profile"),
            Error::AllEmpty => write!(f, "all direction counts are zero"),
            Error::EmptyPairs => write!(f, "evaluation requires at least one pair"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Provider { source, .. } => Some(source),
            _ => None,
        }
    }
}

/// Failure modes of a translation provider call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProviderError {
    /// The request could not be transported (connection, timeout, ...).
    Transport(String),
    /// The provider answered with a non-success HTTP status.
    Status(u16),
    /// The provider answered 200 but the body was not the expected shape.
    MalformedResponse(String),
    /// The provider does not serve the requested language pair.
    UnsupportedPair(Language, Language),
}

impl ProviderError {
    /// Transient failures are worth retrying; the rest fail immediately.
    pub fn is_transient(&self) -> bool {
        match self {
            ProviderError::Transport(_) => true,
            ProviderError::Status(code) => matches!(code, 408 | 429 | 500..=599),
            _ => false,
        }
    }
}

impl fmt::Display for ProviderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProviderError::Transport(msg) => write!(f, "transport failure: {msg}"),
            ProviderError::Status(code) => write!(f, "unexpected HTTP status {code}"),
            ProviderError::MalformedResponse(msg) => write!(f, "malformed response: {msg}"),
            ProviderError::UnsupportedPair(src, tgt) => {
                write!(f, "unsupported pair {}-{}", src.code(), tgt.code())
            }
        }
    }
}

impl std::error::Error for ProviderError {}
