//! Translation providers: the trait the pseudo-pair builder calls, a
//! deterministic mock for tests and offline runs, and an HTTP client that
//! speaks the `/translate` wire protocol with retried transport failures.

use std::collections::HashMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::ProviderError;
use crate::textcore::Language;

/// Environment variable the HTTP provider reads its endpoint from.
pub const PROVIDER_URL_ENV: &str = "M2MS_PROVIDER_URL";

/// A sentence-level translation service.
pub trait TranslationProvider: Send + Sync {
    /// Translate `text` from `src` into `tgt`.
    fn translate(&self, text: &str, src: Language, tgt: Language) -> Result<String, ProviderError>;

    /// Whether the provider serves this pair. Defaults to everything.
    fn supports(&self, _src: Language, _tgt: Language) -> bool {
        true
    }
}

/// Deterministic offline provider backed by fixed token dictionaries.
///
/// Translation applies the `(src, tgt)` dictionary token-wise over
/// whitespace-separated tokens; unknown tokens pass through unchanged, and
/// `src == tgt` is always the identity. With no dictionaries installed the
/// provider is a pure echo, which downstream round-trip filtering treats as
/// a perfect translator.
#[derive(Debug, Clone, Default)]
pub struct MockProvider {
    tables: HashMap<(Language, Language), HashMap<String, String>>,
}

impl MockProvider {
    /// A provider that echoes every input.
    pub fn identity() -> MockProvider {
        MockProvider::default()
    }

    /// Install (or extend) the token dictionary for one direction.
    pub fn with_table(
        mut self,
        src: Language,
        tgt: Language,
        entries: &[(&str, &str)],
    ) -> MockProvider {
        let table = self.tables.entry((src, tgt)).or_default();
        for (from, to) in entries {
            table.insert((*from).to_string(), (*to).to_string());
        }
        self
    }
}

impl TranslationProvider for MockProvider {
    fn translate(&self, text: &str, src: Language, tgt: Language) -> Result<String, ProviderError> {
        if src == tgt {
            return Ok(text.to_string());
        }
        let table = self.tables.get(&(src, tgt));
        let translated: Vec<&str> = text
            .split_whitespace()
            .map(|token| {
                table
                    .and_then(|t| t.get(token))
                    .map(String::as_str)
                    .unwrap_or(token)
            })
            .collect();
        Ok(translated.join(" "))
    }
}

/// Retry schedule for transient provider failures: `max_attempts` total
/// tries with exponentially growing pauses starting at `base_delay`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    /// Total tries, including the first.
    pub max_attempts: u32,
    /// Pause before the second try; doubles each retry.
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 3,
            base_delay: Duration::from_millis(200),
        }
    }
}

impl RetryPolicy {
    /// Pause before the next try after `attempt` (1-based) failed tries.
    pub fn delay_after(&self, attempt: u32) -> Duration {
        self.base_delay * 2u32.saturating_pow(attempt.saturating_sub(1))
    }
}

#[derive(Serialize)]
struct TranslateRequest<'a> {
    text: &'a str,
    src: &'a str,
    tgt: &'a str,
}

#[derive(Deserialize)]
struct TranslateResponse {
    text: String,
}

/// HTTP provider: `POST {base}/translate` with body
/// `{"text": ..., "src": "en", "tgt": "zh"}`, expecting `{"text": ...}`.
///
/// Transport failures and retryable statuses (408, 429, 5xx) are retried
/// per the [`RetryPolicy`]; other non-200 statuses and malformed bodies
/// fail immediately.
pub struct HttpProvider {
    endpoint: String,
    client: reqwest::blocking::Client,
    retry: RetryPolicy,
}

impl HttpProvider {
    /// Build a provider against `base_url` (scheme + host, optional path).
    pub fn new(base_url: &str) -> HttpProvider {
        HttpProvider {
            endpoint: format!("{}/translate", base_url.trim_end_matches('/')),
            client: reqwest::blocking::Client::new(),
            retry: RetryPolicy::default(),
        }
    }

    /// Read the endpoint from [`PROVIDER_URL_ENV`].
    pub fn from_env() -> Result<HttpProvider, ProviderError> {
        match std::env::var(PROVIDER_URL_ENV) {
            Ok(url) if !url.trim().is_empty() => Ok(HttpProvider::new(url.trim())),
            _ => Err(ProviderError::Transport(format!(
                "{PROVIDER_URL_ENV} is not set"
            ))),
        }
    }

    /// Override the retry schedule.
    pub fn with_retry(mut self, retry: RetryPolicy) -> HttpProvider {
        self.retry = retry;
        self
    }

    fn attempt(&self, text: &str, src: Language, tgt: Language) -> Result<String, ProviderError> {
        let request = TranslateRequest {
            text,
            src: src.code(),
            tgt: tgt.code(),
        };
        let response = self
            .client
            .post(&self.endpoint)
            .json(&request)
            .send()
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        let status = response.status();
        if !status.is_success() {
            return Err(ProviderError::Status(status.as_u16()));
        }
        let body: TranslateResponse = response
            .json()
            .map_err(|e| ProviderError::MalformedResponse(e.to_string()))?;
        Ok(body.text)
    }
}

impl TranslationProvider for HttpProvider {
    fn translate(&self, text: &str, src: Language, tgt: Language) -> Result<String, ProviderError> {
        let mut attempt = 0u32;
        loop {
            attempt += 1;
            match self.attempt(text, src, tgt) {
                Ok(translated) => return Ok(translated),
                Err(err) if err.is_transient() && attempt < self.retry.max_attempts => {
                    log::warn!(
                        "provider attempt {attempt}/{} failed ({err}); retrying",
                        self.retry.max_attempts
                    );
                    std::thread::sleep(self.retry.delay_after(attempt));
                }
                Err(err) => return Err(err),
            }
        }
    }
}
