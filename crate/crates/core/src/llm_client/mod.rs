//! Chat-completion clients.
//!
//! Everything implements [`LlmClient`]. Wrappers compose: a provider (HTTP or
//! a scripted stub) is wrapped by [`RetryingClient`] for transport backoff,
//! [`BoundedClient`] for the in-flight limit and [`CachedClient`] for the
//! on-disk response store. [`build_client`] assembles the usual stack.

mod backoff;
mod cache;
mod http;
mod stub;

use std::path::PathBuf;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use backoff::{Backoff, BoundedClient, RetryingClient, Sleeper};
pub use cache::{CacheEntry, CachedClient, CachedSample, ResponseCache};
pub use http::HttpClient;
pub use stub::{EchoClient, ScriptEntry, ScriptedClient};

pub const ENV_API_BASE: &str = "LLMSS_API_BASE";
pub const ENV_API_KEY: &str = "LLMSS_API_KEY";
pub const ENV_CACHE_DIR: &str = "LLMSS_CACHE_DIR";
/// Chat-completions endpoint used when `LLMSS_API_BASE` is unset.
pub const DEFAULT_API_BASE: &str = "https://api.openai.com/v1";

pub const DEFAULT_TEMPERATURE: f64 = 0.7;
pub const DEFAULT_MAX_OUTPUT_TOKENS: u32 = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub model: String,
    pub prompt: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    /// Audit label, typically `{scenario_id}#{attempt}`. Not part of the cache key.
    pub request_tag: String,
    /// Which of several independent samples for the same query this is. Re-queries
    /// of an identical prompt use increasing sample numbers so the cache can hold
    /// each of them. Not part of the cache key.
    #[serde(default)]
    pub sample: u32,
}

impl CompletionRequest {
    pub fn new(model: impl Into<String>, prompt: impl Into<String>) -> Self {
        CompletionRequest {
            model: model.into(),
            prompt: prompt.into(),
            temperature: DEFAULT_TEMPERATURE,
            max_output_tokens: DEFAULT_MAX_OUTPUT_TOKENS,
            request_tag: String::new(),
            sample: 0,
        }
    }

    pub fn check(&self) -> Result<(), ClientError> {
        if self.prompt.is_empty() {
            return Err(ClientError::InvalidRequest("empty prompt".into()));
        }
        if !self.temperature.is_finite() || !(0.0..=2.0).contains(&self.temperature) {
            return Err(ClientError::InvalidRequest(format!("temperature {} outside [0, 2]", self.temperature)));
        }
        if self.max_output_tokens == 0 {
            return Err(ClientError::InvalidRequest("max_output_tokens must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub input_tokens: u64,
    pub output_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionResponse {
    pub text: String,
    pub usage: Option<Usage>,
    pub latency_ms: u64,
    pub cached: bool,
    /// When the provider produced the text. Cache hits keep the original time.
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransportKind {
    Auth,
    Network,
    Overload,
    Malformed,
}

impl TransportKind {
    /// Network failures (including timeouts) and overload or rate limiting are retried.
    pub fn is_retryable(self) -> bool {
        matches!(self, TransportKind::Network | TransportKind::Overload)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClientError {
    #[error("transport error ({kind:?}): {message}")]
    Transport { kind: TransportKind, message: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("response cache: {0}")]
    Cache(String),
}

impl ClientError {
    pub fn transport(kind: TransportKind, message: impl Into<String>) -> Self {
        ClientError::Transport { kind, message: message.into() }
    }

    pub fn transport_kind(&self) -> Option<TransportKind> {
        match self {
            ClientError::Transport { kind, .. } => Some(*kind),
            _ => None,
        }
    }
}

pub trait LlmClient: Send + Sync {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, ClientError>;
}

impl<C: LlmClient + ?Sized> LlmClient for Arc<C> {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, ClientError> {
        (**self).complete(request)
    }
}

impl<C: LlmClient + ?Sized> LlmClient for &C {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, ClientError> {
        (**self).complete(request)
    }
}

/// SHA-256 over model, prompt, temperature and output budget, as lowercase hex.
pub fn cache_key(request: &CompletionRequest) -> String {
    let canonical = serde_json::json!([
        "llmss-cache-v1",
        request.model,
        request.prompt,
        request.temperature,
        request.max_output_tokens,
    ]);
    hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
}

/// Where completions come from and how they are stored.
#[derive(Debug, Clone, Default)]
pub struct ClientConfig {
    /// Stub script to use instead of a provider.
    pub stub: Option<PathBuf>,
    /// Cache location; `LLMSS_CACHE_DIR` takes precedence when set.
    pub cache_dir: Option<PathBuf>,
    pub parallelism: usize,
}

/// Assembles cache, limiter and backoff around a stub or the HTTP provider
/// at `LLMSS_API_BASE` (key from `LLMSS_API_KEY`).
pub fn build_client(config: &ClientConfig) -> Result<Arc<dyn LlmClient>, ClientError> {
    let provider: Arc<dyn LlmClient> = match &config.stub {
        Some(path) => Arc::new(ScriptedClient::from_file(path)?),
        None => {
            let key = std::env::var(ENV_API_KEY)
                .ok()
                .filter(|v| !v.is_empty())
                .ok_or_else(|| ClientError::Config(format!("no stub given and {ENV_API_KEY} is not set")))?;
            let base = std::env::var(ENV_API_BASE).ok().filter(|v| !v.is_empty()).unwrap_or_else(|| DEFAULT_API_BASE.into());
            Arc::new(HttpClient::new(base, Some(key)))
        }
    };
    let retrying = RetryingClient::new(provider, Backoff::default());
    let bounded = BoundedClient::new(retrying, config.parallelism.max(1));
    let cache_dir = std::env::var_os(ENV_CACHE_DIR).map(PathBuf::from).or_else(|| config.cache_dir.clone());
    Ok(match cache_dir {
        Some(dir) => Arc::new(CachedClient::new(bounded, ResponseCache::open(dir)?)),
        None => Arc::new(bounded),
    })
}
