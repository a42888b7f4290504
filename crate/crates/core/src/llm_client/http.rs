use std::time::{Duration, Instant};

use chrono::Utc;
use serde::Deserialize;
use serde_json::json;

use super::{ClientError, CompletionRequest, CompletionResponse, LlmClient, TransportKind, Usage};

/// Chat-completion provider over HTTP. Posts the prompt as a single user
/// message to `{base}/chat/completions`.
pub struct HttpClient {
    base: String,
    api_key: Option<String>,
    agent: ureq::Agent,
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
    usage: Option<WireUsage>,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireMessage,
}

#[derive(Deserialize)]
struct WireMessage {
    content: Option<String>,
}

#[derive(Deserialize)]
struct WireUsage {
    prompt_tokens: u64,
    completion_tokens: u64,
}

fn classify_status(status: u16) -> TransportKind {
    match status {
        401 | 403 => TransportKind::Auth,
        408 => TransportKind::Network,
        429 | 500..=599 => TransportKind::Overload,
        _ => TransportKind::Malformed,
    }
}

impl HttpClient {
    pub fn new(base: impl Into<String>, api_key: Option<String>) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(120)))
            .build()
            .into();
        HttpClient { base: base.into().trim_end_matches('/').to_string(), api_key, agent }
    }

    pub fn endpoint(&self) -> String {
        format!("{}/chat/completions", self.base)
    }
}

impl LlmClient for HttpClient {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, ClientError> {
        request.check()?;
        let body = json!({
            "model": request.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
        });
        let started = Instant::now();
        let mut call = self.agent.post(self.endpoint());
        if let Some(key) = &self.api_key {
            call = call.header("Authorization", format!("Bearer {key}"));
        }
        let mut response =
            call.send_json(&body).map_err(|e| ClientError::transport(TransportKind::Network, e.to_string()))?;
        let status = response.status().as_u16();
        if !(200..300).contains(&status) {
            let detail = response.body_mut().read_to_string().unwrap_or_default();
            return Err(ClientError::transport(classify_status(status), format!("HTTP {status}: {detail}")));
        }
        let wire: WireResponse = response
            .body_mut()
            .read_json()
            .map_err(|e| ClientError::transport(TransportKind::Malformed, e.to_string()))?;
        let text = wire
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| ClientError::transport(TransportKind::Malformed, "response has no message content"))?;
        Ok(CompletionResponse {
            text,
            usage: wire.usage.map(|u| Usage { input_tokens: u.prompt_tokens, output_tokens: u.completion_tokens }),
            latency_ms: started.elapsed().as_millis() as u64,
            cached: false,
            created_at: Utc::now(),
        })
    }
}
