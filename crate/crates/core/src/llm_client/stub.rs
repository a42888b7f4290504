use std::collections::HashMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use chrono::DateTime;
use serde::{Deserialize, Serialize};

use super::{ClientError, CompletionRequest, CompletionResponse, LlmClient, TransportKind};

/// One line of a stub script.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptEntry {
    /// Substring the prompt must contain, or `*` for any prompt.
    #[serde(rename = "match")]
    pub pattern: String,
    #[serde(default)]
    pub response: String,
    /// Fail with this transport error instead of answering.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<TransportKind>,
}

impl ScriptEntry {
    pub fn respond(pattern: impl Into<String>, response: impl Into<String>) -> Self {
        ScriptEntry { pattern: pattern.into(), response: response.into(), error: None }
    }

    pub fn fail(pattern: impl Into<String>, kind: TransportKind) -> Self {
        ScriptEntry { pattern: pattern.into(), response: String::new(), error: Some(kind) }
    }

    fn matches(&self, prompt: &str) -> bool {
        self.pattern == "*" || prompt.contains(&self.pattern)
    }
}

/// Deterministic stand-in for a provider.
///
/// For a given prompt the matching entries are taken in file order: the first
/// call gets the first match, the next call with the same prompt the second,
/// and so on, with the last match repeating once the list runs out. Each prompt
/// has its own position, so concurrent callers working on different prompts
/// see the same answers whatever the interleaving.
#[derive(Debug)]
pub struct ScriptedClient {
    entries: Vec<ScriptEntry>,
    cursors: Mutex<HashMap<String, usize>>,
    calls: AtomicUsize,
}

impl ScriptedClient {
    pub fn new(entries: Vec<ScriptEntry>) -> Self {
        ScriptedClient { entries, cursors: Mutex::new(HashMap::new()), calls: AtomicUsize::new(0) }
    }

    pub fn from_file(path: &Path) -> Result<Self, ClientError> {
        crate::jsonl::read(path)
            .map(Self::new)
            .map_err(|e| ClientError::Config(format!("stub script {}: {e}", path.display())))
    }

    /// Total number of `complete` calls served.
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl LlmClient for ScriptedClient {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, ClientError> {
        request.check()?;
        self.calls.fetch_add(1, Ordering::SeqCst);
        let matching: Vec<&ScriptEntry> = self.entries.iter().filter(|e| e.matches(&request.prompt)).collect();
        if matching.is_empty() {
            return Err(ClientError::Config("stub script has no entry matching the prompt".into()));
        }
        let position = {
            let mut cursors = self.cursors.lock().unwrap();
            let cursor = cursors.entry(request.prompt.clone()).or_insert(0);
            let at = *cursor;
            *cursor += 1;
            at
        };
        let entry = matching[position.min(matching.len() - 1)];
        if let Some(kind) = entry.error {
            return Err(ClientError::transport(kind, format!("scripted {kind:?} failure")));
        }
        Ok(CompletionResponse {
            text: entry.response.clone(),
            usage: None,
            latency_ms: 0,
            cached: false,
            created_at: DateTime::UNIX_EPOCH,
        })
    }
}

/// Answers with the last line of the prompt.
#[derive(Debug, Clone, Copy, Default)]
pub struct EchoClient;

impl LlmClient for EchoClient {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, ClientError> {
        request.check()?;
        Ok(CompletionResponse {
            text: request.prompt.lines().last().unwrap_or_default().to_string(),
            usage: None,
            latency_ms: 0,
            cached: false,
            created_at: DateTime::UNIX_EPOCH,
        })
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::llm_client::{Backoff, RetryingClient};

    fn req(prompt: &str) -> CompletionRequest {
        CompletionRequest::new("stub", prompt)
    }

    #[test]
    fn echo_returns_last_line() {
        let resp = EchoClient.complete(&req("intro\nmove_forward")).unwrap();
        assert_eq!(resp.text, "move_forward");
        assert!(!resp.cached);
    }

    #[test]
    fn entries_are_consumed_per_prompt() {
        let client = ScriptedClient::new(vec![
            ScriptEntry::respond("alpha", "A1"),
            ScriptEntry::respond("*", "any"),
            ScriptEntry::respond("alpha", "A2"),
        ]);
        let texts: Vec<_> = (0..4).map(|_| client.complete(&req("alpha")).unwrap().text).collect();
        assert_eq!(texts, ["A1", "any", "A2", "A2"]);
        assert_eq!(client.complete(&req("beta")).unwrap().text, "any");
        assert_eq!(client.calls(), 5);
    }

    #[test]
    fn no_match_is_an_error() {
        let client = ScriptedClient::new(vec![ScriptEntry::respond("alpha", "A")]);
        assert!(matches!(client.complete(&req("beta")), Err(ClientError::Config(_))));
    }

    #[test]
    fn five_scripted_failures_surface_overload() {
        let stub = Arc::new(ScriptedClient::new(vec![ScriptEntry::fail("*", TransportKind::Overload)]));
        let client = RetryingClient::new(stub.clone(), Backoff::default()).with_sleeper(Arc::new(|_| {}));
        let err = client.complete(&req("p")).unwrap_err();
        assert_eq!(err.transport_kind(), Some(TransportKind::Overload));
        assert_eq!(stub.calls(), 5);
    }

    #[test]
    fn script_lines_parse() {
        let e: ScriptEntry = serde_json::from_str(r#"{"match":"*","error":"network"}"#).unwrap();
        assert_eq!(e, ScriptEntry::fail("*", TransportKind::Network));
        let e: ScriptEntry = serde_json::from_str(r#"{"match":"x","response":"move_forward"}"#).unwrap();
        assert_eq!(e.response, "move_forward");
    }
}
