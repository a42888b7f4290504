use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use super::{ClientError, CompletionRequest, CompletionResponse, LlmClient};

/// Exponential backoff schedule: `base * factor^i` before try `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Backoff {
    pub base: Duration,
    pub factor: u32,
    pub max_tries: u32,
}

impl Default for Backoff {
    fn default() -> Self {
        Backoff { base: Duration::from_secs(1), factor: 2, max_tries: 5 }
    }
}

impl Backoff {
    /// Delay after the `failed`-th failed try (1-based).
    pub fn delay(&self, failed: u32) -> Duration {
        self.base.saturating_mul(self.factor.saturating_pow(failed.saturating_sub(1)))
    }
}

pub type Sleeper = Arc<dyn Fn(Duration) + Send + Sync>;

/// Retries retryable transport failures on the wrapped client.
pub struct RetryingClient<C> {
    inner: C,
    backoff: Backoff,
    sleeper: Sleeper,
}

impl<C: LlmClient> RetryingClient<C> {
    pub fn new(inner: C, backoff: Backoff) -> Self {
        RetryingClient { inner, backoff, sleeper: Arc::new(std::thread::sleep) }
    }

    /// Replaces the real sleep, e.g. to record delays in tests.
    pub fn with_sleeper(mut self, sleeper: Sleeper) -> Self {
        self.sleeper = sleeper;
        self
    }
}

impl<C: LlmClient> LlmClient for RetryingClient<C> {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, ClientError> {
        let mut tries = 0;
        loop {
            tries += 1;
            match self.inner.complete(request) {
                Err(err) if tries < self.backoff.max_tries && err.transport_kind().is_some_and(|k| k.is_retryable()) => {
                    (self.sleeper)(self.backoff.delay(tries));
                }
                other => return other,
            }
        }
    }
}

/// Caps the number of requests in flight on the wrapped client.
pub struct BoundedClient<C> {
    inner: C,
    limit: usize,
    state: Mutex<(usize, usize)>,
    freed: Condvar,
}

impl<C: LlmClient> BoundedClient<C> {
    pub fn new(inner: C, limit: usize) -> Self {
        assert!(limit > 0, "parallelism limit must be positive");
        BoundedClient { inner, limit, state: Mutex::new((0, 0)), freed: Condvar::new() }
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// Highest number of concurrent requests observed so far.
    pub fn peak_in_flight(&self) -> usize {
        self.state.lock().unwrap().1
    }
}

struct Slot<'a>(&'a Mutex<(usize, usize)>, &'a Condvar);

impl Drop for Slot<'_> {
    fn drop(&mut self) {
        self.0.lock().unwrap().0 -= 1;
        self.1.notify_one();
    }
}

impl<C: LlmClient> LlmClient for BoundedClient<C> {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, ClientError> {
        let mut state = self.state.lock().unwrap();
        while state.0 >= self.limit {
            state = self.freed.wait(state).unwrap();
        }
        state.0 += 1;
        state.1 = state.1.max(state.0);
        drop(state);
        let _slot = Slot(&self.state, &self.freed);
        self.inner.complete(request)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::atomic::{AtomicUsize, Ordering};

    use chrono::DateTime;

    use super::*;
    use crate::llm_client::TransportKind;

    struct Flaky {
        failures: usize,
        kind: TransportKind,
        calls: AtomicUsize,
    }

    impl LlmClient for Flaky {
        fn complete(&self, _: &CompletionRequest) -> Result<CompletionResponse, ClientError> {
            let n = self.calls.fetch_add(1, Ordering::SeqCst);
            if n < self.failures {
                return Err(ClientError::transport(self.kind, "boom"));
            }
            Ok(CompletionResponse { text: "ok".into(), usage: None, latency_ms: 0, cached: false, created_at: DateTime::UNIX_EPOCH })
        }
    }

    fn recorder() -> (Sleeper, Arc<Mutex<Vec<Duration>>>) {
        let delays = Arc::new(Mutex::new(Vec::new()));
        let d = delays.clone();
        (Arc::new(move |t| d.lock().unwrap().push(t)), delays)
    }

    #[test]
    fn schedule() {
        let b = Backoff::default();
        assert_eq!([1, 2, 3, 4].map(|i| b.delay(i).as_secs()), [1, 2, 4, 8]);
    }

    #[test]
    fn gives_up_after_five_tries() {
        let (sleeper, delays) = recorder();
        let client = RetryingClient::new(Flaky { failures: 99, kind: TransportKind::Overload, calls: AtomicUsize::new(0) }, Backoff::default())
            .with_sleeper(sleeper);
        let err = client.complete(&CompletionRequest::new("m", "p")).unwrap_err();
        assert_eq!(err.transport_kind(), Some(TransportKind::Overload));
        assert_eq!(client.inner.calls.load(Ordering::SeqCst), 5);
        assert_eq!(delays.lock().unwrap().iter().map(Duration::as_secs).collect::<Vec<_>>(), [1, 2, 4, 8]);
    }

    #[test]
    fn recovers_and_skips_non_retryable() {
        let (sleeper, _) = recorder();
        let ok = RetryingClient::new(Flaky { failures: 2, kind: TransportKind::Network, calls: AtomicUsize::new(0) }, Backoff::default())
            .with_sleeper(sleeper.clone());
        assert_eq!(ok.complete(&CompletionRequest::new("m", "p")).unwrap().text, "ok");
        assert_eq!(ok.inner.calls.load(Ordering::SeqCst), 3);

        let auth = RetryingClient::new(Flaky { failures: 9, kind: TransportKind::Auth, calls: AtomicUsize::new(0) }, Backoff::default())
            .with_sleeper(sleeper);
        assert!(auth.complete(&CompletionRequest::new("m", "p")).is_err());
        assert_eq!(auth.inner.calls.load(Ordering::SeqCst), 1);
    }

    struct Slow(AtomicUsize);

    impl LlmClient for Slow {
        fn complete(&self, _: &CompletionRequest) -> Result<CompletionResponse, ClientError> {
            self.0.fetch_add(1, Ordering::SeqCst);
            std::thread::sleep(Duration::from_millis(5));
            Ok(CompletionResponse { text: String::new(), usage: None, latency_ms: 5, cached: false, created_at: DateTime::UNIX_EPOCH })
        }
    }

    #[test]
    fn limits_in_flight() {
        let client = BoundedClient::new(Slow(AtomicUsize::new(0)), 3);
        std::thread::scope(|s| {
            for _ in 0..12 {
                s.spawn(|| client.complete(&CompletionRequest::new("m", "p")).unwrap());
            }
        });
        assert_eq!(client.inner.0.load(Ordering::SeqCst), 12);
        assert!(client.peak_in_flight() <= 3);
        assert!(client.peak_in_flight() >= 1);
    }
}
