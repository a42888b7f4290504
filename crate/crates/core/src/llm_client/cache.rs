use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{cache_key, ClientError, CompletionRequest, CompletionResponse, LlmClient, Usage};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CachedSample {
    pub text: String,
    pub usage: Option<Usage>,
    pub latency_ms: u64,
    pub created_at: DateTime<Utc>,
}

/// One file per cache key, holding the samples drawn for that query in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub model: String,
    pub samples: Vec<CachedSample>,
}

/// Content-addressed response store. Entries are written through a temporary
/// file and a rename, so readers never see a partial entry.
#[derive(Debug)]
pub struct ResponseCache {
    dir: PathBuf,
    locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
    tmp_counter: AtomicU64,
}

impl ResponseCache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, ClientError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| ClientError::Cache(format!("{}: {e}", dir.display())))?;
        Ok(ResponseCache { dir, locks: Mutex::new(HashMap::new()), tmp_counter: AtomicU64::new(0) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    fn lock(&self, key: &str) -> Arc<Mutex<()>> {
        self.locks.lock().unwrap().entry(key.to_string()).or_default().clone()
    }

    /// The stored entry for `key`. Unreadable entries and entries recorded
    /// under another key count as missing.
    pub fn entry(&self, key: &str) -> Option<CacheEntry> {
        let bytes = fs::read(self.path(key)).ok()?;
        let entry: CacheEntry = serde_json::from_slice(&bytes).ok()?;
        (entry.key == key).then_some(entry)
    }

    pub fn get(&self, key: &str, sample: u32) -> Option<CachedSample> {
        self.entry(key)?.samples.into_iter().nth(sample as usize)
    }

    /// Stores sample number `sample` for `key`. Only the next sample in order is
    /// recorded; a sample that is already present is left untouched.
    pub fn put(&self, key: &str, model: &str, sample: u32, value: CachedSample) -> Result<(), ClientError> {
        let lock = self.lock(key);
        let _guard = lock.lock().unwrap();
        self.put_locked(key, model, sample, value)
    }

    fn put_locked(&self, key: &str, model: &str, sample: u32, value: CachedSample) -> Result<(), ClientError> {
        let mut entry =
            self.entry(key).unwrap_or_else(|| CacheEntry { key: key.to_string(), model: model.to_string(), samples: Vec::new() });
        if entry.samples.len() != sample as usize {
            return Ok(());
        }
        entry.samples.push(value);
        let io = |e: std::io::Error| ClientError::Cache(e.to_string());
        let tmp = self.dir.join(format!(
            ".{key}.{}.{}.tmp",
            std::process::id(),
            self.tmp_counter.fetch_add(1, Ordering::Relaxed)
        ));
        let mut file = fs::File::create(&tmp).map_err(io)?;
        file.write_all(&serde_json::to_vec_pretty(&entry).expect("cache entries serialize")).map_err(io)?;
        file.sync_all().map_err(io)?;
        fs::rename(&tmp, self.path(key)).map_err(io)
    }
}

/// Serves repeated queries from a [`ResponseCache`].
pub struct CachedClient<C> {
    inner: C,
    cache: ResponseCache,
}

impl<C: LlmClient> CachedClient<C> {
    pub fn new(inner: C, cache: ResponseCache) -> Self {
        CachedClient { inner, cache }
    }

    pub fn cache(&self) -> &ResponseCache {
        &self.cache
    }
}

impl<C: LlmClient> LlmClient for CachedClient<C> {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, ClientError> {
        request.check()?;
        let started = Instant::now();
        let key = cache_key(request);
        let lock = self.cache.lock(&key);
        let _guard = lock.lock().unwrap();
        if let Some(hit) = self.cache.get(&key, request.sample) {
            return Ok(CompletionResponse {
                text: hit.text,
                usage: hit.usage,
                latency_ms: started.elapsed().as_millis() as u64,
                cached: true,
                created_at: hit.created_at,
            });
        }
        let response = self.inner.complete(request)?;
        let sample = CachedSample {
            text: response.text.clone(),
            usage: response.usage,
            latency_ms: response.latency_ms,
            created_at: response.created_at,
        };
        self.cache.put_locked(&key, &request.model, request.sample, sample)?;
        Ok(CompletionResponse { cached: false, ..response })
    }
}
