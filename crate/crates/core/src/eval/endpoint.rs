//! Model endpoints: the [`Endpoint`] trait and an OpenAI-compatible
//! chat-completions client.

use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Environment variable holding the bearer token for remote endpoints.
pub const API_KEY_ENV: &str = "COBENCH_API_KEY";

#[derive(Debug, thiserror::Error)]
pub enum EndpointError {
    #[error("invalid endpoint config: {0}")]
    InvalidConfig(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("endpoint returned HTTP {code}: {body}")]
    Status { code: u16, body: String },
    #[error("malformed endpoint response: {0}")]
    Malformed(String),
    #[error("gave up after {attempts} attempts: {last}")]
    Exhausted { attempts: u32, last: String },
}

impl EndpointError {
    /// Transport failures, rate limits and server errors are worth retrying.
    pub fn is_transient(&self) -> bool {
        match self {
            EndpointError::Transport(_) => true,
            EndpointError::Status { code, .. } => *code == 408 || *code == 429 || *code >= 500,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointConfig {
    /// Base URL up to and including the API version, e.g. `http://host:8000/v1`.
    pub base_url: String,
    pub model: String,
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
    /// Completions requested per instance (the N of Best-of-N).
    pub n_samples: usize,
    pub timeout_secs: u64,
    /// Upper bound on concurrently evaluated instances.
    pub max_parallel: usize,
    /// Extra attempts after a transient failure.
    pub retries: u32,
    /// Delay before the first retry; doubles on each further retry.
    pub backoff_ms: u64,
    /// Whether the server honours `n > 1`; otherwise one request per sample.
    pub supports_n: bool,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        Self {
            base_url: "http://localhost:8000/v1".into(),
            model: "default".into(),
            temperature: 0.0,
            top_p: 0.7,
            max_tokens: 4096,
            n_samples: 1,
            timeout_secs: 120,
            max_parallel: 4,
            retries: 3,
            backoff_ms: 500,
            supports_n: true,
        }
    }
}

impl EndpointConfig {
    /// Sampling temperature used for Best-of-N when none is given: greedy
    /// decoding (temperature 0) would make all N samples identical.
    pub const BON_TEMPERATURE: f64 = 1.0;

    pub fn validate(&self) -> Result<(), EndpointError> {
        let bad = |m: String| Err(EndpointError::InvalidConfig(m));
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return bad(format!("temperature {} must be finite and non-negative", self.temperature));
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return bad(format!("top_p {} outside (0, 1]", self.top_p));
        }
        if self.n_samples == 0 || self.max_parallel == 0 || self.max_tokens == 0 {
            return bad("n_samples, max_parallel and max_tokens must be positive".into());
        }
        if self.timeout_secs == 0 {
            return bad("timeout must be positive".into());
        }
        if !(self.base_url.starts_with("http://") || self.base_url.starts_with("https://")) {
            return bad(format!("base URL `{}` is not http(s)", self.base_url));
        }
        Ok(())
    }
}

/// One prompt to be sampled `n` times. `seed` identifies the first sample;
/// sample `i` uses `seed + i` wherever the backend honours seeds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionRequest {
    pub instance_id: String,
    pub prompt: String,
    pub n: usize,
    pub seed: u64,
}

/// Anything that turns a prompt into `n` completions.
pub trait Endpoint: Sync {
    fn complete(&self, req: &CompletionRequest) -> Result<Vec<String>, EndpointError>;
}

/// Client for `POST {base_url}/chat/completions`.
pub struct ChatCompletionsClient {
    cfg: EndpointConfig,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl ChatCompletionsClient {
    /// Builds a client; the bearer token, if any, is read from [`API_KEY_ENV`].
    pub fn new(cfg: EndpointConfig) -> Result<Self, EndpointError> {
        let api_key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
        Self::with_api_key(cfg, api_key)
    }

    pub fn with_api_key(cfg: EndpointConfig, api_key: Option<String>) -> Result<Self, EndpointError> {
        cfg.validate()?;
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(cfg.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(Self { cfg, api_key, agent })
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.cfg
    }

    fn url(&self) -> String {
        format!("{}/chat/completions", self.cfg.base_url.trim_end_matches('/'))
    }

    fn body(&self, prompt: &str, n: usize, seed: u64) -> Value {
        json!({
            "model": self.cfg.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.cfg.temperature,
            "top_p": self.cfg.top_p,
            "max_tokens": self.cfg.max_tokens,
            "n": n,
            "seed": seed,
        })
    }

    fn post_once(&self, body: &Value) -> Result<Vec<String>, EndpointError> {
        let mut req = self.agent.post(&self.url()).header("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req.send_json(body).map_err(|e| EndpointError::Transport(e.to_string()))?;
        let code = resp.status().as_u16();
        let text = resp.body_mut().read_to_string().map_err(|e| EndpointError::Transport(e.to_string()))?;
        if !(200..300).contains(&code) {
            let body: String = text.chars().take(200).collect();
            return Err(EndpointError::Status { code, body });
        }
        let value: Value = serde_json::from_str(&text).map_err(|e| EndpointError::Malformed(e.to_string()))?;
        extract_contents(&value)
    }

    fn post_with_retries(&self, body: &Value) -> Result<Vec<String>, EndpointError> {
        let mut delay = Duration::from_millis(self.cfg.backoff_ms);
        let mut attempt = 0;
        loop {
            attempt += 1;
            match self.post_once(body) {
                Ok(out) => return Ok(out),
                Err(e) if e.is_transient() && attempt <= self.cfg.retries => {
                    log::warn!("attempt {attempt} failed ({e}); retrying in {delay:?}");
                    thread::sleep(delay);
                    delay *= 2;
                }
                Err(e) if attempt > 1 => return Err(EndpointError::Exhausted { attempts: attempt, last: e.to_string() }),
                Err(e) => return Err(e),
            }
        }
    }
}

/// Pulls `choices[*].message.content` out of a chat-completions response.
pub fn extract_contents(value: &Value) -> Result<Vec<String>, EndpointError> {
    let choices = value
        .get("choices")
        .and_then(Value::as_array)
        .ok_or_else(|| EndpointError::Malformed("missing `choices` array".into()))?;
    choices
        .iter()
        .map(|c| {
            c.pointer("/message/content")
                .and_then(Value::as_str)
                .map(str::to_string)
                .ok_or_else(|| EndpointError::Malformed("choice without message content".into()))
        })
        .collect()
}

impl Endpoint for ChatCompletionsClient {
    fn complete(&self, req: &CompletionRequest) -> Result<Vec<String>, EndpointError> {
        if self.cfg.supports_n {
            let out = self.post_with_retries(&self.body(&req.prompt, req.n, req.seed))?;
            if out.len() != req.n {
                return Err(EndpointError::Malformed(format!("asked for {} choices, got {}", req.n, out.len())));
            }
            return Ok(out);
        }
        let mut out = Vec::with_capacity(req.n);
        for i in 0..req.n {
            let mut one = self.post_with_retries(&self.body(&req.prompt, 1, req.seed.wrapping_add(i as u64)))?;
            if one.len() != 1 {
                return Err(EndpointError::Malformed(format!("asked for 1 choice, got {}", one.len())));
            }
            out.push(one.remove(0));
        }
        Ok(out)
    }
}
