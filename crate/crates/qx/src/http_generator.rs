//! Generic HTTP completion client.
//!
//! `POST {url}` with `{"prompt", "max_new_tokens", "temperature", "n"}`
//! (plus `model` when configured) and expects `{"candidates": [str]}`.
//! Transport failures and 5xx responses are retried; anything else fails
//! immediately.

use std::time::Duration;

use qx_core::{CandidateSource, GenerationError, GenerationRequest, Generator};
use serde::{Deserialize, Serialize};

pub const DEFAULT_ATTEMPTS: u32 = 3;

#[derive(Debug, Serialize)]
struct CompletionRequest<'a> {
    prompt: &'a str,
    max_new_tokens: u32,
    temperature: f64,
    n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<&'a str>,
}

#[derive(Debug, Deserialize)]
struct CompletionResponse {
    candidates: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct HttpGenerator {
    url: String,
    api_key: Option<String>,
    model_id: Option<String>,
    attempts: u32,
    backoff: Duration,
    agent: ureq::Agent,
}

impl HttpGenerator {
    pub fn new(url: impl Into<String>, api_key: Option<String>) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(60)))
            .http_status_as_error(false)
            .build();
        Self {
            url: url.into(),
            api_key,
            model_id: None,
            attempts: DEFAULT_ATTEMPTS,
            backoff: Duration::from_millis(200),
            agent: config.into(),
        }
    }

    pub fn with_model(mut self, model_id: Option<String>) -> Self {
        self.model_id = model_id;
        self
    }

    pub fn with_retries(mut self, attempts: u32, backoff: Duration) -> Self {
        self.attempts = attempts.max(1);
        self.backoff = backoff;
        self
    }

    fn call_once(&self, body: &CompletionRequest<'_>) -> Result<Vec<String>, Attempt> {
        let mut req = self.agent.post(&self.url);
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req.send_json(body).map_err(|e| Attempt::Retry(e.to_string()))?;
        let status = resp.status();
        if status.is_server_error() {
            return Err(Attempt::Retry(format!("HTTP {status}")));
        }
        if !status.is_success() {
            return Err(Attempt::Fatal(GenerationError::BadResponse(format!("HTTP {status}"))));
        }
        let parsed: CompletionResponse = resp
            .body_mut()
            .read_json()
            .map_err(|e| Attempt::Fatal(GenerationError::BadResponse(e.to_string())))?;
        Ok(parsed.candidates)
    }
}

enum Attempt {
    Retry(String),
    Fatal(GenerationError),
}

impl Generator for HttpGenerator {
    fn generate(&self, req: &GenerationRequest<'_>) -> Result<Vec<String>, GenerationError> {
        let body = CompletionRequest {
            prompt: req.prompt,
            max_new_tokens: req.max_new_tokens,
            temperature: req.temperature,
            n: req.n,
            model: self.model_id.as_deref(),
        };
        let mut last = String::new();
        for attempt in 1..=self.attempts {
            match self.call_once(&body) {
                Ok(candidates) => return Ok(candidates),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(detail)) => {
                    log::warn!("generator attempt {attempt}/{} failed: {detail}", self.attempts);
                    last = detail;
                    if attempt < self.attempts {
                        std::thread::sleep(self.backoff * attempt);
                    }
                }
            }
        }
        Err(GenerationError::Transport { attempts: self.attempts, detail: last })
    }

    fn source(&self) -> CandidateSource {
        CandidateSource::Generator
    }
}
