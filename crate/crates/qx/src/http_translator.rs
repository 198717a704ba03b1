//! HTTP translation hook: `POST {url}` with `{"texts", "src", "tgt"}`,
//! expecting `{"texts": [str]}` of the same length.

use std::time::Duration;

use qx_core::Translator;
use serde::{Deserialize, Serialize};

#[derive(Serialize)]
struct Request<'a> {
    texts: &'a [String],
    src: &'a str,
    tgt: &'a str,
}

#[derive(Deserialize)]
struct Response {
    texts: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct HttpTranslator {
    url: String,
    agent: ureq::Agent,
}

impl HttpTranslator {
    pub fn new(url: impl Into<String>) -> Self {
        let config = ureq::Agent::config_builder().timeout_global(Some(Duration::from_secs(30))).build();
        Self { url: url.into(), agent: config.into() }
    }
}

impl Translator for HttpTranslator {
    fn translate_batch(&self, texts: &[String], src: &str, tgt: &str) -> Result<Vec<String>, String> {
        let mut resp = self
            .agent
            .post(&self.url)
            .send_json(Request { texts, src, tgt })
            .map_err(|e| e.to_string())?;
        let body: Response = resp.body_mut().read_json().map_err(|e| e.to_string())?;
        Ok(body.texts)
    }
}
