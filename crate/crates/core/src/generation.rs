//! Generator interface and the query-by-example flow.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::prompt::{build_qbe_prompt, truncate_chars, PromptError, PromptTemplate, DOC_CHAR_BUDGET};
use crate::session::{Clock, LogError, QueryLog, QuerySource, LOG_GENERATED};

pub const DEFAULT_NUM_CANDIDATES: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    HttpEndpoint,
    Stub,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub kind: GeneratorKind,
    #[serde(default)]
    pub endpoint_url: Option<String>,
    #[serde(default)]
    pub model_id: Option<String>,
    #[serde(default = "default_max_new_tokens")]
    pub max_new_tokens: u32,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_num_candidates")]
    pub num_candidates: u32,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_max_new_tokens() -> u32 {
    64
}

fn default_num_candidates() -> u32 {
    DEFAULT_NUM_CANDIDATES
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self::stub(7)
    }
}

impl GeneratorConfig {
    pub fn stub(seed: u64) -> Self {
        Self {
            kind: GeneratorKind::Stub,
            endpoint_url: None,
            model_id: None,
            max_new_tokens: default_max_new_tokens(),
            temperature: 0.0,
            num_candidates: DEFAULT_NUM_CANDIDATES,
            seed: Some(seed),
        }
    }

    pub fn http(endpoint_url: impl Into<String>) -> Self {
        Self {
            kind: GeneratorKind::HttpEndpoint,
            endpoint_url: Some(endpoint_url.into()),
            seed: None,
            ..Self::stub(0)
        }
    }

    pub fn validate(&self) -> Result<(), GenerationError> {
        let invalid = |msg: &str| Err(GenerationError::InvalidConfig(msg.into()));
        match self.kind {
            GeneratorKind::HttpEndpoint if self.endpoint_url.as_deref().is_none_or(str::is_empty) => {
                return invalid("http_endpoint generator requires endpoint_url");
            }
            GeneratorKind::Stub if self.seed.is_none() => return invalid("stub generator requires seed"),
            _ => {}
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return invalid("temperature must be a finite number >= 0");
        }
        if self.num_candidates == 0 {
            return invalid("num_candidates must be at least 1");
        }
        Ok(())
    }
}

/// Provenance of a candidate query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateSource {
    Generator,
    Stub,
    UserEdit,
    Reformulator,
    Feedback,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedQuery {
    pub text: String,
    pub source: CandidateSource,
    pub created_at: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    QueryByExample,
    Expansion,
    Feedback,
}

/// One call to a generator. `prompt` is the fully rendered text sent to a
/// model; `input` and `context` are the raw slots it was built from.
#[derive(Debug, Clone, Copy)]
pub struct GenerationRequest<'a> {
    pub task: Task,
    pub prompt: &'a str,
    /// Example document (query-by-example) or the query being expanded.
    pub input: &'a str,
    /// Selected document for feedback prompts.
    pub context: Option<&'a str>,
    pub max_new_tokens: u32,
    pub temperature: f64,
    pub n: u32,
    pub seed: Option<u64>,
}

impl<'a> GenerationRequest<'a> {
    pub fn new(task: Task, prompt: &'a str, input: &'a str, config: &GeneratorConfig) -> Self {
        Self {
            task,
            prompt,
            input,
            context: None,
            max_new_tokens: config.max_new_tokens,
            temperature: config.temperature,
            n: config.num_candidates,
            seed: config.seed,
        }
    }

    pub fn with_context(mut self, context: &'a str) -> Self {
        self.context = Some(context);
        self
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenerationError {
    #[error("generator unreachable after {attempts} attempts: {detail}")]
    Transport { attempts: u32, detail: String },
    #[error("generator returned a malformed response: {0}")]
    BadResponse(String),
    #[error("generator produced no non-empty candidates")]
    NoCandidates,
    #[error("generator input is empty")]
    EmptyInput,
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Log(#[from] LogError),
}

pub trait Generator: Send + Sync {
    /// Raw candidate texts, at most `req.n` expected.
    fn generate(&self, req: &GenerationRequest<'_>) -> Result<Vec<String>, GenerationError>;

    fn source(&self) -> CandidateSource;
}

/// Calls the generator and normalizes its output: candidates are trimmed,
/// blanks and repeats dropped, and the list capped at `req.n`. An empty
/// result is not an error here.
pub fn generate_candidates(
    generator: &dyn Generator,
    req: &GenerationRequest<'_>,
    clock: &dyn Clock,
) -> Result<Vec<GeneratedQuery>, GenerationError> {
    let raw = generator.generate(req)?;
    let created_at = clock.now_ms();
    let mut out: Vec<GeneratedQuery> = Vec::new();
    for text in raw {
        let text = text.trim();
        if text.is_empty() || out.iter().any(|q| q.text == text) {
            continue;
        }
        out.push(GeneratedQuery { text: text.into(), source: generator.source(), created_at });
        if out.len() >= req.n as usize {
            break;
        }
    }
    Ok(out)
}

/// Query-by-example: renders the few-shot prompt around `example_doc`,
/// returns up to `config.num_candidates` distinct candidates and records a
/// single generator event whose query is the first candidate.
#[allow(clippy::too_many_arguments)]
pub fn query_generator(
    generator: &dyn Generator,
    clock: &dyn Clock,
    log: &dyn QueryLog,
    session_id: &str,
    previous_query: Option<&str>,
    example_doc: &str,
    template: &PromptTemplate,
    config: &GeneratorConfig,
) -> Result<Vec<GeneratedQuery>, GenerationError> {
    config.validate()?;
    let prompt = build_qbe_prompt(example_doc, template)?;
    let input = truncate_chars(example_doc, DOC_CHAR_BUDGET);
    let req = GenerationRequest::new(Task::QueryByExample, &prompt, input, config);
    let candidates = generate_candidates(generator, &req, clock)?;
    let first = candidates.first().ok_or(GenerationError::NoCandidates)?;
    log.on_query_change(session_id, LOG_GENERATED, previous_query, &first.text, QuerySource::Generator)?;
    Ok(candidates)
}
