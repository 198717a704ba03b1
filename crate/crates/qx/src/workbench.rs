//! Request handling independent of HTTP: every searcher action and settings
//! change, with its log record written before success is reported.
//!
//! The session's current query is tracked by the log. When an action
//! arrives with a query that differs from it, the difference is recorded as
//! a `user_edit` event first, so the lineage of every session stays a chain.

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use qx_core::reformulation::Reformulator;
use qx_core::session::LOG_EDITS;
use qx_core::{
    append_keywords, query_generator, send_feedback, translate, Clock, GeneratedQuery, GenerationError, Generator,
    GeneratorConfig, GeneratorKind, Grade, HookKind, IdentityTranslator, Index, PipelineRegistry, QueryLog,
    QuerySource, ReformulationError, ReformulationRequest, ResultEntry, RetrieveError, ScoredDoc, Scorer,
    StubGenerator, Translator,
};
use serde::Serialize;

use crate::http_generator::HttpGenerator;
use crate::http_translator::HttpTranslator;
use crate::session_log::{LogKind, SessionLog};
use crate::settings::{Settings, SettingsPatch};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ServiceError {
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    BadGateway(String),
    #[error("{0}")]
    Internal(String),
}

impl ServiceError {
    pub fn status(&self) -> u16 {
        match self {
            ServiceError::BadRequest(_) => 400,
            ServiceError::NotFound(_) => 404,
            ServiceError::BadGateway(_) => 502,
            ServiceError::Internal(_) => 500,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ServiceError::BadRequest(_) => "bad_request",
            ServiceError::NotFound(_) => "not_found",
            ServiceError::BadGateway(_) => "generator_failed",
            ServiceError::Internal(_) => "internal",
        }
    }
}

impl From<GenerationError> for ServiceError {
    fn from(e: GenerationError) -> Self {
        match e {
            GenerationError::EmptyInput | GenerationError::Prompt(_) => ServiceError::BadRequest(e.to_string()),
            GenerationError::Transport { .. } | GenerationError::BadResponse(_) | GenerationError::NoCandidates => {
                ServiceError::BadGateway(e.to_string())
            }
            GenerationError::InvalidConfig(_) | GenerationError::Log(_) => ServiceError::Internal(e.to_string()),
        }
    }
}

impl From<ReformulationError> for ServiceError {
    fn from(e: ReformulationError) -> Self {
        match e {
            ReformulationError::Generation(g) => g.into(),
            ReformulationError::UnknownDocno(_) => ServiceError::NotFound(e.to_string()),
            ReformulationError::Log(_) => ServiceError::Internal(e.to_string()),
            _ => ServiceError::BadRequest(e.to_string()),
        }
    }
}

impl From<RetrieveError> for ServiceError {
    fn from(e: RetrieveError) -> Self {
        match e {
            RetrieveError::UnknownPipeline(_) => ServiceError::NotFound(e.to_string()),
            _ => ServiceError::BadRequest(e.to_string()),
        }
    }
}

fn internal(e: impl std::error::Error) -> ServiceError {
    let mut detail = e.to_string();
    let mut cause = e.source();
    while let Some(c) = cause {
        detail = format!("{detail}: {c}");
        cause = c.source();
    }
    ServiceError::Internal(detail)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateView {
    pub text: String,
    pub source: qx_core::CandidateSource,
}

impl From<GeneratedQuery> for CandidateView {
    fn from(q: GeneratedQuery) -> Self {
        Self { text: q.text, source: q.source }
    }
}

pub struct Workbench {
    index: Arc<Index>,
    registry: RwLock<PipelineRegistry>,
    settings: RwLock<Arc<Settings>>,
    log: Arc<SessionLog>,
    clock: Arc<dyn Clock>,
    generator_key: Option<String>,
    generator_override: Option<Arc<dyn Generator>>,
}

impl Workbench {
    pub fn new(index: Arc<Index>, log: Arc<SessionLog>, clock: Arc<dyn Clock>, settings: Settings) -> anyhow::Result<Self> {
        let registry = PipelineRegistry::new();
        settings.validate(&registry)?;
        Ok(Self {
            index,
            registry: RwLock::new(registry),
            settings: RwLock::new(Arc::new(settings)),
            log,
            clock,
            generator_key: None,
            generator_override: None,
        })
    }

    /// Bearer token sent to HTTP generator endpoints.
    pub fn with_generator_key(mut self, key: Option<String>) -> Self {
        self.generator_key = key;
        self
    }

    /// Routes every generator call to `generator`, whatever the settings say.
    pub fn with_generator(mut self, generator: Arc<dyn Generator>) -> Self {
        self.generator_override = Some(generator);
        self
    }

    pub fn index(&self) -> &Arc<Index> {
        &self.index
    }

    pub fn log(&self) -> &Arc<SessionLog> {
        &self.log
    }

    pub fn settings(&self) -> Arc<Settings> {
        self.settings.read().unwrap().clone()
    }

    pub fn pipelines(&self) -> Vec<String> {
        self.registry.read().unwrap().names().map(String::from).collect()
    }

    pub fn register_pipeline(&self, name: &str, scorer: Arc<dyn Scorer>) -> Result<(), ServiceError> {
        self.registry.write().unwrap().register(name, scorer).map_err(ServiceError::from)
    }

    pub fn update_settings(&self, patch: SettingsPatch) -> Result<Arc<Settings>, ServiceError> {
        let registry = self.registry.read().unwrap();
        let mut guard = self.settings.write().unwrap();
        let next = Arc::new(guard.patched(patch, &registry).map_err(|e| ServiceError::BadRequest(e.to_string()))?);
        *guard = next.clone();
        Ok(next)
    }

    fn generator(&self, config: &GeneratorConfig) -> Arc<dyn Generator> {
        if let Some(g) = &self.generator_override {
            return g.clone();
        }
        match config.kind {
            GeneratorKind::Stub => Arc::new(StubGenerator::new(self.index.clone(), config.seed.unwrap_or_default())),
            GeneratorKind::HttpEndpoint => Arc::new(
                HttpGenerator::new(config.endpoint_url.clone().unwrap_or_default(), self.generator_key.clone())
                    .with_model(config.model_id.clone()),
            ),
        }
    }

    fn translator(settings: &Settings) -> Arc<dyn Translator> {
        match settings.translation.kind {
            HookKind::Identity => Arc::new(IdentityTranslator),
            HookKind::HttpEndpoint => {
                Arc::new(HttpTranslator::new(settings.translation.endpoint_url.clone().unwrap_or_default()))
            }
        }
    }

    fn require_session(&self, session_id: &str) -> Result<(), ServiceError> {
        if self.log.has_session(session_id) {
            Ok(())
        } else {
            Err(ServiceError::NotFound(format!("unknown session {session_id:?}")))
        }
    }

    fn require_query(query: &str) -> Result<(), ServiceError> {
        if query.trim().is_empty() {
            Err(ServiceError::BadRequest("query must not be empty".into()))
        } else {
            Ok(())
        }
    }

    /// Records a user edit when `query` is not the session's current query.
    fn note_edit(&self, session_id: &str, query: &str) -> Result<(), ServiceError> {
        let current = self.log.current_query(session_id);
        if current.as_deref() != Some(query) {
            self.log
                .on_query_change(session_id, LOG_EDITS, current.as_deref(), query, QuerySource::UserEdit)
                .map_err(internal)?;
        }
        Ok(())
    }

    pub fn new_session(&self) -> Result<qx_core::Session, ServiceError> {
        self.log.new_session().map_err(internal)
    }

    pub fn generate(&self, session_id: &str, example_document: &str) -> Result<Vec<CandidateView>, ServiceError> {
        self.require_session(session_id)?;
        if example_document.trim().is_empty() {
            return Err(ServiceError::BadRequest("example_document must not be empty".into()));
        }
        let settings = self.settings();
        let generator = self.generator(&settings.generator);
        let previous = self.log.current_query(session_id);
        let candidates = query_generator(
            generator.as_ref(),
            self.clock.as_ref(),
            self.log.as_ref(),
            session_id,
            previous.as_deref(),
            example_document,
            &settings.qg_template,
            &settings.generator,
        )?;
        Ok(candidates.into_iter().map(CandidateView::from).collect())
    }

    fn reformulation(&self, session_id: &str, query: &str, docnos: Vec<String>, instruction: &str, settings: &Settings) -> ReformulationRequest {
        ReformulationRequest {
            session_id: session_id.into(),
            query: query.into(),
            selected_docs: docnos,
            instruction: instruction.into(),
            config: settings.generator.clone(),
        }
    }

    pub fn reformulate(&self, session_id: &str, query: &str) -> Result<String, ServiceError> {
        self.require_session(session_id)?;
        Self::require_query(query)?;
        let settings = self.settings();
        self.note_edit(session_id, query)?;
        let generator = self.generator(&settings.generator);
        let r = Reformulator { generator: generator.as_ref(), clock: self.clock.as_ref(), log: self.log.as_ref(), index: &self.index };
        let req = self.reformulation(session_id, query, Vec::new(), &settings.qr_instruction, &settings);
        Ok(append_keywords(&r, &req)?)
    }

    pub fn feedback(&self, session_id: &str, query: &str, docnos: Vec<String>) -> Result<String, ServiceError> {
        self.require_session(session_id)?;
        Self::require_query(query)?;
        if docnos.is_empty() {
            return Err(ServiceError::BadRequest("select at least one document".into()));
        }
        if let Some(unknown) = docnos.iter().find(|d| self.index.doc_id(d).is_none()) {
            return Err(ServiceError::NotFound(format!("unknown docno {unknown:?}")));
        }
        let settings = self.settings();
        self.note_edit(session_id, query)?;
        let generator = self.generator(&settings.generator);
        let r = Reformulator { generator: generator.as_ref(), clock: self.clock.as_ref(), log: self.log.as_ref(), index: &self.index };
        let req = self.reformulation(session_id, query, docnos, &settings.feedback_instruction, &settings);
        Ok(send_feedback(&r, &req)?)
    }

    pub fn retrieve(&self, session_id: &str, query: &str) -> Result<Vec<ScoredDoc>, ServiceError> {
        self.require_session(session_id)?;
        Self::require_query(query)?;
        let settings = self.settings();
        let mut results = self.registry.read().unwrap().retrieve(&self.index, query, &settings.pipeline_name, settings.k)?;
        self.note_edit(session_id, query)?;

        if !settings.translation.is_identity() {
            let translator = Self::translator(&settings);
            let mut by_lang: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            for (i, r) in results.iter().enumerate() {
                let lang = self.index.document_by_docno(&r.docno).map_or("eng", |d| d.lang.as_str());
                by_lang.entry(lang).or_default().push(i);
            }
            let mut translated = vec![None; results.len()];
            for (lang, positions) in by_lang {
                let texts: Vec<String> = positions.iter().map(|&i| results[i].text.clone()).collect();
                let out = translate(translator.as_ref(), &texts, lang, &settings.translation.target_lang);
                for (&i, t) in positions.iter().zip(out.texts) {
                    translated[i] = Some(t);
                }
            }
            for (r, t) in results.iter_mut().zip(translated) {
                r.translated_text = t;
            }
        }

        let entries = results.iter().map(|r| ResultEntry { docno: r.docno.clone(), rank: r.rank, score: r.score }).collect();
        self.log.record_results(session_id, query, &settings.pipeline_name, entries).map_err(internal)?;
        Ok(results)
    }

    pub fn annotate(&self, session_id: &str, query: &str, docno: &str, grade: i64) -> Result<(), ServiceError> {
        self.require_session(session_id)?;
        Self::require_query(query)?;
        let grade = Grade::new(grade).map_err(|e| ServiceError::BadRequest(e.to_string()))?;
        if self.index.doc_id(docno).is_none() {
            return Err(ServiceError::NotFound(format!("unknown docno {docno:?}")));
        }
        self.log.record_annotation(session_id, query, docno, grade).map_err(internal)?;
        Ok(())
    }

    pub fn logs(&self, name: &str) -> Result<Vec<serde_json::Value>, ServiceError> {
        let kind: LogKind = name.parse().map_err(ServiceError::NotFound)?;
        self.log.read_log(kind).map_err(internal)
    }
}
