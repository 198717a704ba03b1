//! Allocation-only core of the query-by-example workbench.
//!
//! Everything here is deterministic and free of IO: tokenization, the
//! immutable inverted index and its lexical scorers, the named-pipeline
//! registry, prompt rendering, keyword parsing, the offline stub generator,
//! the two reformulation flows and query-log lineage. File formats, HTTP
//! clients and the service live in the `qx` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod corpus;
pub mod generation;
pub mod index;
pub mod keywords;
pub mod pipeline;
pub mod prompt;
pub mod reformulation;
pub mod scoring;
pub mod session;
pub mod stub;
pub mod tokenize;
pub mod translation;

pub use corpus::{Corpus, CorpusError, Document};
pub use generation::{
    generate_candidates, query_generator, CandidateSource, GeneratedQuery, GenerationError,
    GenerationRequest, Generator, GeneratorConfig, GeneratorKind, Task,
};
pub use index::{Index, IndexError, Posting};
pub use keywords::parse_keywords;
pub use pipeline::{PipelineRegistry, RetrieveError, ScoredDoc, DEFAULT_K};
pub use prompt::{Exemplar, PromptError, PromptTemplate};
pub use reformulation::{append_keywords, send_feedback, ReformulationError, ReformulationRequest};
pub use scoring::{Bm25, Scorer, TermStats, TfIdf};
pub use session::{
    lineage, AnnotationRecord, Clock, Grade, LineageEntry, Link, LogError, QueryEvent, QueryLog,
    QuerySource, ResultEntry, ResultRecord, Session,
};
pub use stub::StubGenerator;
pub use tokenize::tokenize;
pub use translation::{translate, HookKind, IdentityTranslator, Translated, TranslationHook, Translator};
