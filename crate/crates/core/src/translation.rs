//! Display translation of retrieved text. Display never fails because of
//! translation: any hook failure falls back to the source text and flags
//! the affected items.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HookKind {
    Identity,
    HttpEndpoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationHook {
    pub kind: HookKind,
    #[serde(default)]
    pub endpoint_url: Option<String>,
    /// Language results are translated into.
    #[serde(default = "default_target")]
    pub target_lang: String,
}

fn default_target() -> String {
    String::from(crate::corpus::DEFAULT_LANG)
}

impl Default for TranslationHook {
    fn default() -> Self {
        Self { kind: HookKind::Identity, endpoint_url: None, target_lang: default_target() }
    }
}

impl TranslationHook {
    pub fn validate(&self) -> Result<(), &'static str> {
        if self.kind == HookKind::HttpEndpoint && self.endpoint_url.as_deref().is_none_or(str::is_empty) {
            return Err("http_endpoint translation requires endpoint_url");
        }
        if self.target_lang.is_empty() {
            return Err("target_lang must not be empty");
        }
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        self.kind == HookKind::Identity
    }
}

pub trait Translator: Send + Sync {
    fn translate_batch(&self, texts: &[String], src: &str, tgt: &str) -> Result<Vec<String>, String>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityTranslator;

impl Translator for IdentityTranslator {
    fn translate_batch(&self, texts: &[String], _src: &str, _tgt: &str) -> Result<Vec<String>, String> {
        Ok(texts.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Translated {
    pub texts: Vec<String>,
    /// `true` where the source text was kept because translation failed.
    pub fell_back: Vec<bool>,
}

impl Translated {
    pub fn warnings(&self) -> usize {
        self.fell_back.iter().filter(|&&f| f).count()
    }
}

/// Same-length translation of `texts`; `src == tgt` is always the identity.
pub fn translate(translator: &dyn Translator, texts: &[String], src: &str, tgt: &str) -> Translated {
    let untouched = || Translated { texts: texts.to_vec(), fell_back: vec![false; texts.len()] };
    if texts.is_empty() || src == tgt {
        return untouched();
    }
    match translator.translate_batch(texts, src, tgt) {
        Ok(out) if out.len() == texts.len() => Translated { texts: out, fell_back: vec![false; texts.len()] },
        Ok(out) => {
            log::warn!("translation returned {} items for {} inputs; showing source text", out.len(), texts.len());
            Translated { texts: texts.to_vec(), fell_back: vec![true; texts.len()] }
        }
        Err(e) => {
            log::warn!("translation {src}->{tgt} failed: {e}; showing source text");
            Translated { texts: texts.to_vec(), fell_back: vec![true; texts.len()] }
        }
    }
}
