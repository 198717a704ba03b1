//! Server-wide researcher settings.

use qx_core::pipeline::BM25;
use qx_core::prompt::{validate_feedback_instruction, EXPANSION_INSTRUCTION, FEEDBACK_INSTRUCTION};
use qx_core::{GeneratorConfig, PipelineRegistry, PromptTemplate, TranslationHook, DEFAULT_K};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub pipeline_name: String,
    pub k: usize,
    pub qg_template: PromptTemplate,
    pub qr_instruction: String,
    pub feedback_instruction: String,
    pub generator: GeneratorConfig,
    pub translation: TranslationHook,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            pipeline_name: BM25.into(),
            k: DEFAULT_K,
            qg_template: PromptTemplate::default(),
            qr_instruction: EXPANSION_INSTRUCTION.into(),
            feedback_instruction: FEEDBACK_INSTRUCTION.into(),
            generator: GeneratorConfig::default(),
            translation: TranslationHook::default(),
        }
    }
}

/// A field-level validation failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{field}: {message}")]
pub struct InvalidField {
    pub field: &'static str,
    pub message: String,
}

fn invalid(field: &'static str, message: impl ToString) -> InvalidField {
    InvalidField { field, message: message.to_string() }
}

impl Settings {
    pub fn validate(&self, registry: &PipelineRegistry) -> Result<(), InvalidField> {
        if !registry.contains(&self.pipeline_name) {
            return Err(invalid("pipeline_name", format!("unknown pipeline {:?}", self.pipeline_name)));
        }
        if self.k == 0 {
            return Err(invalid("k", "must be at least 1"));
        }
        self.qg_template.validate().map_err(|e| invalid("qg_template", e))?;
        if self.qr_instruction.trim().is_empty() {
            return Err(invalid("qr_instruction", "must not be empty"));
        }
        validate_feedback_instruction(&self.feedback_instruction).map_err(|e| invalid("feedback_instruction", e))?;
        self.generator.validate().map_err(|e| invalid("generator", e))?;
        self.translation.validate().map_err(|e| invalid("translation", e))?;
        Ok(())
    }

    /// Applies `patch` to a copy and validates the result.
    pub fn patched(&self, patch: SettingsPatch, registry: &PipelineRegistry) -> Result<Settings, InvalidField> {
        let mut next = self.clone();
        if let Some(v) = patch.pipeline_name {
            next.pipeline_name = v;
        }
        if let Some(v) = patch.k {
            next.k = v;
        }
        if let Some(v) = patch.qg_template {
            next.qg_template = v;
        }
        if let Some(v) = patch.qr_instruction {
            next.qr_instruction = v;
        }
        if let Some(v) = patch.feedback_instruction {
            next.feedback_instruction = v;
        }
        if let Some(v) = patch.generator {
            next.generator = v;
        }
        if let Some(v) = patch.translation {
            next.translation = v;
        }
        next.validate(registry)?;
        Ok(next)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsPatch {
    pub pipeline_name: Option<String>,
    pub k: Option<usize>,
    pub qg_template: Option<PromptTemplate>,
    pub qr_instruction: Option<String>,
    pub feedback_instruction: Option<String>,
    pub generator: Option<GeneratorConfig>,
    pub translation: Option<TranslationHook>,
}
