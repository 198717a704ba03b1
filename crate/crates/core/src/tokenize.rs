//! Lexical analysis shared by indexing, retrieval and reformulation.

use alloc::string::String;
use alloc::vec::Vec;

use unicode_segmentation::UnicodeSegmentation;

/// Bumped whenever the token stream for some input could change. Persisted
/// indexes record it so a stale index is rejected instead of silently
/// mismatching query terms.
pub const TOKENIZER_VERSION: u32 = 1;

/// Lowercased Unicode words (UAX #29). Punctuation is discarded, nothing is
/// stemmed or stopped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.unicode_words().map(str::to_lowercase).collect()
}
