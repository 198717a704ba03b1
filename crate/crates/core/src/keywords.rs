use alloc::string::String;
use alloc::vec::Vec;

pub const MAX_KEYWORDS: usize = 10;

/// Normalizes free-form generator output into keywords: split on commas,
/// semicolons and line breaks, trim, lowercase, drop repeats, keep at most
/// [`MAX_KEYWORDS`].
pub fn parse_keywords(raw: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for piece in raw.split([',', ';', '\n', '\r']) {
        let kw = piece.trim().to_lowercase();
        if kw.is_empty() || out.contains(&kw) {
            continue;
        }
        out.push(kw);
        if out.len() == MAX_KEYWORDS {
            break;
        }
    }
    out
}
