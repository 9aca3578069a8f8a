use crate::corpus::CitedReference;
use crate::fraction::Fraction;

/// The text compared between two references: first author followed by source.
pub fn similarity_text(cr: &CitedReference) -> String {
    let mut s = String::new();
    if let Some(a) = &cr.first_author {
        s.push_str(a);
    }
    if let Some(src) = &cr.source {
        s.push_str(src);
    }
    s
}

/// `1 - levenshtein / max_len` over [`similarity_text`], counted in chars.
/// Two empty texts are identical.
pub fn similarity(a: &CitedReference, b: &CitedReference) -> Fraction {
    text_similarity(&similarity_text(a), &similarity_text(b))
}

pub(crate) fn text_similarity(a: &str, b: &str) -> Fraction {
    let longest = a.chars().count().max(b.chars().count()) as u64;
    if longest == 0 {
        return Fraction::ONE;
    }
    let d = strsim::levenshtein(a, b) as u64;
    Fraction::new(longest - d, longest)
}

/// Best similarity two texts of these lengths could reach.
pub(crate) fn length_bound(len_a: usize, len_b: usize) -> Fraction {
    let longest = len_a.max(len_b) as u64;
    if longest == 0 {
        return Fraction::ONE;
    }
    Fraction::new(longest - len_a.abs_diff(len_b) as u64, longest)
}
