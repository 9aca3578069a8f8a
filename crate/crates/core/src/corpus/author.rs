use std::fmt;

use serde::{Deserialize, Serialize};

use super::IngestError;

/// A last name plus packed initials, both uppercase: `LOWRY OH`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AuthorName {
    pub last_name: String,
    pub initials: String,
}

/// Longest trailing token that is read as packed initials (`OH`, `PLK`).
const MAX_PACKED_INITIALS: usize = 3;

impl AuthorName {
    pub fn first_initial(&self) -> Option<char> {
        self.initials.chars().next()
    }

    /// Same person under the first-author convention: equal last names and,
    /// where both sides carry initials, equal first initials. Extra initials
    /// on either side do not matter.
    pub fn matches_first_initial(&self, other: &AuthorName) -> bool {
        if self.last_name != other.last_name {
            return false;
        }
        match (self.first_initial(), other.first_initial()) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        }
    }
}

impl AuthorName {
    pub(crate) fn cr_form(&self) -> String {
        if self.initials.is_empty() {
            return self.last_name.clone();
        }
        if self.initials.chars().count() <= MAX_PACKED_INITIALS {
            format!("{} {}", self.last_name, self.initials)
        } else {
            // long runs render spaced so they re-read as single-letter tokens
            let spaced: Vec<String> = self.initials.chars().map(String::from).collect();
            format!("{} {}", self.last_name, spaced.join(" "))
        }
    }

    fn comma_form(&self) -> String {
        let spaced: Vec<String> = self.initials.chars().map(String::from).collect();
        format!("{}, {}", self.last_name, spaced.join(" "))
    }
}

/// Renders the cited-reference form (`LOWRY OH`), falling back to
/// `LAST, I I` when the short form would re-read differently.
impl fmt::Display for AuthorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let short = self.cr_form();
        if matches!(normalize_author(&short), Ok(ref n) if n == self) {
            f.write_str(&short)
        } else {
            f.write_str(&self.comma_form())
        }
    }
}

impl std::str::FromStr for AuthorName {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        normalize_author(s)
    }
}

/// Canonicalizes an author string from either export style.
///
/// `Garfield, E.`, `GARFIELD E` and `Garfield, Eugene` all become
/// `{GARFIELD, E}`; `Lowry, O. H.` becomes `{LOWRY, OH}`.
pub fn normalize_author(raw: &str) -> Result<AuthorName, IngestError> {
    let empty = || IngestError::EmptyName(raw.to_string());
    if !raw.chars().any(char::is_alphabetic) {
        return Err(empty());
    }

    if let Some((last, given)) = raw.split_once(',') {
        let last_name = clean_tokens(last).join(" ");
        if !last_name.is_empty() {
            let initials = given_initials(given);
            return Ok(AuthorName { last_name, initials });
        }
    }

    let tokens = clean_tokens(raw);
    if tokens.is_empty() {
        return Err(empty());
    }
    if tokens.len() == 1 {
        return Ok(AuthorName {
            last_name: tokens[0].clone(),
            initials: String::new(),
        });
    }

    // trailing single letters are initials; otherwise a short trailing token
    // is a packed initials block
    let mut split = tokens.len();
    while split > 1 && is_initial_token(&tokens[split - 1], 1) {
        split -= 1;
    }
    if split == tokens.len() && is_initial_token(&tokens[split - 1], MAX_PACKED_INITIALS) {
        split -= 1;
    }
    let last_name = tokens[..split].join(" ");
    let initials: String = tokens[split..].concat();
    Ok(AuthorName { last_name, initials })
}

fn clean_tokens(s: &str) -> Vec<String> {
    s.to_uppercase()
        .replace(['.', ','], " ")
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

fn is_initial_token(t: &str, max_len: usize) -> bool {
    let n = t.chars().count();
    n >= 1 && n <= max_len && t.chars().all(char::is_alphabetic)
}

/// Initials from the given-name part of `Last, Given` forms.
fn given_initials(given: &str) -> String {
    let mut out = String::new();
    for token in given.replace(['.', ','], " ").split_whitespace() {
        let letters: Vec<char> = token.chars().filter(|c| c.is_alphabetic()).collect();
        if letters.is_empty() {
            continue;
        }
        let packed = letters.len() <= MAX_PACKED_INITIALS && letters.iter().all(|c| c.is_uppercase());
        if packed {
            out.extend(letters.iter().flat_map(|c| c.to_uppercase()));
            continue;
        }
        // hyphenated given names contribute one initial per part
        for part in token.split('-') {
            if let Some(c) = part.chars().find(|c| c.is_alphabetic()) {
                out.extend(c.to_uppercase());
            }
        }
    }
    out
}
