use serde::{Deserialize, Serialize};

/// Which n-grams become terms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NgramMode {
    Unigram,
    Bigram,
    #[default]
    Both,
}

impl NgramMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NgramMode::Unigram => "unigram",
            NgramMode::Bigram => "bigram",
            NgramMode::Both => "both",
        }
    }
}

impl std::str::FromStr for NgramMode {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unigram" => Ok(NgramMode::Unigram),
            "bigram" => Ok(NgramMode::Bigram),
            "both" => Ok(NgramMode::Both),
            _ => Err(crate::error::Error::InvalidInput(format!("unknown n-gram mode {s:?}"))),
        }
    }
}

fn is_term_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '-' | '.' | '_')
}

/// Lowercase `text`, split on every character that is not alphanumeric,
/// `-`, `.` or `_`, and return all unigrams followed by all adjacent bigrams
/// (joined with one space).
pub fn tokenize(text: &str) -> Vec<String> {
    tokenize_with(text, NgramMode::Both)
}

pub fn tokenize_with(text: &str, mode: NgramMode) -> Vec<String> {
    let lower = text.to_lowercase();
    let words: Vec<&str> = lower.split(|c: char| !is_term_char(c)).filter(|w| !w.is_empty()).collect();
    let mut out = Vec::new();
    if mode != NgramMode::Bigram {
        out.extend(words.iter().map(|w| w.to_string()));
    }
    if mode != NgramMode::Unigram {
        out.extend(words.windows(2).map(|p| format!("{} {}", p[0], p[1])));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn license_line() {
        assert_eq!(tokenize("license: apache-2.0"), ["license", "apache-2.0", "license apache-2.0"]);
    }

    #[test]
    fn empty_and_separator_only() {
        assert!(tokenize("").is_empty());
        assert!(tokenize(" :,[]").is_empty());
    }

    #[test]
    fn modes() {
        assert_eq!(tokenize_with("A b C", NgramMode::Unigram), ["a", "b", "c"]);
        assert_eq!(tokenize_with("A b C", NgramMode::Bigram), ["a b", "b c"]);
        assert_eq!(tokenize("Ünï_code x"), ["ünï_code", "x", "ünï_code x"]);
    }
}
