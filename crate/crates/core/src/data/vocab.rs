use std::collections::HashMap;

use crate::error::{Error, Result};

pub const PAD_ID: usize = 0;
pub const UNK_ID: usize = 1;

const PAD_TOKEN: &str = "<pad>";
const UNK_TOKEN: &str = "<unk>";

/// Token/id bijection. Ids 0 and 1 are reserved for padding and unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    ids: HashMap<String, usize>,
    tokens: Vec<String>,
}

impl Vocab {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.ids.get(token).copied()
    }

    /// Id of `token`, or [`UNK_ID`].
    pub fn id(&self, token: &str) -> usize {
        self.get(token).unwrap_or(UNK_ID)
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        self.tokens.get(id).map(String::as_str)
    }

    /// Real (non-reserved) tokens with their ids, in id order.
    pub fn words(&self) -> impl Iterator<Item = (usize, &str)> {
        self.tokens
            .iter()
            .enumerate()
            .skip(2)
            .map(|(i, t)| (i, t.as_str()))
    }
}

/// Lowercases and splits on every non-alphanumeric character.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Keeps the `max_size - 2` most frequent tokens. Ids follow descending
/// frequency, with ties broken lexicographically.
pub fn build_vocab<S: AsRef<str>>(texts: &[S], max_size: usize) -> Result<Vocab> {
    if max_size < 3 {
        return Err(Error::config(format!(
            "vocabulary size must be at least 3, got {max_size}"
        )));
    }
    let mut counts: HashMap<String, usize> = HashMap::new();
    for text in texts {
        for token in tokenize(text.as_ref()) {
            *counts.entry(token).or_default() += 1;
        }
    }
    let mut ranked: Vec<(String, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(max_size - 2);

    let mut tokens = vec![PAD_TOKEN.to_string(), UNK_TOKEN.to_string()];
    tokens.extend(ranked.into_iter().map(|(t, _)| t));
    let ids = tokens
        .iter()
        .enumerate()
        .skip(2)
        .map(|(i, t)| (t.clone(), i))
        .collect();
    Ok(Vocab { ids, tokens })
}

/// Maps `text` to exactly `t_max` ids: unknown tokens become [`UNK_ID`],
/// tokens past `t_max` are dropped, and short sequences are left-padded with
/// [`PAD_ID`].
pub fn encode(vocab: &Vocab, text: &str, t_max: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = tokenize(text)
        .iter()
        .take(t_max)
        .map(|t| vocab.id(t))
        .collect();
    let pad = t_max - ids.len();
    ids.splice(0..0, std::iter::repeat_n(PAD_ID, pad));
    ids
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequency_then_lexicographic_ids() {
        let vocab = build_vocab(&["a b", "a"], 10).unwrap();
        assert_eq!(vocab.len(), 4);
        assert_eq!(vocab.get("a"), Some(2));
        assert_eq!(vocab.get("b"), Some(3));
        assert_eq!(vocab.token(0), Some("<pad>"));
        let ties = build_vocab(&["zeta alpha mid"], 10).unwrap();
        assert_eq!(
            ties.words().map(|(_, t)| t).collect::<Vec<_>>(),
            ["alpha", "mid", "zeta"]
        );
    }

    #[test]
    fn truncates_to_max_size() {
        let vocab = build_vocab(&["c c c b b a"], 4).unwrap();
        assert_eq!(vocab.len(), 4);
        assert_eq!(vocab.get("c"), Some(2));
        assert_eq!(vocab.get("b"), Some(3));
        assert_eq!(vocab.get("a"), None);
        assert!(build_vocab(&["x"], 2).is_err());
    }

    #[test]
    fn empty_corpus_has_reserved_ids_only() {
        let vocab = build_vocab::<&str>(&[], 10).unwrap();
        assert_eq!(vocab.len(), 2);
    }

    #[test]
    fn deterministic() {
        let corpus = ["The cat, the DOG!", "a cat's toy", "dog dog"];
        assert_eq!(
            build_vocab(&corpus, 50).unwrap(),
            build_vocab(&corpus, 50).unwrap()
        );
    }

    #[test]
    fn tokenizer_lowercases_and_splits_punctuation() {
        assert_eq!(
            tokenize("Hello, World!  re:subj"),
            ["hello", "world", "re", "subj"]
        );
    }

    #[test]
    fn encode_pads_left_and_truncates_right() {
        let vocab = build_vocab(&["a b", "a"], 10).unwrap();
        assert_eq!(encode(&vocab, "a b", 4), [0, 0, 2, 3]);
        assert_eq!(encode(&vocab, "", 4), [0, 0, 0, 0]);
        assert_eq!(encode(&vocab, "a zebra", 4), [0, 0, 2, 1]);
        assert_eq!(encode(&vocab, "b a b a b", 3), [3, 2, 3]);
    }
}
