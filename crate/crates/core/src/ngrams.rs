//! Tokenization, stopword removal and bigram/trigram counting.
//!
//! N-grams are counted within a verse and never span two verses.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::annotate::AnnotationSet;
use crate::corpus::Verse;
use crate::labels::SentimentLabel;
use crate::scalar::Scalar;

const BUNDLED_ENGLISH: &str = include_str!("../data/stopwords_en.txt");

#[derive(Debug, thiserror::Error)]
pub enum NgramError {
    #[error("n-gram order must be 2 or 3, got {0}")]
    UnsupportedOrder(usize),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("cannot read stopword file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    /// The bundled English list.
    pub fn english() -> Self {
        Self::parse(BUNDLED_ENGLISH)
    }

    /// One token per line; text after `#` is ignored; entries are lowercased.
    pub fn parse(text: &str) -> Self {
        Stopwords(
            text.lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty())
                .map(|l| l.to_lowercase().replace('\u{2019}', "'"))
                .collect(),
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, NgramError> {
        let path = path.as_ref();
        fs::read_to_string(path)
            .map(|t| Self::parse(&t))
            .map_err(|source| NgramError::Io {
                path: path.display().to_string(),
                source,
            })
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for Stopwords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Stopwords(iter.into_iter().map(Into::into).collect())
    }
}

/// Stopword-free lowercase tokens of one verse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    pub chapter: usize,
    pub index: usize,
    pub tokens: Vec<String>,
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Lowercase words split at non-alphanumeric characters. An apostrophe
/// between two alphanumerics stays inside the word.
pub fn tokenize_text(text: &str, stopwords: &Stopwords) -> Vec<String> {
    let chars: Vec<char> = text.chars().flat_map(char::to_lowercase).collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            current.push(c);
            continue;
        }
        let inner_apostrophe =
            is_apostrophe(c) && !current.is_empty() && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
        if inner_apostrophe {
            current.push('\'');
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens.retain(|t| !stopwords.contains(t));
    tokens
}

pub fn tokenize(verse: &Verse, stopwords: &Stopwords) -> TokenSequence {
    TokenSequence {
        chapter: verse.chapter,
        index: verse.index,
        tokens: tokenize_text(&verse.text, stopwords),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NgramTable {
    pub n: usize,
    pub condition: Option<SentimentLabel>,
    /// Sorted by count descending, then token tuple ascending.
    pub entries: Vec<(Vec<String>, u64)>,
}

fn check_order(n: usize) -> Result<(), NgramError> {
    if n == 2 || n == 3 {
        Ok(())
    } else {
        Err(NgramError::UnsupportedOrder(n))
    }
}

/// Counts every contiguous n-token window within each sequence.
pub fn count_ngrams<'a, I>(sequences: I, n: usize) -> HashMap<Vec<String>, u64>
where
    I: IntoParallelIterator<Item = &'a TokenSequence>,
{
    sequences
        .into_par_iter()
        .fold(HashMap::new, |mut acc: HashMap<Vec<String>, u64>, seq| {
            for w in seq.tokens.windows(n) {
                *acc.entry(w.to_vec()).or_insert(0) += 1;
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (gram, c) in b {
                *a.entry(gram).or_insert(0) += c;
            }
            a
        })
}

fn top_k(counts: HashMap<Vec<String>, u64>, n: usize, k: usize, condition: Option<SentimentLabel>) -> NgramTable {
    let mut entries: Vec<(Vec<String>, u64)> = counts.into_iter().collect();
    entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    entries.truncate(k);
    NgramTable { n, condition, entries }
}

/// The k most frequent n-grams (n = 2 or 3) over all sequences.
pub fn extract_topk(sequences: &[TokenSequence], n: usize, k: usize) -> Result<NgramTable, NgramError> {
    check_order(n)?;
    if k == 0 {
        return Err(NgramError::ZeroK);
    }
    Ok(top_k(count_ngrams(sequences, n), n, k, None))
}

/// Like [`extract_topk`], restricted to verses whose label set contains `label`.
pub fn sentiment_topk<F: Scalar>(
    sequences: &[TokenSequence],
    annotations: &AnnotationSet<F>,
    label: SentimentLabel,
    n: usize,
    k: usize,
) -> Result<NgramTable, NgramError> {
    check_order(n)?;
    if k == 0 {
        return Err(NgramError::ZeroK);
    }
    let selected: Vec<&TokenSequence> = sequences
        .iter()
        .filter(|s| {
            annotations
                .get(s.chapter, s.index)
                .is_some_and(|a| a.labels.contains(label))
        })
        .collect();
    Ok(top_k(count_ngrams(selected, n), n, k, Some(label)))
}
