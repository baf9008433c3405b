//! Per-verse annotation sets and their line-delimited JSON interchange format.
//!
//! A file starts with a header object
//! `{"format_version":"1","threshold":0.5,"dimension":768,"normalized":true}`
//! followed by one record per verse:
//! `{"translation_id":..,"chapter":..,"index":..,"probs":[9 reals],"embedding":[d reals],"polarity":..}`.
//! `polarity` is optional. Any stored `labels` field is ignored; label sets
//! are always recomputed from `probs` and the threshold.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::TranslationText;
use crate::labels::{LabelSet, SentimentLabel, LABEL_COUNT};
use crate::scalar::Scalar;

pub const FORMAT_VERSION: &str = "1";
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Embeddings flagged as normalized are accepted as-is when their norm is
/// within this distance of 1; otherwise they are renormalized.
const UNIT_NORM_TOLERANCE: f64 = 1e-6;

/// Problem with a single verse record.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RecordError {
    #[error("chapter and verse indices are 1-based, got ({chapter},{index})")]
    InvalidKey { chapter: usize, index: usize },
    #[error("chapter {chapter} verse {index}: expected {LABEL_COUNT} probabilities, found {found}")]
    ProbabilityCount { chapter: usize, index: usize, found: usize },
    #[error("chapter {chapter} verse {index}: probability for {label} out of range [0,1]: {value}")]
    ProbabilityOutOfRange {
        chapter: usize,
        index: usize,
        label: SentimentLabel,
        value: f64,
    },
    #[error("chapter {chapter} verse {index}: dimension mismatch, expected {expected}, found {found}")]
    DimensionMismatch {
        chapter: usize,
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("chapter {chapter} verse {index}: embedding is the zero vector")]
    ZeroEmbedding { chapter: usize, index: usize },
    #[error("chapter {chapter} verse {index}: non-finite value in embedding")]
    NonFiniteEmbedding { chapter: usize, index: usize },
    #[error("chapter {chapter} verse {index}: polarity out of range [-1,1]: {value}")]
    PolarityOutOfRange { chapter: usize, index: usize, value: f64 },
    #[error("duplicate annotation for chapter {chapter} verse {index}")]
    DuplicateKey { chapter: usize, index: usize },
    #[error("chapter {chapter} verse {index}: translation id {found:?} differs from {expected:?}")]
    TranslationId {
        chapter: usize,
        index: usize,
        expected: String,
        found: String,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum AnnotateError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: {error}")]
    Record {
        line: usize,
        #[source]
        error: RecordError,
    },
    #[error(transparent)]
    InvalidRecord(#[from] RecordError),
    #[error("missing header line")]
    MissingHeader,
    #[error("unsupported format version {0:?}")]
    UnsupportedVersion(String),
    #[error("threshold out of range (0,1): {0}")]
    ThresholdOutOfRange(f64),
    #[error("embedding dimension must be positive")]
    ZeroDimension,
    #[error("{found} probabilities given, expected {LABEL_COUNT}")]
    ProbabilityCount { found: usize },
    #[error("probability for {label} out of range [0,1]: {value}")]
    ProbabilityOutOfRange { label: SentimentLabel, value: f64 },
    #[error("annotation file has no verse records")]
    NoRecords,
    #[error("annotation set is for {set:?} but the text is {text:?}")]
    TranslationMismatch { set: String, text: String },
}

/// Labels whose probability reaches the threshold (inclusive).
pub fn threshold_labels<F: Scalar>(probs: &[F], threshold: F) -> Result<LabelSet, AnnotateError> {
    check_threshold(threshold)?;
    if probs.len() != LABEL_COUNT {
        return Err(AnnotateError::ProbabilityCount { found: probs.len() });
    }
    let mut set = LabelSet::empty();
    for (label, &p) in SentimentLabel::ALL.iter().zip(probs) {
        if !(p >= F::zero() && p <= F::one()) {
            return Err(AnnotateError::ProbabilityOutOfRange {
                label: *label,
                value: p.into(),
            });
        }
        if p >= threshold {
            set.insert(*label);
        }
    }
    Ok(set)
}

fn check_threshold<F: Scalar>(threshold: F) -> Result<(), AnnotateError> {
    if threshold > F::zero() && threshold < F::one() {
        Ok(())
    } else {
        Err(AnnotateError::ThresholdOutOfRange(threshold.into()))
    }
}

/// Raw per-verse model outputs, before thresholding and normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct VerseInput<F> {
    pub chapter: usize,
    pub index: usize,
    pub probs: Vec<F>,
    pub embedding: Vec<F>,
    pub polarity: Option<F>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerseAnnotation<F> {
    pub translation_id: String,
    pub chapter: usize,
    pub index: usize,
    pub probs: [F; LABEL_COUNT],
    pub labels: LabelSet,
    pub embedding: Vec<F>,
    pub external_polarity: Option<F>,
}

impl<F> VerseAnnotation<F> {
    pub fn key(&self) -> (usize, usize) {
        (self.chapter, self.index)
    }
}

/// All annotations of one translation.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationSet<F> {
    translation_id: String,
    threshold: F,
    dimension: usize,
    normalized: bool,
    entries: BTreeMap<(usize, usize), VerseAnnotation<F>>,
}

impl<F: Scalar> AnnotationSet<F> {
    /// An empty set whose embeddings are L2-normalized on insertion.
    pub fn new(translation_id: impl Into<String>, threshold: F, dimension: usize) -> Result<Self, AnnotateError> {
        check_threshold(threshold)?;
        if dimension == 0 {
            return Err(AnnotateError::ZeroDimension);
        }
        Ok(AnnotationSet {
            translation_id: translation_id.into(),
            threshold,
            dimension,
            normalized: true,
            entries: BTreeMap::new(),
        })
    }

    /// Keeps embeddings as given; cosine then divides by both norms.
    pub fn without_normalization(mut self) -> Self {
        assert!(self.entries.is_empty(), "normalization mode fixed once entries exist");
        self.normalized = false;
        self
    }

    pub fn translation_id(&self) -> &str {
        &self.translation_id
    }

    pub fn threshold(&self) -> F {
        self.threshold
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, chapter: usize, index: usize) -> Option<&VerseAnnotation<F>> {
        self.entries.get(&(chapter, index))
    }

    /// Entries in (chapter, index) order.
    pub fn iter(&self) -> impl Iterator<Item = &VerseAnnotation<F>> {
        self.entries.values()
    }

    pub fn chapter_entries(&self, chapter: usize) -> impl Iterator<Item = &VerseAnnotation<F>> {
        self.entries.range((chapter, 0)..(chapter + 1, 0)).map(|(_, v)| v)
    }

    pub fn keys(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries.keys().copied()
    }

    /// Highest chapter number present, 0 when empty.
    pub fn chapter_count(&self) -> usize {
        self.entries.keys().next_back().map_or(0, |k| k.0)
    }

    pub fn insert(&mut self, input: VerseInput<F>) -> Result<(), RecordError> {
        let VerseInput {
            chapter,
            index,
            probs,
            mut embedding,
            polarity,
        } = input;
        if chapter == 0 || index == 0 {
            return Err(RecordError::InvalidKey { chapter, index });
        }
        if self.entries.contains_key(&(chapter, index)) {
            return Err(RecordError::DuplicateKey { chapter, index });
        }
        let probs: [F; LABEL_COUNT] = probs.try_into().map_err(|p: Vec<F>| RecordError::ProbabilityCount {
            chapter,
            index,
            found: p.len(),
        })?;
        for (label, &p) in SentimentLabel::ALL.iter().zip(&probs) {
            if !(p >= F::zero() && p <= F::one()) {
                return Err(RecordError::ProbabilityOutOfRange {
                    chapter,
                    index,
                    label: *label,
                    value: p.into(),
                });
            }
        }
        if embedding.len() != self.dimension {
            return Err(RecordError::DimensionMismatch {
                chapter,
                index,
                expected: self.dimension,
                found: embedding.len(),
            });
        }
        if embedding.iter().any(|x| !x.is_finite()) {
            return Err(RecordError::NonFiniteEmbedding { chapter, index });
        }
        let norm = embedding.iter().map(|&x| x * x).sum::<F>().sqrt();
        if norm == F::zero() {
            return Err(RecordError::ZeroEmbedding { chapter, index });
        }
        if self.normalized && (norm - F::one()).abs() > F::from_f64_lossy(UNIT_NORM_TOLERANCE) {
            for x in &mut embedding {
                *x = *x / norm;
            }
        }
        if let Some(p) = polarity {
            if !(p >= -F::one() && p <= F::one()) {
                return Err(RecordError::PolarityOutOfRange {
                    chapter,
                    index,
                    value: p.into(),
                });
            }
        }
        let labels = labels_at(&probs, self.threshold);
        self.entries.insert(
            (chapter, index),
            VerseAnnotation {
                translation_id: self.translation_id.clone(),
                chapter,
                index,
                probs,
                labels,
                embedding,
                external_polarity: polarity,
            },
        );
        Ok(())
    }

    /// Same annotations with label sets recomputed at another threshold.
    pub fn with_threshold(&self, threshold: F) -> Result<Self, AnnotateError> {
        check_threshold(threshold)?;
        let mut out = self.clone();
        out.threshold = threshold;
        for e in out.entries.values_mut() {
            e.labels = labels_at(&e.probs, threshold);
        }
        Ok(out)
    }
}

fn labels_at<F: Scalar>(probs: &[F; LABEL_COUNT], threshold: F) -> LabelSet {
    SentimentLabel::ALL
        .iter()
        .zip(probs)
        .filter(|(_, &p)| p >= threshold)
        .map(|(l, _)| *l)
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format_version: String,
    threshold: f64,
    dimension: usize,
    normalized: bool,
}

#[derive(Debug, Deserialize)]
struct RecordIn {
    translation_id: String,
    chapter: usize,
    index: usize,
    probs: Vec<f64>,
    embedding: Vec<f64>,
    #[serde(default)]
    polarity: Option<f64>,
}

#[derive(Debug, Serialize)]
struct RecordOut<'a> {
    translation_id: &'a str,
    chapter: usize,
    index: usize,
    probs: Vec<f64>,
    embedding: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    polarity: Option<f64>,
}

/// Reads an annotation interchange file.
pub fn read_annotations<F: Scalar>(path: impl AsRef<Path>) -> Result<AnnotationSet<F>, AnnotateError> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|source| AnnotateError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_annotations(BufReader::new(file)).map_err(|e| match e {
        AnnotateError::Io { source, .. } => AnnotateError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

pub fn parse_annotations<F: Scalar, R: BufRead>(reader: R) -> Result<AnnotationSet<F>, AnnotateError> {
    let mut set: Option<AnnotationSet<F>> = None;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|source| {
            let source = if source.kind() == io::ErrorKind::InvalidData {
                io::Error::new(io::ErrorKind::InvalidData, format!("line {line_no}: invalid UTF-8"))
            } else {
                source
            };
            AnnotateError::Io {
                path: PathBuf::from("<reader>"),
                source,
            }
        })?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let malformed = |e: serde_json::Error| AnnotateError::Malformed {
            line: line_no,
            message: e.to_string(),
        };
        match set.as_mut() {
            None => {
                let header: Header = serde_json::from_str(line).map_err(malformed)?;
                if header.format_version != FORMAT_VERSION {
                    return Err(AnnotateError::UnsupportedVersion(header.format_version));
                }
                // Unnormalized inputs are normalized on insertion, so the
                // in-memory set is always flagged normalized.
                set = Some(AnnotationSet::new(
                    String::new(),
                    F::from_f64_lossy(header.threshold),
                    header.dimension,
                )?);
            }
            Some(s) => {
                let rec: RecordIn = serde_json::from_str(line).map_err(malformed)?;
                if s.entries.is_empty() {
                    s.translation_id = rec.translation_id.clone();
                } else if rec.translation_id != s.translation_id {
                    return Err(AnnotateError::Record {
                        line: line_no,
                        error: RecordError::TranslationId {
                            chapter: rec.chapter,
                            index: rec.index,
                            expected: s.translation_id.clone(),
                            found: rec.translation_id,
                        },
                    });
                }
                let input = VerseInput {
                    chapter: rec.chapter,
                    index: rec.index,
                    probs: rec.probs.into_iter().map(F::from_f64_lossy).collect(),
                    embedding: rec.embedding.into_iter().map(F::from_f64_lossy).collect(),
                    polarity: rec.polarity.map(F::from_f64_lossy),
                };
                s.insert(input)
                    .map_err(|error| AnnotateError::Record { line: line_no, error })?;
            }
        }
    }
    let set = set.ok_or(AnnotateError::MissingHeader)?;
    if set.is_empty() {
        return Err(AnnotateError::NoRecords);
    }
    Ok(set)
}

/// Rounds to 9 significant digits; the shortest repr of the result then
/// carries at most 9 digits.
fn sig9(x: f64) -> f64 {
    format!("{x:.8e}").parse().expect("formatted float parses")
}

/// Writes the interchange form of `set`, records in (chapter, index) order.
pub fn write_annotations<F: Scalar, W: Write>(set: &AnnotationSet<F>, mut out: W) -> io::Result<()> {
    let header = Header {
        format_version: FORMAT_VERSION.to_string(),
        threshold: sig9(set.threshold.into()),
        dimension: set.dimension,
        normalized: set.normalized,
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for e in set.iter() {
        let rec = RecordOut {
            translation_id: &e.translation_id,
            chapter: e.chapter,
            index: e.index,
            probs: e.probs.iter().map(|&p| sig9(p.into())).collect(),
            embedding: e.embedding.iter().map(|&x| sig9(x.into())).collect(),
            polarity: e.external_polarity.map(|p| sig9(p.into())),
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Coverage differences between an annotation set and its translation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub translation_id: String,
    /// Verses in the text with no annotation.
    pub missing: Vec<(usize, usize)>,
    /// Annotations with no verse in the text.
    pub extraneous: Vec<(usize, usize)>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.missing.is_empty() && self.extraneous.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let render = |keys: &[(usize, usize)]| {
            keys.iter()
                .map(|(c, v)| format!("({c},{v})"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        if self.is_valid() {
            return write!(f, "{}: annotations match the text", self.translation_id);
        }
        write!(f, "{}:", self.translation_id)?;
        if !self.missing.is_empty() {
            write!(f, " missing annotations for {}", render(&self.missing))?;
        }
        if !self.extraneous.is_empty() {
            if !self.missing.is_empty() {
                f.write_str(";")?;
            }
            write!(f, " extraneous annotations for {}", render(&self.extraneous))?;
        }
        Ok(())
    }
}

pub fn validate_against_corpus<F: Scalar>(
    set: &AnnotationSet<F>,
    text: &TranslationText,
) -> Result<ValidationReport, AnnotateError> {
    if set.translation_id() != text.id() {
        return Err(AnnotateError::TranslationMismatch {
            set: set.translation_id().to_string(),
            text: text.id().to_string(),
        });
    }
    let missing = text
        .verses()
        .map(|v| v.key())
        .filter(|&(c, i)| set.get(c, i).is_none())
        .collect();
    let extraneous = set.keys().filter(|&(c, i)| text.verse(c, i).is_none()).collect();
    Ok(ValidationReport {
        translation_id: text.id().to_string(),
        missing,
        extraneous,
    })
}
