//! Verse-by-verse comparison of parallel translations of a chaptered text.
//!
//! The pipeline runs in stages:
//!
//! 1. [`corpus`] loads each translation, normalizes it to one verse per line
//!    and aligns translations positionally, chapter by chapter.
//! 2. [`annotate`] reads externally produced per-verse sentiment
//!    probabilities, sentence embeddings and optional lexicon polarity, and
//!    thresholds the probabilities into multi-label sets.
//! 3. [`metrics`] computes pairwise Jaccard agreement of label sets, cosine
//!    similarity of embeddings, weighted polarity, label counts, label
//!    co-occurrence and similarity-extreme verse rankings.
//! 4. [`ngrams`] counts stopword-filtered bigrams and trigrams, overall and
//!    conditioned on a sentiment label.
//! 5. [`report`] writes CSV tables, a JSON summary and SVG charts with numeric
//!    sidecars. [`cli`] wires it all together.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar for the common cases.

pub mod annotate;
pub mod cli;
pub mod corpus;
pub mod labels;
pub mod metrics;
pub mod ngrams;
pub mod report;
pub mod scalar;

pub use annotate::{read_annotations, threshold_labels, write_annotations, ValidationReport};
pub use corpus::{align, load_translation, segment_paragraphs, AlignedCorpus, AlignmentPolicy};
pub use corpus::{TranslationText, Verse};
pub use labels::{LabelSet, SentimentLabel};
pub use metrics::{PairKey, PolarityWeights, RankDirection, RankKey};
pub use ngrams::{NgramTable, Stopwords, TokenSequence};
pub use scalar::Scalar;

/// Annotations with double-precision probabilities and embeddings.
pub type AnnotationSet64 = annotate::AnnotationSet<f64>;
/// Annotations with single-precision probabilities and embeddings.
pub type AnnotationSet32 = annotate::AnnotationSet<f32>;
pub type VerseAnnotation64 = annotate::VerseAnnotation<f64>;
pub type VerseAnnotation32 = annotate::VerseAnnotation<f32>;
pub type MetricBundle64 = metrics::MetricBundle<f64>;
pub type MetricBundle32 = metrics::MetricBundle<f32>;
pub type Ranking64 = metrics::Ranking<f64>;
pub type Ranking32 = metrics::Ranking<f32>;
