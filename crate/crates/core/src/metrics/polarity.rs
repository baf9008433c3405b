use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::MetricsError;
use crate::annotate::AnnotationSet;
use crate::labels::{LabelSet, SentimentLabel, LABEL_COUNT};
use crate::scalar::{self, Scalar};

/// Integer polarity weight per label, indexed in canonical label order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolarityWeights([i64; LABEL_COUNT]);

impl Default for PolarityWeights {
    /// optimistic +2, thankful +3, empathetic 0, pessimistic -4, anxious -2,
    /// sad -3, annoyed -1, denial -5, joking +1.
    fn default() -> Self {
        PolarityWeights([2, 3, 0, -4, -2, -3, -1, -5, 1])
    }
}

#[derive(Debug, thiserror::Error)]
pub enum WeightsError {
    #[error("cannot read weights file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("weights file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("weights file: {0}")]
    UnknownLabel(#[from] crate::labels::UnknownLabel),
}

impl PolarityWeights {
    pub fn new(weights: [i64; LABEL_COUNT]) -> Self {
        PolarityWeights(weights)
    }

    pub fn get(&self, label: SentimentLabel) -> i64 {
        self.0[label.index()]
    }

    pub fn as_array(&self) -> [i64; LABEL_COUNT] {
        self.0
    }

    /// Defaults overridden by a TOML table of `label = integer` entries.
    pub fn from_toml_str(text: &str) -> Result<Self, WeightsError> {
        let table: BTreeMap<String, i64> = toml::from_str(text)?;
        let mut weights = Self::default();
        for (name, w) in table {
            let label: SentimentLabel = name.parse()?;
            weights.0[label.index()] = w;
        }
        Ok(weights)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, WeightsError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| WeightsError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_map(&self) -> BTreeMap<&'static str, i64> {
        SentimentLabel::ALL.iter().map(|l| (l.name(), self.get(*l))).collect()
    }
}

impl Serialize for PolarityWeights {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(LABEL_COUNT))?;
        for l in SentimentLabel::ALL {
            m.serialize_entry(l.name(), &self.get(l))?;
        }
        m.end()
    }
}

/// Sum of label weights; 0 for the empty set.
pub fn polarity_verse(labels: LabelSet, weights: &PolarityWeights) -> i64 {
    labels.iter().map(|l| weights.get(l)).sum()
}

fn chapter_in_range<F: Scalar>(set: &AnnotationSet<F>, chapter: usize) -> Result<(), MetricsError> {
    if set.chapter_entries(chapter).next().is_none() {
        return Err(MetricsError::ChapterOutOfRange {
            chapter,
            chapters: set.chapter_count(),
        });
    }
    Ok(())
}

/// Mean weighted polarity over every annotated verse of a chapter.
pub fn polarity_chapter_mean<F: Scalar>(
    set: &AnnotationSet<F>,
    chapter: usize,
    weights: &PolarityWeights,
) -> Result<F, MetricsError> {
    chapter_in_range(set, chapter)?;
    let values: Vec<F> = set
        .chapter_entries(chapter)
        .map(|v| F::from_i64(polarity_verse(v.labels, weights)).expect("small integer"))
        .collect();
    Ok(scalar::mean(&values).expect("chapter is non-empty"))
}

/// Mean of the externally supplied polarity over the verses that carry one.
pub fn external_polarity_chapter_mean<F: Scalar>(
    set: &AnnotationSet<F>,
    chapter: usize,
) -> Result<Option<F>, MetricsError> {
    chapter_in_range(set, chapter)?;
    let values: Vec<F> = set
        .chapter_entries(chapter)
        .filter_map(|v| v.external_polarity)
        .collect();
    Ok(scalar::mean(&values))
}
