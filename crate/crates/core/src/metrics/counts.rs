use serde::Serialize;

use crate::annotate::AnnotationSet;
use crate::labels::{SentimentLabel, LABEL_COUNT};
use crate::scalar::Scalar;

/// Number of verses carrying each label, canonical order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LabelCounts(pub [u64; LABEL_COUNT]);

impl LabelCounts {
    pub fn get(&self, label: SentimentLabel) -> u64 {
        self.0[label.index()]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

/// Symmetric label co-occurrence counts; the diagonal holds per-label counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CooccurrenceMatrix(pub [[u64; LABEL_COUNT]; LABEL_COUNT]);

impl CooccurrenceMatrix {
    pub fn get(&self, a: SentimentLabel, b: SentimentLabel) -> u64 {
        self.0[a.index()][b.index()]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..LABEL_COUNT).all(|i| (0..i).all(|j| self.0[i][j] == self.0[j][i]))
    }
}

fn count<'a, F: Scalar + 'a>(entries: impl Iterator<Item = &'a crate::annotate::VerseAnnotation<F>>) -> LabelCounts {
    let mut counts = LabelCounts::default();
    for v in entries {
        for l in v.labels.iter() {
            counts.0[l.index()] += 1;
        }
    }
    counts
}

pub fn cumulative_counts<F: Scalar>(set: &AnnotationSet<F>) -> LabelCounts {
    count(set.iter())
}

/// Label counts over one chapter; all zero when the chapter has no entries.
pub fn chapter_counts<F: Scalar>(set: &AnnotationSet<F>, chapter: usize) -> LabelCounts {
    count(set.chapter_entries(chapter))
}

pub fn cooccurrence_matrix<F: Scalar>(set: &AnnotationSet<F>) -> CooccurrenceMatrix {
    let mut m = CooccurrenceMatrix::default();
    for v in set.iter() {
        let present: Vec<usize> = v.labels.iter().map(SentimentLabel::index).collect();
        for &i in &present {
            for &j in &present {
                m.0[i][j] += 1;
            }
        }
    }
    m
}
