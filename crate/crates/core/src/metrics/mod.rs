//! Pairwise and per-translation statistics over an aligned corpus.
//!
//! Every aggregate is accumulated in ascending (chapter, index) order, so
//! results do not depend on how work is split across threads.

mod counts;
mod polarity;
mod ranking;
mod similarity;

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::annotate::AnnotationSet;
use crate::corpus::AlignedCorpus;
use crate::scalar::{self, Scalar};

pub use counts::{chapter_counts, cooccurrence_matrix, cumulative_counts, CooccurrenceMatrix, LabelCounts};
pub use polarity::{
    external_polarity_chapter_mean, polarity_chapter_mean, polarity_verse, PolarityWeights, WeightsError,
};
pub use ranking::{rank_similarity, RankDirection, RankKey, Ranking, SimilarityRecord};
pub use similarity::{
    cosine, cosine_chapter_stats, cosine_chapter_values, jaccard_chapter, jaccard_chapter_values, jaccard_verse,
    verse_cosine,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("chapter {chapter} out of range (1..={chapters})")]
    ChapterOutOfRange { chapter: usize, chapters: usize },
    #[error("no annotation for {translation_id} chapter {chapter} verse {index}")]
    MissingAnnotation {
        translation_id: String,
        chapter: usize,
        index: usize,
    },
    #[error("no annotation set for translation {0:?}")]
    UnknownTranslation(String),
    #[error("embedding dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("cosine of a zero vector")]
    ZeroVector,
    #[error("a pair needs two distinct translations, got {0:?} twice")]
    SamePair(String),
    #[error("need at least 2 translations, got {0}")]
    TooFewTranslations(usize),
    #[error("k must be at least 1")]
    ZeroK,
}

/// Unordered pair of translation ids, stored in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PairKey {
    first: String,
    second: String,
}

impl PairKey {
    pub fn new(a: impl Into<String>, b: impl Into<String>) -> Result<Self, MetricsError> {
        let (a, b) = (a.into(), b.into());
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(PairKey { first: a, second: b }),
            std::cmp::Ordering::Greater => Ok(PairKey { first: b, second: a }),
            std::cmp::Ordering::Equal => Err(MetricsError::SamePair(a)),
        }
    }

    pub fn first(&self) -> &str {
        &self.first
    }

    pub fn second(&self) -> &str {
        &self.second
    }

    /// All pairs `(ids[i], ids[j])` with `i < j`, in that enumeration order.
    pub fn all_pairs<S: AsRef<str>>(ids: &[S]) -> Result<Vec<PairKey>, MetricsError> {
        let mut out = Vec::new();
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                out.push(PairKey::new(ids[i].as_ref(), ids[j].as_ref())?);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for PairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.first, self.second)
    }
}

/// Every statistic the reports draw on.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricBundle<F> {
    /// Translation ids in corpus order.
    pub translation_ids: Vec<String>,
    pub chapter_count: usize,
    /// Pairs in enumeration order (i < j over `translation_ids`).
    pub pairs: Vec<PairKey>,
    pub jaccard: BTreeMap<(PairKey, usize), F>,
    pub jaccard_avg: BTreeMap<PairKey, F>,
    pub cosine_mean: BTreeMap<(PairKey, usize), F>,
    pub cosine_std: BTreeMap<(PairKey, usize), F>,
    pub cosine_avg: BTreeMap<PairKey, F>,
    pub polarity_mean: BTreeMap<(String, usize), F>,
    pub external_polarity_mean: BTreeMap<(String, usize), Option<F>>,
    pub cumulative_counts: BTreeMap<String, LabelCounts>,
    pub chapter_counts: BTreeMap<(String, usize), LabelCounts>,
    pub cooccurrence: BTreeMap<String, CooccurrenceMatrix>,
}

impl<F: Scalar> MetricBundle<F> {
    /// A bundle with no values, for filling in by hand.
    pub fn empty<S: AsRef<str>>(translation_ids: &[S], chapter_count: usize) -> Result<Self, MetricsError> {
        Ok(MetricBundle {
            translation_ids: translation_ids.iter().map(|s| s.as_ref().to_string()).collect(),
            chapter_count,
            pairs: PairKey::all_pairs(translation_ids)?,
            jaccard: BTreeMap::new(),
            jaccard_avg: BTreeMap::new(),
            cosine_mean: BTreeMap::new(),
            cosine_std: BTreeMap::new(),
            cosine_avg: BTreeMap::new(),
            polarity_mean: BTreeMap::new(),
            external_polarity_mean: BTreeMap::new(),
            cumulative_counts: BTreeMap::new(),
            chapter_counts: BTreeMap::new(),
            cooccurrence: BTreeMap::new(),
        })
    }

    /// Recomputes `jaccard_avg` and `cosine_avg` from the per-chapter values.
    /// A pair missing any chapter gets no average.
    pub fn recompute_averages(&mut self) {
        for pair in &self.pairs {
            if let Some(avg) = chapter_average(&self.jaccard, pair, self.chapter_count) {
                self.jaccard_avg.insert(pair.clone(), avg);
            }
            if let Some(avg) = chapter_average(&self.cosine_mean, pair, self.chapter_count) {
                self.cosine_avg.insert(pair.clone(), avg);
            }
        }
    }
}

/// Unweighted mean of a pair's chapter values, chapters 1..=n in order.
pub fn chapter_average<F: Scalar>(
    values: &BTreeMap<(PairKey, usize), F>,
    pair: &PairKey,
    chapter_count: usize,
) -> Option<F> {
    let per_chapter: Option<Vec<F>> = (1..=chapter_count)
        .map(|c| values.get(&(pair.clone(), c)).copied())
        .collect();
    scalar::mean(&per_chapter?)
}

fn set_for<'a, F>(sets: &'a [AnnotationSet<F>], id: &str) -> Result<&'a AnnotationSet<F>, MetricsError>
where
    F: Scalar,
{
    sets.iter()
        .find(|s| s.translation_id() == id)
        .ok_or_else(|| MetricsError::UnknownTranslation(id.to_string()))
}

/// Computes the full bundle. Parallelism comes from the ambient rayon pool.
pub fn compute_bundle<F: Scalar>(
    corpus: &AlignedCorpus,
    sets: &[AnnotationSet<F>],
    weights: &PolarityWeights,
) -> Result<MetricBundle<F>, MetricsError> {
    let ids: Vec<String> = corpus.translation_ids().into_iter().map(str::to_string).collect();
    let chapters = corpus.chapter_count();
    let mut bundle = MetricBundle::empty(&ids, chapters)?;

    let pair_sets: Vec<(&PairKey, &AnnotationSet<F>, &AnnotationSet<F>)> = bundle
        .pairs
        .iter()
        .map(|p| Ok((p, set_for(sets, p.first())?, set_for(sets, p.second())?)))
        .collect::<Result<_, MetricsError>>()?;
    let tasks: Vec<(usize, usize)> = (0..pair_sets.len())
        .flat_map(|p| (1..=chapters).map(move |c| (p, c)))
        .collect();
    type PairChapter<F> = (PairKey, usize, F, F, F);
    let pair_values: Vec<PairChapter<F>> = tasks
        .par_iter()
        .map(|&(p, chapter)| {
            let (pair, a, b) = pair_sets[p];
            let jac = jaccard_chapter(corpus, a, b, chapter)?;
            let (mean, std) = cosine_chapter_stats(corpus, a, b, chapter)?;
            Ok((pair.clone(), chapter, jac, mean, std))
        })
        .collect::<Result<_, MetricsError>>()?;
    for (pair, chapter, jac, mean, std) in pair_values {
        bundle.jaccard.insert((pair.clone(), chapter), jac);
        bundle.cosine_mean.insert((pair.clone(), chapter), mean);
        bundle.cosine_std.insert((pair, chapter), std);
    }
    bundle.recompute_averages();

    let own_sets: Vec<&AnnotationSet<F>> = ids.iter().map(|id| set_for(sets, id)).collect::<Result<_, _>>()?;
    type PerTranslation<F> = (LabelCounts, CooccurrenceMatrix, Vec<(F, Option<F>, LabelCounts)>);
    let per_translation: Vec<PerTranslation<F>> = own_sets
        .par_iter()
        .map(|set| {
            let per_chapter = (1..=chapters)
                .map(|c| {
                    Ok((
                        polarity_chapter_mean(set, c, weights)?,
                        external_polarity_chapter_mean(set, c)?,
                        chapter_counts(set, c),
                    ))
                })
                .collect::<Result<Vec<_>, MetricsError>>()?;
            Ok((cumulative_counts(set), cooccurrence_matrix(set), per_chapter))
        })
        .collect::<Result<_, MetricsError>>()?;
    for (id, (cumulative, cooc, per_chapter)) in ids.iter().zip(per_translation) {
        bundle.cumulative_counts.insert(id.clone(), cumulative);
        bundle.cooccurrence.insert(id.clone(), cooc);
        for (ci, (pol, ext, counts)) in per_chapter.into_iter().enumerate() {
            let key = (id.clone(), ci + 1);
            bundle.polarity_mean.insert(key.clone(), pol);
            bundle.external_polarity_mean.insert(key.clone(), ext);
            bundle.chapter_counts.insert(key, counts);
        }
    }
    Ok(bundle)
}
