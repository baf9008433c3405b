use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::similarity::verse_cosine;
use super::{set_for, MetricsError, PairKey};
use crate::annotate::AnnotationSet;
use crate::corpus::AlignedCorpus;
use crate::scalar::{self, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankDirection {
    Most,
    Least,
}

/// How the pairwise cosines of a verse collapse into one ranking score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankKey {
    #[default]
    Mean,
    Min,
    Max,
}

impl RankKey {
    pub fn name(self) -> &'static str {
        match self {
            RankKey::Mean => "mean",
            RankKey::Min => "min",
            RankKey::Max => "max",
        }
    }

    fn reduce<F: Scalar>(self, scores: &[F]) -> F {
        match self {
            RankKey::Mean => scalar::mean(scores).expect("at least one pair"),
            RankKey::Min => scores.iter().copied().fold(F::infinity(), F::min),
            RankKey::Max => scores.iter().copied().fold(F::neg_infinity(), F::max),
        }
    }
}

impl fmt::Display for RankKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RankKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mean" => Ok(RankKey::Mean),
            "min" => Ok(RankKey::Min),
            "max" => Ok(RankKey::Max),
            other => Err(format!("unknown ranking key {other:?} (expected mean, min or max)")),
        }
    }
}

/// One aligned verse with its text in every translation and all pairwise
/// cosines.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityRecord<F> {
    pub chapter: usize,
    pub index: usize,
    /// (translation id, verse text), corpus order.
    pub texts: Vec<(String, String)>,
    /// One score per pair, in [`Ranking::pairs`] order.
    pub scores: Vec<F>,
    pub key_score: F,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranking<F> {
    pub direction: RankDirection,
    pub key: RankKey,
    pub requested_k: usize,
    /// True when fewer aligned verses exist than were requested.
    pub clamped: bool,
    pub pairs: Vec<PairKey>,
    pub records: Vec<SimilarityRecord<F>>,
}

/// The k aligned verses most (or least) similar across all translation
/// pairs. Ties go to the lower (chapter, index).
pub fn rank_similarity<F: Scalar>(
    corpus: &AlignedCorpus,
    sets: &[AnnotationSet<F>],
    k: usize,
    direction: RankDirection,
    key: RankKey,
) -> Result<Ranking<F>, MetricsError> {
    let ids = corpus.translation_ids();
    if ids.len() < 2 {
        return Err(MetricsError::TooFewTranslations(ids.len()));
    }
    if k == 0 {
        return Err(MetricsError::ZeroK);
    }
    let pairs = PairKey::all_pairs(&ids)?;
    let ordered: Vec<&AnnotationSet<F>> = ids.iter().map(|id| set_for(sets, id)).collect::<Result<_, _>>()?;
    let pair_idx: Vec<(usize, usize)> = (0..ids.len())
        .flat_map(|i| (i + 1..ids.len()).map(move |j| (i, j)))
        .collect();

    let keys: Vec<(usize, usize)> = corpus.aligned_keys().collect();
    let mut records: Vec<SimilarityRecord<F>> = keys
        .par_iter()
        .map(|&(chapter, index)| {
            let verses = ordered
                .iter()
                .map(|s| {
                    s.get(chapter, index).ok_or_else(|| MetricsError::MissingAnnotation {
                        translation_id: s.translation_id().to_string(),
                        chapter,
                        index,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let scores = pair_idx
                .iter()
                .map(|&(i, j)| verse_cosine(ordered[i], verses[i], ordered[j], verses[j]))
                .collect::<Result<Vec<F>, _>>()?;
            let texts = corpus
                .translations()
                .iter()
                .map(|t| {
                    let text = t.verse(chapter, index).map(|v| v.text.clone()).unwrap_or_default();
                    (t.id().to_string(), text)
                })
                .collect();
            Ok(SimilarityRecord {
                chapter,
                index,
                texts,
                key_score: key.reduce(&scores),
                scores,
            })
        })
        .collect::<Result<_, MetricsError>>()?;

    records.sort_by(|a, b| {
        let by_score = a.key_score.partial_cmp(&b.key_score).unwrap_or(Ordering::Equal);
        let by_score = match direction {
            RankDirection::Most => by_score.reverse(),
            RankDirection::Least => by_score,
        };
        by_score.then((a.chapter, a.index).cmp(&(b.chapter, b.index)))
    });
    let clamped = k > records.len();
    records.truncate(k);
    Ok(Ranking {
        direction,
        key,
        requested_k: k,
        clamped,
        pairs,
        records,
    })
}
