use super::MetricsError;
use crate::annotate::{AnnotationSet, VerseAnnotation};
use crate::corpus::AlignedCorpus;
use crate::labels::LabelSet;
use crate::scalar::{self, Scalar};

/// |a ∩ b| / |a ∪ b|, with two empty sets counting as full agreement.
pub fn jaccard_verse<F: Scalar>(a: LabelSet, b: LabelSet) -> F {
    let union = a.union(b).len();
    if union == 0 {
        return F::one();
    }
    F::from_count(a.intersection(b).len()) / F::from_count(union)
}

/// Cosine similarity by the full formula, clamped to [-1, 1].
pub fn cosine<F: Scalar>(u: &[F], v: &[F]) -> Result<F, MetricsError> {
    if u.len() != v.len() {
        return Err(MetricsError::DimensionMismatch(u.len(), v.len()));
    }
    let mut dot = F::zero();
    let mut uu = F::zero();
    let mut vv = F::zero();
    for (&x, &y) in u.iter().zip(v) {
        dot = dot + x * y;
        uu = uu + x * x;
        vv = vv + y * y;
    }
    if uu == F::zero() || vv == F::zero() {
        return Err(MetricsError::ZeroVector);
    }
    Ok(clamp_unit(dot / (uu.sqrt() * vv.sqrt())))
}

fn dot<F: Scalar>(u: &[F], v: &[F]) -> F {
    u.iter().zip(v).fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

fn clamp_unit<F: Scalar>(x: F) -> F {
    x.max(-F::one()).min(F::one())
}

/// Cosine between two verse embeddings; a plain dot product when both sets
/// hold unit vectors.
pub fn verse_cosine<F: Scalar>(
    a: &AnnotationSet<F>,
    va: &VerseAnnotation<F>,
    b: &AnnotationSet<F>,
    vb: &VerseAnnotation<F>,
) -> Result<F, MetricsError> {
    if a.dimension() != b.dimension() {
        return Err(MetricsError::DimensionMismatch(a.dimension(), b.dimension()));
    }
    if a.is_normalized() && b.is_normalized() {
        Ok(clamp_unit(dot(&va.embedding, &vb.embedding)))
    } else {
        cosine(&va.embedding, &vb.embedding)
    }
}

fn check_chapter(corpus: &AlignedCorpus, chapter: usize) -> Result<usize, MetricsError> {
    corpus.effective_count(chapter).ok_or(MetricsError::ChapterOutOfRange {
        chapter,
        chapters: corpus.chapter_count(),
    })
}

fn annotation<F: Scalar>(
    set: &AnnotationSet<F>,
    chapter: usize,
    index: usize,
) -> Result<&VerseAnnotation<F>, MetricsError> {
    set.get(chapter, index).ok_or_else(|| MetricsError::MissingAnnotation {
        translation_id: set.translation_id().to_string(),
        chapter,
        index,
    })
}

/// Per-verse Jaccard scores over the aligned verses of one chapter.
pub fn jaccard_chapter_values<F: Scalar>(
    corpus: &AlignedCorpus,
    a: &AnnotationSet<F>,
    b: &AnnotationSet<F>,
    chapter: usize,
) -> Result<Vec<F>, MetricsError> {
    let n = check_chapter(corpus, chapter)?;
    (1..=n)
        .map(|i| {
            let la = annotation(a, chapter, i)?.labels;
            let lb = annotation(b, chapter, i)?.labels;
            Ok(jaccard_verse(la, lb))
        })
        .collect()
}

/// Mean per-verse Jaccard agreement over one chapter.
pub fn jaccard_chapter<F: Scalar>(
    corpus: &AlignedCorpus,
    a: &AnnotationSet<F>,
    b: &AnnotationSet<F>,
    chapter: usize,
) -> Result<F, MetricsError> {
    let values = jaccard_chapter_values(corpus, a, b, chapter)?;
    Ok(scalar::mean(&values).unwrap_or_else(F::one))
}

pub fn cosine_chapter_values<F: Scalar>(
    corpus: &AlignedCorpus,
    a: &AnnotationSet<F>,
    b: &AnnotationSet<F>,
    chapter: usize,
) -> Result<Vec<F>, MetricsError> {
    let n = check_chapter(corpus, chapter)?;
    (1..=n)
        .map(|i| verse_cosine(a, annotation(a, chapter, i)?, b, annotation(b, chapter, i)?))
        .collect()
}

/// Mean and population standard deviation of per-verse cosine in a chapter.
pub fn cosine_chapter_stats<F: Scalar>(
    corpus: &AlignedCorpus,
    a: &AnnotationSet<F>,
    b: &AnnotationSet<F>,
    chapter: usize,
) -> Result<(F, F), MetricsError> {
    let values = cosine_chapter_values(corpus, a, b, chapter)?;
    Ok(scalar::mean_and_population_std(&values).unwrap_or((F::one(), F::zero())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::VerseInput;
    use crate::corpus::{align, AlignmentPolicy, TranslationText};
    use crate::labels::SentimentLabel::*;
    use proptest::prelude::*;

    #[test]
    fn jaccard_examples() {
        let sj: LabelSet = [Sad, Joking].into_iter().collect();
        let ja: LabelSet = [Joking, Annoyed].into_iter().collect();
        assert_eq!(jaccard_verse::<f64>(sj, sj), 1.0);
        assert_eq!(jaccard_verse::<f64>(sj, ja), 1.0 / 3.0);
        assert_eq!(jaccard_verse::<f64>(LabelSet::empty(), LabelSet::empty()), 1.0);
        assert_eq!(jaccard_verse::<f64>(LabelSet::empty(), sj), 0.0);
    }

    #[test]
    fn cosine_examples() {
        assert!((cosine(&[0.3f64, -2.0, 5.0], &[0.3, -2.0, 5.0]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cosine(&[1.0f64, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!((cosine(&[1.0f64, 1.0], &[1.0, 0.0]).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(
            cosine(&[1.0f64, 0.0], &[1.0]),
            Err(MetricsError::DimensionMismatch(2, 1))
        );
        assert_eq!(cosine(&[0.0f64, 0.0], &[1.0, 0.0]), Err(MetricsError::ZeroVector));
        assert!((cosine(&[1.0f32, 1.0], &[1.0, 0.0]).unwrap() - std::f32::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    }

    fn fixture(
        labels: &[(LabelSet, LabelSet)],
        embeddings: &[(Vec<f64>, Vec<f64>)],
    ) -> (AlignedCorpus, AnnotationSet<f64>, AnnotationSet<f64>) {
        let n = labels.len();
        let verses: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let corpus = align(
            vec![
                TranslationText::from_chapters("a", std::slice::from_ref(&verses)).unwrap(),
                TranslationText::from_chapters("b", &[verses]).unwrap(),
            ],
            AlignmentPolicy::Strict,
        )
        .unwrap();
        let probs = |l: LabelSet| -> Vec<f64> {
            crate::labels::SentimentLabel::ALL
                .iter()
                .map(|x| if l.contains(*x) { 1.0 } else { 0.0 })
                .collect()
        };
        let dim = embeddings[0].0.len();
        let mut a = AnnotationSet::new("a", 0.5, dim).unwrap();
        let mut b = AnnotationSet::new("b", 0.5, dim).unwrap();
        for (i, ((la, lb), (ea, eb))) in labels.iter().zip(embeddings).enumerate() {
            a.insert(VerseInput {
                chapter: 1,
                index: i + 1,
                probs: probs(*la),
                embedding: ea.clone(),
                polarity: None,
            })
            .unwrap();
            b.insert(VerseInput {
                chapter: 1,
                index: i + 1,
                probs: probs(*lb),
                embedding: eb.clone(),
                polarity: None,
            })
            .unwrap();
        }
        (corpus, a, b)
    }

    #[test]
    fn chapter_mean_of_two_verses() {
        let s: LabelSet = [Sad].into_iter().collect();
        let o: LabelSet = [Optimistic].into_iter().collect();
        let e = vec![(vec![1.0, 0.0], vec![1.0, 0.0]); 2];
        let (c, a, b) = fixture(&[(s, s), (s, o)], &e);
        assert_eq!(jaccard_chapter(&c, &a, &b, 1).unwrap(), 0.5);
        assert_eq!(cosine_chapter_stats(&c, &a, &b, 1).unwrap(), (1.0, 0.0));
        assert!(matches!(
            jaccard_chapter(&c, &a, &b, 2),
            Err(MetricsError::ChapterOutOfRange {
                chapter: 2,
                chapters: 1
            })
        ));
        assert!(matches!(
            cosine_chapter_stats(&c, &a, &b, 0),
            Err(MetricsError::ChapterOutOfRange { .. })
        ));
    }

    #[test]
    fn chapter_cosine_stats_of_two_values() {
        // cos = 0.2 and 0.8 between unit vectors at those angles
        let unit = |c: f64| vec![c, (1.0 - c * c).sqrt()];
        let e = vec![(vec![1.0, 0.0], unit(0.2)), (vec![1.0, 0.0], unit(0.8))];
        let l = LabelSet::empty();
        let (c, a, b) = fixture(&[(l, l), (l, l)], &e);
        let (m, s) = cosine_chapter_stats(&c, &a, &b, 1).unwrap();
        assert!((m - 0.5).abs() < 1e-12);
        assert!((s - 0.3).abs() < 1e-12);
    }

    #[test]
    fn normalized_and_raw_routes_agree() {
        let e = vec![(vec![3.0, 4.0, 1.0], vec![-1.0, 2.0, 0.5])];
        let l = LabelSet::empty();
        let (_, a, b) = fixture(&[(l, l)], &e);
        let va = a.get(1, 1).unwrap();
        let vb = b.get(1, 1).unwrap();
        let fast = verse_cosine(&a, va, &b, vb).unwrap();
        let direct = cosine(&[3.0, 4.0, 1.0], &[-1.0, 2.0, 0.5]).unwrap();
        assert!((fast - direct).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn jaccard_symmetric_and_one_iff_equal(x in 0u16..512, y in 0u16..512) {
            let (a, b) = (LabelSet::from_bits(x), LabelSet::from_bits(y));
            let ab: f64 = jaccard_verse(a, b);
            prop_assert_eq!(ab, jaccard_verse::<f64>(b, a));
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert_eq!(ab == 1.0, a == b);
        }

        #[test]
        fn cosine_symmetric_and_scale_invariant(
            u in proptest::collection::vec(-10.0f64..10.0, 5),
            v in proptest::collection::vec(-10.0f64..10.0, 5),
            s in 0.01f64..100.0,
        ) {
            prop_assume!(u.iter().any(|x| x.abs() > 1e-3) && v.iter().any(|x| x.abs() > 1e-3));
            let c = cosine(&u, &v).unwrap();
            prop_assert!((c - cosine(&v, &u).unwrap()).abs() < 1e-12);
            let scaled: Vec<f64> = u.iter().map(|x| x * s).collect();
            prop_assert!((c - cosine(&scaled, &v).unwrap()).abs() < 1e-9);
            prop_assert!((-1.0..=1.0).contains(&c));
        }
    }
}
