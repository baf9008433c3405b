//! Deterministic report files: CSV tables, SVG charts with JSON sidecars, a
//! JSON summary of the whole run, and similarity-extreme verse listings.
//!
//! Numbers are rounded once, when written to a table. Sidecars and the
//! summary carry the unrounded values.

mod format;
pub mod svg;

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::corpus::{AlignmentPolicy, TruncationWarning};
use crate::labels::{SentimentLabel, LABEL_COUNT};
use crate::metrics::{chapter_average, MetricBundle, PairKey, PolarityWeights, RankDirection, RankKey, Ranking};
use crate::ngrams::NgramTable;
use crate::scalar::Scalar;

pub use format::{fmt3, round_half_up};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{table} table: no value for pair {pair} chapter {chapter}")]
    MissingValue {
        table: &'static str,
        pair: String,
        chapter: usize,
    },
    #[error("no data to chart")]
    NoData,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), ReportError> {
    fs::write(path, contents).map_err(io_err(path))
}

fn csv_error(path: &Path, e: csv::Error) -> ReportError {
    ReportError::Io {
        path: path.to_path_buf(),
        source: io::Error::other(e),
    }
}

fn write_csv(path: &Path, rows: &[Vec<String>]) -> Result<(), ReportError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        w.write_record(row).map_err(|e| csv_error(path, e))?;
    }
    let bytes = w.into_inner().map_err(|e| ReportError::Io {
        path: path.to_path_buf(),
        source: e.into_error(),
    })?;
    write_file(path, &bytes)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ReportError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| ReportError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    })?;
    bytes.push(b'\n');
    write_file(path, &bytes)
}

/// Replaces characters that are unsafe in file names.
pub fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Run conventions stamped into every summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMetadata {
    pub tool: String,
    pub tool_version: String,
    pub threshold: f64,
    pub threshold_rule: String,
    pub alignment_policy: AlignmentPolicy,
    pub std_convention: String,
    pub jaccard_empty_convention: String,
    pub chapter_aggregate: String,
    pub ranking_key: RankKey,
    pub rounding: String,
    pub embeddings_normalized: bool,
    pub polarity_weights: PolarityWeights,
    pub stopwords: String,
    pub topk_ngrams: usize,
    pub topk_verses: usize,
}

impl ReportMetadata {
    pub fn new(threshold: f64, alignment_policy: AlignmentPolicy, ranking_key: RankKey) -> Self {
        ReportMetadata {
            tool: env!("CARGO_PKG_NAME").to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            threshold,
            threshold_rule: "label assigned when probability >= threshold".into(),
            alignment_policy,
            std_convention: "population (divide by n)".into(),
            jaccard_empty_convention: "jaccard(empty, empty) = 1.0".into(),
            chapter_aggregate: "unweighted mean over aligned verses; averages are unweighted means of chapter values"
                .into(),
            ranking_key,
            rounding: "tables: 3 decimals, half away from zero".into(),
            embeddings_normalized: true,
            polarity_weights: PolarityWeights::default(),
            stopwords: "bundled english list".into(),
            topk_ngrams: 10,
            topk_verses: 3,
        }
    }
}

/// N-gram tables of one translation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslationNgrams {
    pub translation_id: String,
    pub tables: Vec<NgramTable>,
}

/// Everything a run writes.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle<F> {
    pub metadata: ReportMetadata,
    pub effective_counts: Vec<usize>,
    pub warnings: Vec<TruncationWarning>,
    pub metrics: MetricBundle<F>,
    pub ngrams: Vec<TranslationNgrams>,
    pub rankings: Vec<Ranking<F>>,
}

fn pair_cell<F: Scalar>(
    values: &BTreeMap<(PairKey, usize), F>,
    table: &'static str,
    pair: &PairKey,
    chapter: usize,
) -> Result<f64, ReportError> {
    values
        .get(&(pair.clone(), chapter))
        .map(|&v| v.into())
        .ok_or_else(|| ReportError::MissingValue {
            table,
            pair: pair.to_string(),
            chapter,
        })
}

fn header_row<F>(metrics: &MetricBundle<F>) -> Vec<String> {
    std::iter::once("Chapter".to_string())
        .chain(metrics.pairs.iter().map(PairKey::to_string))
        .collect()
}

/// Rows of the per-chapter Jaccard table, header first, Average last.
pub fn jaccard_table_rows<F: Scalar>(metrics: &MetricBundle<F>) -> Result<Vec<Vec<String>>, ReportError> {
    let mut rows = vec![header_row(metrics)];
    for chapter in 1..=metrics.chapter_count {
        let mut row = vec![format!("Chapter {chapter}")];
        for pair in &metrics.pairs {
            row.push(fmt3(pair_cell(&metrics.jaccard, "jaccard", pair, chapter)?));
        }
        rows.push(row);
    }
    let mut avg = vec!["Average".to_string()];
    for pair in &metrics.pairs {
        let v = chapter_average(&metrics.jaccard, pair, metrics.chapter_count).ok_or_else(|| {
            ReportError::MissingValue {
                table: "jaccard",
                pair: pair.to_string(),
                chapter: 0,
            }
        })?;
        avg.push(fmt3(v.into()));
    }
    rows.push(avg);
    Ok(rows)
}

pub fn emit_jaccard_table<F: Scalar>(metrics: &MetricBundle<F>, path: &Path) -> Result<(), ReportError> {
    write_csv(path, &jaccard_table_rows(metrics)?)
}

/// Rows of the cosine table: `mean(std)` cells, and an Average row holding
/// the mean of the chapter means.
pub fn cosine_table_rows<F: Scalar>(metrics: &MetricBundle<F>) -> Result<Vec<Vec<String>>, ReportError> {
    let mut rows = vec![header_row(metrics)];
    for chapter in 1..=metrics.chapter_count {
        let mut row = vec![format!("Chapter {chapter}")];
        for pair in &metrics.pairs {
            let m = pair_cell(&metrics.cosine_mean, "cosine", pair, chapter)?;
            let s = pair_cell(&metrics.cosine_std, "cosine", pair, chapter)?;
            row.push(format!("{}({})", fmt3(m), fmt3(s)));
        }
        rows.push(row);
    }
    let mut avg = vec!["Average".to_string()];
    for pair in &metrics.pairs {
        let v = chapter_average(&metrics.cosine_mean, pair, metrics.chapter_count).ok_or_else(|| {
            ReportError::MissingValue {
                table: "cosine",
                pair: pair.to_string(),
                chapter: 0,
            }
        })?;
        avg.push(fmt3(v.into()));
    }
    rows.push(avg);
    Ok(rows)
}

pub fn emit_cosine_table<F: Scalar>(metrics: &MetricBundle<F>, path: &Path) -> Result<(), ReportError> {
    write_csv(path, &cosine_table_rows(metrics)?)
}

/// Exact numbers behind a bar or line chart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesSidecar {
    pub chart: String,
    pub title: String,
    pub x: Vec<String>,
    pub series: Vec<NamedSeries>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedSeries {
    pub name: String,
    /// Whole numbers (label counts) serialize as JSON integers.
    #[serde(serialize_with = "whole_as_integer")]
    pub values: Vec<Option<f64>>,
}

fn whole_as_integer<S: serde::Serializer>(values: &[Option<f64>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(values.len()))?;
    for v in values {
        match v {
            Some(x) if x.fract() == 0.0 && x.abs() < 9.0e15 => seq.serialize_element(&(*x as i64))?,
            other => seq.serialize_element(other)?,
        }
    }
    seq.end()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapSidecar {
    pub chart: String,
    pub title: String,
    pub translation_id: String,
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<u64>>,
}

fn label_names() -> Vec<String> {
    SentimentLabel::ALL.iter().map(|l| l.name().to_string()).collect()
}

fn chapter_names(n: usize) -> Vec<String> {
    (1..=n).map(|c| format!("Chapter {c}")).collect()
}

fn emit_series_chart(
    out_dir: &Path,
    stem: &str,
    sidecar: &SeriesSidecar,
    bars: bool,
) -> Result<Vec<PathBuf>, ReportError> {
    let svg = if bars {
        let series: Vec<(String, Vec<f64>)> = sidecar
            .series
            .iter()
            .map(|s| (s.name.clone(), s.values.iter().map(|v| v.unwrap_or(0.0)).collect()))
            .collect();
        svg::bar_chart(&sidecar.title, &sidecar.x, &series)
    } else {
        let series: Vec<(String, Vec<Option<f64>>)> = sidecar
            .series
            .iter()
            .map(|s| (s.name.clone(), s.values.clone()))
            .collect();
        svg::line_chart(&sidecar.title, &sidecar.x, &series)
    };
    let svg_path = out_dir.join(format!("{stem}.svg"));
    let json_path = out_dir.join(format!("{stem}.json"));
    write_file(&svg_path, svg.as_bytes())?;
    write_json(&json_path, sidecar)?;
    Ok(vec![svg_path, json_path])
}

/// Writes label-count bar charts, polarity line charts and co-occurrence
/// heatmaps, each with a JSON sidecar holding the plotted numbers.
pub fn emit_sentiment_charts<F: Scalar>(
    metrics: &MetricBundle<F>,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, ReportError> {
    if metrics.translation_ids.is_empty() || metrics.chapter_count == 0 {
        return Err(ReportError::NoData);
    }
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let ids = &metrics.translation_ids;
    let mut written = Vec::new();

    let cumulative = SeriesSidecar {
        chart: "grouped_bar".into(),
        title: "Cumulative sentiment counts across all chapters".into(),
        x: label_names(),
        series: ids
            .iter()
            .map(|id| NamedSeries {
                name: id.clone(),
                values: metrics
                    .cumulative_counts
                    .get(id)
                    .map(|c| c.0.iter().map(|&n| Some(n as f64)).collect())
                    .unwrap_or_else(|| vec![Some(0.0); LABEL_COUNT]),
            })
            .collect(),
    };
    written.extend(emit_series_chart(out_dir, "cumulative_counts", &cumulative, true)?);

    for id in ids {
        let by_chapter = SeriesSidecar {
            chart: "grouped_bar".into(),
            title: format!("Chapter-wise sentiment counts: {id}"),
            x: chapter_names(metrics.chapter_count),
            series: SentimentLabel::ALL
                .iter()
                .map(|l| NamedSeries {
                    name: l.name().to_string(),
                    values: (1..=metrics.chapter_count)
                        .map(|c| Some(metrics.chapter_counts.get(&(id.clone(), c)).map_or(0, |k| k.get(*l)) as f64))
                        .collect(),
                })
                .collect(),
        };
        written.extend(emit_series_chart(
            out_dir,
            &format!("chapter_counts_{}", file_stem(id)),
            &by_chapter,
            true,
        )?);
    }

    let polarity = |title: &str, get: &dyn Fn(&String, usize) -> Option<f64>| SeriesSidecar {
        chart: "line".into(),
        title: title.to_string(),
        x: chapter_names(metrics.chapter_count),
        series: ids
            .iter()
            .map(|id| NamedSeries {
                name: id.clone(),
                values: (1..=metrics.chapter_count).map(|c| get(id, c)).collect(),
            })
            .collect(),
    };
    let weighted = polarity("Mean weighted polarity per chapter", &|id, c| {
        metrics.polarity_mean.get(&(id.clone(), c)).map(|&v| v.into())
    });
    written.extend(emit_series_chart(out_dir, "polarity_weighted", &weighted, false)?);
    let external = polarity("Mean external polarity per chapter", &|id, c| {
        metrics
            .external_polarity_mean
            .get(&(id.clone(), c))
            .copied()
            .flatten()
            .map(Into::into)
    });
    written.extend(emit_series_chart(out_dir, "polarity_external", &external, false)?);

    let names = label_names();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    for id in ids {
        let matrix: Vec<Vec<u64>> = metrics
            .cooccurrence
            .get(id)
            .map(|m| m.0.iter().map(|row| row.to_vec()).collect())
            .unwrap_or_else(|| vec![vec![0; LABEL_COUNT]; LABEL_COUNT]);
        let sidecar = HeatmapSidecar {
            chart: "heatmap".into(),
            title: format!("Sentiment co-occurrence: {id}"),
            translation_id: id.clone(),
            labels: names.clone(),
            matrix,
        };
        let stem = format!("heatmap_{}", file_stem(id));
        let svg_path = out_dir.join(format!("{stem}.svg"));
        let json_path = out_dir.join(format!("{stem}.json"));
        write_file(
            &svg_path,
            svg::heatmap(&sidecar.title, &name_refs, &sidecar.matrix).as_bytes(),
        )?;
        write_json(&json_path, &sidecar)?;
        written.extend([svg_path, json_path]);
    }
    Ok(written)
}

#[derive(Debug, Serialize)]
struct ExtremesDoc {
    rankings: Vec<RankingView>,
}

#[derive(Debug, Serialize)]
struct RankingView {
    direction: RankDirection,
    key: RankKey,
    requested_k: usize,
    returned: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
    pairs: Vec<String>,
    records: Vec<RecordView>,
}

#[derive(Debug, Serialize)]
struct RecordView {
    chapter: usize,
    verse: usize,
    texts: Vec<TextView>,
    scores: Vec<ScoreView>,
    key_score: String,
}

#[derive(Debug, Serialize)]
struct TextView {
    translation_id: String,
    text: String,
}

#[derive(Debug, Serialize)]
struct ScoreView {
    pair: String,
    score: String,
}

fn ranking_view<F: Scalar>(r: &Ranking<F>) -> RankingView {
    RankingView {
        direction: r.direction,
        key: r.key,
        requested_k: r.requested_k,
        returned: r.records.len(),
        note: r.clamped.then(|| {
            format!(
                "requested {} verses but only {} aligned verses exist; all are listed",
                r.requested_k,
                r.records.len()
            )
        }),
        pairs: r.pairs.iter().map(PairKey::to_string).collect(),
        records: r
            .records
            .iter()
            .map(|rec| RecordView {
                chapter: rec.chapter,
                verse: rec.index,
                texts: rec
                    .texts
                    .iter()
                    .map(|(id, text)| TextView {
                        translation_id: id.clone(),
                        text: text.clone(),
                    })
                    .collect(),
                scores: r
                    .pairs
                    .iter()
                    .zip(&rec.scores)
                    .map(|(p, &s)| ScoreView {
                        pair: p.to_string(),
                        score: fmt3(s.into()),
                    })
                    .collect(),
                key_score: fmt3(rec.key_score.into()),
            })
            .collect(),
    }
}

/// Structured listing of the most/least similar verses, scores to 3 decimals.
pub fn emit_similarity_extremes<F: Scalar>(rankings: &[Ranking<F>], path: &Path) -> Result<(), ReportError> {
    let doc = ExtremesDoc {
        rankings: rankings.iter().map(ranking_view).collect(),
    };
    write_json(path, &doc)
}

/// One ranking as a table: chapter, verse, one text column per translation,
/// one score column per pair.
pub fn similarity_table_rows<F: Scalar>(ranking: &Ranking<F>) -> Vec<Vec<String>> {
    let mut header = vec!["Chapter".to_string(), "Verse".to_string()];
    if let Some(first) = ranking.records.first() {
        header.extend(first.texts.iter().map(|(id, _)| id.clone()));
    }
    header.extend(ranking.pairs.iter().map(PairKey::to_string));
    let mut rows = vec![header];
    for rec in &ranking.records {
        let mut row = vec![rec.chapter.to_string(), rec.index.to_string()];
        row.extend(rec.texts.iter().map(|(_, t)| t.clone()));
        row.extend(rec.scores.iter().map(|&s| fmt3(s.into())));
        rows.push(row);
    }
    rows
}

/// N-gram tables of one translation as CSV: condition, n, rank, ngram, count.
pub fn emit_ngram_table(ngrams: &TranslationNgrams, path: &Path) -> Result<(), ReportError> {
    let mut rows = vec![vec![
        "condition".to_string(),
        "n".to_string(),
        "rank".to_string(),
        "ngram".to_string(),
        "count".to_string(),
    ]];
    for table in &ngrams.tables {
        let condition = table.condition.map_or("all", SentimentLabel::name);
        for (rank, (gram, count)) in table.entries.iter().enumerate() {
            rows.push(vec![
                condition.to_string(),
                table.n.to_string(),
                (rank + 1).to_string(),
                gram.join(" "),
                count.to_string(),
            ]);
        }
    }
    write_csv(path, &rows)
}

#[derive(Debug, Serialize)]
struct SummaryDoc<'a> {
    metadata: &'a ReportMetadata,
    translations: &'a [String],
    chapters: usize,
    effective_verse_counts: &'a [usize],
    warnings: Vec<String>,
    jaccard: Vec<PairSeries>,
    cosine: Vec<PairSeries>,
    polarity: Vec<PolarityView<'a>>,
    label_counts: Vec<CountsView<'a>>,
    ngrams: &'a [TranslationNgrams],
    similarity_extremes: Vec<RankingView>,
}

#[derive(Debug, Serialize)]
struct PairSeries {
    pair: String,
    chapters: Vec<Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    std: Option<Vec<Option<f64>>>,
    average: Option<f64>,
}

#[derive(Debug, Serialize)]
struct PolarityView<'a> {
    translation_id: &'a str,
    weighted_mean: Vec<Option<f64>>,
    external_mean: Vec<Option<f64>>,
}

#[derive(Debug, Serialize)]
struct CountsView<'a> {
    translation_id: &'a str,
    cumulative: BTreeMap<&'static str, u64>,
    by_chapter: Vec<BTreeMap<&'static str, u64>>,
    cooccurrence: Vec<Vec<u64>>,
}

fn label_map(counts: Option<&crate::metrics::LabelCounts>) -> BTreeMap<&'static str, u64> {
    SentimentLabel::ALL
        .iter()
        .map(|l| (l.name(), counts.map_or(0, |c| c.get(*l))))
        .collect()
}

/// The full bundle as one JSON document.
pub fn summary_json<F: Scalar>(bundle: &ReportBundle<F>) -> Result<String, serde_json::Error> {
    let m = &bundle.metrics;
    let chapters = 1..=m.chapter_count;
    let series = |values: &BTreeMap<(PairKey, usize), F>, pair: &PairKey| -> Vec<Option<f64>> {
        chapters
            .clone()
            .map(|c| values.get(&(pair.clone(), c)).map(|&v| v.into()))
            .collect()
    };
    let doc = SummaryDoc {
        metadata: &bundle.metadata,
        translations: &m.translation_ids,
        chapters: m.chapter_count,
        effective_verse_counts: &bundle.effective_counts,
        warnings: bundle.warnings.iter().map(ToString::to_string).collect(),
        jaccard: m
            .pairs
            .iter()
            .map(|p| PairSeries {
                pair: p.to_string(),
                chapters: series(&m.jaccard, p),
                std: None,
                average: m.jaccard_avg.get(p).map(|&v| v.into()),
            })
            .collect(),
        cosine: m
            .pairs
            .iter()
            .map(|p| PairSeries {
                pair: p.to_string(),
                chapters: series(&m.cosine_mean, p),
                std: Some(series(&m.cosine_std, p)),
                average: m.cosine_avg.get(p).map(|&v| v.into()),
            })
            .collect(),
        polarity: m
            .translation_ids
            .iter()
            .map(|id| PolarityView {
                translation_id: id,
                weighted_mean: chapters
                    .clone()
                    .map(|c| m.polarity_mean.get(&(id.clone(), c)).map(|&v| v.into()))
                    .collect(),
                external_mean: chapters
                    .clone()
                    .map(|c| {
                        m.external_polarity_mean
                            .get(&(id.clone(), c))
                            .copied()
                            .flatten()
                            .map(Into::into)
                    })
                    .collect(),
            })
            .collect(),
        label_counts: m
            .translation_ids
            .iter()
            .map(|id| CountsView {
                translation_id: id,
                cumulative: label_map(m.cumulative_counts.get(id)),
                by_chapter: chapters
                    .clone()
                    .map(|c| label_map(m.chapter_counts.get(&(id.clone(), c))))
                    .collect(),
                cooccurrence: m
                    .cooccurrence
                    .get(id)
                    .map(|x| x.0.iter().map(|r| r.to_vec()).collect())
                    .unwrap_or_default(),
            })
            .collect(),
        ngrams: &bundle.ngrams,
        similarity_extremes: bundle.rankings.iter().map(ranking_view).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

/// Writes every report file into `out_dir` and returns their paths.
pub fn emit_all<F: Scalar>(bundle: &ReportBundle<F>, out_dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut written = Vec::new();

    let p = out_dir.join("jaccard.csv");
    emit_jaccard_table(&bundle.metrics, &p)?;
    written.push(p);
    let p = out_dir.join("cosine.csv");
    emit_cosine_table(&bundle.metrics, &p)?;
    written.push(p);

    written.extend(emit_sentiment_charts(&bundle.metrics, &out_dir.join("charts"))?);

    let p = out_dir.join("similarity_extremes.json");
    emit_similarity_extremes(&bundle.rankings, &p)?;
    written.push(p);
    for r in &bundle.rankings {
        let name = match r.direction {
            RankDirection::Most => "most_similar_verses.csv",
            RankDirection::Least => "least_similar_verses.csv",
        };
        let p = out_dir.join(name);
        write_csv(&p, &similarity_table_rows(r))?;
        written.push(p);
    }

    for ng in &bundle.ngrams {
        let p = out_dir.join(format!("ngrams_{}.csv", file_stem(&ng.translation_id)));
        emit_ngram_table(ng, &p)?;
        written.push(p);
    }

    let p = out_dir.join("summary.json");
    let summary = summary_json(bundle).map_err(|e| ReportError::Io {
        path: p.clone(),
        source: e.into(),
    })?;
    write_file(&p, summary.as_bytes())?;
    written.push(p);

    let p = out_dir.join("warnings.txt");
    let text: String = bundle.warnings.iter().map(|w| format!("{w}\n")).collect();
    write_file(&p, text.as_bytes())?;
    written.push(p);
    Ok(written)
}
