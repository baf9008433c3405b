//! Run configuration and end-to-end orchestration.
//!
//! Exit codes: 0 success, 2 input validation failure, 3 configuration error,
//! 4 I/O error.

use std::collections::HashSet;
use std::ffi::OsString;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Deserialize;

use crate::annotate::{self, AnnotateError, AnnotationSet};
use crate::corpus::{self, AlignedCorpus, AlignmentPolicy, CorpusError, LoadOptions, TranslationText};
use crate::labels::SentimentLabel;
use crate::metrics::{self, MetricsError, PolarityWeights, RankDirection, RankKey, WeightsError};
use crate::ngrams::{self, NgramError, Stopwords};
use crate::report::{self, ReportBundle, ReportError, ReportMetadata, TranslationNgrams};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_CONFIG: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{module}: {message}")]
    Validation { module: &'static str, message: String },
    #[error("{module}: {message}")]
    Io { module: &'static str, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Validation { .. } => EXIT_VALIDATION,
            CliError::Io { .. } => EXIT_IO,
        }
    }

    fn validation(module: &'static str, message: impl Into<String>) -> Self {
        CliError::Validation {
            module,
            message: message.into(),
        }
    }

    fn io(module: &'static str, message: impl Into<String>) -> Self {
        CliError::Io {
            module,
            message: message.into(),
        }
    }
}

fn from_corpus(id: &str, e: CorpusError) -> CliError {
    match e {
        CorpusError::Io { .. } => CliError::io("corpus", format!("{id}: {e}")),
        _ => CliError::validation("corpus", format!("{id}: {e}")),
    }
}

fn from_annotate(id: &str, path: &Path, e: AnnotateError) -> CliError {
    let message = format!("{id} ({}): {e}", path.display());
    match &e {
        AnnotateError::Io { source, .. } if source.kind() != io::ErrorKind::InvalidData => {
            CliError::io("annotate", message)
        }
        _ => CliError::validation("annotate", message),
    }
}

fn from_metrics(e: MetricsError) -> CliError {
    CliError::validation("metrics", e.to_string())
}

fn from_ngrams(e: NgramError) -> CliError {
    match e {
        NgramError::Io { .. } => CliError::io("ngrams", e.to_string()),
        _ => CliError::Config(e.to_string()),
    }
}

fn from_report(e: ReportError) -> CliError {
    match e {
        ReportError::Io { .. } => CliError::io("report", e.to_string()),
        _ => CliError::validation("report", e.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslationSpec {
    pub id: String,
    /// Directory of chapterNN.txt files or a single delimited file.
    pub corpus: PathBuf,
    pub annotations: PathBuf,
}

fn default_threshold() -> f64 {
    annotate::DEFAULT_THRESHOLD
}

fn default_topk_ngrams() -> usize {
    10
}

fn default_topk_verses() -> usize {
    3
}

fn default_out() -> PathBuf {
    PathBuf::from("report")
}

fn default_parallel() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub translations: Vec<TranslationSpec>,
    #[serde(default)]
    pub alignment: AlignmentPolicy,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// TOML file of `label = weight` overrides.
    #[serde(default)]
    pub weights: Option<PathBuf>,
    /// Stopword file; the bundled English list when absent.
    #[serde(default)]
    pub stopwords: Option<PathBuf>,
    #[serde(default = "default_topk_ngrams")]
    pub topk_ngrams: usize,
    #[serde(default = "default_topk_verses")]
    pub topk_verses: usize,
    #[serde(default)]
    pub ranking_key: RankKey,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_parallel")]
    pub parallel: usize,
    #[serde(default)]
    pub chapter_delimiter: Option<String>,
}

impl RunConfig {
    /// A config with defaults for everything but the translations.
    pub fn new(translations: Vec<TranslationSpec>) -> Self {
        RunConfig {
            translations,
            alignment: AlignmentPolicy::default(),
            threshold: default_threshold(),
            weights: None,
            stopwords: None,
            topk_ngrams: default_topk_ngrams(),
            topk_verses: default_topk_verses(),
            ranking_key: RankKey::default(),
            out: default_out(),
            parallel: default_parallel(),
            chapter_delimiter: None,
        }
    }

    /// Parses a TOML config; relative paths resolve against `base`.
    pub fn from_toml_str(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for t in &mut cfg.translations {
            resolve(&mut t.corpus);
            resolve(&mut t.annotations);
        }
        cfg.weights.as_mut().map(resolve);
        cfg.stopwords.as_mut().map(resolve);
        resolve(&mut cfg.out);
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, base)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.translations.len() < 2 {
            return Err(CliError::Config(format!(
                "at least 2 translations required, got {}",
                self.translations.len()
            )));
        }
        let mut seen = HashSet::new();
        for t in &self.translations {
            if t.id.trim().is_empty() {
                return Err(CliError::Config("translation id must not be empty".into()));
            }
            if !seen.insert(t.id.as_str()) {
                return Err(CliError::Config(format!("duplicate translation id {:?}", t.id)));
            }
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(CliError::Config(format!(
                "threshold out of range (0,1): {}",
                self.threshold
            )));
        }
        if self.topk_ngrams == 0 || self.topk_verses == 0 {
            return Err(CliError::Config("top-k values must be at least 1".into()));
        }
        if self.parallel == 0 {
            return Err(CliError::Config("parallel must be at least 1".into()));
        }
        Ok(())
    }

    fn load_options(&self) -> LoadOptions {
        match &self.chapter_delimiter {
            Some(d) => LoadOptions {
                chapter_delimiter: d.clone(),
            },
            None => LoadOptions::default(),
        }
    }
}

/// Corpus and annotations after loading and validation.
#[derive(Debug, Clone)]
pub struct ValidatedInputs {
    pub corpus: AlignedCorpus,
    pub annotations: Vec<AnnotationSet<f64>>,
}

/// Loads every input and checks it for consistency, without computing metrics.
pub fn load_and_validate(config: &RunConfig) -> Result<ValidatedInputs, CliError> {
    config.validate()?;
    let options = config.load_options();
    let texts: Vec<TranslationText> = config
        .translations
        .iter()
        .map(|t| corpus::load_translation_with(&t.corpus, &t.id, &options).map_err(|e| from_corpus(&t.id, e)))
        .collect::<Result<_, _>>()?;
    let corpus = corpus::align(texts, config.alignment).map_err(|e| CliError::validation("corpus", e.to_string()))?;

    let mut annotations = Vec::with_capacity(config.translations.len());
    let mut findings = Vec::new();
    for (spec, text) in config.translations.iter().zip(corpus.translations()) {
        let set: AnnotationSet<f64> =
            annotate::read_annotations(&spec.annotations).map_err(|e| from_annotate(&spec.id, &spec.annotations, e))?;
        let set = set
            .with_threshold(config.threshold)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let report =
            annotate::validate_against_corpus(&set, text).map_err(|e| from_annotate(&spec.id, &spec.annotations, e))?;
        if !report.is_valid() {
            findings.push(format!("{} ({})", report, spec.annotations.display()));
        }
        annotations.push(set);
    }
    if !findings.is_empty() {
        return Err(CliError::validation("annotate", findings.join("; ")));
    }
    let first = &annotations[0];
    for set in &annotations[1..] {
        if set.dimension() != first.dimension() {
            return Err(CliError::validation(
                "annotate",
                format!(
                    "embedding dimension mismatch across translations: {} has {}, {} has {}",
                    first.translation_id(),
                    first.dimension(),
                    set.translation_id(),
                    set.dimension()
                ),
            ));
        }
    }
    Ok(ValidatedInputs { corpus, annotations })
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

/// Builds the report bundle from validated inputs, using the ambient rayon pool.
pub fn build_report(config: &RunConfig, inputs: &ValidatedInputs) -> Result<ReportBundle<f64>, CliError> {
    let weights = match &config.weights {
        Some(p) => PolarityWeights::load(p).map_err(|e| match e {
            WeightsError::Io { .. } => CliError::io("metrics", e.to_string()),
            _ => CliError::Config(e.to_string()),
        })?,
        None => PolarityWeights::default(),
    };
    let (stopwords, stopword_note) = match &config.stopwords {
        Some(p) => {
            let sw = Stopwords::load(p).map_err(from_ngrams)?;
            let name = p
                .file_name()
                .map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned());
            let note = format!("file {name} ({} entries)", sw.len());
            (sw, note)
        }
        None => {
            let sw = Stopwords::english();
            let note = format!("bundled english list v1 ({} entries)", sw.len());
            (sw, note)
        }
    };

    let corpus = &inputs.corpus;
    let sets = &inputs.annotations;
    let metrics = metrics::compute_bundle(corpus, sets, &weights).map_err(from_metrics)?;
    let rankings = [RankDirection::Most, RankDirection::Least]
        .into_iter()
        .map(|d| metrics::rank_similarity(corpus, sets, config.topk_verses, d, config.ranking_key))
        .collect::<Result<Vec<_>, _>>()
        .map_err(from_metrics)?;

    let mut ngram_tables = Vec::new();
    for (text, set) in corpus.translations().iter().zip(sets) {
        let sequences: Vec<_> = text.verses().map(|v| ngrams::tokenize(v, &stopwords)).collect();
        let mut tables = Vec::new();
        for n in [2, 3] {
            tables.push(ngrams::extract_topk(&sequences, n, config.topk_ngrams).map_err(from_ngrams)?);
        }
        for label in SentimentLabel::ALL {
            for n in [2, 3] {
                tables
                    .push(ngrams::sentiment_topk(&sequences, set, label, n, config.topk_ngrams).map_err(from_ngrams)?);
            }
        }
        ngram_tables.push(TranslationNgrams {
            translation_id: text.id().to_string(),
            tables,
        });
    }

    let mut metadata = ReportMetadata::new(config.threshold, config.alignment, config.ranking_key);
    metadata.polarity_weights = weights;
    metadata.stopwords = stopword_note;
    metadata.topk_ngrams = config.topk_ngrams;
    metadata.topk_verses = config.topk_verses;
    metadata.embeddings_normalized = sets.iter().all(AnnotationSet::is_normalized);

    Ok(ReportBundle {
        metadata,
        effective_counts: corpus.effective_counts().to_vec(),
        warnings: corpus.warnings().to_vec(),
        metrics,
        ngrams: ngram_tables,
        rankings,
    })
}

fn thread_pool(parallel: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallel)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {parallel} worker threads: {e}")))
}

/// Loads, validates, computes and writes the full report into `config.out`.
pub fn run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    config.validate()?;
    let pool = thread_pool(config.parallel)?;
    pool.install(|| {
        let inputs = load_and_validate(config)?;
        let bundle = build_report(config, &inputs)?;
        let files = report::emit_all(&bundle, &config.out).map_err(from_report)?;
        Ok(RunOutcome {
            files,
            warnings: bundle.warnings.iter().map(ToString::to_string).collect(),
        })
    })
}

/// Loading and validation only.
pub fn validate_only(config: &RunConfig) -> Result<ValidatedInputs, CliError> {
    let pool = thread_pool(config.parallel.max(1))?;
    pool.install(|| load_and_validate(config))
}

#[derive(Debug, Parser)]
#[command(
    name = "transeval",
    version,
    about = "Compare translations verse by verse: sentiment agreement, semantic similarity, polarity and n-grams"
)]
pub struct Args {
    /// Run configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Label decision threshold in (0,1).
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, value_parser = parse_alignment)]
    pub alignment: Option<AlignmentPolicy>,
    #[arg(long)]
    pub topk_ngrams: Option<usize>,
    #[arg(long)]
    pub topk_verses: Option<usize>,
    /// Stopword file, one token per line.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Polarity weight overrides (TOML `label = integer`).
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Ranking key for similarity extremes: mean, min or max.
    #[arg(long, value_parser = parse_rank_key)]
    pub ranking_key: Option<RankKey>,
    /// Worker threads.
    #[arg(long)]
    pub parallel: Option<usize>,
    /// Load and validate inputs without computing metrics.
    #[arg(long)]
    pub validate_only: bool,
}

fn parse_alignment(s: &str) -> Result<AlignmentPolicy, String> {
    s.parse()
}

fn parse_rank_key(s: &str) -> Result<RankKey, String> {
    s.parse()
}

impl Args {
    /// The config file with flag overrides applied.
    pub fn into_config(self) -> Result<(RunConfig, bool), CliError> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Some(v) = self.out {
            cfg.out = v;
        }
        if let Some(v) = self.threshold {
            cfg.threshold = v;
        }
        if let Some(v) = self.alignment {
            cfg.alignment = v;
        }
        if let Some(v) = self.topk_ngrams {
            cfg.topk_ngrams = v;
        }
        if let Some(v) = self.topk_verses {
            cfg.topk_verses = v;
        }
        if let Some(v) = self.stopwords {
            cfg.stopwords = Some(v);
        }
        if let Some(v) = self.weights {
            cfg.weights = Some(v);
        }
        if let Some(v) = self.ranking_key {
            cfg.ranking_key = v;
        }
        if let Some(v) = self.parallel {
            cfg.parallel = v;
        }
        Ok((cfg, self.validate_only))
    }
}

/// Parses arguments, runs, prints diagnostics to stderr and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = args.into_config().and_then(|(cfg, validate)| {
        if validate {
            cfg.validate()?;
            validate_only(&cfg).map(|inputs| {
                for w in inputs.corpus.warnings() {
                    eprintln!("warning: {w}");
                }
                eprintln!(
                    "inputs valid: {} translations, {} aligned verses",
                    inputs.corpus.translations().len(),
                    inputs.corpus.total_aligned()
                );
            })
        } else {
            run(&cfg).map(|outcome| {
                for w in &outcome.warnings {
                    eprintln!("warning: {w}");
                }
                eprintln!("wrote {} files to {}", outcome.files.len(), cfg.out.display());
            })
        }
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
