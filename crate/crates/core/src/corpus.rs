//! Loading, normalization and positional alignment of translation texts.
//!
//! A translation is either a directory of `chapterNN.txt` files or a single
//! file whose chapters are separated by delimiter lines (`### CHAPTER N` by
//! default). Every non-blank line is one verse.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub const DEFAULT_CHAPTER_DELIMITER: &str = "### CHAPTER";

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid UTF-8 at byte {offset}")]
    InvalidUtf8 { path: PathBuf, offset: usize },
    #[error("{path}: zero verses after normalization")]
    NoVerses { path: PathBuf },
    #[error("{path}: chapter {chapter} has zero verses")]
    EmptyChapter { path: PathBuf, chapter: usize },
    #[error("{path}: no chapterNN.txt files found")]
    NoChapterFiles { path: PathBuf },
    #[error("{path}: non-contiguous chapter numbering, expected chapter {expected}, found {found}")]
    NonContiguousChapters {
        path: PathBuf,
        expected: usize,
        found: usize,
    },
    #[error("{path}:{line}: text before the first chapter delimiter")]
    TextBeforeFirstChapter { path: PathBuf, line: usize },
    #[error("{path}:{line}: malformed chapter delimiter {text:?}")]
    MalformedDelimiter { path: PathBuf, line: usize, text: String },
    #[error("alignment needs at least 2 translations, got {0}")]
    TooFewTranslations(usize),
    #[error("duplicate translation id {0:?}")]
    DuplicateTranslationId(String),
    #[error("chapter-count mismatch: {first} has {first_count} chapters, {other} has {other_count}")]
    ChapterCountMismatch {
        first: String,
        first_count: usize,
        other: String,
        other_count: usize,
    },
    #[error("verse-count mismatch chapter {chapter}: {}", render_counts(.counts))]
    VerseCountMismatch {
        chapter: usize,
        counts: Vec<(String, usize)>,
    },
}

fn render_counts(counts: &[(String, usize)]) -> String {
    counts
        .iter()
        .map(|(id, n)| format!("{id}={n}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// One normalized line of a translation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verse {
    pub translation_id: String,
    /// 1-based.
    pub chapter: usize,
    /// 1-based within the chapter.
    pub index: usize,
    pub text: String,
}

impl Verse {
    pub fn key(&self) -> (usize, usize) {
        (self.chapter, self.index)
    }
}

/// A translation organized as contiguous chapters of contiguous verses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationText {
    id: String,
    chapters: Vec<Vec<Verse>>,
}

impl TranslationText {
    /// Builds a translation from already-normalized verse strings.
    ///
    /// Each string is re-normalized; a chapter that ends up empty is an error.
    pub fn from_chapters<S: AsRef<str>>(id: impl Into<String>, chapters: &[Vec<S>]) -> Result<Self, CorpusError> {
        let id = id.into();
        let origin = PathBuf::from(format!("<{id}>"));
        let raw: Vec<Vec<String>> = chapters
            .iter()
            .map(|c| c.iter().flat_map(|v| segment_paragraphs(v.as_ref())).collect())
            .collect();
        Self::build(id, raw, &origin)
    }

    fn build(id: String, chapters: Vec<Vec<String>>, origin: &Path) -> Result<Self, CorpusError> {
        if chapters.iter().all(|c| c.is_empty()) {
            return Err(CorpusError::NoVerses {
                path: origin.to_path_buf(),
            });
        }
        let mut out = Vec::with_capacity(chapters.len());
        for (ci, verses) in chapters.into_iter().enumerate() {
            if verses.is_empty() {
                return Err(CorpusError::EmptyChapter {
                    path: origin.to_path_buf(),
                    chapter: ci + 1,
                });
            }
            out.push(
                verses
                    .into_iter()
                    .enumerate()
                    .map(|(vi, text)| Verse {
                        translation_id: id.clone(),
                        chapter: ci + 1,
                        index: vi + 1,
                        text,
                    })
                    .collect(),
            );
        }
        Ok(TranslationText { id, chapters: out })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn chapter_count(&self) -> usize {
        self.chapters.len()
    }

    /// Verses of a 1-based chapter.
    pub fn chapter(&self, chapter: usize) -> Option<&[Verse]> {
        chapter
            .checked_sub(1)
            .and_then(|i| self.chapters.get(i))
            .map(Vec::as_slice)
    }

    pub fn verse(&self, chapter: usize, index: usize) -> Option<&Verse> {
        self.chapter(chapter)?.get(index.checked_sub(1)?)
    }

    pub fn verse_counts(&self) -> Vec<usize> {
        self.chapters.iter().map(Vec::len).collect()
    }

    pub fn verse_count(&self) -> usize {
        self.chapters.iter().map(Vec::len).sum()
    }

    /// All verses in (chapter, index) order.
    pub fn verses(&self) -> impl Iterator<Item = &Verse> {
        self.chapters.iter().flatten()
    }

    /// Renders the normalized single-file form, which [`load_translation`]
    /// reads back to an identical value.
    pub fn dump(&self, delimiter: &str) -> String {
        let mut out = String::new();
        for (ci, chapter) in self.chapters.iter().enumerate() {
            out.push_str(delimiter);
            out.push(' ');
            out.push_str(&(ci + 1).to_string());
            out.push('\n');
            for v in chapter {
                out.push_str(&v.text);
                out.push('\n');
            }
        }
        out
    }
}

/// Splits raw text into verses: one per non-blank line, trimmed, in order.
///
/// A leading byte-order mark is dropped and `\r\n` / `\r` count as line
/// breaks. Case and punctuation are untouched.
pub fn segment_paragraphs(raw: &str) -> Vec<String> {
    let raw = raw.strip_prefix('\u{feff}').unwrap_or(raw);
    raw.split(['\n', '\r'])
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadOptions {
    /// Prefix of a chapter delimiter line in single-file mode; the chapter
    /// number follows it.
    pub chapter_delimiter: String,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            chapter_delimiter: DEFAULT_CHAPTER_DELIMITER.to_string(),
        }
    }
}

/// Loads a translation from a directory of chapter files or a single file.
pub fn load_translation(
    path: impl AsRef<Path>,
    translation_id: impl Into<String>,
) -> Result<TranslationText, CorpusError> {
    load_translation_with(path, translation_id, &LoadOptions::default())
}

pub fn load_translation_with(
    path: impl AsRef<Path>,
    translation_id: impl Into<String>,
    options: &LoadOptions,
) -> Result<TranslationText, CorpusError> {
    let path = path.as_ref();
    let id = translation_id.into();
    let meta = fs::metadata(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let chapters = if meta.is_dir() {
        load_directory(path)?
    } else {
        split_chapters(&read_utf8(path)?, path, &options.chapter_delimiter)?
    };
    TranslationText::build(id, chapters, path)
}

fn read_utf8(path: &Path) -> Result<String, CorpusError> {
    let bytes = fs::read(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    String::from_utf8(bytes).map_err(|e| CorpusError::InvalidUtf8 {
        path: path.to_path_buf(),
        offset: e.utf8_error().valid_up_to(),
    })
}

/// Chapter number of a `chapterNN.txt` file name.
fn chapter_file_number(name: &str) -> Option<usize> {
    let digits = name.strip_prefix("chapter")?.strip_suffix(".txt")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn load_directory(dir: &Path) -> Result<Vec<Vec<String>>, CorpusError> {
    let io_err = |source| CorpusError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let entry = entry.map_err(io_err)?;
        let name = entry.file_name();
        if let Some(n) = name.to_str().and_then(chapter_file_number) {
            files.push((n, entry.path()));
        }
    }
    if files.is_empty() {
        return Err(CorpusError::NoChapterFiles {
            path: dir.to_path_buf(),
        });
    }
    files.sort();
    let mut chapters = Vec::with_capacity(files.len());
    for (i, (n, file)) in files.into_iter().enumerate() {
        if n != i + 1 {
            return Err(CorpusError::NonContiguousChapters {
                path: dir.to_path_buf(),
                expected: i + 1,
                found: n,
            });
        }
        chapters.push(segment_paragraphs(&read_utf8(&file)?));
    }
    Ok(chapters)
}

fn split_chapters(raw: &str, path: &Path, delimiter: &str) -> Result<Vec<Vec<String>>, CorpusError> {
    let raw = raw.strip_prefix('\u{feff}').unwrap_or(raw);
    let lines: Vec<&str> = raw.lines().collect();
    let has_delimiters = lines.iter().any(|l| l.trim().starts_with(delimiter));
    if !has_delimiters {
        return Ok(vec![segment_paragraphs(raw)]);
    }

    let mut chapters: Vec<Vec<String>> = Vec::new();
    for (lineno, line) in lines.iter().enumerate() {
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix(delimiter) {
            let n: usize = rest.trim().parse().map_err(|_| CorpusError::MalformedDelimiter {
                path: path.to_path_buf(),
                line: lineno,
                text: trimmed.to_string(),
            })?;
            let expected = chapters.len() + 1;
            if n != expected {
                return Err(CorpusError::NonContiguousChapters {
                    path: path.to_path_buf(),
                    expected,
                    found: n,
                });
            }
            chapters.push(Vec::new());
            continue;
        }
        let verses = segment_paragraphs(line);
        if verses.is_empty() {
            continue;
        }
        match chapters.last_mut() {
            Some(current) => current.extend(verses),
            None => {
                return Err(CorpusError::TextBeforeFirstChapter {
                    path: path.to_path_buf(),
                    line: lineno,
                })
            }
        }
    }
    Ok(chapters)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlignmentPolicy {
    /// Every chapter must have the same verse count in every translation.
    #[default]
    Strict,
    /// Each chapter is cut to the shortest translation's verse count.
    Truncate,
}

impl AlignmentPolicy {
    pub fn name(self) -> &'static str {
        match self {
            AlignmentPolicy::Strict => "strict",
            AlignmentPolicy::Truncate => "truncate",
        }
    }
}

impl fmt::Display for AlignmentPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AlignmentPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(AlignmentPolicy::Strict),
            "truncate" => Ok(AlignmentPolicy::Truncate),
            other => Err(format!(
                "unknown alignment policy {other:?} (expected strict or truncate)"
            )),
        }
    }
}

/// Verses dropped from one chapter under the truncate policy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruncationWarning {
    pub chapter: usize,
    pub effective: usize,
    /// (translation id, number of trailing verses dropped), only nonzero entries.
    pub dropped: Vec<(String, usize)>,
}

impl TruncationWarning {
    pub fn total_dropped(&self) -> usize {
        self.dropped.iter().map(|(_, n)| n).sum()
    }
}

impl fmt::Display for TruncationWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "chapter {}: aligned to {} verses, dropped {}",
            self.chapter,
            self.effective,
            render_counts(&self.dropped)
        )
    }
}

/// Translations aligned positionally, verse i to verse i, per chapter.
#[derive(Debug, Clone)]
pub struct AlignedCorpus {
    translations: Vec<TranslationText>,
    policy: AlignmentPolicy,
    effective_counts: Vec<usize>,
    warnings: Vec<TruncationWarning>,
}

impl AlignedCorpus {
    pub fn translations(&self) -> &[TranslationText] {
        &self.translations
    }

    pub fn translation(&self, id: &str) -> Option<&TranslationText> {
        self.translations.iter().find(|t| t.id() == id)
    }

    pub fn translation_ids(&self) -> Vec<&str> {
        self.translations.iter().map(|t| t.id()).collect()
    }

    pub fn policy(&self) -> AlignmentPolicy {
        self.policy
    }

    pub fn chapter_count(&self) -> usize {
        self.effective_counts.len()
    }

    /// Per-chapter number of aligned verses.
    pub fn effective_counts(&self) -> &[usize] {
        &self.effective_counts
    }

    pub fn effective_count(&self, chapter: usize) -> Option<usize> {
        self.effective_counts.get(chapter.checked_sub(1)?).copied()
    }

    pub fn warnings(&self) -> &[TruncationWarning] {
        &self.warnings
    }

    /// Aligned (chapter, index) keys in ascending order.
    pub fn aligned_keys(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.effective_counts
            .iter()
            .enumerate()
            .flat_map(|(ci, &n)| (1..=n).map(move |vi| (ci + 1, vi)))
    }

    pub fn total_aligned(&self) -> usize {
        self.effective_counts.iter().sum()
    }
}

/// Aligns translations positionally under the given policy.
pub fn align(translations: Vec<TranslationText>, policy: AlignmentPolicy) -> Result<AlignedCorpus, CorpusError> {
    if translations.len() < 2 {
        return Err(CorpusError::TooFewTranslations(translations.len()));
    }
    for (i, t) in translations.iter().enumerate() {
        if translations[..i].iter().any(|u| u.id() == t.id()) {
            return Err(CorpusError::DuplicateTranslationId(t.id().to_string()));
        }
    }
    let first = &translations[0];
    for t in &translations[1..] {
        if t.chapter_count() != first.chapter_count() {
            return Err(CorpusError::ChapterCountMismatch {
                first: first.id().to_string(),
                first_count: first.chapter_count(),
                other: t.id().to_string(),
                other_count: t.chapter_count(),
            });
        }
    }

    let mut effective_counts = Vec::with_capacity(first.chapter_count());
    let mut warnings = Vec::new();
    for chapter in 1..=first.chapter_count() {
        let counts: Vec<(String, usize)> = translations
            .iter()
            .map(|t| (t.id().to_string(), t.chapter(chapter).map_or(0, <[Verse]>::len)))
            .collect();
        let min = counts.iter().map(|(_, n)| *n).min().unwrap_or(0);
        let max = counts.iter().map(|(_, n)| *n).max().unwrap_or(0);
        if min != max {
            match policy {
                AlignmentPolicy::Strict => return Err(CorpusError::VerseCountMismatch { chapter, counts }),
                AlignmentPolicy::Truncate => warnings.push(TruncationWarning {
                    chapter,
                    effective: min,
                    dropped: counts
                        .into_iter()
                        .filter(|(_, n)| *n > min)
                        .map(|(id, n)| (id, n - min))
                        .collect(),
                }),
            }
        }
        effective_counts.push(min);
    }
    Ok(AlignedCorpus {
        translations,
        policy,
        effective_counts,
        warnings,
    })
}
