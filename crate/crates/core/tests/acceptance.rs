//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transeval::annotate::{self, AnnotationSet, VerseInput};
use transeval::corpus::{self, AlignedCorpus, AlignmentPolicy, TranslationText};
use transeval::labels::{LabelSet, SentimentLabel};
use transeval::metrics::{self, MetricBundle, PairKey, PolarityWeights, RankDirection, RankKey};
use transeval::ngrams::{self, Stopwords, TokenSequence};
use transeval::report::{self, fmt3};

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;
type Rows = Vec<((usize, usize), Vec<f64>)>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    }};
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/trio")
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_transeval")
}

fn corpus_of(ids: &[&str], counts: &[usize]) -> AlignedCorpus {
    let texts = ids
        .iter()
        .map(|id| {
            let chapters: Vec<Vec<String>> = counts
                .iter()
                .enumerate()
                .map(|(c, &n)| (1..=n).map(|i| format!("{id} verse {}.{i}", c + 1)).collect())
                .collect();
            TranslationText::from_chapters(*id, &chapters).unwrap()
        })
        .collect();
    corpus::align(texts, AlignmentPolicy::Strict).unwrap()
}

fn set_of(id: &str, dim: usize, rows: impl IntoIterator<Item = ((usize, usize), Vec<f64>)>) -> AnnotationSet<f64> {
    let mut set = AnnotationSet::new(id, 0.5, dim).unwrap();
    for ((chapter, index), embedding) in rows {
        set.insert(VerseInput {
            chapter,
            index,
            probs: vec![0.0; 9],
            embedding,
            polarity: None,
        })
        .unwrap();
    }
    set
}

fn jaccard_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut empties = 0;
    for _ in 0..10_000 {
        // sparse sets so empty-empty pairs occur
        let mut draw = || rng.random_range(0..512u16) & rng.random_range(0..512u16) & rng.random_range(0..512u16);
        let (x, y) = (draw(), draw());
        let a: BTreeSet<usize> = (0..9).filter(|b| x >> b & 1 == 1).collect();
        let b: BTreeSet<usize> = (0..9).filter(|i| y >> i & 1 == 1).collect();
        let union = a.union(&b).count();
        let expected = if union == 0 {
            empties += 1;
            1.0
        } else {
            a.intersection(&b).count() as f64 / union as f64
        };
        let got: f64 = metrics::jaccard_verse(LabelSet::from_bits(x), LabelSet::from_bits(y));
        ensure!(got == expected, "sets {a:?} {b:?}: got {got}, expected {expected}");
    }
    ensure!(
        metrics::jaccard_verse::<f64>(LabelSet::empty(), LabelSet::empty()) == 1.0,
        "empty-empty is not 1.0"
    );
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("10000 pairs exact ({empties} empty-empty), {elapsed:.2?}"))
}

fn cosine_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut worst_self = 0.0f64;
    for dim in [8usize, 768] {
        for _ in 0..1000 {
            let u: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
            let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
            let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            let expected = dot / (nu * nv);
            let got = metrics::cosine(&u, &v).map_err(|e| e.to_string())?;
            worst = worst.max((got - expected).abs());

            let (s, t) = (rng.random_range(0.01..100.0), rng.random_range(0.01..100.0));
            let su: Vec<f64> = u.iter().map(|a| a * s).collect();
            let tv: Vec<f64> = v.iter().map(|a| a * t).collect();
            let scaled = metrics::cosine(&su, &tv).map_err(|e| e.to_string())?;
            worst = worst.max((scaled - got).abs());

            let own = metrics::cosine(&u, &u).map_err(|e| e.to_string())?;
            worst_self = worst_self.max((own - 1.0).abs());
        }
    }
    ensure!(worst <= 1e-9, "max deviation {worst:e}");
    ensure!(worst_self <= 1e-12, "cos(u,u) off by {worst_self:e}");
    Ok(format!(
        "2000 pairs at dims 8/768, max dev {worst:.1e}, self {worst_self:.1e}"
    ))
}

fn polarity() -> Outcome {
    let w = PolarityWeights::default();
    let singles: Vec<i64> = SentimentLabel::ALL
        .iter()
        .map(|&l| metrics::polarity_verse(std::iter::once(l).collect(), &w))
        .collect();
    ensure!(
        singles == [2, 3, 0, -4, -2, -3, -1, -5, 1],
        "singletons gave {singles:?}"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let whole: u16 = rng.random_range(0..512);
        let part = whole & rng.random_range(0..512u16);
        let (a, b) = (LabelSet::from_bits(part), LabelSet::from_bits(whole & !part));
        ensure!(a.is_disjoint(b), "split not disjoint");
        let total = metrics::polarity_verse(LabelSet::from_bits(whole), &w);
        ensure!(
            total == metrics::polarity_verse(a, &w) + metrics::polarity_verse(b, &w),
            "additivity fails for {}",
            LabelSet::from_bits(whole)
        );
    }
    Ok(format!("singletons {singles:?}, 1000 splits additive"))
}

fn chapter_statistics() -> Outcome {
    let counts = [50, 70, 80];
    let dim = 16;
    let corpus = corpus_of(&["a", "b"], &counts);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut raw: BTreeMap<(usize, usize), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for (c, &n) in counts.iter().enumerate() {
        for i in 1..=n {
            let u = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let v = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            raw.insert((c + 1, i), (u, v));
        }
    }
    let a = set_of("a", dim, raw.iter().map(|(k, (u, _))| (*k, u.clone())));
    let b = set_of("b", dim, raw.iter().map(|(k, (_, v))| (*k, v.clone())));
    let mut worst = 0.0f64;
    for chapter in 1..=counts.len() {
        let list: Vec<f64> = raw
            .range((chapter, 0)..(chapter + 1, 0))
            .map(|(_, (u, v))| {
                let dot: f64 = u.iter().zip(v).map(|(x, y)| x * y).sum();
                dot / (u.iter().map(|x| x * x).sum::<f64>().sqrt() * v.iter().map(|x| x * x).sum::<f64>().sqrt())
            })
            .collect();
        let n = list.len() as f64;
        let mean = list.iter().sum::<f64>() / n;
        let std = (list.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
        let (m, s) = metrics::cosine_chapter_stats(&corpus, &a, &b, chapter).map_err(|e| e.to_string())?;
        worst = worst.max((m - mean).abs()).max((s - std).abs());
    }
    ensure!(worst <= 1e-12, "max deviation {worst:e}");
    Ok(format!("200 verses over 3 chapters, max dev {worst:.1e}"))
}

const VOCAB: [&str; 12] = [
    "lamp", "harbor", "fog", "ship", "oil", "lens", "gull", "rope", "tide", "stone", "bread", "wind",
];

fn ngram_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sw = Stopwords::english();
    let fillers = ["the", "and", "of", "a", "to"];
    let mut verses = Vec::new();
    let mut labels = Vec::new();
    for i in 1..=500 {
        let len = rng.random_range(0..9);
        let words: Vec<&str> = (0..len)
            .map(|_| {
                if rng.random_bool(0.25) {
                    fillers[rng.random_range(0..fillers.len())]
                } else {
                    VOCAB[rng.random_range(0..VOCAB.len())]
                }
            })
            .collect();
        let text = words.join(if i % 2 == 0 { " " } else { ", " });
        verses.push(corpus::Verse {
            translation_id: "t".into(),
            chapter: 1,
            index: i,
            text,
        });
        labels.push(rng.random_range(0..512u16));
    }
    let seqs: Vec<TokenSequence> = verses.iter().map(|v| ngrams::tokenize(v, &sw)).collect();

    let oracle_tokens: Vec<Vec<String>> = verses
        .iter()
        .map(|v| {
            v.text
                .split([' ', ','])
                .filter(|w| !w.is_empty() && !fillers.contains(w))
                .map(str::to_string)
                .collect()
        })
        .collect();
    let brute = |n: usize, keep: &dyn Fn(usize) -> bool| {
        let mut counts: HashMap<Vec<String>, u64> = HashMap::new();
        for (i, toks) in oracle_tokens.iter().enumerate() {
            if !keep(i) || toks.len() < n {
                continue;
            }
            for start in 0..=toks.len() - n {
                *counts.entry(toks[start..start + n].to_vec()).or_default() += 1;
            }
        }
        counts
    };
    let ranked = |counts: &HashMap<Vec<String>, u64>, k: usize| {
        let mut all: Vec<(Vec<String>, u64)> = counts.iter().map(|(g, c)| (g.clone(), *c)).collect();
        all.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        all.truncate(k);
        all
    };

    let mut set = AnnotationSet::new("t", 0.5, 1).unwrap();
    for (i, &bits) in labels.iter().enumerate() {
        let probs = (0..9).map(|b| if bits >> b & 1 == 1 { 0.9 } else { 0.1 }).collect();
        set.insert(VerseInput {
            chapter: 1,
            index: i + 1,
            probs,
            embedding: vec![1.0],
            polarity: None,
        })
        .unwrap();
    }

    let mut ties = 0;
    for n in [2, 3] {
        let full = brute(n, &|_| true);
        let expected = ranked(&full, 10);
        let got = ngrams::extract_topk(&seqs, n, 10).map_err(|e| e.to_string())?;
        ensure!(
            got.entries == expected,
            "top-10 {n}-grams differ: {:?} vs {:?}",
            got.entries,
            expected
        );
        ties += expected.windows(2).filter(|w| w[0].1 == w[1].1).count();
        for label in SentimentLabel::ALL {
            let cond = ngrams::sentiment_topk(&seqs, &set, label, n, usize::MAX).map_err(|e| e.to_string())?;
            let bit = label.index();
            let oracle = brute(n, &|i| labels[i] >> bit & 1 == 1);
            ensure!(
                cond.entries == ranked(&oracle, usize::MAX),
                "{label} {n}-grams differ from oracle"
            );
            for (gram, c) in &cond.entries {
                ensure!(*c <= full[gram], "{label} {gram:?}: {c} > {}", full[gram]);
            }
        }
    }
    Ok(format!(
        "500 verses, bigram/trigram top-10 exact ({ties} tied neighbours), 18 conditioned tables bounded"
    ))
}

/// Three unit vectors with the given pairwise cosines (01, 02, 12).
fn triangle(c01: f64, c02: f64, c12: f64) -> [Vec<f64>; 3] {
    let s01 = (1.0 - c01 * c01).sqrt();
    let y = (c12 - c01 * c02) / s01;
    let z = (1.0 - c02 * c02 - y * y).max(0.0).sqrt();
    [vec![1.0, 0.0, 0.0], vec![c01, s01, 0.0], vec![c02, y, z]]
}

fn extremes_ranking() -> Outcome {
    let ids = ["mt", "ta", "tb"];
    let counts = [45usize; 9];
    let corpus = corpus_of(&ids, &counts);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut rows: [Rows; 3] = Default::default();
    for (chapter, index) in corpus.aligned_keys() {
        let tri = match (chapter, index) {
            (9, 43) => triangle(0.953, 0.953, 1.0),
            (7, 8) => triangle(0.139, 0.154, 0.554),
            _ => {
                let t = rng.random_range(0.4..0.9);
                triangle(t, t, t)
            }
        };
        for (slot, v) in rows.iter_mut().zip(tri) {
            slot.push(((chapter, index), v));
        }
    }
    let sets: Vec<AnnotationSet<f64>> = ids.iter().zip(rows).map(|(id, r)| set_of(id, 3, r)).collect();
    let mut detail = Vec::new();
    for (direction, key, scores) in [
        (RankDirection::Most, (9, 43), ["0.953", "0.953", "1.000"]),
        (RankDirection::Least, (7, 8), ["0.139", "0.154", "0.554"]),
    ] {
        let ranking =
            metrics::rank_similarity(&corpus, &sets, 3, direction, RankKey::Mean).map_err(|e| e.to_string())?;
        let top = &ranking.records[0];
        ensure!(
            (top.chapter, top.index) == key,
            "{direction:?} top-1 is ({},{})",
            top.chapter,
            top.index
        );
        let rendered: Vec<String> = top.scores.iter().map(|s| fmt3(*s)).collect();
        ensure!(rendered == scores, "{direction:?} scores {rendered:?}");
        detail.push(format!("{:?} ({},{}) {}", direction, key.0, key.1, rendered.join("/")));
    }
    Ok(detail.join("; "))
}

fn format_fixtures() -> Outcome {
    let table: [[f64; 3]; 9] = [
        [0.583, 0.569, 0.722],
        [0.592, 0.571, 0.722],
        [0.627, 0.589, 0.691],
        [0.587, 0.555, 0.662],
        [0.585, 0.56, 0.67],
        [0.551, 0.525, 0.623],
        [0.573, 0.534, 0.6],
        [0.555, 0.519, 0.599],
        [0.536, 0.507, 0.587],
    ];
    let ids = ["mt", "ta", "tb"];
    let mut bundle = MetricBundle::<f64>::empty(&ids, 9).map_err(|e| e.to_string())?;
    let pairs = PairKey::all_pairs(&ids).map_err(|e| e.to_string())?;
    for (c, row) in table.iter().enumerate() {
        for (pair, &v) in pairs.iter().zip(row) {
            bundle.jaccard.insert((pair.clone(), c + 1), v);
        }
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("jaccard.csv");
    report::emit_jaccard_table(&bundle, &path).map_err(|e| e.to_string())?;
    let csv = fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let mut expected = vec!["Chapter,mt-ta,mt-tb,ta-tb".to_string()];
    for (c, row) in table.iter().enumerate() {
        expected.push(format!(
            "Chapter {},{},{},{}",
            c + 1,
            fmt3(row[0]),
            fmt3(row[1]),
            fmt3(row[2])
        ));
    }
    expected.push("Average,0.577,0.548,0.653".to_string());
    let lines: Vec<&str> = csv.lines().collect();
    ensure!(lines == expected, "table differs:\n{csv}");
    ensure!(lines[1] == "Chapter 1,0.583,0.569,0.722", "chapter 1 row {}", lines[1]);
    ensure!(lines[5] == "Chapter 5,0.585,0.560,0.670", "chapter 5 row {}", lines[5]);

    let pair = pairs[0].clone();
    let mut cos = MetricBundle::<f64>::empty(&ids, 1).map_err(|e| e.to_string())?;
    for p in &pairs {
        cos.cosine_mean.insert((p.clone(), 1), 0.736);
        cos.cosine_std.insert((p.clone(), 1), 0.128);
    }
    let rows = report::cosine_table_rows(&cos).map_err(|e| e.to_string())?;
    ensure!(rows[1][1] == "0.736(0.128)", "cosine cell {} for {pair}", rows[1][1]);
    Ok("9 chapter rows + Average 0.577,0.548,0.653; cosine cell 0.736(0.128)".into())
}

fn read_tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn fnv1a(trees: &BTreeMap<PathBuf, Vec<u8>>) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for (path, bytes) in trees {
        for b in path.to_string_lossy().bytes().chain(bytes.iter().copied()) {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

fn determinism() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = fixture_dir().join("run.toml");
    let mut trees = Vec::new();
    for (run, parallel) in [("a", "1"), ("b", "1"), ("c", "8")] {
        let out = dir.path().join(run);
        let status = Command::new(bin())
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .args(["--parallel", parallel])
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(
            status.status.success(),
            "run {run} failed: {}",
            String::from_utf8_lossy(&status.stderr)
        );
        trees.push(read_tree(&out));
    }
    let elapsed = start.elapsed();
    ensure!(trees[0] == trees[1], "two --parallel 1 runs differ");
    ensure!(trees[0] == trees[2], "--parallel 1 and --parallel 8 differ");
    ensure!(trees[0].len() > 10, "only {} files written", trees[0].len());
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!(
        "{} files, digest {:016x}, 3 runs in {elapsed:.2?}",
        trees[0].len(),
        fnv1a(&trees[0])
    ))
}

fn round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut set = AnnotationSet::new("rt", 0.5, 12).unwrap();
    for i in 1..=100 {
        set.insert(VerseInput {
            chapter: 1 + i % 4,
            index: i,
            probs: (0..9).map(|_| rng.random_range(0.0..1.0)).collect(),
            embedding: (0..12).map(|_| rng.random_range(-5.0..5.0)).collect(),
            polarity: if i % 3 == 0 {
                None
            } else {
                Some(rng.random_range(-1.0..1.0))
            },
        })
        .unwrap();
    }
    let mut first = Vec::new();
    annotate::write_annotations(&set, &mut first).unwrap();
    let back: AnnotationSet<f64> = annotate::parse_annotations(first.as_slice()).map_err(|e| e.to_string())?;
    let mut second = Vec::new();
    annotate::write_annotations(&back, &mut second).unwrap();
    ensure!(first == second, "second write differs from first");
    ensure!(back.len() == set.len(), "record count {} vs {}", back.len(), set.len());
    let close = |a: f64, b: f64| (a - b).abs() <= 5e-9 * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    for (x, y) in set.iter().zip(back.iter()) {
        ensure!(
            x.key() == y.key() && x.labels == y.labels,
            "record ({},{}) changed",
            x.chapter,
            x.index
        );
        let pairs = x.probs.iter().zip(&y.probs).chain(x.embedding.iter().zip(&y.embedding));
        for (a, b) in pairs {
            ensure!(close(*a, *b), "({},{}): {a} vs {b}", x.chapter, x.index);
        }
        match (x.external_polarity, y.external_polarity) {
            (None, None) => {}
            (Some(a), Some(b)) => ensure!(close(a, b), "polarity {a} vs {b}"),
            _ => return Err(format!("polarity presence changed at ({},{})", x.chapter, x.index)),
        }
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let fixture = fixture_dir();
    for (id, source) in [("ash", "ash"), ("birch", "birch.txt"), ("cedar", "cedar.txt")] {
        let text = corpus::load_translation(fixture.join(source), id).map_err(|e| e.to_string())?;
        let path = dir.path().join(format!("{id}.txt"));
        fs::write(&path, text.dump(corpus::DEFAULT_CHAPTER_DELIMITER)).map_err(|e| e.to_string())?;
        let again = corpus::load_translation(&path, id).map_err(|e| e.to_string())?;
        ensure!(again == text, "{id} dump does not reload identically");
    }
    Ok("100 records stable within 9 significant digits; 3 corpus dumps reload identically".into())
}

fn validation() -> Outcome {
    struct Defect {
        name: &'static str,
        apply: fn(&Path),
        needles: &'static [&'static str],
    }
    fn edit(path: &Path, f: impl FnOnce(&mut Vec<String>)) {
        let mut lines: Vec<String> = fs::read_to_string(path).unwrap().lines().map(String::from).collect();
        f(&mut lines);
        fs::write(path, lines.join("\n") + "\n").unwrap();
    }
    let defects = [
        Defect {
            name: "missing verse annotation",
            apply: |d| {
                edit(&d.join("birch.jsonl"), |l| {
                    l.remove(4);
                })
            },
            needles: &["birch", "missing annotations for (1,4)", "birch.jsonl"],
        },
        Defect {
            name: "dimension mismatch",
            apply: |d| {
                edit(&d.join("cedar.jsonl"), |l| {
                    let mut rec: serde_json::Value = serde_json::from_str(&l[3]).unwrap();
                    rec["embedding"].as_array_mut().unwrap().pop();
                    l[3] = rec.to_string();
                })
            },
            needles: &["cedar.jsonl", "line 4", "chapter 1 verse 3", "dimension mismatch"],
        },
        Defect {
            name: "chapter-count mismatch",
            apply: |d| {
                let mut text = fs::read_to_string(d.join("birch.txt")).unwrap();
                text.push_str("### CHAPTER 4\nAn extra chapter nobody else has.\n");
                fs::write(d.join("birch.txt"), text).unwrap();
            },
            needles: &["chapter-count mismatch", "birch has 4"],
        },
        Defect {
            name: "out-of-range probability",
            apply: |d| {
                edit(&d.join("ash.jsonl"), |l| {
                    let mut rec: serde_json::Value = serde_json::from_str(&l[2]).unwrap();
                    rec["probs"][0] = serde_json::json!(1.3);
                    l[2] = rec.to_string();
                })
            },
            needles: &["ash.jsonl", "line 3", "chapter 1 verse 2", "out of range"],
        },
    ];
    let mut detail = Vec::new();
    for defect in defects {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        for entry in fs::read_dir(fixture_dir()).unwrap() {
            let path = entry.unwrap().path();
            let target = dir.path().join(path.file_name().unwrap());
            if path.is_dir() {
                fs::create_dir(&target).unwrap();
                for f in fs::read_dir(&path).unwrap() {
                    let f = f.unwrap().path();
                    fs::copy(&f, target.join(f.file_name().unwrap())).unwrap();
                }
            } else {
                fs::copy(&path, &target).unwrap();
            }
        }
        (defect.apply)(dir.path());
        for extra in [&["--validate-only"][..], &[]] {
            let out = Command::new(bin())
                .arg("--config")
                .arg(dir.path().join("run.toml"))
                .arg("--out")
                .arg(dir.path().join("report"))
                .args(extra)
                .output()
                .map_err(|e| e.to_string())?;
            let stderr = String::from_utf8_lossy(&out.stderr);
            ensure!(
                out.status.code() == Some(2),
                "{}: exit {:?}, stderr {stderr}",
                defect.name,
                out.status.code()
            );
            for needle in defect.needles {
                ensure!(
                    stderr.contains(needle),
                    "{}: diagnostic lacks {needle:?}: {stderr}",
                    defect.name
                );
            }
        }
        detail.push(defect.name);
    }
    Ok(format!("exit 2 with location for: {}", detail.join(", ")))
}

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("jaccard oracle", jaccard_oracle),
        ("cosine oracle", cosine_oracle),
        ("polarity weights", polarity),
        ("chapter statistics", chapter_statistics),
        ("n-gram oracle", ngram_oracle),
        ("extremes ranking", extremes_ranking),
        ("format fixtures", format_fixtures),
        ("determinism", determinism),
        ("round-trip", round_trip),
        ("validation", validation),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS  {name:<20} {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name:<20} {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
