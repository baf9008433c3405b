//! Regenerates the bundled three-translation fixture under tests/fixtures/trio.
//!
//!     cargo run --example make_fixture

use std::fs;
use std::io::BufWriter;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transeval::annotate::{write_annotations, AnnotationSet, VerseInput};

const DIM: usize = 8;

const STORY: [&[&str]; 3] = [
    &[
        "The old keeper climbed the tower before dawn and lit the great lamp.",
        "Fog rolled over the harbor and the boats stayed tied to the pier.",
        "His daughter laughed at the gulls that fought over a crust of bread.",
        "He worried that the oil would not last until the supply ship came.",
        "A letter from the city promised a new lens and a better wage.",
        "He did not believe a word of it and folded the letter into his coat.",
    ],
    &[
        "Winter arrived early and the wind tore two shutters from the cottage.",
        "The supply ship was late, and the village began to whisper.",
        "His daughter sang to the fishermen to keep their spirits up.",
        "One night the lamp failed and a trawler ran onto the rocks.",
        "Nobody drowned, yet the keeper sat alone in the dark for hours.",
    ],
    &[
        "In spring the ship finally came with oil, flour, and the new lens.",
        "The keeper thanked the captain and shook every sailor by the hand.",
        "The daughter joked that the lens was brighter than the moon.",
        "He still feared the next winter, but he polished the glass each day.",
        "The fishermen brought him a barrel of salted herring as a gift.",
        "When the lamp burned again the whole harbor cheered from the shore.",
        "He wrote back to the city, calm and grateful, and asked for nothing more.",
    ],
];

/// Per-translation word swaps that turn the base story into three versions.
const SWAPS: [&[(&str, &str)]; 3] = [
    &[],
    &[
        ("keeper", "lighthouse man"),
        ("harbor", "bay"),
        ("daughter", "girl"),
        ("fishermen", "fisherfolk"),
        ("worried", "fretted"),
    ],
    &[
        ("old keeper", "aged warden"),
        ("keeper", "warden"),
        ("great lamp", "beacon"),
        ("lamp", "beacon"),
        ("whisper", "murmur"),
        ("cheered", "shouted with joy"),
    ],
];

const IDS: [&str; 3] = ["ash", "birch", "cedar"];

/// Dominant sentiment profile per base verse, as label probabilities.
fn base_probs(chapter: usize, index: usize) -> [f64; 9] {
    // optimistic, thankful, empathetic, pessimistic, anxious, sad, annoyed, denial, joking
    let table: [&[[f64; 9]]; 3] = [
        &[
            [0.7, 0.1, 0.1, 0.1, 0.2, 0.1, 0.1, 0.0, 0.1],
            [0.1, 0.0, 0.1, 0.6, 0.5, 0.3, 0.1, 0.0, 0.0],
            [0.3, 0.1, 0.2, 0.0, 0.0, 0.0, 0.1, 0.0, 0.8],
            [0.1, 0.0, 0.1, 0.6, 0.8, 0.2, 0.1, 0.1, 0.0],
            [0.8, 0.3, 0.1, 0.1, 0.1, 0.0, 0.0, 0.0, 0.1],
            [0.0, 0.0, 0.0, 0.5, 0.1, 0.1, 0.4, 0.7, 0.2],
        ],
        &[
            [0.0, 0.0, 0.1, 0.6, 0.4, 0.5, 0.6, 0.0, 0.0],
            [0.1, 0.0, 0.1, 0.5, 0.7, 0.2, 0.2, 0.1, 0.0],
            [0.6, 0.2, 0.7, 0.0, 0.1, 0.1, 0.0, 0.0, 0.3],
            [0.0, 0.0, 0.2, 0.7, 0.6, 0.6, 0.1, 0.0, 0.0],
            [0.1, 0.2, 0.3, 0.3, 0.2, 0.9, 0.0, 0.0, 0.0],
        ],
        &[
            [0.8, 0.5, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.1],
            [0.4, 0.9, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.1],
            [0.4, 0.1, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.9],
            [0.4, 0.0, 0.1, 0.4, 0.7, 0.1, 0.0, 0.0, 0.0],
            [0.5, 0.8, 0.6, 0.0, 0.0, 0.0, 0.0, 0.0, 0.2],
            [0.9, 0.4, 0.2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.3],
            [0.6, 0.8, 0.2, 0.0, 0.1, 0.0, 0.0, 0.0, 0.0],
        ],
    ];
    table[chapter - 1][index - 1]
}

fn render(text: &str, swaps: &[(&str, &str)]) -> String {
    let mut out = text.to_string();
    for (from, to) in swaps {
        out = out.replace(from, to);
    }
    out
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/trio");
    fs::create_dir_all(&root)?;
    let mut rng = ChaCha8Rng::seed_from_u64(20211218);

    let base: Vec<Vec<[f64; DIM]>> = STORY
        .iter()
        .map(|ch| {
            ch.iter()
                .map(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)))
                .collect()
        })
        .collect();

    for (t, id) in IDS.iter().enumerate() {
        let chapters: Vec<Vec<String>> = STORY
            .iter()
            .map(|ch| ch.iter().map(|v| render(v, SWAPS[t])).collect())
            .collect();
        if t == 0 {
            let dir = root.join(id);
            fs::create_dir_all(&dir)?;
            for (c, verses) in chapters.iter().enumerate() {
                // blank separators exercise paragraph segmentation
                fs::write(dir.join(format!("chapter{:02}.txt", c + 1)), verses.join("\n\n") + "\n")?;
            }
        } else {
            let mut text = String::new();
            for (c, verses) in chapters.iter().enumerate() {
                text.push_str(&format!("### CHAPTER {}\n", c + 1));
                for v in verses {
                    text.push_str(v);
                    text.push('\n');
                }
            }
            fs::write(root.join(format!("{id}.txt")), text)?;
        }

        let mut set = AnnotationSet::new(*id, 0.5, DIM)?;
        let spread = 0.15 + 0.1 * t as f64;
        for (c, points) in base.iter().enumerate() {
            for (i, point) in points.iter().enumerate() {
                let probs = base_probs(c + 1, i + 1)
                    .iter()
                    .map(|p| (p + rng.random_range(-0.15..0.15)).clamp(0.0, 1.0))
                    .map(|p| (p * 1000.0).round() / 1000.0)
                    .collect();
                let embedding = point.iter().map(|x| x + rng.random_range(-spread..spread)).collect();
                let polarity = (rng.random_range(-1.0f64..1.0) * 100.0).round() / 100.0;
                set.insert(VerseInput {
                    chapter: c + 1,
                    index: i + 1,
                    probs,
                    embedding,
                    polarity: Some(polarity),
                })?;
            }
        }
        let out = fs::File::create(root.join(format!("{id}.jsonl")))?;
        write_annotations(&set, BufWriter::new(out))?;
    }

    let config = "\
# Three synthetic translations of one short story.
threshold = 0.5
topk_ngrams = 10
topk_verses = 3
out = \"report\"

[[translations]]
id = \"ash\"
corpus = \"ash\"
annotations = \"ash.jsonl\"

[[translations]]
id = \"birch\"
corpus = \"birch.txt\"
annotations = \"birch.jsonl\"

[[translations]]
id = \"cedar\"
corpus = \"cedar.txt\"
annotations = \"cedar.jsonl\"
";
    fs::write(root.join("run.toml"), config)?;
    println!("fixture written to {}", root.display());
    Ok(())
}
