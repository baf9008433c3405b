use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The nine sentiment labels, in canonical order. The order fixes the index
/// of each label in probability vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentLabel {
    Optimistic,
    Thankful,
    Empathetic,
    Pessimistic,
    Anxious,
    Sad,
    Annoyed,
    Denial,
    Joking,
}

pub const LABEL_COUNT: usize = 9;

impl SentimentLabel {
    pub const ALL: [SentimentLabel; LABEL_COUNT] = [
        SentimentLabel::Optimistic,
        SentimentLabel::Thankful,
        SentimentLabel::Empathetic,
        SentimentLabel::Pessimistic,
        SentimentLabel::Anxious,
        SentimentLabel::Sad,
        SentimentLabel::Annoyed,
        SentimentLabel::Denial,
        SentimentLabel::Joking,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            SentimentLabel::Optimistic => "optimistic",
            SentimentLabel::Thankful => "thankful",
            SentimentLabel::Empathetic => "empathetic",
            SentimentLabel::Pessimistic => "pessimistic",
            SentimentLabel::Anxious => "anxious",
            SentimentLabel::Sad => "sad",
            SentimentLabel::Annoyed => "annoyed",
            SentimentLabel::Denial => "denial",
            SentimentLabel::Joking => "joking",
        }
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown sentiment label {0:?}")]
pub struct UnknownLabel(pub String);

impl FromStr for SentimentLabel {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        Self::ALL
            .iter()
            .copied()
            .find(|l| l.name() == lower)
            .ok_or_else(|| UnknownLabel(s.to_string()))
    }
}

/// A subset of the label universe, stored as a 9-bit mask.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelSet(u16);

impl LabelSet {
    const FULL: u16 = (1 << LABEL_COUNT) - 1;

    pub const fn empty() -> Self {
        LabelSet(0)
    }

    pub const fn full() -> Self {
        LabelSet(Self::FULL)
    }

    /// Builds a set from a raw mask; bits above the ninth are discarded.
    pub const fn from_bits(bits: u16) -> Self {
        LabelSet(bits & Self::FULL)
    }

    pub const fn bits(self) -> u16 {
        self.0
    }

    pub fn insert(&mut self, label: SentimentLabel) {
        self.0 |= 1 << label.index();
    }

    pub fn contains(self, label: SentimentLabel) -> bool {
        self.0 & (1 << label.index()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        LabelSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        LabelSet(self.0 & other.0)
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_superset(self, other: Self) -> bool {
        self.0 & other.0 == other.0
    }

    /// Labels in canonical order.
    pub fn iter(self) -> impl Iterator<Item = SentimentLabel> {
        SentimentLabel::ALL.into_iter().filter(move |l| self.contains(*l))
    }
}

impl FromIterator<SentimentLabel> for LabelSet {
    fn from_iter<I: IntoIterator<Item = SentimentLabel>>(iter: I) -> Self {
        let mut set = LabelSet::empty();
        for l in iter {
            set.insert(l);
        }
        set
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(l.name())?;
        }
        f.write_str("}")
    }
}
