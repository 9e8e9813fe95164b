//! Corpus ingestion: tokenizing raw text and reducing it to the length
//! distribution of its distinct words.
//!
//! A [`LengthDistribution`] records, for every observed word length `l_i`
//! (in letters), how many *distinct* words `n_i` have that length. Token
//! frequency is irrelevant: a word seen once and a word seen ten thousand
//! times both count as one. The totals
//!
//! ```text
//! N = Σ n_i          (distinct words)
//! L = Σ l_i · n_i    (letters over all distinct words)
//! ```
//!
//! are stored alongside the states and always agree with them.

mod alphabet;
mod format;
mod tokenize;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub use alphabet::{AlphabetSpec, CaseFold};
pub use format::{load_distribution, parse_distribution, render_distribution, save_distribution};
pub use tokenize::{tokenize, NonLetterPolicy, TokenPolicy};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("unknown alphabet {0:?}")]
    UnknownAlphabet(String),
    #[error("length must be at least 1 (got 0)")]
    ZeroLength,
    #[error("lengths must be strictly increasing ({prev} then {next})")]
    NonIncreasing { prev: u32, next: u32 },
    #[error("stored total {name} = {stored} does not match recomputed {computed}")]
    TotalMismatch {
        name: &'static str,
        stored: u64,
        computed: u64,
    },
    #[error("missing header `length<TAB>count` at line {line}")]
    MissingHeader { line: usize },
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("negative count at line {line}")]
    NegativeCount { line: usize },
    #[error("non-increasing length at line {line}")]
    NonIncreasingLength { line: usize },
    #[error("zero length at line {line}")]
    ZeroLengthAt { line: usize },
    #[error("bad metadata at line {line}: {reason}")]
    BadMetadata { line: usize, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One occupied length state: `count` distinct words of `length` letters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LengthState {
    pub length: u32,
    pub count: u64,
}

impl LengthState {
    pub fn new(length: u32, count: u64) -> Self {
        Self { length, count }
    }
}

/// Histogram of distinct-word counts per word length.
#[derive(Clone, Debug, PartialEq)]
pub struct LengthDistribution {
    states: Vec<LengthState>,
    source_label: String,
    alphabet: Option<AlphabetSpec>,
    total_distinct: u64,
    total_letters: u64,
}

impl LengthDistribution {
    /// Validates `states` (lengths ≥ 1, strictly increasing) and computes N and L.
    pub fn new(states: Vec<LengthState>) -> Result<Self, CorpusError> {
        for w in states.windows(2) {
            if w[1].length <= w[0].length {
                return Err(CorpusError::NonIncreasing {
                    prev: w[0].length,
                    next: w[1].length,
                });
            }
        }
        if states.first().is_some_and(|s| s.length == 0) {
            return Err(CorpusError::ZeroLength);
        }
        let total_distinct = states.iter().map(|s| s.count).sum();
        let total_letters = states.iter().map(|s| s.length as u64 * s.count).sum();
        Ok(Self {
            states,
            source_label: String::new(),
            alphabet: None,
            total_distinct,
            total_letters,
        })
    }

    /// Builds from `(length, count)` pairs.
    pub fn from_pairs(pairs: &[(u32, u64)]) -> Result<Self, CorpusError> {
        Self::new(pairs.iter().map(|&(l, n)| LengthState::new(l, n)).collect())
    }

    /// Checks stored totals against the states.
    pub fn check_totals(&self, distinct: Option<u64>, letters: Option<u64>) -> Result<(), CorpusError> {
        if let Some(stored) = distinct.filter(|&n| n != self.total_distinct) {
            return Err(CorpusError::TotalMismatch {
                name: "total_distinct",
                stored,
                computed: self.total_distinct,
            });
        }
        if let Some(stored) = letters.filter(|&l| l != self.total_letters) {
            return Err(CorpusError::TotalMismatch {
                name: "total_letters",
                stored,
                computed: self.total_letters,
            });
        }
        Ok(())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.source_label = label.into();
        self
    }

    pub fn with_alphabet(mut self, alphabet: AlphabetSpec) -> Self {
        self.alphabet = Some(alphabet);
        self
    }

    pub fn states(&self) -> &[LengthState] {
        &self.states
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn alphabet(&self) -> Option<&AlphabetSpec> {
        self.alphabet.as_ref()
    }

    pub fn omega(&self) -> Option<u32> {
        self.alphabet.as_ref().map(AlphabetSpec::omega)
    }

    /// N, the number of distinct words.
    pub fn total_distinct(&self) -> u64 {
        self.total_distinct
    }

    /// L, the summed letter count over distinct words.
    pub fn total_letters(&self) -> u64 {
        self.total_letters
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn lengths(&self) -> Vec<u32> {
        self.states.iter().map(|s| s.length).collect()
    }

    pub fn counts(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.count as f64).collect()
    }

    pub fn min_length(&self) -> Option<u32> {
        self.states.first().map(|s| s.length)
    }

    pub fn max_length(&self) -> Option<u32> {
        self.states.last().map(|s| s.length)
    }

    /// Multiplies every count by `k`; used to check least-squares homogeneity.
    pub fn scaled(&self, k: u64) -> Self {
        let states = self
            .states
            .iter()
            .map(|s| LengthState::new(s.length, s.count * k))
            .collect();
        let mut out = Self::new(states).expect("scaling preserves ordering");
        out.source_label = self.source_label.clone();
        out.alphabet = self.alphabet.clone();
        out
    }
}

/// Reduces a word sequence to its distinct-word length distribution.
///
/// Words are deduplicated by exact string equality (fold case beforehand via
/// [`tokenize`]); length is the number of `char`s. Lengths with no words are
/// left out.
pub fn distill<I, S>(words: I) -> LengthDistribution
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let distinct: BTreeSet<String> = words
        .into_iter()
        .map(|w| w.as_ref().to_string())
        .filter(|w| !w.is_empty())
        .collect();
    let mut hist: BTreeMap<u32, u64> = BTreeMap::new();
    for w in &distinct {
        *hist.entry(w.chars().count() as u32).or_default() += 1;
    }
    let states = hist.into_iter().map(|(l, n)| LengthState::new(l, n)).collect();
    LengthDistribution::new(states).expect("BTreeMap keys are increasing and nonzero")
}
