use std::collections::BTreeSet;

use super::CorpusError;

/// How upper-case letters are mapped before membership checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CaseFold {
    /// `char::to_lowercase`.
    #[default]
    Unicode,
    /// Unicode folding except dotted/dotless I: `I -> ı`, `İ -> i`.
    Turkic,
}

impl CaseFold {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseFold::Unicode => "unicode",
            CaseFold::Turkic => "turkic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "unicode" => Some(CaseFold::Unicode),
            "turkic" => Some(CaseFold::Turkic),
            _ => None,
        }
    }

    pub fn fold_into(self, c: char, out: &mut String) {
        match (self, c) {
            (CaseFold::Turkic, 'I') => out.push('ı'),
            (CaseFold::Turkic, 'İ') => out.push('i'),
            _ => out.extend(c.to_lowercase()),
        }
    }

    pub fn fold(self, s: &str) -> String {
        let mut out = String::with_capacity(s.len());
        for c in s.chars() {
            self.fold_into(c, &mut out);
        }
        out
    }
}

const EN26: &str = "abcdefghijklmnopqrstuvwxyz";
const TR29: &str = "abcçdefgğhıijklmnoöprsştuüvyz";

/// The letter inventory a corpus is written in.
///
/// `omega` is the structural degeneracy used by the statistical model: the
/// number of distinct letters words can be built from. It always comes from
/// here and is never inferred from the observed text. An alphabet may be
/// declared by size alone (`letters == None`); such an alphabet can be used
/// for fitting but not for tokenizing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphabetSpec {
    name: String,
    omega: u32,
    letters: Option<BTreeSet<char>>,
    fold: CaseFold,
}

impl AlphabetSpec {
    /// Built-in 26-letter English alphabet (`en26`).
    pub fn english() -> Self {
        Self::from_letters("en26", EN26, CaseFold::Unicode).expect("en26 preset is valid")
    }

    /// Built-in 29-letter Turkish alphabet (`tr29`), with Turkic I folding.
    pub fn turkish() -> Self {
        Self::from_letters("tr29", TR29, CaseFold::Turkic).expect("tr29 preset is valid")
    }

    /// Looks up a built-in preset by name.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "en26" => Some(Self::english()),
            "tr29" => Some(Self::turkish()),
            _ => None,
        }
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["en26", "tr29"]
    }

    /// Builds an alphabet from an explicit letter list.
    ///
    /// Letters are case folded with `fold`; two letters that fold to the
    /// same symbol are rejected as duplicates.
    pub fn from_letters(name: &str, letters: &str, fold: CaseFold) -> Result<Self, CorpusError> {
        let mut set = BTreeSet::new();
        for c in letters.chars().filter(|c| !c.is_whitespace()) {
            let folded = fold.fold(&c.to_string());
            let mut chars = folded.chars();
            let (Some(f), None) = (chars.next(), chars.next()) else {
                return Err(CorpusError::InvalidAlphabet(format!(
                    "letter {c:?} does not fold to a single symbol"
                )));
            };
            if !set.insert(f) {
                return Err(CorpusError::InvalidAlphabet(format!(
                    "duplicate letter {f:?} after case folding"
                )));
            }
        }
        if set.is_empty() {
            return Err(CorpusError::InvalidAlphabet("empty letter set".into()));
        }
        Ok(Self {
            name: name.to_string(),
            omega: set.len() as u32,
            letters: Some(set),
            fold,
        })
    }

    /// Declares an alphabet by its size only. Without a letter list every
    /// alphabetic character is accepted as a letter; `omega` is taken as given.
    pub fn from_omega(name: &str, omega: u32) -> Result<Self, CorpusError> {
        if omega == 0 {
            return Err(CorpusError::InvalidAlphabet("omega must be at least 1".into()));
        }
        Ok(Self {
            name: name.to_string(),
            omega,
            letters: None,
            fold: CaseFold::Unicode,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn omega(&self) -> u32 {
        self.omega
    }

    pub fn letters(&self) -> Option<&BTreeSet<char>> {
        self.letters.as_ref()
    }

    pub fn fold(&self) -> CaseFold {
        self.fold
    }

    /// Membership of an already-folded symbol.
    pub fn contains(&self, c: char) -> bool {
        match &self.letters {
            Some(l) => l.contains(&c),
            None => c.is_alphabetic(),
        }
    }

    /// True when this alphabet is exactly the built-in preset of the same name.
    pub fn is_preset(&self) -> bool {
        Self::preset(&self.name).is_some_and(|p| &p == self)
    }
}
