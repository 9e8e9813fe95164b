use super::AlphabetSpec;

/// What to do with a word that contains symbols outside the alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum NonLetterPolicy {
    /// Split the word at every out-of-alphabet symbol and keep the pieces.
    #[default]
    Split,
    /// Discard the whole word.
    DropWord,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TokenPolicy {
    pub fold_case: bool,
    pub non_letter: NonLetterPolicy,
}

impl Default for TokenPolicy {
    fn default() -> Self {
        Self {
            fold_case: true,
            non_letter: NonLetterPolicy::Split,
        }
    }
}

impl TokenPolicy {
    pub fn drop_words() -> Self {
        Self {
            non_letter: NonLetterPolicy::DropWord,
            ..Self::default()
        }
    }
}

/// Splits `text` into words made only of letters of `alphabet`.
///
/// Candidate words are maximal runs of alphanumeric characters; whitespace
/// and punctuation always separate words. Each candidate is case folded (if
/// the policy asks for it) and then either split at, or dropped because of,
/// any symbol the alphabet does not contain. Order of appearance is kept.
///
/// An alphabet declared only by size has no letters, so nothing matches.
pub fn tokenize(text: &str, alphabet: &AlphabetSpec, policy: TokenPolicy) -> Vec<String> {
    let mut words = Vec::new();
    let mut folded = String::new();
    for run in text.split(|c: char| !c.is_alphanumeric()).filter(|r| !r.is_empty()) {
        folded.clear();
        if policy.fold_case {
            for c in run.chars() {
                alphabet.fold().fold_into(c, &mut folded);
            }
        } else {
            folded.push_str(run);
        }
        match policy.non_letter {
            NonLetterPolicy::Split => words.extend(
                folded
                    .split(|c: char| !alphabet.contains(c))
                    .filter(|w| !w.is_empty())
                    .map(str::to_string),
            ),
            NonLetterPolicy::DropWord => {
                if folded.chars().all(|c| alphabet.contains(c)) {
                    words.push(folded.clone());
                }
            }
        }
    }
    words
}

#[cfg(test)]
mod tests {
    use super::*;

    fn en() -> AlphabetSpec {
        AlphabetSpec::english()
    }

    #[test]
    fn folds_and_strips_punctuation() {
        let w = tokenize("The cat, the CAT.", &en(), TokenPolicy::default());
        assert_eq!(w, ["the", "cat", "the", "cat"]);
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("", &en(), TokenPolicy::default()).is_empty());
        assert!(tokenize("", &en(), TokenPolicy::drop_words()).is_empty());
    }

    #[test]
    fn drop_policy_discards_out_of_alphabet_words() {
        assert_eq!(tokenize("naïve test", &en(), TokenPolicy::drop_words()), ["test"]);
    }

    #[test]
    fn split_policy_breaks_at_out_of_alphabet_symbols() {
        let w = tokenize("naïve abc123def", &en(), TokenPolicy::default());
        assert_eq!(w, ["na", "ve", "abc", "def"]);
    }

    #[test]
    fn no_fold_keeps_capitals_out_of_alphabet() {
        let policy = TokenPolicy {
            fold_case: false,
            non_letter: NonLetterPolicy::Split,
        };
        assert_eq!(tokenize("The cat", &en(), policy), ["he", "cat"]);
    }

    #[test]
    fn turkish_words_use_turkic_folding() {
        let w = tokenize("IŞIK ve İzmir", &AlphabetSpec::turkish(), TokenPolicy::drop_words());
        assert_eq!(w, ["ışık", "ve", "izmir"]);
    }

    #[test]
    fn size_only_alphabet_takes_any_letters() {
        let a = AlphabetSpec::from_omega("n", 33).unwrap();
        assert_eq!(
            tokenize("Привет, world 42", &a, TokenPolicy::default()),
            ["привет", "world"]
        );
    }
}
