//! Tab-separated distribution files.
//!
//! ```text
//! # source_label=brown
//! # alphabet=en26
//! # omega=26
//! # total_distinct=40235
//! # total_letters=314158
//! length	count
//! 1	26
//! 2	142
//! ```
//!
//! `#` lines carry `key=value` metadata and may appear anywhere. Line numbers
//! in errors are 1-based physical lines of the file.

use std::path::Path;

use super::{AlphabetSpec, CaseFold, CorpusError, LengthDistribution, LengthState};

pub const HEADER: &str = "length\tcount";

#[derive(Default)]
struct Meta {
    source_label: Option<String>,
    alphabet: Option<String>,
    omega: Option<u32>,
    letters: Option<String>,
    fold: Option<CaseFold>,
    total_distinct: Option<u64>,
    total_letters: Option<u64>,
}

fn parse_meta(meta: &mut Meta, body: &str, line: usize) -> Result<(), CorpusError> {
    let Some((key, value)) = body.split_once('=') else {
        // free-form comment
        return Ok(());
    };
    let bad = |reason: String| CorpusError::BadMetadata { line, reason };
    let value = value.trim();
    match key.trim() {
        "source_label" => meta.source_label = Some(value.to_string()),
        "alphabet" => meta.alphabet = Some(value.to_string()),
        "letters" => meta.letters = Some(value.to_string()),
        "omega" => {
            meta.omega = Some(value.parse().map_err(|_| bad(format!("omega {value:?}")))?);
        }
        "fold" => {
            meta.fold = Some(CaseFold::parse(value).ok_or_else(|| bad(format!("fold {value:?}")))?);
        }
        "total_distinct" => {
            meta.total_distinct = Some(value.parse().map_err(|_| bad(format!("total_distinct {value:?}")))?);
        }
        "total_letters" => {
            meta.total_letters = Some(value.parse().map_err(|_| bad(format!("total_letters {value:?}")))?);
        }
        _ => {}
    }
    Ok(())
}

fn resolve_alphabet(meta: &Meta) -> Result<Option<AlphabetSpec>, CorpusError> {
    let name = meta.alphabet.as_deref();
    let spec = match (&meta.letters, name) {
        (Some(letters), _) => Some(AlphabetSpec::from_letters(
            name.unwrap_or("custom"),
            letters,
            meta.fold.unwrap_or_default(),
        )?),
        (None, Some(n)) => match AlphabetSpec::preset(n) {
            Some(p) => Some(p),
            None => match meta.omega {
                Some(omega) => Some(AlphabetSpec::from_omega(n, omega)?),
                None => return Err(CorpusError::UnknownAlphabet(n.to_string())),
            },
        },
        (None, None) => match meta.omega {
            Some(omega) => Some(AlphabetSpec::from_omega("custom", omega)?),
            None => None,
        },
    };
    if let (Some(spec), Some(omega)) = (&spec, meta.omega) {
        if spec.omega() != omega {
            return Err(CorpusError::InvalidAlphabet(format!(
                "alphabet {} has {} letters but omega={omega}",
                spec.name(),
                spec.omega()
            )));
        }
    }
    Ok(spec)
}

/// Parses a distribution file body.
pub fn parse_distribution(text: &str) -> Result<LengthDistribution, CorpusError> {
    let mut meta = Meta::default();
    let mut header_seen = false;
    let mut states: Vec<LengthState> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let row = raw.trim_end_matches('\r');
        if let Some(body) = row.strip_prefix('#') {
            parse_meta(&mut meta, body.trim(), line)?;
            continue;
        }
        if row.trim().is_empty() {
            continue;
        }
        if !header_seen {
            if row.trim() != HEADER {
                return Err(CorpusError::MissingHeader { line });
            }
            header_seen = true;
            continue;
        }

        let malformed = |reason: &str| CorpusError::MalformedRow {
            line,
            reason: reason.to_string(),
        };
        let mut fields = row.split('\t');
        let (Some(l), Some(n), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(malformed("expected exactly two tab-separated fields"));
        };
        let length: u32 = l
            .trim()
            .parse()
            .map_err(|_| malformed("length is not a positive integer"))?;
        let count: i64 = n.trim().parse().map_err(|_| malformed("count is not an integer"))?;
        if count < 0 {
            return Err(CorpusError::NegativeCount { line });
        }
        if length == 0 {
            return Err(CorpusError::ZeroLengthAt { line });
        }
        if states.last().is_some_and(|s| s.length >= length) {
            return Err(CorpusError::NonIncreasingLength { line });
        }
        states.push(LengthState::new(length, count as u64));
    }
    if !header_seen {
        return Err(CorpusError::MissingHeader {
            line: text.lines().count() + 1,
        });
    }

    let mut d = LengthDistribution::new(states)?;
    d.check_totals(meta.total_distinct, meta.total_letters)?;
    if let Some(alphabet) = resolve_alphabet(&meta)? {
        d = d.with_alphabet(alphabet);
    }
    if let Some(label) = meta.source_label {
        d = d.with_label(label);
    }
    Ok(d)
}

/// Serializes a distribution; [`parse_distribution`] reads it back unchanged.
pub fn render_distribution(d: &LengthDistribution) -> String {
    let mut out = String::new();
    if !d.source_label().is_empty() {
        out.push_str(&format!("# source_label={}\n", one_line(d.source_label())));
    }
    if let Some(a) = d.alphabet() {
        out.push_str(&format!("# alphabet={}\n", one_line(a.name())));
        out.push_str(&format!("# omega={}\n", a.omega()));
        if !a.is_preset() {
            if let Some(letters) = a.letters() {
                out.push_str(&format!("# letters={}\n", letters.iter().collect::<String>()));
                out.push_str(&format!("# fold={}\n", a.fold().as_str()));
            }
        }
    }
    out.push_str(&format!("# total_distinct={}\n", d.total_distinct()));
    out.push_str(&format!("# total_letters={}\n", d.total_letters()));
    out.push_str(HEADER);
    out.push('\n');
    for s in d.states() {
        out.push_str(&format!("{}\t{}\n", s.length, s.count));
    }
    out
}

fn one_line(s: &str) -> String {
    s.replace(['\n', '\r'], " ").trim().to_string()
}

pub fn load_distribution(path: impl AsRef<Path>) -> Result<LengthDistribution, CorpusError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_distribution(&text)
}

pub fn save_distribution(d: &LengthDistribution, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let path = path.as_ref();
    std::fs::write(path, render_distribution(d)).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_count_names_its_line() {
        let err = parse_distribution("length\tcount\n1\t1\n2\t-2\n").unwrap_err();
        assert_eq!(err.to_string(), "negative count at line 3");
    }

    #[test]
    fn distinct_errors_for_each_defect() {
        assert!(matches!(
            parse_distribution("1\t2\n"),
            Err(CorpusError::MissingHeader { line: 1 })
        ));
        assert!(matches!(
            parse_distribution("length\tcount\n1\tx\n"),
            Err(CorpusError::MalformedRow { line: 2, .. })
        ));
        assert!(matches!(
            parse_distribution("length\tcount\n1\t2\t3\n"),
            Err(CorpusError::MalformedRow { line: 2, .. })
        ));
        assert!(matches!(
            parse_distribution("length\tcount\n2\t1\n2\t1\n"),
            Err(CorpusError::NonIncreasingLength { line: 3 })
        ));
        assert!(matches!(
            parse_distribution("length\tcount\n0\t1\n"),
            Err(CorpusError::ZeroLengthAt { line: 2 })
        ));
        assert!(matches!(
            parse_distribution("# total_distinct=5\nlength\tcount\n1\t1\n"),
            Err(CorpusError::TotalMismatch { .. })
        ));
        assert!(matches!(
            parse_distribution("# alphabet=xx99\nlength\tcount\n1\t1\n"),
            Err(CorpusError::UnknownAlphabet(_))
        ));
        assert!(parse_distribution("# alphabet=en26\n# omega=29\nlength\tcount\n").is_err());
    }

    #[test]
    fn metadata_is_optional() {
        let d = parse_distribution("length\tcount\n3\t5\n").unwrap();
        assert!(d.alphabet().is_none());
        assert_eq!(d.source_label(), "");
        assert_eq!(d.total_letters(), 15);
    }

    #[test]
    fn omega_only_metadata() {
        let d = parse_distribution("# omega=31\nlength\tcount\n3\t5\n").unwrap();
        assert_eq!(d.omega(), Some(31));
    }

    #[test]
    fn custom_letters_round_trip() {
        let a = AlphabetSpec::from_letters("abc3", "abc", CaseFold::Turkic).unwrap();
        let d = LengthDistribution::from_pairs(&[(1, 3), (2, 9)])
            .unwrap()
            .with_alphabet(a)
            .with_label("toy");
        assert_eq!(parse_distribution(&render_distribution(&d)).unwrap(), d);
    }
}
