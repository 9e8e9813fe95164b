//! Bundled reference distributions.

use crate::corpus::{parse_distribution, LengthDistribution};

pub const BROWN_TSV: &str = include_str!("../data/brown.tsv");
pub const METU_TSV: &str = include_str!("../data/metu.tsv");

/// Brown corpus (English, ω = 26), 22 length states.
pub fn brown() -> LengthDistribution {
    parse_distribution(BROWN_TSV).expect("bundled brown.tsv is valid")
}

/// METU corpus (Turkish, ω = 29), 25 length states.
pub fn metu() -> LengthDistribution {
    parse_distribution(METU_TSV).expect("bundled metu.tsv is valid")
}

/// Resolves `brown` / `metu` to a bundled dataset.
pub fn by_name(name: &str) -> Option<LengthDistribution> {
    match name {
        "brown" => Some(brown()),
        "metu" => Some(metu()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::LengthState;

    #[test]
    fn brown_matches_transcription() {
        let d = brown();
        assert_eq!(d.len(), 22);
        assert_eq!(d.omega(), Some(26));
        assert!(d.states().contains(&LengthState::new(7, 6508)));
        assert!(d.states().contains(&LengthState::new(8, 6059)));
        assert!(d.states().contains(&LengthState::new(9, 5099)));
        assert_eq!(d.total_distinct(), 40235);
    }

    #[test]
    fn metu_matches_transcription() {
        let d = metu();
        assert_eq!(d.len(), 25);
        assert_eq!(d.omega(), Some(29));
        assert!(d.states().contains(&LengthState::new(9, 23488)));
        assert_eq!(d.total_distinct(), 173389);
    }
}
