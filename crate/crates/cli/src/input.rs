use std::path::Path;

use anyhow::{Context, Result};
use hnnconj::endo::{EndoError, Endomorphism};
use hnnconj::hnn::{parse_endomorphism_file, HnnPresentation, HnnWordError, PresentationError};
use hnnconj::words::WordError;

pub const EXIT_USAGE: u8 = 3;
pub const EXIT_IO: u8 = 4;
pub const EXIT_DUPLICATE: u8 = 5;
pub const EXIT_UNKNOWN_LETTER: u8 = 6;
pub const EXIT_NOT_INJECTIVE: u8 = 7;
pub const EXIT_MALFORMED: u8 = 8;
pub const EXIT_BOUNDS: u8 = 9;

/// Marks an error raised while validating bounds.
#[derive(Debug)]
pub struct BoundsError(pub String);

impl std::fmt::Display for BoundsError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid bounds: {}", self.0)
    }
}

impl std::error::Error for BoundsError {}

/// Exit code for an error chain.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<PresentationError>() {
            return match e {
                PresentationError::DuplicateGenerator { .. } => EXIT_DUPLICATE,
                PresentationError::UnknownLetter { .. } => EXIT_UNKNOWN_LETTER,
                PresentationError::NotInjective => EXIT_NOT_INJECTIVE,
                _ => EXIT_MALFORMED,
            };
        }
        if cause.is::<HnnWordError>() || cause.is::<WordError>() {
            return EXIT_UNKNOWN_LETTER;
        }
        if let Some(e) = cause.downcast_ref::<EndoError>() {
            return match e {
                EndoError::Word(_) => EXIT_UNKNOWN_LETTER,
                _ => EXIT_MALFORMED,
            };
        }
        if cause.is::<std::io::Error>() {
            return EXIT_IO;
        }
        if cause.is::<BoundsError>() {
            return EXIT_BOUNDS;
        }
    }
    EXIT_USAGE
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Presentation file: `rank N` and one `GEN -> WORD` line per generator.
pub fn load_presentation(path: &Path) -> Result<HnnPresentation> {
    let text = read(path)?;
    HnnPresentation::parse(&text).with_context(|| format!("in presentation {}", path.display()))
}

/// Endomorphism file, with or without a leading `rank N` line; without one
/// the rank is the number of map lines.
pub fn parse_endo_text(text: &str) -> Result<Endomorphism, PresentationError> {
    let content: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    if content.first().is_some_and(|l| l.starts_with("rank")) {
        parse_endomorphism_file(text)
    } else {
        parse_endomorphism_file(&format!("rank {}\n{}", content.len().max(1), text))
    }
}

pub fn load_endomorphism(path: &Path) -> Result<Endomorphism> {
    let text = read(path)?;
    parse_endo_text(&text).with_context(|| format!("in endomorphism {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rankless_files() {
        let phi = parse_endo_text("a -> b\nb -> aa\n").unwrap();
        assert_eq!(phi.rank(), 2);
        let phi = parse_endo_text("rank 2\na -> b\nb -> a\n").unwrap();
        assert!(phi.is_surjective());
        assert!(matches!(
            parse_endo_text("a -> b\na -> a\n"),
            Err(PresentationError::DuplicateGenerator { .. })
        ));
    }

    #[test]
    fn error_codes_are_distinct() {
        let dup = anyhow::Error::new(PresentationError::DuplicateGenerator {
            line: 2,
            name: "a".into(),
        });
        let unk = anyhow::Error::new(PresentationError::UnknownLetter {
            line: 2,
            message: String::new(),
        });
        let inj = anyhow::Error::new(PresentationError::NotInjective);
        let codes = [exit_code(&dup), exit_code(&unk), exit_code(&inj)];
        assert_eq!(codes, [EXIT_DUPLICATE, EXIT_UNKNOWN_LETTER, EXIT_NOT_INJECTIVE]);
        assert!(codes.iter().all(|&c| c >= 3));
    }
}
