//! FASTA parsing and serialization.
//!
//! Sequences are normalized on read: lowercase is uppercased and whitespace
//! inside sequence lines is dropped. DNA input is validated against the strict
//! `{A,C,G,T}` alphabet; in lenient mode offending characters are dropped and
//! counted per record instead of raising an error. Protein payloads pass
//! through the same reader and writer without alphabet checks.

use thiserror::Error;

/// Default sequence line width used by [`write_fasta`].
pub const DEFAULT_LINE_WIDTH: usize = 60;

/// One FASTA record: `>id description` header plus a sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastaRecord {
    /// Text after `>` up to the first whitespace. Never empty.
    pub id: String,
    /// Remainder of the header line, possibly empty.
    pub description: String,
    /// Sequence with line breaks and whitespace removed, uppercased.
    pub sequence: String,
}

impl FastaRecord {
    pub fn new(id: impl Into<String>, sequence: impl Into<String>) -> Self {
        FastaRecord {
            id: id.into(),
            description: String::new(),
            sequence: sequence.into(),
        }
    }
}

/// What the sequence payload is, which decides alphabet handling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    /// Strict `{A,C,G,T}` alphabet after normalization.
    Dna,
    /// No alphabet checks; residues are uppercased verbatim.
    Protein,
}

/// How DNA alphabet violations are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseMode {
    /// Any character outside `{A,C,G,T, whitespace}` is an error.
    Strict,
    /// Characters outside the alphabet are dropped and counted per record.
    Lenient,
}

/// Parsed records plus, per record, how many characters lenient mode dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseOutcome {
    pub records: Vec<FastaRecord>,
    /// Parallel to `records`; all zeros in strict mode.
    pub dropped: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FastaError {
    #[error("line {line}: header has an empty id")]
    EmptyId { line: usize },
    #[error("line {line}: sequence data before any '>' header")]
    SequenceBeforeHeader { line: usize },
    #[error("line {line}: invalid character {ch:?} in DNA sequence")]
    InvalidCharacter { line: usize, ch: char },
}

fn is_dna_base(c: char) -> bool {
    matches!(c, 'A' | 'C' | 'G' | 'T')
}

/// Parse FASTA text into records.
///
/// Headers start with `>`; the id runs to the first whitespace and the rest of
/// the line (after one separator character) is the description. Sequence lines
/// are concatenated. `mode` only matters for [`SequenceKind::Dna`].
pub fn parse_fasta(
    text: &str,
    kind: SequenceKind,
    mode: ParseMode,
) -> Result<ParseOutcome, FastaError> {
    let mut records = Vec::new();
    let mut dropped = Vec::new();
    let mut current: Option<FastaRecord> = None;
    let mut current_dropped = 0usize;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if let Some(header) = line.strip_prefix('>') {
            if let Some(rec) = current.take() {
                records.push(rec);
                dropped.push(current_dropped);
                current_dropped = 0;
            }
            let id_end = header
                .find(char::is_whitespace)
                .unwrap_or(header.len());
            let id = &header[..id_end];
            if id.is_empty() {
                return Err(FastaError::EmptyId { line: line_no });
            }
            // Skip exactly one separator character so descriptions round-trip.
            let description = header[id_end..]
                .strip_prefix(char::is_whitespace)
                .unwrap_or("")
                .to_string();
            current = Some(FastaRecord {
                id: id.to_string(),
                description,
                sequence: String::new(),
            });
        } else {
            let rec = match current.as_mut() {
                Some(rec) => rec,
                None => {
                    if line.trim().is_empty() {
                        continue;
                    }
                    return Err(FastaError::SequenceBeforeHeader { line: line_no });
                }
            };
            for ch in line.chars() {
                if ch.is_whitespace() {
                    continue;
                }
                let up = ch.to_ascii_uppercase();
                match kind {
                    SequenceKind::Protein => rec.sequence.push(up),
                    SequenceKind::Dna if is_dna_base(up) => rec.sequence.push(up),
                    SequenceKind::Dna => match mode {
                        ParseMode::Strict => {
                            return Err(FastaError::InvalidCharacter { line: line_no, ch })
                        }
                        ParseMode::Lenient => current_dropped += 1,
                    },
                }
            }
        }
    }
    if let Some(rec) = current.take() {
        records.push(rec);
        dropped.push(current_dropped);
    }
    Ok(ParseOutcome { records, dropped })
}

/// Parse DNA FASTA, discarding lenient-mode drop counts.
pub fn parse_dna(text: &str, mode: ParseMode) -> Result<Vec<FastaRecord>, FastaError> {
    parse_fasta(text, SequenceKind::Dna, mode).map(|o| o.records)
}

/// Serialize records to FASTA text, wrapping sequences at `line_width`.
///
/// The output ends with a newline and parses back to the same records.
///
/// # Panics
/// Panics if `line_width` is zero.
pub fn write_fasta(records: &[FastaRecord], line_width: usize) -> String {
    assert!(line_width >= 1, "line_width must be at least 1");
    let mut out = String::new();
    for rec in records {
        out.push('>');
        out.push_str(&rec.id);
        if !rec.description.is_empty() {
            out.push(' ');
            out.push_str(&rec.description);
        }
        out.push('\n');
        let bytes = rec.sequence.as_bytes();
        for chunk in bytes.chunks(line_width) {
            out.push_str(std::str::from_utf8(chunk).expect("sequence is ASCII"));
            out.push('\n');
        }
    }
    out
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn arb_record() -> impl Strategy<Value = FastaRecord> {
        let id = "[A-Za-z0-9_.]{1,12}";
        let desc = proptest::option::of("[A-Za-z0-9 _.,-]{1,30}")
            .prop_map(|d| d.unwrap_or_default());
        let seq = proptest::collection::vec(
            prop_oneof![Just('A'), Just('C'), Just('G'), Just('T')],
            0..200,
        )
        .prop_map(|v| v.into_iter().collect::<String>());
        (id, desc, seq).prop_map(|(id, description, sequence)| FastaRecord {
            id,
            description: description.trim().to_string(),
            sequence,
        })
    }

    proptest! {
        #[test]
        fn round_trip(records in proptest::collection::vec(arb_record(), 0..8),
                      width in 1usize..80) {
            let text = write_fasta(&records, width);
            let parsed = parse_fasta(&text, SequenceKind::Dna, ParseMode::Strict).unwrap();
            prop_assert_eq!(parsed.records, records);
        }

        #[test]
        fn lenient_never_grows(text in "[ACGTNRYacgt \\->#0-9\n]{0,300}") {
            if let Ok(out) = parse_fasta(&text, SequenceKind::Dna, ParseMode::Lenient) {
                let raw_len = text.len();
                for rec in &out.records {
                    prop_assert!(rec.sequence.len() <= raw_len);
                    prop_assert!(rec.sequence.chars().all(|c| matches!(c, 'A'|'C'|'G'|'T')));
                }
            }
        }
    }
}
