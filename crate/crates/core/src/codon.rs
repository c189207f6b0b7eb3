//! Genetic code, codon frequency tables, translation, and reverse translation.
//!
//! Sequences are read in frame 0 as non-overlapping triplets; the 0–2 bases
//! left over form the *tail*, which is carried verbatim so that counting and
//! regeneration preserve the exact source length (`3 * total codons + tail
//! length == source length`). Stop codons are table rows like any amino acid
//! and translation renders them as `'*'` without halting.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// The 21 residue symbols: 20 amino acids plus `'*'` for stop.
pub const AMINO_ACID_SYMBOLS: [char; 21] = [
    '*', 'A', 'C', 'D', 'E', 'F', 'G', 'H', 'I', 'K', 'L', 'M', 'N', 'P', 'Q', 'R', 'S', 'T',
    'V', 'W', 'Y',
];

const BASES: [u8; 4] = [b'A', b'C', b'G', b'T'];

fn base_index(b: u8) -> Option<usize> {
    match b {
        b'A' => Some(0),
        b'C' => Some(1),
        b'G' => Some(2),
        b'T' => Some(3),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodonError {
    #[error("invalid nucleotide {ch:?} at position {pos}")]
    InvalidNucleotide { ch: char, pos: usize },
    #[error("invalid amino acid symbol {ch:?} at position {pos}")]
    InvalidAminoAcid { ch: char, pos: usize },
    #[error("not a codon: {text:?}")]
    InvalidCodon { text: String },
    #[error("invalid tail {tail:?}: must be 0-2 bases over A/C/G/T")]
    InvalidTail { tail: String },
    #[error(
        "count/tail/length mismatch: 3*{codons} codons + {tail_len} tail bases != {source_length}"
    )]
    LengthInvariant {
        codons: u64,
        tail_len: usize,
        source_length: usize,
    },
    #[error("codon budget mismatch for {symbol:?}: protein has {in_protein}, table provides {in_table}")]
    BudgetMismatch {
        symbol: char,
        in_protein: u64,
        in_table: u64,
    },
    #[error("codon table line {line}: {msg}")]
    Tsv { line: usize, msg: String },
}

// ---------------------------------------------------------------------------
// Codon
// ---------------------------------------------------------------------------

/// One of the 64 codons, stored as an index in `[0, 64)`.
///
/// The index orders bases `A < C < G < T`, so index order equals
/// lexicographic order of the codon strings (`AAA`, `AAC`, ..., `TTT`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Codon(u8);

impl Codon {
    pub const COUNT: usize = 64;

    /// All 64 codons in lexicographic order.
    pub fn all() -> impl Iterator<Item = Codon> {
        (0..Self::COUNT as u8).map(Codon)
    }

    pub fn from_index(index: usize) -> Option<Codon> {
        (index < Self::COUNT).then(|| Codon(index as u8))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Codon, CodonError> {
        if bytes.len() != 3 {
            return Err(CodonError::InvalidCodon {
                text: String::from_utf8_lossy(bytes).into_owned(),
            });
        }
        let mut idx = 0usize;
        for &b in bytes {
            idx = idx * 4
                + base_index(b).ok_or_else(|| CodonError::InvalidCodon {
                    text: String::from_utf8_lossy(bytes).into_owned(),
                })?;
        }
        Ok(Codon(idx as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn bases(self) -> [u8; 3] {
        let i = self.0 as usize;
        [BASES[i >> 4], BASES[(i >> 2) & 3], BASES[i & 3]]
    }
}

impl fmt::Display for Codon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.bases();
        write!(f, "{}", std::str::from_utf8(&b).unwrap())
    }
}

impl std::str::FromStr for Codon {
    type Err = CodonError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Codon::from_bytes(s.as_bytes())
    }
}

// ---------------------------------------------------------------------------
// Genetic code
// ---------------------------------------------------------------------------

// Amino acid per codon index (AAA, AAC, AAG, AAT, ACA, ...).
const STANDARD_TABLE: [u8; 64] = [
    b'K', b'N', b'K', b'N', b'T', b'T', b'T', b'T', b'R', b'S', b'R', b'S', //
    b'I', b'I', b'M', b'I', b'Q', b'H', b'Q', b'H', b'P', b'P', b'P', b'P', //
    b'R', b'R', b'R', b'R', b'L', b'L', b'L', b'L', b'E', b'D', b'E', b'D', //
    b'A', b'A', b'A', b'A', b'G', b'G', b'G', b'G', b'V', b'V', b'V', b'V', //
    b'*', b'Y', b'*', b'Y', b'S', b'S', b'S', b'S', b'*', b'C', b'W', b'C', //
    b'L', b'F', b'L', b'F',
];

static STANDARD_CODE: GeneticCode = GeneticCode {
    table: STANDARD_TABLE,
};

/// A codon-to-amino-acid mapping covering all 64 codons.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneticCode {
    table: [u8; 64],
}

impl GeneticCode {
    /// The standard nuclear genetic code.
    pub fn standard() -> &'static GeneticCode {
        &STANDARD_CODE
    }

    /// Amino acid symbol for a codon; `'*'` for stop codons.
    pub fn amino_acid(&self, codon: Codon) -> char {
        self.table[codon.index()] as char
    }

    pub fn is_stop(&self, codon: Codon) -> bool {
        self.table[codon.index()] == b'*'
    }

    /// Synonymous-codon groups, sorted by symbol, codons lexicographic.
    pub fn groups(&self) -> Vec<AminoAcidGroup> {
        let mut by_symbol: BTreeMap<char, Vec<Codon>> = BTreeMap::new();
        for codon in Codon::all() {
            by_symbol.entry(self.amino_acid(codon)).or_default().push(codon);
        }
        by_symbol
            .into_iter()
            .map(|(symbol, codons)| AminoAcidGroup { symbol, codons })
            .collect()
    }

    /// Synonymous codons of one symbol, lexicographic; empty for unknown symbols.
    pub fn codons_for(&self, symbol: char) -> Vec<Codon> {
        Codon::all().filter(|&c| self.amino_acid(c) == symbol).collect()
    }
}

/// One amino acid (or stop) with its synonymous codons.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AminoAcidGroup {
    pub symbol: char,
    /// Lexicographically ordered.
    pub codons: Vec<Codon>,
}

// ---------------------------------------------------------------------------
// Codon frequency table
// ---------------------------------------------------------------------------

/// Occurrence counts for all 64 codons over a sequence read in frame 0,
/// plus the 0–2 trailing bases that do not form a codon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodonTable {
    counts: [u64; 64],
    tail: String,
    source_length: usize,
}

impl CodonTable {
    /// Count non-overlapping frame-0 codons of `seq`.
    pub fn from_sequence(seq: &str) -> Result<CodonTable, CodonError> {
        validate_dna(seq)?;
        let bytes = seq.as_bytes();
        let mut counts = [0u64; 64];
        let chunks = bytes.chunks_exact(3);
        let tail = std::str::from_utf8(chunks.remainder()).unwrap().to_string();
        for chunk in chunks {
            counts[Codon::from_bytes(chunk).unwrap().index()] += 1;
        }
        Ok(CodonTable {
            counts,
            tail,
            source_length: seq.len(),
        })
    }

    /// Assemble a table from raw parts, checking the length invariant.
    pub fn from_parts(
        counts: [u64; 64],
        tail: impl Into<String>,
        source_length: usize,
    ) -> Result<CodonTable, CodonError> {
        let tail = tail.into();
        if tail.len() > 2 || validate_dna(&tail).is_err() {
            return Err(CodonError::InvalidTail { tail });
        }
        let codons: u64 = counts.iter().sum();
        if (codons * 3) as usize + tail.len() != source_length {
            return Err(CodonError::LengthInvariant {
                codons,
                tail_len: tail.len(),
                source_length,
            });
        }
        Ok(CodonTable {
            counts,
            tail,
            source_length,
        })
    }

    pub fn count(&self, codon: Codon) -> u64 {
        self.counts[codon.index()]
    }

    pub fn counts(&self) -> &[u64; 64] {
        &self.counts
    }

    pub fn tail(&self) -> &str {
        &self.tail
    }

    pub fn source_length(&self) -> usize {
        self.source_length
    }

    /// Total number of codons counted.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Per-group sums of codon counts, one entry per residue symbol.
    pub fn amino_acid_totals(&self, code: &GeneticCode) -> BTreeMap<char, u64> {
        let mut totals: BTreeMap<char, u64> =
            AMINO_ACID_SYMBOLS.iter().map(|&s| (s, 0)).collect();
        for codon in Codon::all() {
            *totals.get_mut(&code.amino_acid(codon)).unwrap() += self.count(codon);
        }
        totals
    }

    /// Serialize as TSV: one `symbol<TAB>codon<TAB>count` row per codon,
    /// sorted by symbol then codon, then a `#tail<TAB><bases>` line.
    pub fn to_tsv(&self, code: &GeneticCode) -> String {
        let mut out = String::new();
        for group in code.groups() {
            for codon in group.codons {
                out.push_str(&format!(
                    "{}\t{}\t{}\n",
                    group.symbol,
                    codon,
                    self.count(codon)
                ));
            }
        }
        out.push_str(&format!("#tail\t{}\n", self.tail));
        out
    }

    /// Parse the TSV form produced by [`CodonTable::to_tsv`].
    ///
    /// All 64 codons must appear exactly once with the symbol the code
    /// assigns them, followed by the tail line.
    pub fn from_tsv(text: &str, code: &GeneticCode) -> Result<CodonTable, CodonError> {
        let mut counts = [0u64; 64];
        let mut seen = [false; 64];
        let mut tail: Option<String> = None;
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| CodonError::Tsv {
                line: line_no,
                msg: msg.to_string(),
            };
            if let Some(rest) = line.strip_prefix("#tail\t") {
                if tail.is_some() {
                    return Err(err("duplicate #tail line"));
                }
                tail = Some(rest.to_string());
                continue;
            }
            if tail.is_some() {
                return Err(err("row after #tail line"));
            }
            let mut fields = line.split('\t');
            let (sym, codon_text, count_text) =
                match (fields.next(), fields.next(), fields.next(), fields.next()) {
                    (Some(a), Some(b), Some(c), None) => (a, b, c),
                    _ => return Err(err("expected symbol<TAB>codon<TAB>count")),
                };
            let codon: Codon = codon_text
                .parse()
                .map_err(|_| err(&format!("bad codon {codon_text:?}")))?;
            let expected = code.amino_acid(codon).to_string();
            if sym != expected {
                return Err(err(&format!(
                    "codon {codon_text} belongs to {expected:?}, not {sym:?}"
                )));
            }
            if seen[codon.index()] {
                return Err(err(&format!("duplicate codon {codon_text}")));
            }
            seen[codon.index()] = true;
            counts[codon.index()] = count_text
                .parse()
                .map_err(|_| err(&format!("bad count {count_text:?}")))?;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(CodonError::Tsv {
                line: text.lines().count() + 1,
                msg: format!("missing codon {}", Codon::from_index(missing).unwrap()),
            });
        }
        let tail = tail.ok_or(CodonError::Tsv {
            line: text.lines().count() + 1,
            msg: "missing #tail line".to_string(),
        })?;
        let codons: u64 = counts.iter().sum();
        let source_length = (codons * 3) as usize + tail.len();
        CodonTable::from_parts(counts, tail, source_length)
    }
}

// ---------------------------------------------------------------------------
// Protein sequences and translation
// ---------------------------------------------------------------------------

/// A residue string over the 20 amino-acid symbols plus `'*'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Protein(String);

impl Protein {
    pub fn parse(text: &str) -> Result<Protein, CodonError> {
        for (pos, ch) in text.chars().enumerate() {
            if !AMINO_ACID_SYMBOLS.contains(&ch) {
                return Err(CodonError::InvalidAminoAcid { ch, pos });
            }
        }
        Ok(Protein(text.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Residue counts per symbol, zero entries included.
    pub fn census(&self) -> BTreeMap<char, u64> {
        let mut counts: BTreeMap<char, u64> =
            AMINO_ACID_SYMBOLS.iter().map(|&s| (s, 0)).collect();
        for ch in self.0.chars() {
            *counts.get_mut(&ch).unwrap() += 1;
        }
        counts
    }
}

impl fmt::Display for Protein {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Protein {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

fn validate_dna(seq: &str) -> Result<(), CodonError> {
    for (pos, ch) in seq.chars().enumerate() {
        if !matches!(ch, 'A' | 'C' | 'G' | 'T') {
            return Err(CodonError::InvalidNucleotide { ch, pos });
        }
    }
    Ok(())
}

/// Translate every full frame-0 codon; stops become `'*'` and do not halt
/// translation. Tail bases are ignored.
pub fn translate(seq: &str, code: &GeneticCode) -> Result<Protein, CodonError> {
    validate_dna(seq)?;
    let mut residues = String::with_capacity(seq.len() / 3);
    for chunk in seq.as_bytes().chunks_exact(3) {
        residues.push(code.amino_acid(Codon::from_bytes(chunk).unwrap()));
    }
    Ok(Protein(residues))
}

/// Rebuild a DNA sequence for `protein` under a codon-count budget.
///
/// Each residue consumes the synonymous codon with the largest remaining
/// count (ties broken lexicographically); the budget's tail is appended
/// verbatim. The result's frequency table equals `budget` exactly.
///
/// Errors if any symbol's budget total differs from its count in `protein`.
pub fn reverse_translate(
    protein: &Protein,
    budget: &CodonTable,
    code: &GeneticCode,
) -> Result<String, CodonError> {
    let census = protein.census();
    let totals = budget.amino_acid_totals(code);
    for &symbol in AMINO_ACID_SYMBOLS.iter() {
        let in_protein = census[&symbol];
        let in_table = totals[&symbol];
        if in_protein != in_table {
            return Err(CodonError::BudgetMismatch {
                symbol,
                in_protein,
                in_table,
            });
        }
    }

    let groups: BTreeMap<char, Vec<Codon>> = code
        .groups()
        .into_iter()
        .map(|g| (g.symbol, g.codons))
        .collect();
    let mut remaining = *budget.counts();
    let mut out = String::with_capacity(budget.source_length());
    for residue in protein.as_str().chars() {
        let candidates = &groups[&residue];
        let chosen = candidates
            .iter()
            .copied()
            .filter(|&c| remaining[c.index()] > 0)
            .max_by_key(|&c| (remaining[c.index()], std::cmp::Reverse(c)))
            .expect("group budget tracks residue count, so some codon remains");
        remaining[chosen.index()] -= 1;
        out.push_str(&chosen.to_string());
    }
    out.push_str(budget.tail());
    Ok(out)
}
