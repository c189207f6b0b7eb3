//! Codon-frequency obfuscation: redistribute counts within synonymous
//! groups, regenerate a sequence from the perturbed table, and retry until
//! a similarity threshold is met.
//!
//! Redistribution never moves counts across amino-acid groups, so per-group
//! totals, the overall codon total, the tail, and the sequence length are
//! all preserved. Regeneration has two modes: `synonymous` swaps codons in
//! place (translation is preserved exactly), `permuted` emits the perturbed
//! table's codon multiset in random order.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::align::{global_align, AlignError, ScoringScheme};
use crate::codon::{translate, Codon, CodonError, CodonTable, GeneticCode};
use crate::seeds;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObfuscateError {
    #[error("sequence too short to obfuscate ({len} bases, need at least 3)")]
    SequenceTooShort { len: usize },
    #[error("invalid obfuscation config: {0}")]
    InvalidConfig(String),
    #[error("table source length {table} does not match sequence length {sequence}")]
    LengthMismatch { table: usize, sequence: usize },
    #[error("group total mismatch for {symbol:?}: sequence has {in_sequence}, table has {in_table}")]
    GroupTotalMismatch {
        symbol: char,
        in_sequence: u64,
        in_table: u64,
    },
    #[error(transparent)]
    Codon(#[from] CodonError),
    #[error(transparent)]
    Align(#[from] AlignError),
}

/// How counts are reassigned within each synonymous group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RedistributionMode {
    /// Split each group total as evenly as possible.
    Balanced,
    /// Draw a uniformly random composition of each group total.
    Randomized,
}

/// How the output sequence is assembled from the perturbed table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegenerationMode {
    /// Replace each original codon in place with a same-group codon;
    /// preserves the translated protein exactly.
    Synonymous,
    /// Emit the table's codon multiset in seeded random order.
    Permuted,
}

/// Which sequences the similarity check aligns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimilarityLevel {
    Dna,
    Protein,
}

/// Settings for [`obfuscate_with_threshold`].
#[derive(Debug, Clone, PartialEq)]
pub struct ObfuscationConfig {
    pub redistribution: RedistributionMode,
    pub regeneration: RegenerationMode,
    /// Accept candidates with at least this percent identity.
    pub similarity_threshold: f64,
    /// Optional privacy cap: reject candidates above this percent identity.
    pub similarity_ceiling: Option<f64>,
    pub max_iterations: u32,
    pub seed: u64,
    pub similarity_level: SimilarityLevel,
}

impl ObfuscationConfig {
    /// Balanced + synonymous with a 50% DNA-level threshold, no ceiling,
    /// and up to 100 iterations.
    pub fn new(seed: u64) -> Self {
        ObfuscationConfig {
            redistribution: RedistributionMode::Balanced,
            regeneration: RegenerationMode::Synonymous,
            similarity_threshold: 50.0,
            similarity_ceiling: None,
            max_iterations: 100,
            seed,
            similarity_level: SimilarityLevel::Dna,
        }
    }

    fn validate(&self) -> Result<(), ObfuscateError> {
        let pct = |name: &str, v: f64| {
            if !(0.0..=100.0).contains(&v) {
                Err(ObfuscateError::InvalidConfig(format!(
                    "{name} {v} outside [0, 100]"
                )))
            } else {
                Ok(())
            }
        };
        pct("similarity_threshold", self.similarity_threshold)?;
        if let Some(ceiling) = self.similarity_ceiling {
            pct("similarity_ceiling", ceiling)?;
            if self.similarity_threshold > ceiling {
                return Err(ObfuscateError::InvalidConfig(format!(
                    "threshold {} exceeds ceiling {}",
                    self.similarity_threshold, ceiling
                )));
            }
        }
        if self.max_iterations < 1 {
            return Err(ObfuscateError::InvalidConfig(
                "max_iterations must be at least 1".to_string(),
            ));
        }
        Ok(())
    }
}

/// Result of the threshold loop.
#[derive(Debug, Clone, PartialEq)]
pub struct ObfuscationOutcome {
    pub sequence: String,
    /// Perturbed table; equals the frequency table of `sequence`.
    pub table: CodonTable,
    pub similarity_pct: f64,
    pub iterations_used: u32,
    pub threshold_met: bool,
}

/// Seed for one record's obfuscation stream when processing a batch.
pub fn record_seed(master_seed: u64, record_id: &str) -> u64 {
    seeds::subseed(master_seed, &format!("record/{record_id}"))
}

// ---------------------------------------------------------------------------
// Redistribution
// ---------------------------------------------------------------------------

/// Even split: each codon in a group of size `k` with total `T` gets
/// `floor(T/k)`; the `T mod k` leftover counts go to the codons with the
/// largest original counts (ties lexicographic).
pub fn redistribute_balanced(table: &CodonTable, code: &GeneticCode) -> CodonTable {
    let mut counts = [0u64; 64];
    for group in code.groups() {
        let total: u64 = group.codons.iter().map(|&c| table.count(c)).sum();
        let k = group.codons.len() as u64;
        let base = total / k;
        let remainder = (total % k) as usize;
        let mut by_original = group.codons.clone();
        by_original.sort_by_key(|&c| (std::cmp::Reverse(table.count(c)), c));
        for (rank, codon) in by_original.into_iter().enumerate() {
            counts[codon.index()] = base + u64::from(rank < remainder);
        }
    }
    CodonTable::from_parts(counts, table.tail(), table.source_length())
        .expect("group totals preserved")
}

/// Random split: each group total is replaced by a uniformly random
/// composition into its codons (stars and bars), assigned in lexicographic
/// codon order. Deterministic given the generator state.
pub fn redistribute_randomized(
    table: &CodonTable,
    code: &GeneticCode,
    rng: &mut impl Rng,
) -> CodonTable {
    let mut counts = [0u64; 64];
    for group in code.groups() {
        let total: u64 = group.codons.iter().map(|&c| table.count(c)).sum();
        let parts = random_composition(total, group.codons.len(), rng);
        for (&codon, part) in group.codons.iter().zip(parts) {
            counts[codon.index()] = part;
        }
    }
    CodonTable::from_parts(counts, table.tail(), table.source_length())
        .expect("group totals preserved")
}

/// Uniform composition of `total` into `k` non-negative parts: choose
/// `k - 1` cut positions among `total + k - 1` slots.
fn random_composition(total: u64, k: usize, rng: &mut impl Rng) -> Vec<u64> {
    debug_assert!(k >= 1);
    let n_slots = total as usize + k - 1;
    let mut cuts = rand::seq::index::sample(rng, n_slots, k - 1).into_vec();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(k);
    let mut prev: Option<usize> = None;
    for &cut in &cuts {
        parts.push(match prev {
            None => cut as u64,
            Some(p) => (cut - p - 1) as u64,
        });
        prev = Some(cut);
    }
    parts.push(match prev {
        None => total,
        Some(p) => (n_slots - 1 - p) as u64,
    });
    parts
}

// ---------------------------------------------------------------------------
// Regeneration
// ---------------------------------------------------------------------------

fn check_regeneration_preconditions(
    original: &str,
    table: &CodonTable,
    code: &GeneticCode,
) -> Result<CodonTable, ObfuscateError> {
    let original_table = CodonTable::from_sequence(original)?;
    if table.source_length() != original.len() {
        return Err(ObfuscateError::LengthMismatch {
            table: table.source_length(),
            sequence: original.len(),
        });
    }
    let want = original_table.amino_acid_totals(code);
    let have = table.amino_acid_totals(code);
    for (symbol, &in_sequence) in &want {
        let in_table = have[symbol];
        if in_sequence != in_table {
            return Err(ObfuscateError::GroupTotalMismatch {
                symbol: *symbol,
                in_sequence,
                in_table,
            });
        }
    }
    Ok(original_table)
}

/// Build a sequence whose frequency table equals `table`.
///
/// `table` must have the same per-group totals and source length as
/// `original` (redistribution output always does). The table's tail is
/// appended verbatim, so the output length equals the original length.
pub fn regenerate_sequence(
    original: &str,
    table: &CodonTable,
    mode: RegenerationMode,
    code: &GeneticCode,
    rng: &mut impl Rng,
) -> Result<String, ObfuscateError> {
    check_regeneration_preconditions(original, table, code)?;
    let mut out = String::with_capacity(original.len());
    match mode {
        RegenerationMode::Synonymous => {
            let mut remaining = *table.counts();
            for chunk in original.as_bytes().chunks_exact(3) {
                let symbol = code.amino_acid(Codon::from_bytes(chunk).unwrap());
                let chosen = code
                    .codons_for(symbol)
                    .into_iter()
                    .filter(|&c| remaining[c.index()] > 0)
                    .max_by_key(|&c| (remaining[c.index()], std::cmp::Reverse(c)))
                    .expect("remaining group budget equals remaining residues");
                remaining[chosen.index()] -= 1;
                out.push_str(&chosen.to_string());
            }
        }
        RegenerationMode::Permuted => {
            let mut pool: Vec<Codon> = Codon::all()
                .flat_map(|c| std::iter::repeat(c).take(table.count(c) as usize))
                .collect();
            pool.shuffle(rng);
            for codon in pool {
                out.push_str(&codon.to_string());
            }
        }
    }
    out.push_str(table.tail());
    Ok(out)
}

// ---------------------------------------------------------------------------
// Threshold loop
// ---------------------------------------------------------------------------

fn similarity(
    original: &str,
    candidate: &str,
    level: SimilarityLevel,
    code: &GeneticCode,
) -> Result<f64, ObfuscateError> {
    let scoring = ScoringScheme::default();
    let pct = match level {
        SimilarityLevel::Dna => global_align(original, candidate, &scoring)?.identity_pct(),
        SimilarityLevel::Protein => {
            let a = translate(original, code)?;
            let b = translate(candidate, code)?;
            global_align(a.as_str(), b.as_str(), &scoring)?.identity_pct()
        }
    };
    Ok(pct)
}

/// Perturb, regenerate, and score until a candidate lands inside
/// `[threshold, ceiling]`, retrying up to `max_iterations` times.
///
/// Balanced redistribution is deterministic, so it is only attempted on the
/// first iteration; retries redistribute randomly. Every iteration draws
/// from its own stream derived from `(seed, iteration)`, so outcomes do not
/// depend on scheduling. On exhaustion the candidate closest to the feasible
/// band is returned with `threshold_met == false` and `iterations_used ==
/// max_iterations`.
pub fn obfuscate_with_threshold(
    original: &str,
    config: &ObfuscationConfig,
    code: &GeneticCode,
) -> Result<ObfuscationOutcome, ObfuscateError> {
    config.validate()?;
    if original.len() < 3 {
        return Err(ObfuscateError::SequenceTooShort {
            len: original.len(),
        });
    }
    let base_table = CodonTable::from_sequence(original)?;

    let mut best: Option<(f64, ObfuscationOutcome)> = None;
    for iteration in 1..=config.max_iterations {
        let mut rng = seeds::rng_for(config.seed, &format!("iteration/{iteration}"));
        let perturbed = match config.redistribution {
            RedistributionMode::Balanced if iteration == 1 => {
                redistribute_balanced(&base_table, code)
            }
            _ => redistribute_randomized(&base_table, code, &mut rng),
        };
        let candidate =
            regenerate_sequence(original, &perturbed, config.regeneration, code, &mut rng)?;
        let pct = similarity(original, &candidate, config.similarity_level, code)?;

        let meets = pct >= config.similarity_threshold
            && config.similarity_ceiling.is_none_or(|ceiling| pct <= ceiling);
        let outcome = ObfuscationOutcome {
            sequence: candidate,
            table: perturbed,
            similarity_pct: pct,
            iterations_used: iteration,
            threshold_met: meets,
        };
        if meets {
            return Ok(outcome);
        }
        let distance = if pct < config.similarity_threshold {
            config.similarity_threshold - pct
        } else {
            pct - config.similarity_ceiling.expect("above threshold implies ceiling miss")
        };
        if best.as_ref().is_none_or(|(d, _)| distance < *d) {
            best = Some((distance, outcome));
        }
    }
    let (_, mut outcome) = best.expect("max_iterations >= 1 guarantees a candidate");
    outcome.iterations_used = config.max_iterations;
    Ok(outcome)
}
