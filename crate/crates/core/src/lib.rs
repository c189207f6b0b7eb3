//! Codon-frequency obfuscation toolkit for DNA data privacy experiments.
//!
//! The crate covers a two-phase sanitization flow for tables of patient
//! records that carry DNA sequences:
//!
//! 1. **Record privacy** ([`records`]): drop PII columns, then shuffle the
//!    remaining columns independently with seeded random-key sorts.
//! 2. **Sequence obfuscation** ([`obfuscate`]): redistribute codon counts
//!    within synonymous groups, regenerate a sequence from the perturbed
//!    table, and retry until a pairwise-identity threshold is met.
//!
//! Supporting modules: [`fasta`] I/O, the [`codon`] machinery (genetic
//! code, frequency tables, translation, reverse translation), [`align`]
//! (global alignment and dot matrices), [`synth`] corpus generation,
//! [`seeds`] stream derivation, and the end-to-end [`pipeline`].
//!
//! All randomness flows through streams derived from `(master seed,
//! label)`, so every output is reproducible byte-for-byte from its inputs
//! and seed.

pub mod align;
pub mod codon;
pub mod fasta;
pub mod obfuscate;
pub mod pipeline;
pub mod records;
pub mod seeds;
pub mod synth;

pub use align::{
    dot_matrix, global_align, render_alignment_report, AlignError, AlignmentResult, DotMatrix,
    ScoringScheme,
};
pub use codon::{
    reverse_translate, translate, AminoAcidGroup, Codon, CodonError, CodonTable, GeneticCode,
    Protein,
};
pub use fasta::{
    parse_fasta, write_fasta, FastaError, FastaRecord, ParseMode, ParseOutcome, SequenceKind,
};
pub use obfuscate::{
    obfuscate_with_threshold, redistribute_balanced, redistribute_randomized, record_seed,
    regenerate_sequence, ObfuscateError, ObfuscationConfig, ObfuscationOutcome,
    RedistributionMode, RegenerationMode, SimilarityLevel,
};
pub use pipeline::{
    run_pipeline, PipelineConfig, PipelineError, PipelineOutput, PipelineReport, RecordReport,
};
pub use records::{
    remove_pii, shuffle_attributes, FastaRef, RecordError, RecordTable, ShuffleConfig,
};
pub use synth::{gen_dna, gen_records, SynthConfig, SynthError};
