//! `codon-cloak`: sanitize patient record tables and obfuscate DNA
//! sequences by codon-frequency redistribution.
//!
//! Exit codes: 0 success, 1 usage error, 2 input/format error, 3 at least
//! one record missed the similarity band while `--strict` was set.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use codon_cloak::{RedistributionMode, RegenerationMode, SimilarityLevel};

#[derive(Parser)]
#[command(name = "codon-cloak", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic patient record CSV and companion FASTA
    Synth {
        /// Number of records
        #[arg(long, default_value_t = 150)]
        n: usize,
        /// DNA sequence length in base pairs
        #[arg(long, default_value_t = 500)]
        bp: usize,
        #[arg(long, env = "CODON_CLOAK_SEED")]
        seed: u64,
        #[arg(long)]
        out_csv: PathBuf,
        #[arg(long)]
        out_fasta: PathBuf,
    },
    /// Codon frequency tables for FASTA records
    Freq {
        #[arg(long = "in")]
        input: PathBuf,
        /// Table file for one record, directory for several
        #[arg(long)]
        out: PathBuf,
    },
    /// Obfuscate DNA records under a similarity threshold
    Obfuscate {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        settings: ObfuscationFlags,
        /// Obfuscated FASTA output
        #[arg(long)]
        out: PathBuf,
        /// Per-record report TSV
        #[arg(long)]
        report: Option<PathBuf>,
        /// Exit 3 when any record misses the similarity band
        #[arg(long)]
        strict: bool,
    },
    /// Translate DNA records to protein FASTA
    Translate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rebuild DNA from protein records under a codon-table budget
    Revtrans {
        /// Protein FASTA
        #[arg(long)]
        protein: PathBuf,
        /// Codon table TSV (file for one record, directory for several)
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Global pairwise alignment of the first records of two FASTA files
    Align {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long = "match", default_value_t = 1, allow_negative_numbers = true)]
        match_score: i32,
        #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
        mismatch: i32,
        #[arg(long, default_value_t = -2, allow_negative_numbers = true)]
        gap: i32,
        /// Report file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dot-matrix comparison of the first records of two FASTA files
    Dotplot {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 1)]
        window: usize,
        #[arg(long, default_value_t = 1)]
        stringency: usize,
        /// Output path; `.pgm` selects the raster format, anything else TSV
        #[arg(long)]
        out: PathBuf,
    },
    /// Remove PII columns and shuffle the rest of a record CSV
    Shuffle {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, env = "CODON_CLOAK_SEED")]
        seed: u64,
        /// Comma-separated columns left unshuffled (default Patient_ID,DNA;
        /// pass "" to shuffle everything)
        #[arg(long)]
        exclude: Option<String>,
        /// Comma-separated PII columns to drop (default
        /// First_Name,Last_Name,SSN,Address,City; pass "" to keep all)
        #[arg(long)]
        pii: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full run: sanitize a record CSV, obfuscate every DNA cell, report
    Pipeline {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        settings: ObfuscationFlags,
        #[arg(long)]
        exclude: Option<String>,
        #[arg(long)]
        pii: Option<String>,
        /// Output directory (obfuscated/records.csv, obfuscated/sequences.fasta,
        /// report.tsv)
        #[arg(long)]
        out_dir: PathBuf,
        /// Exit 3 when any record misses the similarity band
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Args)]
struct ObfuscationFlags {
    #[arg(long, env = "CODON_CLOAK_SEED")]
    seed: u64,
    /// Minimum percent identity to accept
    #[arg(long, default_value_t = 50.0)]
    threshold: f64,
    /// Maximum percent identity to accept (off by default)
    #[arg(long)]
    ceiling: Option<f64>,
    #[arg(long = "max-iter", default_value_t = 100)]
    max_iter: u32,
    #[arg(long, value_enum, default_value_t = RedistributionArg::Balanced)]
    redistribution: RedistributionArg,
    #[arg(long, value_enum, default_value_t = RegenerationArg::Synonymous)]
    regeneration: RegenerationArg,
    /// Whether the similarity check aligns DNA or translated protein
    #[arg(long, value_enum, default_value_t = LevelArg::Dna)]
    level: LevelArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum RedistributionArg {
    Balanced,
    Randomized,
}

impl From<RedistributionArg> for RedistributionMode {
    fn from(arg: RedistributionArg) -> Self {
        match arg {
            RedistributionArg::Balanced => RedistributionMode::Balanced,
            RedistributionArg::Randomized => RedistributionMode::Randomized,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RegenerationArg {
    Synonymous,
    Permuted,
}

impl From<RegenerationArg> for RegenerationMode {
    fn from(arg: RegenerationArg) -> Self {
        match arg {
            RegenerationArg::Synonymous => RegenerationMode::Synonymous,
            RegenerationArg::Permuted => RegenerationMode::Permuted,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Dna,
    Protein,
}

impl From<LevelArg> for SimilarityLevel {
    fn from(arg: LevelArg) -> Self {
        match arg {
            LevelArg::Dna => SimilarityLevel::Dna,
            LevelArg::Protein => SimilarityLevel::Protein,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {failure:#}");
            ExitCode::from(failure.exit_code())
        }
    }
}
