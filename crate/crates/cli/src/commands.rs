//! Subcommand implementations and the exit-code policy.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use codon_cloak::fasta::{self, ParseMode, SequenceKind};
use codon_cloak::obfuscate::record_seed;
use codon_cloak::pipeline::{run_pipeline, PipelineConfig, PipelineError};
use codon_cloak::records::{DEFAULT_EXCLUDED_ATTRIBUTES, DEFAULT_PII_ATTRIBUTES};
use codon_cloak::{
    dot_matrix, gen_records, global_align, obfuscate_with_threshold, remove_pii,
    render_alignment_report, reverse_translate, shuffle_attributes, translate, CodonTable,
    FastaRecord, FastaRef, GeneticCode, ObfuscationConfig, ObfuscationOutcome, Protein,
    RecordTable, ScoringScheme, ShuffleConfig, SynthConfig,
};

use crate::{Command, ObfuscationFlags};

/// A command failure carrying its exit code (1 usage, 2 input/format).
pub struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure {
            code: 1,
            error: anyhow!(msg.into()),
        }
    }

    fn input(error: anyhow::Error) -> Self {
        Failure { code: 2, error }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if f.alternate() {
            write!(f, "{:#}", self.error)
        } else {
            write!(f, "{}", self.error)
        }
    }
}

type CmdResult = Result<u8, Failure>;

const THRESHOLD_MISSED: u8 = 3;

pub fn run(command: Command) -> CmdResult {
    match command {
        Command::Synth {
            n,
            bp,
            seed,
            out_csv,
            out_fasta,
        } => synth(n, bp, seed, &out_csv, &out_fasta),
        Command::Freq { input, out } => freq(&input, &out),
        Command::Obfuscate {
            input,
            settings,
            out,
            report,
            strict,
        } => obfuscate(&input, &settings, &out, report.as_deref(), strict),
        Command::Translate { input, out } => translate_cmd(&input, &out),
        Command::Revtrans {
            protein,
            table,
            out,
        } => revtrans(&protein, &table, &out),
        Command::Align {
            a,
            b,
            match_score,
            mismatch,
            gap,
            out,
        } => align(&a, &b, match_score, mismatch, gap, out.as_deref()),
        Command::Dotplot {
            a,
            b,
            window,
            stringency,
            out,
        } => dotplot(&a, &b, window, stringency, &out),
        Command::Shuffle {
            input,
            seed,
            exclude,
            pii,
            out,
        } => shuffle(&input, seed, exclude.as_deref(), pii.as_deref(), &out),
        Command::Pipeline {
            input,
            settings,
            exclude,
            pii,
            out_dir,
            strict,
        } => pipeline(
            &input,
            &settings,
            exclude.as_deref(),
            pii.as_deref(),
            &out_dir,
            strict,
        ),
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::input)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))
                .map_err(Failure::input)?;
        }
    }
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::input)
}

fn read_fasta(path: &Path, kind: SequenceKind) -> Result<Vec<FastaRecord>, Failure> {
    let text = read_file(path)?;
    let outcome = fasta::parse_fasta(&text, kind, ParseMode::Strict)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Failure::input)?;
    Ok(outcome.records)
}

fn first_record(path: &Path, kind: SequenceKind) -> Result<FastaRecord, Failure> {
    read_fasta(path, kind)?
        .into_iter()
        .next()
        .ok_or_else(|| Failure::input(anyhow!("{} has no records", path.display())))
}

/// `None` -> defaults; `Some("")` -> empty set; otherwise comma-separated.
fn attr_set(flag: Option<&str>, defaults: &[&str]) -> std::collections::BTreeSet<String> {
    match flag {
        None => defaults.iter().map(|s| s.to_string()).collect(),
        Some(list) => list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect(),
    }
}

fn check_percentage(name: &str, value: f64) -> Result<(), Failure> {
    if !(0.0..=100.0).contains(&value) {
        return Err(Failure::usage(format!("--{name} {value} outside [0, 100]")));
    }
    Ok(())
}

impl ObfuscationFlags {
    fn validate(&self) -> Result<(), Failure> {
        check_percentage("threshold", self.threshold)?;
        if let Some(ceiling) = self.ceiling {
            check_percentage("ceiling", ceiling)?;
            if self.threshold > ceiling {
                return Err(Failure::usage(format!(
                    "--threshold {} exceeds --ceiling {}",
                    self.threshold, ceiling
                )));
            }
        }
        if self.max_iter < 1 {
            return Err(Failure::usage("--max-iter must be at least 1"));
        }
        Ok(())
    }

    fn config_for(&self, record_id: &str) -> ObfuscationConfig {
        ObfuscationConfig {
            redistribution: self.redistribution.into(),
            regeneration: self.regeneration.into(),
            similarity_threshold: self.threshold,
            similarity_ceiling: self.ceiling,
            max_iterations: self.max_iter,
            seed: record_seed(self.seed, record_id),
            similarity_level: self.level.into(),
        }
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn synth(n: usize, bp: usize, seed: u64, out_csv: &Path, out_fasta: &Path) -> CmdResult {
    let config = SynthConfig {
        n_records: n,
        dna_length_bp: bp,
        seed,
    };
    let table = gen_records(&config).map_err(|e| Failure::usage(e.to_string()))?;
    write_file(out_csv, &table.to_csv())?;

    let ids = table.column("Patient_ID").expect("schema column");
    let dna = table.column("DNA").expect("schema column");
    let records: Vec<FastaRecord> = ids
        .iter()
        .zip(&dna)
        .map(|(id, seq)| FastaRecord::new(*id, *seq))
        .collect();
    write_file(out_fasta, &fasta::write_fasta(&records, fasta::DEFAULT_LINE_WIDTH))?;
    Ok(0)
}

fn freq(input: &Path, out: &Path) -> CmdResult {
    let records = read_fasta(input, SequenceKind::Dna)?;
    let code = GeneticCode::standard();
    let mut tables = Vec::with_capacity(records.len());
    for rec in &records {
        let table = CodonTable::from_sequence(&rec.sequence)
            .with_context(|| format!("record {}", rec.id))
            .map_err(Failure::input)?;
        tables.push(table.to_tsv(code));
    }
    match tables.len() {
        0 => Err(Failure::input(anyhow!("{} has no records", input.display()))),
        1 => {
            write_file(out, &tables[0])?;
            Ok(0)
        }
        _ => {
            fs::create_dir_all(out)
                .with_context(|| format!("creating {}", out.display()))
                .map_err(Failure::input)?;
            for (rec, tsv) in records.iter().zip(&tables) {
                write_file(&out.join(format!("{}.tsv", rec.id)), tsv)?;
            }
            Ok(0)
        }
    }
}

fn obfuscate(
    input: &Path,
    settings: &ObfuscationFlags,
    out: &Path,
    report: Option<&Path>,
    strict: bool,
) -> CmdResult {
    settings.validate()?;
    let records = read_fasta(input, SequenceKind::Dna)?;
    let code = GeneticCode::standard();
    let mut outcomes: Vec<ObfuscationOutcome> = Vec::with_capacity(records.len());
    let mut output = Vec::with_capacity(records.len());
    for rec in &records {
        let outcome = obfuscate_with_threshold(&rec.sequence, &settings.config_for(&rec.id), code)
            .with_context(|| format!("record {}", rec.id))
            .map_err(Failure::input)?;
        output.push(FastaRecord {
            id: rec.id.clone(),
            description: rec.description.clone(),
            sequence: outcome.sequence.clone(),
        });
        outcomes.push(outcome);
    }
    write_file(out, &fasta::write_fasta(&output, fasta::DEFAULT_LINE_WIDTH))?;

    if let Some(report_path) = report {
        let mut tsv = String::new();
        for (rec, outcome) in records.iter().zip(&outcomes) {
            tsv.push_str(&format!(
                "{}\t{:.4}\t{}\t{}\n",
                rec.id, outcome.similarity_pct, outcome.iterations_used, outcome.threshold_met
            ));
        }
        write_file(report_path, &tsv)?;
    }

    let met = outcomes.iter().filter(|o| o.threshold_met).count();
    let mean = outcomes.iter().map(|o| o.similarity_pct).sum::<f64>() / outcomes.len().max(1) as f64;
    println!(
        "obfuscated {} records; mean similarity {:.2}%; threshold met {}/{}",
        outcomes.len(),
        mean,
        met,
        outcomes.len()
    );
    if strict && met < outcomes.len() {
        return Ok(THRESHOLD_MISSED);
    }
    Ok(0)
}

fn translate_cmd(input: &Path, out: &Path) -> CmdResult {
    let records = read_fasta(input, SequenceKind::Dna)?;
    let code = GeneticCode::standard();
    let mut proteins = Vec::with_capacity(records.len());
    for rec in records {
        let protein = translate(&rec.sequence, code)
            .with_context(|| format!("record {}", rec.id))
            .map_err(Failure::input)?;
        proteins.push(FastaRecord {
            id: rec.id,
            description: rec.description,
            sequence: protein.as_str().to_string(),
        });
    }
    write_file(out, &fasta::write_fasta(&proteins, fasta::DEFAULT_LINE_WIDTH))?;
    Ok(0)
}

fn revtrans(protein_path: &Path, table_path: &Path, out: &Path) -> CmdResult {
    let records = read_fasta(protein_path, SequenceKind::Protein)?;
    if records.is_empty() {
        return Err(Failure::input(anyhow!(
            "{} has no records",
            protein_path.display()
        )));
    }
    if !table_path.is_dir() && records.len() > 1 {
        return Err(Failure::input(anyhow!(
            "{} holds {} records; --table must be a directory of <id>.tsv files",
            protein_path.display(),
            records.len()
        )));
    }
    let code = GeneticCode::standard();
    let mut output = Vec::with_capacity(records.len());
    for rec in records {
        let protein = Protein::parse(&rec.sequence)
            .with_context(|| format!("record {}", rec.id))
            .map_err(Failure::input)?;
        let table_file = if table_path.is_dir() {
            table_path.join(format!("{}.tsv", rec.id))
        } else {
            table_path.to_path_buf()
        };
        let table = CodonTable::from_tsv(&read_file(&table_file)?, code)
            .with_context(|| format!("parsing {}", table_file.display()))
            .map_err(Failure::input)?;
        let dna = reverse_translate(&protein, &table, code)
            .with_context(|| format!("record {}", rec.id))
            .map_err(Failure::input)?;
        output.push(FastaRecord {
            id: rec.id,
            description: rec.description,
            sequence: dna,
        });
    }
    write_file(out, &fasta::write_fasta(&output, fasta::DEFAULT_LINE_WIDTH))?;
    Ok(0)
}

fn align(
    a_path: &Path,
    b_path: &Path,
    match_score: i32,
    mismatch: i32,
    gap: i32,
    out: Option<&Path>,
) -> CmdResult {
    if match_score <= mismatch {
        return Err(Failure::usage(format!(
            "--match ({match_score}) must exceed --mismatch ({mismatch})"
        )));
    }
    if gap >= 0 {
        return Err(Failure::usage(format!("--gap ({gap}) must be negative")));
    }
    let a = first_record(a_path, SequenceKind::Protein)?;
    let b = first_record(b_path, SequenceKind::Protein)?;
    let scoring = ScoringScheme {
        match_score,
        mismatch_score: mismatch,
        gap_score: gap,
    };
    let result = global_align(&a.sequence, &b.sequence, &scoring)
        .map_err(|e| Failure::input(anyhow!(e)))?;
    let report = render_alignment_report(&result);
    match out {
        Some(path) => write_file(path, &report)?,
        None => print!("{report}"),
    }
    Ok(0)
}

fn dotplot(a_path: &Path, b_path: &Path, window: usize, stringency: usize, out: &Path) -> CmdResult {
    if window < 1 {
        return Err(Failure::usage("--window must be at least 1"));
    }
    if stringency < 1 || stringency > window {
        return Err(Failure::usage(format!(
            "--stringency {stringency} must be in 1..=window ({window})"
        )));
    }
    let a = first_record(a_path, SequenceKind::Protein)?;
    let b = first_record(b_path, SequenceKind::Protein)?;
    let matrix = dot_matrix(&a.sequence, &b.sequence, window, stringency)
        .map_err(|e| Failure::input(anyhow!(e)))?;
    let rendered = if out.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")) {
        matrix.to_pgm()
    } else {
        matrix.to_tsv()
    };
    write_file(out, &rendered)?;
    Ok(0)
}

fn shuffle(
    input: &Path,
    seed: u64,
    exclude: Option<&str>,
    pii: Option<&str>,
    out: &Path,
) -> CmdResult {
    let table = RecordTable::from_csv(&read_file(input)?)
        .with_context(|| format!("parsing {}", input.display()))
        .map_err(Failure::input)?;
    let config = ShuffleConfig {
        seed,
        excluded_attributes: attr_set(exclude, &DEFAULT_EXCLUDED_ATTRIBUTES),
        pii_attributes: attr_set(pii, &DEFAULT_PII_ATTRIBUTES),
    };
    let sanitized = remove_pii(&table, &config)
        .and_then(|t| shuffle_attributes(&t, &config))
        .map_err(|e| Failure::input(anyhow!(e)))?;
    write_file(out, &sanitized.to_csv())?;
    Ok(0)
}

fn pipeline(
    input: &Path,
    settings: &ObfuscationFlags,
    exclude: Option<&str>,
    pii: Option<&str>,
    out_dir: &Path,
    strict: bool,
) -> CmdResult {
    settings.validate()?;
    let table = RecordTable::from_csv(&read_file(input)?)
        .with_context(|| format!("parsing {}", input.display()))
        .map_err(Failure::input)?;
    let config = PipelineConfig {
        seed: settings.seed,
        pii_attributes: attr_set(pii, &DEFAULT_PII_ATTRIBUTES),
        excluded_attributes: attr_set(exclude, &DEFAULT_EXCLUDED_ATTRIBUTES),
        redistribution: settings.redistribution.into(),
        regeneration: settings.regeneration.into(),
        similarity_threshold: settings.threshold,
        similarity_ceiling: settings.ceiling,
        max_iterations: settings.max_iter,
        similarity_level: settings.level.into(),
    };

    // Sequence references resolve relative to the input CSV.
    let base_dir = input.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mut bank: HashMap<PathBuf, BTreeMap<String, String>> = HashMap::new();
    let mut resolve = |fref: &FastaRef| -> Result<String, PipelineError> {
        let path = base_dir.join(&fref.path);
        let fail = |msg: String| PipelineError::Resolve {
            path: fref.path.clone(),
            record_id: fref.record_id.clone(),
            msg,
        };
        if !bank.contains_key(&path) {
            let text = fs::read_to_string(&path).map_err(|e| fail(e.to_string()))?;
            let parsed = fasta::parse_fasta(&text, SequenceKind::Dna, ParseMode::Strict)
                .map_err(|e| fail(e.to_string()))?;
            let by_id = parsed
                .records
                .into_iter()
                .map(|r| (r.id, r.sequence))
                .collect();
            bank.insert(path.clone(), by_id);
        }
        bank[&path]
            .get(&fref.record_id)
            .cloned()
            .ok_or_else(|| fail("record not found".to_string()))
    };

    let output = run_pipeline(&table, &config, &mut resolve)
        .map_err(|e| Failure::input(anyhow!(e)))?;

    let obfuscated_dir = out_dir.join("obfuscated");
    write_file(&obfuscated_dir.join("records.csv"), &output.sanitized.to_csv())?;
    write_file(
        &obfuscated_dir.join("sequences.fasta"),
        &fasta::write_fasta(&output.obfuscated, fasta::DEFAULT_LINE_WIDTH),
    )?;
    write_file(&out_dir.join("report.tsv"), &output.report.to_tsv())?;

    let dna = output.report.dna_identity_stats();
    let protein = output.report.protein_identity_stats();
    let met = output.report.rows.iter().filter(|r| r.threshold_met).count();
    let total = output.report.rows.len();
    println!(
        "pipeline: {} records; dna identity mean {:.2}% min {:.2}% max {:.2}%; \
         protein identity mean {:.2}% min {:.2}% max {:.2}%; threshold met {}/{}",
        total, dna.mean, dna.min, dna.max, protein.mean, protein.min, protein.max, met, total
    );
    if strict && met < total {
        return Ok(THRESHOLD_MISSED);
    }
    Ok(0)
}
