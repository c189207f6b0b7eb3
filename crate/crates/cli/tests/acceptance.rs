//! Acceptance suite: one test per release criterion, each printing a
//! pass line (visible with `--nocapture`).
//!
//! Empirical bands (permuted-mode identity, refinement pass rate) were
//! measured once with a standalone oracle run of the same seeded
//! derivations and are frozen here as constants.

use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use codon_cloak::fasta::{parse_fasta, ParseMode, SequenceKind};
use codon_cloak::obfuscate::{
    obfuscate_with_threshold, redistribute_balanced, redistribute_randomized,
    regenerate_sequence, ObfuscationConfig, RedistributionMode, RegenerationMode,
    SimilarityLevel,
};
use codon_cloak::records::{remove_pii, shuffle_attributes, ShuffleConfig};
use codon_cloak::synth::{gen_dna, gen_records, SynthConfig};
use codon_cloak::{
    global_align, seeds, translate, Codon, CodonTable, GeneticCode, ScoringScheme,
};

fn table_with(counts: &[(&str, u64)]) -> CodonTable {
    let mut arr = [0u64; 64];
    for (codon, n) in counts {
        arr[codon.parse::<Codon>().unwrap().index()] = *n;
    }
    let total: u64 = arr.iter().sum();
    CodonTable::from_parts(arr, "", (total * 3) as usize).unwrap()
}

fn count(table: &CodonTable, codon: &str) -> u64 {
    table.count(codon.parse().unwrap())
}

/// Best wall time over a few repeats, so one scheduler hiccup cannot fail
/// a microsecond-scale budget.
fn best_of<T>(repeats: usize, mut f: impl FnMut() -> T) -> (T, Duration) {
    let mut best = Duration::MAX;
    let mut value = None;
    for _ in 0..repeats {
        let start = Instant::now();
        value = Some(f());
        best = best.min(start.elapsed());
    }
    (value.unwrap(), best)
}

#[test]
fn criterion_01_asp_redistribution_paper_vector() {
    let code = GeneticCode::standard();
    let input = table_with(&[("GAT", 1), ("GAC", 5)]);
    let (output, elapsed) = best_of(10, || redistribute_balanced(&input, code));
    assert_eq!(output, table_with(&[("GAT", 3), ("GAC", 3)]));
    assert!(elapsed < Duration::from_millis(1), "took {elapsed:?}");
    println!("criterion 01 PASS: Asp {{GAT:1, GAC:5}} -> {{GAT:3, GAC:3}} in {elapsed:?}");
}

#[test]
fn criterion_02_gln_redistribution_paper_vector() {
    let code = GeneticCode::standard();
    let input = table_with(&[("CAG", 2), ("CAA", 9)]);
    let output = redistribute_balanced(&input, code);
    assert_eq!(count(&output, "CAG"), 5);
    assert_eq!(count(&output, "CAA"), 6);
    assert_eq!(output, table_with(&[("CAG", 5), ("CAA", 6)]));
    println!("criterion 02 PASS: Gln {{CAG:2, CAA:9}} -> {{CAG:5, CAA:6}}");
}

#[test]
fn criterion_03_conservation_suite() {
    let start = Instant::now();
    let code = GeneticCode::standard();
    for trial in 1..=100u64 {
        let seq = gen_dna(500, &mut seeds::rng_for(trial, "acceptance3/input"));
        let base = CodonTable::from_sequence(&seq).unwrap();
        for redistribution in [RedistributionMode::Balanced, RedistributionMode::Randomized] {
            let perturbed = match redistribution {
                RedistributionMode::Balanced => redistribute_balanced(&base, code),
                RedistributionMode::Randomized => redistribute_randomized(
                    &base,
                    code,
                    &mut seeds::rng_for(trial, "acceptance3/redistribute"),
                ),
            };
            assert_eq!(
                perturbed.amino_acid_totals(code),
                base.amino_acid_totals(code),
                "per-amino-acid totals, trial {trial}"
            );
            assert_eq!(perturbed.total(), base.total(), "codon total, trial {trial}");
            assert_eq!(perturbed.tail(), base.tail(), "tail, trial {trial}");
            assert_eq!(perturbed.source_length(), base.source_length());
            for regeneration in [RegenerationMode::Synonymous, RegenerationMode::Permuted] {
                let mut rng = seeds::rng_for(trial, "acceptance3/regenerate");
                let out =
                    regenerate_sequence(&seq, &perturbed, regeneration, code, &mut rng).unwrap();
                assert_eq!(out.len(), seq.len(), "sequence length, trial {trial}");
                assert_eq!(
                    CodonTable::from_sequence(&out).unwrap(),
                    perturbed,
                    "table fidelity, trial {trial} {regeneration:?}"
                );
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!(
        "criterion 03 PASS: conservation held exactly over 100 x 2 modes in {elapsed:?}"
    );
}

#[test]
fn criterion_04_synonymous_mode_preserves_translation() {
    let code = GeneticCode::standard();
    for trial in 1..=100u64 {
        let seq = gen_dna(500, &mut seeds::rng_for(trial, "acceptance4/input"));
        let base = CodonTable::from_sequence(&seq).unwrap();
        let mut rng = seeds::rng_for(trial, "acceptance4/redistribute");
        let perturbed = redistribute_randomized(&base, code, &mut rng);
        let out =
            regenerate_sequence(&seq, &perturbed, RegenerationMode::Synonymous, code, &mut rng)
                .unwrap();
        assert_eq!(
            translate(&out, code).unwrap(),
            translate(&seq, code).unwrap(),
            "trial {trial}"
        );
    }
    println!("criterion 04 PASS: translation identical for 100 synonymous regenerations");
}

// Independent oracle for criterion 5: enumerate every global alignment.
fn brute_force_score(a: &[u8], b: &[u8], s: &ScoringScheme) -> i64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0,
        (true, false) => b.len() as i64 * s.gap_score as i64,
        (false, true) => a.len() as i64 * s.gap_score as i64,
        (false, false) => {
            let pair = if a[0] == b[0] {
                s.match_score as i64
            } else {
                s.mismatch_score as i64
            };
            let diag = brute_force_score(&a[1..], &b[1..], s) + pair;
            let gap_a = brute_force_score(&a[1..], b, s) + s.gap_score as i64;
            let gap_b = brute_force_score(a, &b[1..], s) + s.gap_score as i64;
            diag.max(gap_a).max(gap_b)
        }
    }
}

fn all_strings(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mut frontier: Vec<String> = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for prefix in &frontier {
            for &ch in alphabet {
                let mut s = prefix.clone();
                s.push(ch);
                next.push(s);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[test]
fn criterion_05_alignment_oracle_and_invariants() {
    let start = Instant::now();
    let scoring = ScoringScheme::default();

    // Complete sweep: every pair over {A, C} with lengths 1-5.
    let strings = all_strings(&['A', 'C'], 5);
    assert_eq!(strings.len(), 62);
    let mut pairs = 0usize;
    for a in &strings {
        for b in &strings {
            let result = global_align(a, b, &scoring).unwrap();
            let expected = brute_force_score(a.as_bytes(), b.as_bytes(), &scoring);
            assert_eq!(result.score, expected, "pair {a:?} vs {b:?}");
            pairs += 1;
        }
    }
    assert_eq!(pairs, 3844);

    // Fuzzed invariants on 1000 random pairs, lengths up to 50.
    for trial in 1..=1000u64 {
        let len_a = 1 + (trial as usize * 7919) % 50;
        let len_b = 1 + (trial as usize * 104_729) % 50;
        let a = gen_dna(len_a, &mut seeds::rng_for(trial, "acceptance5/a"));
        let b = gen_dna(len_b, &mut seeds::rng_for(trial, "acceptance5/b"));
        let r = global_align(&a, &b, &scoring).unwrap();
        assert_eq!(r.aligned_a.len(), r.alignment_length);
        assert_eq!(r.aligned_b.len(), r.alignment_length);
        let strip = |s: &str| s.chars().filter(|&c| c != '-').collect::<String>();
        assert_eq!(strip(&r.aligned_a), a, "gap-strip round trip, trial {trial}");
        assert_eq!(strip(&r.aligned_b), b, "gap-strip round trip, trial {trial}");
        assert!(
            r.aligned_a
                .bytes()
                .zip(r.aligned_b.bytes())
                .all(|(x, y)| x != b'-' || y != b'-'),
            "double-gap column, trial {trial}"
        );
        let matches = r
            .aligned_a
            .bytes()
            .zip(r.aligned_b.bytes())
            .filter(|(x, y)| x == y && *x != b'-')
            .count();
        assert_eq!(matches, r.matches, "match count, trial {trial}");
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    println!(
        "criterion 05 PASS: 3844-pair oracle sweep + 1000 fuzzed invariants in {elapsed:?}"
    );
}

#[test]
fn criterion_06_permuted_similarity_band() {
    // Frozen from the pre-build oracle run over these exact seeds:
    // permuted-mode mean protein identity 18.53% (min 14.79, max 22.41).
    const FROZEN_PERMUTED_MEAN: f64 = 18.53;
    const TOLERANCE_PP: f64 = 10.0;

    let start = Instant::now();
    let code = GeneticCode::standard();
    let mut permuted = Vec::new();
    let mut synonymous = Vec::new();
    for trial in 1..=20u64 {
        let seq = gen_dna(500, &mut seeds::rng_for(trial, "acceptance6/input"));
        let mut config = ObfuscationConfig::new(seeds::subseed(trial, "acceptance6/obf"));
        config.regeneration = RegenerationMode::Permuted;
        config.similarity_level = SimilarityLevel::Protein;
        config.similarity_threshold = 0.0;
        permuted.push(
            obfuscate_with_threshold(&seq, &config, code)
                .unwrap()
                .similarity_pct,
        );

        let mut config = ObfuscationConfig::new(seeds::subseed(trial, "acceptance6/obf"));
        config.regeneration = RegenerationMode::Synonymous;
        config.similarity_level = SimilarityLevel::Protein;
        config.similarity_threshold = 0.0;
        synonymous.push(
            obfuscate_with_threshold(&seq, &config, code)
                .unwrap()
                .similarity_pct,
        );
    }
    let permuted_mean = permuted.iter().sum::<f64>() / permuted.len() as f64;
    let synonymous_mean = synonymous.iter().sum::<f64>() / synonymous.len() as f64;

    assert_eq!(synonymous_mean, 100.0, "synonymous mode is lossless");
    assert!(
        permuted_mean < synonymous_mean,
        "permuted mean {permuted_mean:.2} must stay below synonymous mean"
    );
    assert!(permuted_mean < 50.0, "permuted mean {permuted_mean:.2}");
    assert!(
        (permuted_mean - FROZEN_PERMUTED_MEAN).abs() <= TOLERANCE_PP,
        "permuted mean {permuted_mean:.2} left the frozen band {FROZEN_PERMUTED_MEAN} +/- {TOLERANCE_PP}"
    );
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!(
        "criterion 06 PASS: permuted protein identity mean {permuted_mean:.2}% \
         (band {FROZEN_PERMUTED_MEAN} +/- {TOLERANCE_PP}, synonymous 100%) in {elapsed:?}"
    );
}

#[test]
fn criterion_07_refinement_loop_pass_rate() {
    // The pre-build oracle run met the 50% DNA threshold in 100/100
    // trials, every one on the first iteration; the criterion floor is 95.
    const MIN_PASSES: usize = 95;

    let start = Instant::now();
    let code = GeneticCode::standard();
    let mut met = 0usize;
    for trial in 1..=100u64 {
        let seq = gen_dna(500, &mut seeds::rng_for(trial, "acceptance7/input"));
        let config = ObfuscationConfig::new(seeds::subseed(trial, "acceptance7/obf"));
        assert_eq!(config.similarity_threshold, 50.0);
        assert_eq!(config.similarity_level, SimilarityLevel::Dna);
        assert_eq!(config.regeneration, RegenerationMode::Synonymous);
        let outcome = obfuscate_with_threshold(&seq, &config, code).unwrap();
        if outcome.threshold_met {
            met += 1;
        }

        let mut vacuous = ObfuscationConfig::new(seeds::subseed(trial, "acceptance7/obf"));
        vacuous.similarity_threshold = 0.0;
        let outcome = obfuscate_with_threshold(&seq, &vacuous, code).unwrap();
        assert_eq!(outcome.iterations_used, 1, "threshold 0 must take one iteration");
        assert!(outcome.threshold_met);
    }
    assert!(met >= MIN_PASSES, "only {met}/100 trials met the threshold");
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!("criterion 07 PASS: threshold met in {met}/100 trials (floor {MIN_PASSES}) in {elapsed:?}");
}

#[test]
fn criterion_08_shuffle_suite() {
    let start = Instant::now();
    let table = gen_records(&SynthConfig {
        n_records: 150,
        dna_length_bp: 500,
        seed: 8,
    })
    .unwrap();

    let config = ShuffleConfig::new(88);
    let sanitized = remove_pii(&table, &config).unwrap();
    let shuffled = shuffle_attributes(&sanitized, &config).unwrap();

    let multiset = |values: Vec<&str>| {
        let mut m = std::collections::BTreeMap::new();
        for v in values {
            *m.entry(v.to_string()).or_insert(0usize) += 1;
        }
        m
    };
    for name in sanitized.attributes() {
        assert_eq!(
            multiset(shuffled.column(name).unwrap()),
            multiset(sanitized.column(name).unwrap()),
            "multiset of {name}"
        );
    }
    assert_eq!(shuffled.column("Patient_ID"), sanitized.column("Patient_ID"));
    assert_eq!(shuffled.column("DNA"), sanitized.column("DNA"));

    let again = shuffle_attributes(&sanitized, &config).unwrap();
    assert_eq!(shuffled.to_csv(), again.to_csv(), "same seed, same bytes");

    // All-columns variant: nothing excluded, every post-PII column moves.
    let mut all_columns = ShuffleConfig::new(88);
    all_columns.excluded_attributes.clear();
    let variant = shuffle_attributes(&sanitized, &all_columns).unwrap();
    assert_eq!(sanitized.attributes().len(), 10);
    for name in sanitized.attributes() {
        assert_eq!(
            multiset(variant.column(name).unwrap()),
            multiset(sanitized.column(name).unwrap()),
            "multiset of {name} (all-columns variant)"
        );
    }
    for name in ["Patient_ID", "DNA", "Zipcode", "DOB"] {
        assert_ne!(
            variant.column(name),
            sanitized.column(name),
            "{name} should move in the all-columns variant"
        );
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!("criterion 08 PASS: shuffle suite over 150 records in {elapsed:?}");
}

#[test]
fn criterion_09_reverse_translation_suite() {
    let code = GeneticCode::standard();
    for trial in 1..=100u64 {
        // Mixed lengths, including tails of 1 and 2 bases.
        let length = 30 + (trial as usize * 47) % 471;
        let seq = gen_dna(length, &mut seeds::rng_for(trial, "acceptance9/input"));
        let table = CodonTable::from_sequence(&seq).unwrap();
        let protein = translate(&seq, code).unwrap();
        let rebuilt = codon_cloak::reverse_translate(&protein, &table, code).unwrap();
        assert_eq!(
            CodonTable::from_sequence(&rebuilt).unwrap(),
            table,
            "table fidelity, trial {trial}"
        );
        assert_eq!(
            translate(&rebuilt, code).unwrap(),
            protein,
            "translation fidelity, trial {trial}"
        );
    }
    println!("criterion 09 PASS: reverse translation exact over 100 sequences");
}

#[test]
fn criterion_10_pipeline_end_to_end() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let run = |args: &[&str]| {
        let out = Command::new(env!("CARGO_BIN_EXE_codon-cloak"))
            .args(args)
            .output()
            .expect("spawn codon-cloak");
        assert_eq!(
            out.status.code(),
            Some(0),
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    };

    let csv = dir.path().join("corpus.csv");
    let fasta = dir.path().join("corpus.fasta");
    run(&[
        "synth", "--n", "150", "--bp", "500", "--seed", "42",
        "--out-csv", csv.to_str().unwrap(),
        "--out-fasta", fasta.to_str().unwrap(),
    ]);

    let out_a = dir.path().join("run_a");
    let out_b = dir.path().join("run_b");
    for out_dir in [&out_a, &out_b] {
        run(&[
            "pipeline",
            "--in", csv.to_str().unwrap(),
            "--seed", "42",
            "--out-dir", out_dir.to_str().unwrap(),
        ]);
    }

    for artifact in ["obfuscated/records.csv", "obfuscated/sequences.fasta", "report.tsv"] {
        let a = fs::read(out_a.join(artifact)).unwrap();
        let b = fs::read(out_b.join(artifact)).unwrap();
        assert_eq!(a, b, "{artifact} differs between identical runs");
    }

    let fasta_text = fs::read_to_string(out_a.join("obfuscated/sequences.fasta")).unwrap();
    let records = parse_fasta(&fasta_text, SequenceKind::Dna, ParseMode::Strict)
        .unwrap()
        .records;
    assert_eq!(records.len(), 150);
    assert!(records.iter().all(|r| r.sequence.len() == 500));

    let report = fs::read_to_string(out_a.join("report.tsv")).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines.len(), 151, "header + 150 rows");
    assert_eq!(
        lines[0],
        "record_id\tdna_identity_pct\tprotein_identity_pct\titerations\tthreshold_met"
    );

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    println!("criterion 10 PASS: 150-record pipeline reproduced byte-identically in {elapsed:?}");
}
