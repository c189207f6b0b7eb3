//! Synthetic corpus generation: patient record tables and uniform-random
//! DNA sequences, reproducible from a seed.
//!
//! Name, address, and diagnosis values come from fixture lists embedded
//! from `data/`; swap the files to change the vocabulary. Every record is
//! generated from its own stream derived from `(seed, record index)`.

use std::sync::LazyLock;

use rand::Rng;
use thiserror::Error;

use crate::records::{RecordTable, PATIENT_SCHEMA};
use crate::seeds;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("invalid synth config: {0}")]
    InvalidConfig(String),
}

/// Corpus dimensions and seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthConfig {
    pub n_records: usize,
    pub dna_length_bp: usize,
    pub seed: u64,
}

impl SynthConfig {
    pub fn new(seed: u64) -> Self {
        SynthConfig {
            n_records: 150,
            dna_length_bp: 500,
            seed,
        }
    }

    fn validate(&self) -> Result<(), SynthError> {
        if self.n_records < 1 {
            return Err(SynthError::InvalidConfig(
                "n_records must be at least 1".to_string(),
            ));
        }
        if self.dna_length_bp < 3 {
            return Err(SynthError::InvalidConfig(
                "dna_length_bp must be at least 3".to_string(),
            ));
        }
        Ok(())
    }
}

static FIRST_NAMES: LazyLock<Vec<&str>> =
    LazyLock::new(|| include_str!("../data/first_names.txt").lines().collect());
static LAST_NAMES: LazyLock<Vec<&str>> =
    LazyLock::new(|| include_str!("../data/last_names.txt").lines().collect());
static STREETS: LazyLock<Vec<&str>> =
    LazyLock::new(|| include_str!("../data/streets.txt").lines().collect());
static CITIES: LazyLock<Vec<&str>> =
    LazyLock::new(|| include_str!("../data/cities.txt").lines().collect());
static STATES: LazyLock<Vec<&str>> =
    LazyLock::new(|| include_str!("../data/states.txt").lines().collect());
static DIAGNOSES: LazyLock<Vec<(&str, &str)>> = LazyLock::new(|| {
    include_str!("../data/diagnoses.tsv")
        .lines()
        .map(|l| l.split_once('\t').expect("code<TAB>description"))
        .collect()
});

fn pick<'a, T: Copy>(rng: &mut impl Rng, list: &'a [T]) -> T {
    list[rng.random_range(0..list.len())]
}

/// A DNA string of `length` bases drawn i.i.d. uniform over `{A,C,G,T}`.
///
/// # Panics
/// Panics if `length` is zero.
pub fn gen_dna(length: usize, rng: &mut impl Rng) -> String {
    assert!(length >= 1, "length must be at least 1");
    const BASES: [char; 4] = ['A', 'C', 'G', 'T'];
    (0..length).map(|_| pick(rng, &BASES)).collect()
}

/// A full patient table with the 15-attribute schema; Patient IDs run
/// `P000001`, `P000002`, ... and the DNA column holds fresh sequences of
/// `config.dna_length_bp` bases.
pub fn gen_records(config: &SynthConfig) -> Result<RecordTable, SynthError> {
    config.validate()?;
    let mut rows = Vec::with_capacity(config.n_records);
    for i in 1..=config.n_records {
        let mut rng = seeds::rng_for(config.seed, &format!("record/{i}"));
        let first = pick(&mut rng, &FIRST_NAMES);
        let last = pick(&mut rng, &LAST_NAMES);
        let gender = if rng.random::<bool>() { "M" } else { "F" };
        let ssn = format!(
            "{:03}-{:02}-{:04}",
            rng.random_range(100..=899u32),
            rng.random_range(10..=99u32),
            rng.random_range(1000..=9999u32)
        );
        let dob = rng.random_range(1920..=2005u32).to_string();
        let address = format!("{} {}", rng.random_range(100..=9999u32), pick(&mut rng, &STREETS));
        let city = pick(&mut rng, &CITIES);
        let state = pick(&mut rng, &STATES);
        let zipcode = format!("{:05}", rng.random_range(501..=99950u32));
        let (code, description) = pick(&mut rng, &DIAGNOSES);
        let pcp = format!("{} {}", pick(&mut rng, &FIRST_NAMES), pick(&mut rng, &LAST_NAMES));
        let dna = gen_dna(config.dna_length_bp, &mut rng);
        rows.push(vec![
            format!("P{i:06}"),
            first.to_string(),
            last.to_string(),
            gender.to_string(),
            ssn,
            dob,
            address,
            city.to_string(),
            state.to_string(),
            zipcode,
            "USA".to_string(),
            code.to_string(),
            description.to_string(),
            pcp,
            dna,
        ]);
    }
    Ok(
        RecordTable::new(PATIENT_SCHEMA.iter().map(|s| s.to_string()).collect(), rows)
            .expect("schema rows are rectangular"),
    )
}
