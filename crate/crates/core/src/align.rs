//! Global pairwise alignment and dot-matrix comparison.
//!
//! [`global_align`] is a Needleman–Wunsch alignment with a linear gap
//! penalty and a fixed traceback preference (diagonal, then up, then left)
//! so equal-score alignments come out identical on every run. Percent
//! identity counts matching columns over the full alignment length, gaps
//! included.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlignError {
    #[error("sequence {which} is empty")]
    EmptyInput { which: &'static str },
    #[error("sequence {which} contains '-' at position {pos}")]
    GapInInput { which: &'static str, pos: usize },
    #[error("invalid scoring scheme: {0}")]
    InvalidScoring(String),
    #[error("window {window} out of range for lengths {a_len} and {b_len}")]
    WindowOutOfRange {
        window: usize,
        a_len: usize,
        b_len: usize,
    },
    #[error("stringency {stringency} must be in 1..=window ({window})")]
    StringencyOutOfRange { stringency: usize, window: usize },
}

/// Match/mismatch/gap scores. Gaps are linear: each gap symbol costs `gap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoringScheme {
    pub match_score: i32,
    pub mismatch_score: i32,
    pub gap_score: i32,
}

impl Default for ScoringScheme {
    fn default() -> Self {
        ScoringScheme {
            match_score: 1,
            mismatch_score: -1,
            gap_score: -2,
        }
    }
}

impl ScoringScheme {
    fn validate(&self) -> Result<(), AlignError> {
        if self.match_score <= self.mismatch_score {
            return Err(AlignError::InvalidScoring(format!(
                "match ({}) must exceed mismatch ({})",
                self.match_score, self.mismatch_score
            )));
        }
        if self.gap_score >= 0 {
            return Err(AlignError::InvalidScoring(format!(
                "gap ({}) must be negative",
                self.gap_score
            )));
        }
        Ok(())
    }

    fn pair(&self, x: u8, y: u8) -> i64 {
        if x == y {
            self.match_score as i64
        } else {
            self.mismatch_score as i64
        }
    }
}

/// A finished global alignment.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentResult {
    /// First input with `'-'` gaps inserted.
    pub aligned_a: String,
    /// Second input with `'-'` gaps inserted.
    pub aligned_b: String,
    pub score: i64,
    pub alignment_length: usize,
    /// Columns whose two symbols are equal (gaps never match).
    pub matches: usize,
}

impl AlignmentResult {
    /// Percent identity: `100 * matches / alignment_length`.
    pub fn identity_pct(&self) -> f64 {
        100.0 * self.matches as f64 / self.alignment_length as f64
    }
}

fn check_input(which: &'static str, seq: &str) -> Result<(), AlignError> {
    if seq.is_empty() {
        return Err(AlignError::EmptyInput { which });
    }
    if let Some(pos) = seq.bytes().position(|b| b == b'-') {
        return Err(AlignError::GapInInput { which, pos });
    }
    Ok(())
}

/// Needleman–Wunsch global alignment of `a` against `b`.
pub fn global_align(
    a: &str,
    b: &str,
    scoring: &ScoringScheme,
) -> Result<AlignmentResult, AlignError> {
    scoring.validate()?;
    check_input("a", a)?;
    check_input("b", b)?;
    let a = a.as_bytes();
    let b = b.as_bytes();
    let (n, m) = (a.len(), b.len());
    let gap = scoring.gap_score as i64;
    let width = m + 1;

    let mut h = vec![0i64; (n + 1) * width];
    for j in 1..=m {
        h[j] = j as i64 * gap;
    }
    for i in 1..=n {
        h[i * width] = i as i64 * gap;
        for j in 1..=m {
            let diag = h[(i - 1) * width + j - 1] + scoring.pair(a[i - 1], b[j - 1]);
            let up = h[(i - 1) * width + j] + gap;
            let left = h[i * width + j - 1] + gap;
            h[i * width + j] = diag.max(up).max(left);
        }
    }

    // Traceback, preferring diagonal over up over left on score ties.
    let mut aligned_a = Vec::with_capacity(n + m);
    let mut aligned_b = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let cell = h[i * width + j];
        if i > 0 && j > 0 && cell == h[(i - 1) * width + j - 1] + scoring.pair(a[i - 1], b[j - 1])
        {
            aligned_a.push(a[i - 1]);
            aligned_b.push(b[j - 1]);
            i -= 1;
            j -= 1;
        } else if i > 0 && cell == h[(i - 1) * width + j] + gap {
            aligned_a.push(a[i - 1]);
            aligned_b.push(b'-');
            i -= 1;
        } else {
            aligned_a.push(b'-');
            aligned_b.push(b[j - 1]);
            j -= 1;
        }
    }
    aligned_a.reverse();
    aligned_b.reverse();

    let matches = aligned_a
        .iter()
        .zip(&aligned_b)
        .filter(|(x, y)| x == y && **x != b'-')
        .count();
    let alignment_length = aligned_a.len();
    Ok(AlignmentResult {
        aligned_a: String::from_utf8(aligned_a).unwrap(),
        aligned_b: String::from_utf8(aligned_b).unwrap(),
        score: h[n * width + m],
        alignment_length,
        matches,
    })
}

/// Render an alignment as three-line blocks (a / match bar / b) wrapped at
/// 60 columns, followed by `Score:`, `Length:` and `Identity:` lines.
pub fn render_alignment_report(result: &AlignmentResult) -> String {
    const WIDTH: usize = 60;
    let a = result.aligned_a.as_bytes();
    let b = result.aligned_b.as_bytes();
    let mut out = String::new();
    let mut start = 0;
    while start < result.alignment_length {
        let end = (start + WIDTH).min(result.alignment_length);
        out.push_str(std::str::from_utf8(&a[start..end]).unwrap());
        out.push('\n');
        for k in start..end {
            out.push(if a[k] == b[k] && a[k] != b'-' { '|' } else { ' ' });
        }
        out.push('\n');
        out.push_str(std::str::from_utf8(&b[start..end]).unwrap());
        out.push('\n');
        out.push('\n');
        start = end;
    }
    out.push_str(&format!("Score: {}\n", result.score));
    out.push_str(&format!("Length: {}\n", result.alignment_length));
    out.push_str(&format!(
        "Identity: {}/{} ({:.1}%)\n",
        result.matches,
        result.alignment_length,
        result.identity_pct()
    ));
    out
}

// ---------------------------------------------------------------------------
// Dot matrix
// ---------------------------------------------------------------------------

/// Dot-matrix comparison: a point at `(i, j)` means the length-`window`
/// windows starting at `b[i]` and `a[j]` agree in at least `stringency`
/// positions. Rows index `b`, columns index `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DotMatrix {
    pub rows: usize,
    pub cols: usize,
    pub window: usize,
    pub stringency: usize,
    /// Sorted row-major.
    pub points: Vec<(usize, usize)>,
}

/// Compare `a` (columns) against `b` (rows) with a sliding window.
pub fn dot_matrix(
    a: &str,
    b: &str,
    window: usize,
    stringency: usize,
) -> Result<DotMatrix, AlignError> {
    let (cols, rows) = (a.len(), b.len());
    if window < 1 || window > cols.min(rows) {
        return Err(AlignError::WindowOutOfRange {
            window,
            a_len: cols,
            b_len: rows,
        });
    }
    if stringency < 1 || stringency > window {
        return Err(AlignError::StringencyOutOfRange { stringency, window });
    }
    let a = a.as_bytes();
    let b = b.as_bytes();
    let mut points = Vec::new();

    // Walk each diagonal once, keeping a rolling window match count.
    let mut scan = |si: usize, sj: usize| {
        let len = (rows - si).min(cols - sj);
        if len < window {
            return;
        }
        let hit = |t: usize| usize::from(b[si + t] == a[sj + t]);
        let mut score: usize = (0..window).map(hit).sum();
        for t in 0..=len - window {
            if t > 0 {
                score = score - hit(t - 1) + hit(t + window - 1);
            }
            if score >= stringency {
                points.push((si + t, sj + t));
            }
        }
    };
    for sj in 0..cols {
        scan(0, sj);
    }
    for si in 1..rows {
        scan(si, 0);
    }
    points.sort_unstable();

    Ok(DotMatrix {
        rows,
        cols,
        window,
        stringency,
        points,
    })
}

impl DotMatrix {
    /// TSV export: a `#rows cols window stringency` header line, then one
    /// `i<TAB>j` row per point.
    pub fn to_tsv(&self) -> String {
        let mut out = format!(
            "#{} {} {} {}\n",
            self.rows, self.cols, self.window, self.stringency
        );
        for (i, j) in &self.points {
            out.push_str(&format!("{i}\t{j}\n"));
        }
        out
    }

    /// PGM (P2) raster export: points are black (0) on a white (255) field.
    pub fn to_pgm(&self) -> String {
        let mut grid = vec![vec![255u8; self.cols]; self.rows];
        for &(i, j) in &self.points {
            grid[i][j] = 0;
        }
        let mut out = format!("P2\n{} {}\n255\n", self.cols, self.rows);
        for row in grid {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}
