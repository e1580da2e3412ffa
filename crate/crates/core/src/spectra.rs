//! Polar spectra of punctured mother codes.
//!
//! Every channel of a length-`2^l` mother code is a branch of the
//! polarization tree, labelled by the `l` bits of `index - 1`. The spectra
//! polynomial `C(X)` counts surviving branches by the number of zeros in
//! their label. Two averages summarise it: SDC (mean zero count) and SDP
//! (mean one count). All counting is done in integers and only the final
//! division produces a float.

use std::fmt;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::construction::{levels_of, MAX_LEVELS};
use crate::error::{invalid, Error, Result};
use crate::puncturing::PuncturePattern;

/// Number of zeros in the `levels`-bit label of branch `index` (1-based).
pub fn branch_zero_count(index: usize, levels: u32) -> Result<u32> {
    let n = 1usize << levels;
    if index == 0 || index > n {
        return Err(Error::IndexOutOfRange { index, n });
    }
    Ok(levels - ((index - 1) as u64).count_ones())
}

fn binomial_row(levels: u32) -> Vec<u64> {
    let mut row = vec![1u64];
    for _ in 0..levels {
        let mut next = vec![1u64; row.len() + 1];
        for r in 1..row.len() {
            next[r] = row[r - 1] + row[r];
        }
        row = next;
    }
    row
}

/// Histogram of surviving branches by zero count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpectraPolynomial {
    coeffs: Vec<u64>,
    levels: u32,
}

impl SpectraPolynomial {
    /// `coeffs()[r]` is the number of surviving branches with `r` zeros.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    /// Mother code length.
    pub fn n(&self) -> usize {
        1 << self.levels
    }

    /// Number of surviving branches.
    pub fn survivors(&self) -> u64 {
        self.coeffs.iter().sum()
    }

    /// `Σ r·coeffs[r]`, the total zero count of the surviving branches.
    pub fn zero_weight(&self) -> u64 {
        self.coeffs.iter().enumerate().map(|(r, &c)| r as u64 * c).sum()
    }

    /// Total one count of the surviving branches.
    pub fn one_weight(&self) -> u64 {
        let l = self.levels as u64;
        self.coeffs.iter().enumerate().map(|(r, &c)| (l - r as u64) * c).sum()
    }

    /// Histogram by number of ones, `H[k] = coeffs[l - k]`.
    pub fn ones_histogram(&self) -> Vec<u64> {
        self.coeffs.iter().rev().copied().collect()
    }

    pub fn for_pattern(pattern: &PuncturePattern) -> Result<Self> {
        spectra_polynomial(levels_of(pattern.n())?, pattern.removed())
    }
}

impl fmt::Display for SpectraPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(r, c)| format!("{c}X^{r}"))
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

/// Spectra polynomial of the mother code with the branches in `removed` cut.
///
/// `removed` holds distinct 1-based indices; any number of them, including
/// all `2^levels`, is accepted.
pub fn spectra_polynomial(levels: u32, removed: &[usize]) -> Result<SpectraPolynomial> {
    if levels > MAX_LEVELS {
        return Err(invalid(format!("levels must be at most {MAX_LEVELS}, got {levels}")));
    }
    let n = 1usize << levels;
    let mut seen = vec![false; n];
    let mut coeffs = binomial_row(levels);
    for &index in removed {
        let r = branch_zero_count(index, levels)? as usize;
        if std::mem::replace(&mut seen[index - 1], true) {
            return Err(invalid(format!("branch {index} removed twice")));
        }
        coeffs[r] = coeffs[r]
            .checked_sub(1)
            .expect("each distinct branch is counted once in the binomial row");
    }
    Ok(SpectraPolynomial { coeffs, levels })
}

/// Which branch count divides the spectra sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DenominatorConvention {
    /// Divide by the mother length `n`.
    MotherN,
    /// Divide by the number of surviving branches `n'`.
    PuncturedNPrime,
}

impl DenominatorConvention {
    pub fn name(self) -> &'static str {
        match self {
            DenominatorConvention::MotherN => "mother_n",
            DenominatorConvention::PuncturedNPrime => "punctured_n_prime",
        }
    }

    fn denominator(self, poly: &SpectraPolynomial) -> Result<u64> {
        let d = match self {
            DenominatorConvention::MotherN => poly.n() as u64,
            DenominatorConvention::PuncturedNPrime => poly.survivors(),
        };
        if d == 0 {
            return Err(invalid("no surviving branches to average over"));
        }
        Ok(d)
    }
}

impl fmt::Display for DenominatorConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Complementary path weight distance: mean zero count per branch.
pub fn sdc(poly: &SpectraPolynomial, convention: DenominatorConvention) -> Result<f64> {
    Ok(poly.zero_weight() as f64 / convention.denominator(poly)? as f64)
}

/// Path weight distance: mean one count per branch.
pub fn sdp(poly: &SpectraPolynomial, convention: DenominatorConvention) -> Result<f64> {
    Ok(poly.one_weight() as f64 / convention.denominator(poly)? as f64)
}

/// Spectra summary of one pattern under one convention.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectraReport {
    pub polynomial: SpectraPolynomial,
    pub convention: DenominatorConvention,
    pub sdp: f64,
    pub sdc: f64,
}

impl SpectraReport {
    pub fn new(polynomial: SpectraPolynomial, convention: DenominatorConvention) -> Result<Self> {
        let sdp = sdp(&polynomial, convention)?;
        let sdc = sdc(&polynomial, convention)?;
        Ok(Self { polynomial, convention, sdp, sdc })
    }
}

/// Spectra of a named pattern under both conventions.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternSpectra {
    pub name: String,
    pub n: usize,
    pub n_prime: usize,
    pub mother: SpectraReport,
    pub punctured: SpectraReport,
}

impl PatternSpectra {
    pub fn new(name: &str, pattern: &PuncturePattern) -> Result<Self> {
        let poly = SpectraPolynomial::for_pattern(pattern)?;
        Ok(Self {
            name: name.to_owned(),
            n: pattern.n(),
            n_prime: pattern.n_prime(),
            mother: SpectraReport::new(poly.clone(), DenominatorConvention::MotherN)?,
            punctured: SpectraReport::new(poly, DenominatorConvention::PuncturedNPrime)?,
        })
    }

    pub fn polynomial(&self) -> &SpectraPolynomial {
        &self.mother.polynomial
    }
}

/// Spectra of several patterns of equal size, ranked by SDC, highest first.
/// Equal SDC values keep their input order.
pub fn compare_patterns(
    levels: u32,
    n_prime: usize,
    patterns: &[(String, PuncturePattern)],
) -> Result<Vec<PatternSpectra>> {
    let n = 1usize << levels;
    let mut out = Vec::with_capacity(patterns.len());
    for (name, pattern) in patterns {
        if pattern.n() != n || pattern.n_prime() != n_prime {
            return Err(invalid(format!(
                "pattern {name:?} is ({}, {}), expected ({n}, {n_prime})",
                pattern.n(),
                pattern.n_prime()
            )));
        }
        out.push(PatternSpectra::new(name, pattern)?);
    }
    out.sort_by_key(|r| std::cmp::Reverse(r.polynomial().zero_weight()));
    Ok(out)
}

pub const SPECTRA_CSV_HEADER: [&str; 8] =
    ["pattern_name", "n", "n_prime", "sdp_n", "sdc_n", "sdp_nprime", "sdc_nprime", "coeffs"];

/// Writes spectra rows as CSV; `coeffs` is space separated, `r = 0` first.
pub fn write_spectra_csv<W: Write>(rows: &[PatternSpectra], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SPECTRA_CSV_HEADER)?;
    for row in rows {
        let coeffs: Vec<String> =
            row.polynomial().coeffs().iter().map(|c| c.to_string()).collect();
        w.write_record([
            row.name.clone(),
            row.n.to_string(),
            row.n_prime.to_string(),
            row.mother.sdp.to_string(),
            row.mother.sdc.to_string(),
            row.punctured.sdp.to_string(),
            row.punctured.sdc.to_string(),
            coeffs.join(" "),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn write_spectra_csv_file(rows: &[PatternSpectra], path: &Path) -> Result<()> {
    let text = spectra_csv_string(rows)?;
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_owned(), source })
}

pub fn spectra_csv_string(rows: &[PatternSpectra]) -> Result<String> {
    let mut buf = Vec::new();
    write_spectra_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

/// Upper bound on the number of patterns [`exhaustive_search`] enumerates.
pub const EXHAUSTIVE_LIMIT: u128 = 50_000_000;

/// Outcome of scanning every pattern of a given size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExhaustiveReport {
    pub n: usize,
    pub n_prime: usize,
    pub patterns_checked: u64,
    /// Largest surviving zero weight over all patterns.
    pub best_zero_weight: u64,
    /// Number of patterns attaining it.
    pub best_count: u64,
    /// Lexicographically smallest maximiser (ascending indices).
    pub best_example: Vec<usize>,
    pub candidate_zero_weight: u64,
    /// `best_zero_weight - candidate_zero_weight`; 0 when the candidate is optimal.
    pub gap: u64,
}

impl ExhaustiveReport {
    pub fn candidate_is_optimal(&self) -> bool {
        self.gap == 0
    }

    /// Best SDC under the mother-length convention.
    pub fn best_sdc(&self) -> f64 {
        self.best_zero_weight as f64 / self.n as f64
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[derive(Clone)]
struct Best {
    weight: u64,
    count: u64,
    example: Vec<usize>,
    checked: u64,
}

impl Best {
    fn merge(mut self, other: Best) -> Best {
        self.checked += other.checked;
        if other.weight > self.weight || self.count == 0 {
            Best { checked: self.checked, ..other }
        } else {
            if other.weight == self.weight {
                self.count += other.count;
                if other.count > 0 && other.example < self.example {
                    self.example = other.example;
                }
            }
            self
        }
    }
}

// Scans all ascending completions of `prefix` to `size` elements whose next
// element is greater than the last one in `prefix`.
fn scan(zeros: &[u64], total: u64, prefix: &mut Vec<usize>, removed_w: u64, size: usize, best: &mut Best) {
    if prefix.len() == size {
        best.checked += 1;
        let w = total - removed_w;
        if best.count == 0 || w > best.weight {
            *best = Best { weight: w, count: 1, example: prefix.clone(), checked: best.checked };
        } else if w == best.weight {
            best.count += 1;
        }
        return;
    }
    let n = zeros.len();
    let start = prefix.last().copied().unwrap_or(0) + 1;
    let remaining = size - prefix.len();
    for i in start..=n + 1 - remaining {
        prefix.push(i);
        scan(zeros, total, prefix, removed_w + zeros[i - 1], size, best);
        prefix.pop();
    }
}

/// Evaluates every pattern removing `n - n'` of the `n` branches and
/// reports how far `candidate` is from the best SDC (mother convention).
///
/// The search space is split by the smallest removed index and scanned in
/// parallel; the merge is order independent, so the report is
/// deterministic.
pub fn exhaustive_search(candidate: &PuncturePattern) -> Result<ExhaustiveReport> {
    let n = candidate.n();
    let levels = levels_of(n)?;
    let size = n - candidate.n_prime();
    let space = binomial(n as u64, size as u64);
    if space > EXHAUSTIVE_LIMIT {
        return Err(invalid(format!(
            "{space} patterns exceed the exhaustive search limit of {EXHAUSTIVE_LIMIT}"
        )));
    }
    let zeros: Vec<u64> = (1..=n)
        .map(|i| branch_zero_count(i, levels).map(u64::from))
        .collect::<Result<_>>()?;
    let total: u64 = zeros.iter().sum();
    let candidate_weight = SpectraPolynomial::for_pattern(candidate)?.zero_weight();

    let empty = Best { weight: 0, count: 0, example: Vec::new(), checked: 0 };
    let best = if size == 0 {
        Best { weight: total, count: 1, example: Vec::new(), checked: 1 }
    } else {
        (1..=n + 1 - size)
            .into_par_iter()
            .map(|first| {
                let mut best = empty.clone();
                let mut prefix = vec![first];
                scan(&zeros, total, &mut prefix, zeros[first - 1], size, &mut best);
                best
            })
            .reduce(|| empty.clone(), Best::merge)
    };
    Ok(ExhaustiveReport {
        n,
        n_prime: candidate.n_prime(),
        patterns_checked: best.checked,
        best_zero_weight: best.weight,
        best_count: best.count,
        best_example: best.example,
        candidate_zero_weight: candidate_weight,
        gap: best.weight - candidate_weight,
    })
}
