//! Puncture patterns, information-set selection and the codeword/LLR
//! bookkeeping around them.
//!
//! The same index set is used in both domains: a punctured index is frozen
//! to zero at the encoder input and its codeword bit is deleted before
//! transmission. All three pattern generators return up-closed sets (if `j`
//! is removed, so is every index whose label is a bitwise superset of `j`),
//! which makes every deleted codeword bit identically zero. The decoder
//! therefore sees punctured positions as certain zeros.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::construction::{
    bhattacharyya_vector, levels_of, reliability_order, reverse_bits, MotherCodeParams,
    ReliabilityOrder,
};
use crate::error::{invalid, Error, Result};

/// Saturation magnitude standing in for an infinite LLR (natural-log units).
pub const LLR_SAT: f64 = 300.0;

/// Codeword positions removed from a length-`n` mother codeword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuncturePattern {
    removed: Vec<usize>,
    n: usize,
    n_prime: usize,
}

impl PuncturePattern {
    /// Validates a pattern. `removed` holds distinct 1-based indices, and
    /// `n / 2 < n_prime <= n` must hold.
    pub fn new(n: usize, n_prime: usize, removed: Vec<usize>) -> Result<Self> {
        check_lengths(n, n_prime)?;
        if removed.len() != n - n_prime {
            return Err(invalid(format!(
                "pattern removes {} positions but n - n' = {}",
                removed.len(),
                n - n_prime
            )));
        }
        let mut seen = vec![false; n];
        for &index in &removed {
            if index == 0 || index > n {
                return Err(Error::IndexOutOfRange { index, n });
            }
            if std::mem::replace(&mut seen[index - 1], true) {
                return Err(invalid(format!("index {index} removed twice")));
            }
        }
        Ok(Self { removed, n, n_prime })
    }

    /// The pattern that removes nothing.
    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, n, Vec::new())
    }

    /// Removed indices (1-based) in generation order.
    pub fn removed(&self) -> &[usize] {
        &self.removed
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_prime(&self) -> usize {
        self.n_prime
    }

    pub fn is_empty(&self) -> bool {
        self.removed.is_empty()
    }

    /// `mask[i]` is true when position `i + 1` is punctured.
    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n];
        for &i in &self.removed {
            mask[i - 1] = true;
        }
        mask
    }

    /// Text form: `"n n_prime"` on the first line, the removed indices on the
    /// second.
    pub fn to_text(&self) -> String {
        let list: Vec<String> = self.removed.iter().map(usize::to_string).collect();
        format!("{} {}\n{}\n", self.n, self.n_prime, list.join(" "))
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("missing header line".into()))?;
        let dims = parse_numbers(header)?;
        let [n, n_prime] = dims[..] else {
            return Err(Error::Parse(format!("header must hold two numbers, got {header:?}")));
        };
        let removed = match lines.next() {
            Some(line) => parse_numbers(line)?,
            None => Vec::new(),
        };
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::Parse("unexpected trailing lines".into()));
        }
        Self::new(n, n_prime, removed)
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_text(&text)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })
    }
}

fn parse_numbers(line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("not an index: {t:?}"))))
        .collect()
}

fn check_lengths(n: usize, n_prime: usize) -> Result<()> {
    levels_of(n)?;
    if n_prime > n || n_prime <= n / 2 {
        return Err(invalid(format!(
            "punctured length must satisfy n/2 < n' <= n, got n = {n}, n' = {n_prime}"
        )));
    }
    Ok(())
}

/// Polarization-index puncturing: removes the `n - n'` channels with the
/// smallest Bhattacharyya values, in that order.
pub fn pd_pattern(order: &ReliabilityOrder, n_prime: usize) -> Result<PuncturePattern> {
    let n = order.n();
    check_lengths(n, n_prime)?;
    PuncturePattern::new(n, n_prime, order.indices()[..n - n_prime].to_vec())
}

/// Reversal quasi-uniform puncturing: removes the bit-reversed images of the
/// last `n - n'` indices.
pub fn rqup_pattern(n: usize, n_prime: usize) -> Result<PuncturePattern> {
    check_lengths(n, n_prime)?;
    let levels = n.trailing_zeros();
    let removed = (n_prime..n).map(|i| reverse_bits(i, levels) + 1).collect();
    PuncturePattern::new(n, n_prime, removed)
}

/// Weight of column `index` (1-based) of the `l`-fold Kronecker power of
/// `[[1, 0], [1, 1]]`: the rows covering column `j` are the bitwise
/// supersets of `j`, so the weight is `2^(l - popcount(j))`.
pub fn column_weight(index: usize, levels: u32) -> usize {
    1 << (levels - (index - 1).count_ones())
}

/// Column-weight puncturing: removes the lightest columns of the generator
/// matrix, larger index first among equal weights.
pub fn cw_pattern(n: usize, n_prime: usize) -> Result<PuncturePattern> {
    check_lengths(n, n_prime)?;
    let levels = n.trailing_zeros();
    let mut cols: Vec<usize> = (1..=n).collect();
    cols.sort_by(|&a, &b| {
        column_weight(a, levels)
            .cmp(&column_weight(b, levels))
            .then(b.cmp(&a))
    });
    cols.truncate(n - n_prime);
    PuncturePattern::new(n, n_prime, cols)
}

/// Puncturing method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternKind {
    /// Polarization-index (proposed) puncturing.
    Pd,
    Rqup,
    Cw,
}

impl PatternKind {
    pub const ALL: [PatternKind; 3] = [PatternKind::Pd, PatternKind::Rqup, PatternKind::Cw];

    pub fn name(self) -> &'static str {
        match self {
            PatternKind::Pd => "pd",
            PatternKind::Rqup => "rqup",
            PatternKind::Cw => "cw",
        }
    }

    /// Builds the pattern of this kind. `order` is only consulted for PD.
    pub fn build(self, order: &ReliabilityOrder, n_prime: usize) -> Result<PuncturePattern> {
        match self {
            PatternKind::Pd => pd_pattern(order, n_prime),
            PatternKind::Rqup => rqup_pattern(order.n(), n_prime),
            PatternKind::Cw => cw_pattern(order.n(), n_prime),
        }
    }
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PatternKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pd" => Ok(PatternKind::Pd),
            "rqup" => Ok(PatternKind::Rqup),
            "cw" => Ok(PatternKind::Cw),
            other => Err(invalid(format!("unknown puncturing method {other:?}"))),
        }
    }
}

/// Smallest power of two `n` with `n / 2 < n_prime <= n`.
pub fn mother_length(n_prime: usize) -> Result<usize> {
    if n_prime < 2 {
        return Err(invalid(format!("punctured length must be at least 2, got {n_prime}")));
    }
    Ok(n_prime.next_power_of_two())
}

/// Frozen/information/punctured partition of the mother code.
#[derive(Debug, Clone, PartialEq)]
pub struct CodePlan {
    k_info: usize,
    pattern: PuncturePattern,
    info_positions: Vec<usize>,
    frozen_positions: Vec<usize>,
    frozen_mask: Vec<bool>,
}

impl CodePlan {
    pub fn n(&self) -> usize {
        self.pattern.n()
    }

    pub fn n_prime(&self) -> usize {
        self.pattern.n_prime()
    }

    pub fn levels(&self) -> u32 {
        self.n().trailing_zeros()
    }

    /// Information bits, payload plus CRC.
    pub fn k_info(&self) -> usize {
        self.k_info
    }

    pub fn pattern(&self) -> &PuncturePattern {
        &self.pattern
    }

    /// Information positions (1-based), most reliable first.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    /// Frozen positions (1-based, ascending); includes every punctured index.
    pub fn frozen_positions(&self) -> &[usize] {
        &self.frozen_positions
    }

    /// `mask[i]` is true when position `i + 1` is frozen.
    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen_mask
    }

    /// Input positions receiving the `k_info` data bits, in data order.
    ///
    /// The first `k_info - tail` bits (the payload) go to the most reliable
    /// information positions and the last `tail` bits (the CRC) to the rest;
    /// each group is laid out in ascending position order.
    pub fn data_positions(&self, tail: usize) -> Result<Vec<usize>> {
        if tail > self.k_info {
            return Err(invalid(format!(
                "CRC of {tail} bits does not fit into {} information bits",
                self.k_info
            )));
        }
        let split = self.k_info - tail;
        let mut head = self.info_positions[..split].to_vec();
        let mut rest = self.info_positions[split..].to_vec();
        head.sort_unstable();
        rest.sort_unstable();
        head.extend(rest);
        Ok(head)
    }

    /// Builds the encoder input vector from `k_info` data bits.
    pub fn place(&self, data: &[u8], tail: usize) -> Result<Vec<u8>> {
        if data.len() != self.k_info {
            return Err(Error::LengthMismatch { expected: self.k_info, actual: data.len() });
        }
        let mut u = vec![0u8; self.n()];
        for (&pos, &bit) in self.data_positions(tail)?.iter().zip(data) {
            u[pos - 1] = bit & 1;
        }
        Ok(u)
    }

    /// Inverse of [`CodePlan::place`]: reads the data bits back out of `u`.
    pub fn extract(&self, u: &[u8], tail: usize) -> Result<Vec<u8>> {
        if u.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), actual: u.len() });
        }
        Ok(self.data_positions(tail)?.iter().map(|&p| u[p - 1]).collect())
    }
}

/// Chooses the `k_info` most reliable surviving channels as the information
/// set. Punctured channels are always frozen.
pub fn build_code_plan(
    order: &ReliabilityOrder,
    pattern: &PuncturePattern,
    k_info: usize,
) -> Result<CodePlan> {
    if order.n() != pattern.n() {
        return Err(invalid(format!(
            "reliability order covers {} channels but the pattern {}",
            order.n(),
            pattern.n()
        )));
    }
    if k_info > pattern.n_prime() {
        return Err(invalid(format!(
            "k = {k_info} exceeds the punctured length {}",
            pattern.n_prime()
        )));
    }
    let punctured = pattern.mask();
    let info_positions: Vec<usize> = order
        .indices()
        .iter()
        .copied()
        .filter(|&i| !punctured[i - 1])
        .take(k_info)
        .collect();
    let mut frozen_mask = vec![true; pattern.n()];
    for &i in &info_positions {
        frozen_mask[i - 1] = false;
    }
    let frozen_positions = (1..=pattern.n()).filter(|&i| frozen_mask[i - 1]).collect();
    Ok(CodePlan {
        k_info,
        pattern: pattern.clone(),
        info_positions,
        frozen_positions,
        frozen_mask,
    })
}

/// Reliability order, pattern and plan for a punctured code in one call.
pub fn plan_for(
    kind: PatternKind,
    n_prime: usize,
    k_info: usize,
    z0: f64,
) -> Result<CodePlan> {
    let params = MotherCodeParams::for_length(mother_length(n_prime)?, z0)?;
    let order = reliability_order(&bhattacharyya_vector(params));
    let pattern = kind.build(&order, n_prime)?;
    build_code_plan(&order, &pattern, k_info)
}

/// Deletes the punctured positions of a length-`n` codeword.
pub fn apply_puncture<T: Copy>(c: &[T], pattern: &PuncturePattern) -> Result<Vec<T>> {
    if c.len() != pattern.n() {
        return Err(Error::LengthMismatch { expected: pattern.n(), actual: c.len() });
    }
    let mask = pattern.mask();
    Ok(c.iter().zip(mask).filter(|(_, m)| !m).map(|(&x, _)| x).collect())
}

/// Re-inserts punctured positions into a received LLR vector. Punctured
/// positions get `+saturation` (a certain zero).
pub fn expand_llr_with(
    received: &[f64],
    pattern: &PuncturePattern,
    saturation: f64,
) -> Result<Vec<f64>> {
    if received.len() != pattern.n_prime() {
        return Err(Error::LengthMismatch {
            expected: pattern.n_prime(),
            actual: received.len(),
        });
    }
    let mut it = received.iter();
    Ok(pattern
        .mask()
        .into_iter()
        .map(|punctured| if punctured { saturation } else { *it.next().unwrap() })
        .collect())
}

/// [`expand_llr_with`] at the default [`LLR_SAT`].
pub fn expand_llr(received: &[f64], pattern: &PuncturePattern) -> Result<Vec<f64>> {
    expand_llr_with(received, pattern, LLR_SAT)
}
