//! Bhattacharyya construction of the synthetic channels of a mother code.
//!
//! Channel `i` (1-based) of a length-`2^l` mother code is reached from the
//! base channel by `l` polarization steps. Bit `s` of `i - 1` (least
//! significant first) selects the step applied at stage `s + 1`: a clear bit
//! takes the degrading branch `Z -> 2Z - Z^2`, a set bit takes the upgrading
//! branch `Z -> Z^2`. Channel 1 is therefore the all-degrading channel and
//! channel `n` the all-upgrading one.

use std::cmp::Ordering;

use crate::error::{invalid, Result};

/// Largest level count evaluated in the linear domain. Above it the
/// recursion runs on `ln Z` and `ln(1 - Z)`.
pub const LINEAR_DOMAIN_MAX_LEVELS: u32 = 10;

/// Largest supported level count (`n = 2^24`).
pub const MAX_LEVELS: u32 = 24;

/// Mother code dimensions and the Bhattacharyya parameter of the base channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotherCodeParams {
    levels: u32,
    z0: f64,
}

impl MotherCodeParams {
    pub fn new(levels: u32, z0: f64) -> Result<Self> {
        if !(1..=MAX_LEVELS).contains(&levels) {
            return Err(invalid(format!(
                "level count must be in 1..={MAX_LEVELS}, got {levels}"
            )));
        }
        if !(z0 > 0.0 && z0 < 1.0) {
            return Err(invalid(format!("z0 must lie in (0, 1), got {z0}")));
        }
        Ok(Self { levels, z0 })
    }

    /// Parameters with the default base value `z0 = 0.5`.
    pub fn with_levels(levels: u32) -> Result<Self> {
        Self::new(levels, 0.5)
    }

    /// Parameters for a mother length `n`, which must be a power of two.
    pub fn for_length(n: usize, z0: f64) -> Result<Self> {
        Self::new(levels_of(n)?, z0)
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn n(&self) -> usize {
        1 << self.levels
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }
}

/// `log2(n)` for a power of two `n >= 2`.
pub fn levels_of(n: usize) -> Result<u32> {
    if n < 2 || !n.is_power_of_two() {
        return Err(invalid(format!("length must be a power of two >= 2, got {n}")));
    }
    Ok(n.trailing_zeros())
}

/// Bhattacharyya values of all `n` synthetic channels, in channel order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationVector {
    params: MotherCodeParams,
    values: Vec<f64>,
    // ln Z - ln(1 - Z); resolves entries that round to 0 or 1 in `values`.
    logits: Vec<f64>,
}

impl PolarizationVector {
    pub fn params(&self) -> MotherCodeParams {
        self.params
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value of channel `index` (1-based).
    pub fn get(&self, index: usize) -> Option<f64> {
        index.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }
}

/// Ascending ordering of a [`PolarizationVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityOrder {
    sorted_values: Vec<f64>,
    indices: Vec<usize>,
}

impl ReliabilityOrder {
    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted_values
    }

    /// 1-based channel indices, most reliable (smallest Z) first.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn n(&self) -> usize {
        self.indices.len()
    }
}

/// Evaluates the Bhattacharyya recursion for every channel of the mother code.
pub fn bhattacharyya_vector(params: MotherCodeParams) -> PolarizationVector {
    if params.levels <= LINEAR_DOMAIN_MAX_LEVELS {
        linear_vector(params)
    } else {
        log_vector(params)
    }
}

fn linear_vector(params: MotherCodeParams) -> PolarizationVector {
    let n = params.n();
    let mut values = Vec::with_capacity(n);
    let mut logits = Vec::with_capacity(n);
    for i in 0..n {
        // `w` tracks 1 - Z.
        let mut z = params.z0;
        let mut w = 1.0 - params.z0;
        for stage in 0..params.levels {
            if (i >> stage) & 1 == 1 {
                w = (w * (2.0 - w)).min(1.0);
                z *= z;
            } else {
                z = (z * (2.0 - z)).min(1.0);
                w *= w;
            }
        }
        values.push(z);
        logits.push(z.ln() - w.ln());
    }
    PolarizationVector { params, values, logits }
}

pub(crate) fn log_vector(params: MotherCodeParams) -> PolarizationVector {
    let n = params.n();
    let mut values = Vec::with_capacity(n);
    let mut logits = Vec::with_capacity(n);
    for i in 0..n {
        // Track ln Z and ln(1 - Z) together:
        //   Z^2:      ln Z' = 2 ln Z,               ln(1 - Z') = ln(1 - Z) + ln(1 + Z)
        //   2Z - Z^2: ln Z' = ln Z + ln(1 + (1-Z)), ln(1 - Z') = 2 ln(1 - Z)
        let mut log_z = params.z0.ln();
        let mut log_1mz = (-params.z0).ln_1p();
        for stage in 0..params.levels {
            if (i >> stage) & 1 == 1 {
                log_1mz += log_z.exp().ln_1p();
                log_z *= 2.0;
            } else {
                log_z += log_1mz.exp().ln_1p();
                log_1mz *= 2.0;
            }
        }
        let z = if log_z < log_1mz { log_z.exp() } else { -log_1mz.exp_m1() };
        values.push(z);
        logits.push(log_z - log_1mz);
    }
    PolarizationVector { params, values, logits }
}

/// Sorts channels by increasing Bhattacharyya value. Exact ties keep the
/// smaller index first.
pub fn reliability_order(b: &PolarizationVector) -> ReliabilityOrder {
    let mut idx: Vec<usize> = (0..b.len()).collect();
    idx.sort_by(|&x, &y| {
        b.logits[x].total_cmp(&b.logits[y]).then(x.cmp(&y))
    });
    ReliabilityOrder {
        sorted_values: idx.iter().map(|&i| b.values[i]).collect(),
        indices: idx.into_iter().map(|i| i + 1).collect(),
    }
}

/// Sorts an arbitrary list of values the same way [`reliability_order`] does.
pub fn order_values(values: &[f64]) -> ReliabilityOrder {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&x, &y| match values[x].total_cmp(&values[y]) {
        Ordering::Equal => x.cmp(&y),
        o => o,
    });
    ReliabilityOrder {
        sorted_values: idx.iter().map(|&i| values[i]).collect(),
        indices: idx.into_iter().map(|i| i + 1).collect(),
    }
}

/// Reverses the low `levels` bits of `i`.
#[inline]
pub fn reverse_bits(i: usize, levels: u32) -> usize {
    if levels == 0 {
        return 0;
    }
    i.reverse_bits() >> (usize::BITS - levels)
}

/// Bit-reversal permutation of `1..=n`: entry `i` is `1 + rev(i - 1)`.
pub fn bit_reversal_permutation(n: usize) -> Result<Vec<usize>> {
    if n == 0 || !n.is_power_of_two() {
        return Err(invalid(format!("bit reversal needs a power-of-two length, got {n}")));
    }
    let levels = n.trailing_zeros();
    Ok((0..n).map(|i| reverse_bits(i, levels) + 1).collect())
}
