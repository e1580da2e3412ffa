//! Per-path decoding state of the successive-cancellation tree.
//!
//! The tree is walked over the bit-reversed frame `y'[t] = y[rev(t)]`, which
//! turns the decoding problem into the usual depth-first one: leaf `t`
//! decides input `rev(t)`, left children use the check-node rule and right
//! children the variable-node rule.

use super::kernels::{f_exact, f_min_sum, g};
use super::LlrRule;
use crate::construction::reverse_bits;

#[derive(Debug, Clone)]
pub(crate) struct Geometry {
    pub n: usize,
    pub levels: usize,
    llr_off: Vec<usize>,
    bit_off: Vec<usize>,
    /// `rev[t]`: input index (0-based) decided at leaf `t`.
    pub rev: Vec<usize>,
}

impl Geometry {
    pub fn new(n: usize) -> Self {
        let levels = n.trailing_zeros() as usize;
        // LLRs of depth d (size n >> d) start at n - (n >> (d - 1)); depth 0
        // is the channel itself and is never stored per path.
        let llr_off = (0..=levels).map(|d| if d == 0 { 0 } else { n - (n >> (d - 1)) }).collect();
        // Partial sums: depth 0 holds one length-n column, deeper levels
        // hold a left and a right column of n >> d bits each.
        let mut bit_off = vec![0usize; levels + 1];
        let mut off = n;
        for (d, slot) in bit_off.iter_mut().enumerate().skip(1) {
            *slot = off;
            off += 2 * (n >> d);
        }
        let rev = (0..n).map(|t| reverse_bits(t, levels as u32)).collect();
        Self { n, levels, llr_off, bit_off, rev }
    }

    fn llr_len(&self) -> usize {
        self.n - 1
    }

    fn bit_len(&self) -> usize {
        self.bit_off[self.levels] + 2
    }

    /// Channel LLRs reordered into tree order.
    pub fn permute_frame(&self, frame: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.rev.iter().map(|&i| frame[i]));
    }
}

#[derive(Debug, Clone)]
pub(crate) struct PathState {
    llr: Vec<f64>,
    bits: Vec<u8>,
    /// Decisions in leaf order.
    pub leaves: Vec<u8>,
    /// Accumulated penalty (negative log-likelihood), never decreases.
    pub pm: f64,
}

impl PathState {
    pub fn new(geo: &Geometry) -> Self {
        Self {
            llr: vec![0.0; geo.llr_len().max(1)],
            bits: vec![0; geo.bit_len()],
            leaves: vec![0; geo.n],
            pm: 0.0,
        }
    }

    pub fn copy_from(&mut self, other: &PathState) {
        self.llr.copy_from_slice(&other.llr);
        self.bits.copy_from_slice(&other.bits);
        self.leaves.copy_from_slice(&other.leaves);
        self.pm = other.pm;
    }

    /// LLR of leaf `phi` given the decisions on leaves `0..phi`.
    pub fn leaf_llr(
        &mut self,
        geo: &Geometry,
        channel: &[f64],
        phi: usize,
        rule: LlrRule,
        sat: f64,
    ) -> f64 {
        let l = geo.levels;
        if l == 0 {
            return channel[0];
        }
        let start = if phi == 0 { 1 } else { l - phi.trailing_zeros() as usize };
        for d in start..=l {
            let size = geo.n >> d;
            let off = geo.llr_off[d];
            let (head, tail) = self.llr.split_at_mut(off);
            let parent: &[f64] = if d == 1 {
                channel
            } else {
                &head[geo.llr_off[d - 1]..geo.llr_off[d - 1] + 2 * size]
            };
            let out = &mut tail[..size];
            let (pa, pb) = parent.split_at(size);
            if (phi >> (l - d)) & 1 == 0 {
                match rule {
                    LlrRule::Exact => {
                        for ((o, &a), &b) in out.iter_mut().zip(pa).zip(pb) {
                            *o = f_exact(a, b).clamp(-sat, sat);
                        }
                    }
                    LlrRule::MinSum => {
                        for ((o, &a), &b) in out.iter_mut().zip(pa).zip(pb) {
                            *o = f_min_sum(a, b).clamp(-sat, sat);
                        }
                    }
                }
            } else {
                let left = &self.bits[geo.bit_off[d]..geo.bit_off[d] + size];
                for (((o, &a), &b), &s) in out.iter_mut().zip(pa).zip(pb).zip(left) {
                    *o = g(a, b, s).clamp(-sat, sat);
                }
            }
        }
        self.llr[geo.llr_off[l]]
    }

    /// Records the decision on leaf `phi` and propagates partial sums up
    /// through every subtree it completes.
    pub fn set_leaf(&mut self, geo: &Geometry, phi: usize, bit: u8) {
        self.leaves[phi] = bit;
        let l = geo.levels;
        if l == 0 {
            self.bits[0] = bit;
            return;
        }
        self.bits[geo.bit_off[l] + (phi & 1)] = bit;
        let mut d = l;
        while d >= 1 && (phi >> (l - d)) & 1 == 1 {
            let size = geo.n >> d;
            let parent_side = if d == 1 { 0 } else { (phi >> (l - d + 1)) & 1 };
            let parent_off = geo.bit_off[d - 1] + parent_side * 2 * size;
            let (head, tail) = self.bits.split_at_mut(geo.bit_off[d]);
            let (left, right) = tail[..2 * size].split_at(size);
            let parent = &mut head[parent_off..parent_off + 2 * size];
            let (pa, pb) = parent.split_at_mut(size);
            for j in 0..size {
                pa[j] = left[j] ^ right[j];
                pb[j] = right[j];
            }
            d -= 1;
        }
    }

    /// Re-encoded codeword in tree order; valid once every leaf is set.
    pub fn codeword(&self, geo: &Geometry) -> &[u8] {
        &self.bits[..geo.n]
    }

    /// Decisions mapped back to input order.
    pub fn input_vector(&self, geo: &Geometry) -> Vec<u8> {
        let mut u = vec![0u8; geo.n];
        for (t, &i) in geo.rev.iter().enumerate() {
            u[i] = self.leaves[t];
        }
        u
    }
}
