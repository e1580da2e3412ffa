//! LLR update rules shared by the SC and list decoders.

/// Exact check-node rule `2 atanh(tanh(a/2) tanh(b/2))`, evaluated without
/// the hyperbolic functions.
#[inline]
pub fn f_exact(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    sign * a.abs().min(b.abs()) + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

#[inline]
pub fn f_min_sum(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    sign * a.abs().min(b.abs())
}

#[inline]
pub fn g(a: f64, b: f64, partial: u8) -> f64 {
    if partial == 0 {
        b + a
    } else {
        b - a
    }
}

/// `ln(1 + e^x)`.
#[inline]
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Path-metric increment for deciding `bit` on an LLR.
#[inline]
pub fn penalty(llr: f64, bit: u8) -> f64 {
    if bit == 0 {
        softplus(-llr)
    } else {
        softplus(llr)
    }
}

#[inline]
pub fn hard(llr: f64) -> u8 {
    (llr < 0.0) as u8
}
