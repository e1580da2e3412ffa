use crate::construction::levels_of;
use crate::error::{Error, Result};

/// Encodes an input vector: `c = u * G`, where `G` is the `l`-fold Kronecker
/// power of `[[1, 0], [1, 1]]`.
///
/// Inputs use the channel numbering of [`crate::construction`] (first
/// polarization stage on the least significant index bit). Written with the
/// bit-reversal matrix `B` this is `c = (u B) B G`, i.e. the `m B G` form
/// applied to the bit-reversed input `m = u B`.
pub fn encode(u: &[u8]) -> Result<Vec<u8>> {
    let mut c = u.to_vec();
    encode_in_place(&mut c)?;
    Ok(c)
}

/// In-place version of [`encode`].
pub fn encode_in_place(c: &mut [u8]) -> Result<()> {
    levels_of(c.len()).map_err(|_| Error::LengthMismatch {
        expected: c.len().next_power_of_two().max(2),
        actual: c.len(),
    })?;
    let n = c.len();
    let mut half = 1;
    while half < n {
        for block in c.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        half *= 2;
    }
    Ok(())
}
