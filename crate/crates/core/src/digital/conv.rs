//! Rate-1/2, constraint-length-7 convolutional code (generators 171/133
//! octal), zero-terminated, with a soft-input max-sum Viterbi decoder.

use super::bits::Bits;

/// A binary channel code: bits in, coded bits out; LLRs in, bits out.
///
/// LLR sign convention: positive favors bit 0.
pub trait ChannelCode {
    fn coded_len(&self, info_bits: usize) -> usize;
    fn encode(&self, info: &[bool]) -> Bits;
    fn decode(&self, llrs: &[f64]) -> Bits;
}

const K: u32 = 7;
const STATES: usize = 1 << (K - 1);
pub const TAIL_BITS: usize = (K - 1) as usize;
pub const G1: u32 = 0o171;
pub const G2: u32 = 0o133;

#[derive(Debug, Clone, Copy, Default)]
pub struct ConvK7;

/// Output pair for shift register contents `reg` (newest bit at bit 6).
#[inline]
fn outputs(reg: u32) -> (bool, bool) {
    ((reg & G1).count_ones() & 1 == 1, (reg & G2).count_ones() & 1 == 1)
}

impl ChannelCode for ConvK7 {
    fn coded_len(&self, info_bits: usize) -> usize {
        2 * (info_bits + TAIL_BITS)
    }

    fn encode(&self, info: &[bool]) -> Bits {
        let mut out = Vec::with_capacity(self.coded_len(info.len()));
        let mut state = 0u32;
        for bit in info.iter().copied().chain(std::iter::repeat_n(false, TAIL_BITS)) {
            let reg = ((bit as u32) << (K - 1)) | state;
            let (a, b) = outputs(reg);
            out.push(a);
            out.push(b);
            state = reg >> 1;
        }
        out
    }

    fn decode(&self, llrs: &[f64]) -> Bits {
        let steps = llrs.len() / 2;
        if steps <= TAIL_BITS {
            return Vec::new();
        }
        // branch outputs per (state, input), as ±1 signs (bit 0 -> +1)
        let mut sign = [[(0.0f64, 0.0f64); 2]; STATES];
        for (s, row) in sign.iter_mut().enumerate() {
            for (input, cell) in row.iter_mut().enumerate() {
                let (a, b) = outputs(((input as u32) << (K - 1)) | s as u32);
                *cell = (if a { -1.0 } else { 1.0 }, if b { -1.0 } else { 1.0 });
            }
        }

        let mut metric = [f64::NEG_INFINITY; STATES];
        metric[0] = 0.0;
        // decisions[t] bit s: which predecessor (its dropped low bit) won state s
        let mut decisions = vec![0u64; steps];
        let mut next = [0.0f64; STATES];
        for (t, pair) in llrs.chunks_exact(2).enumerate() {
            let (l0, l1) = (pair[0], pair[1]);
            let mut word = 0u64;
            for (s, slot) in next.iter_mut().enumerate() {
                let input = s >> (K - 2);
                let base = (s & (STATES / 2 - 1)) << 1;
                let mut best = f64::NEG_INFINITY;
                let mut pick = 0u64;
                for low in 0..2 {
                    let prev = base | low;
                    let (a, b) = sign[prev][input];
                    let m = metric[prev] + a * l0 + b * l1;
                    if m > best {
                        best = m;
                        pick = low as u64;
                    }
                }
                *slot = best;
                word |= pick << s;
            }
            decisions[t] = word;
            let top = next.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            for (m, n) in metric.iter_mut().zip(&next) {
                *m = n - top;
            }
        }

        let mut state = 0usize;
        let mut bits = vec![false; steps];
        for t in (0..steps).rev() {
            bits[t] = state >> (K - 2) & 1 == 1;
            let low = (decisions[t] >> state) & 1;
            state = ((state & (STATES / 2 - 1)) << 1) | low as usize;
        }
        bits.truncate(steps - TAIL_BITS);
        bits
    }
}
