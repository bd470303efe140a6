//! Run-level entropy coding of quantized blocks with order-0 Exp-Golomb
//! codewords.
//!
//! Each nonzero index in zig-zag order is sent as `(run, level)`: the number
//! of zeros skipped, then the signed level interleaved to unsigned. A level
//! codeword of 0 cannot occur for a real coefficient, so `(0, 0)` marks the
//! end of the block.
//!
//! The `_dpcm` variants code each block's DC index as the difference from the
//! previous block's, starting from a prediction of 0.

use crate::semantics::COEFFS_PER_BLOCK;

use super::bits::{exp_golomb_len, zigzag_map, zigzag_unmap, BitReader, BitWriter, Bits};

pub type QBlock = [i32; COEFFS_PER_BLOCK];

const EOB_LEN: usize = 2;

pub fn encode_block(q: &QBlock, w: &mut BitWriter) {
    let mut run = 0u32;
    for &v in q {
        if v == 0 {
            run += 1;
            continue;
        }
        w.put_exp_golomb(run);
        w.put_exp_golomb(zigzag_map(v));
        run = 0;
    }
    w.put_exp_golomb(0);
    w.put_exp_golomb(0);
}

pub fn block_len(q: &QBlock) -> usize {
    let mut run = 0u32;
    let mut len = EOB_LEN;
    for &v in q {
        if v == 0 {
            run += 1;
        } else {
            len += exp_golomb_len(run) + exp_golomb_len(zigzag_map(v));
            run = 0;
        }
    }
    len
}

pub fn encoded_len(blocks: &[QBlock]) -> usize {
    blocks.iter().map(block_len).sum()
}

pub fn encode_blocks(blocks: &[QBlock]) -> Bits {
    let mut w = BitWriter::new();
    blocks.iter().for_each(|b| encode_block(b, &mut w));
    w.finish()
}

/// The stream stopped making sense: a truncated or over-long codeword, a run
/// past the end of the block, or a malformed end-of-block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Desync;

pub fn decode_block(r: &mut BitReader<'_>) -> Result<QBlock, Desync> {
    let mut q = [0i32; COEFFS_PER_BLOCK];
    let mut pos = 0usize;
    loop {
        let run = r.get_exp_golomb().ok_or(Desync)? as usize;
        let level = r.get_exp_golomb().ok_or(Desync)?;
        if level == 0 {
            return if run == 0 { Ok(q) } else { Err(Desync) };
        }
        pos += run;
        if pos >= COEFFS_PER_BLOCK {
            return Err(Desync);
        }
        q[pos] = zigzag_unmap(level);
        pos += 1;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyDecoded {
    /// `n_blocks` blocks; everything from the desync point on is zero.
    pub blocks: Vec<QBlock>,
    /// Blocks decoded before the stream desynchronized.
    pub decoded: usize,
    /// Bit position of the block that failed to decode.
    pub desync_bit: Option<usize>,
}

pub fn decode_blocks(bits: &[bool], n_blocks: usize) -> EntropyDecoded {
    let mut r = BitReader::new(bits);
    let mut blocks = Vec::with_capacity(n_blocks);
    let mut desync_bit = None;
    while blocks.len() < n_blocks {
        let start = r.position();
        match decode_block(&mut r) {
            Ok(q) => blocks.push(q),
            Err(Desync) => {
                desync_bit = Some(start);
                break;
            }
        }
    }
    let decoded = blocks.len();
    blocks.resize(n_blocks, [0; COEFFS_PER_BLOCK]);
    EntropyDecoded {
        blocks,
        decoded,
        desync_bit,
    }
}

/// `q` with its DC replaced by the residual against `pred`.
pub fn with_dc_residual(q: &QBlock, pred: i32) -> QBlock {
    let mut out = *q;
    out[0] = q[0] - pred;
    out
}

pub fn encoded_len_dpcm(blocks: &[QBlock]) -> usize {
    let mut pred = 0;
    blocks
        .iter()
        .map(|q| {
            let len = block_len(&with_dc_residual(q, pred));
            pred = q[0];
            len
        })
        .sum()
}

pub fn encode_blocks_dpcm(blocks: &[QBlock]) -> Bits {
    let mut w = BitWriter::new();
    let mut pred = 0;
    for q in blocks {
        encode_block(&with_dc_residual(q, pred), &mut w);
        pred = q[0];
    }
    w.finish()
}

/// Decodes up to `n_blocks` DPCM blocks, stopping early at a desync or when
/// the stream is exhausted. Missing blocks are zero-filled.
pub fn decode_blocks_dpcm(bits: &[bool], n_blocks: usize) -> EntropyDecoded {
    let mut r = BitReader::new(bits);
    let mut blocks = Vec::with_capacity(n_blocks);
    let mut desync_bit = None;
    let mut pred = 0i32;
    while blocks.len() < n_blocks && r.remaining() > 0 {
        let start = r.position();
        match decode_block(&mut r) {
            Ok(mut q) => {
                q[0] = q[0].saturating_add(pred);
                pred = q[0];
                blocks.push(q);
            }
            Err(Desync) => {
                desync_bit = Some(start);
                break;
            }
        }
    }
    let decoded = blocks.len();
    blocks.resize(n_blocks, [0; COEFFS_PER_BLOCK]);
    EntropyDecoded {
        blocks,
        decoded,
        desync_bit,
    }
}
