//! Classical single-stream transmission: one quantizer step for the whole
//! image, one entropy stream without block indices, one CRC, one frame.

use num_complex::Complex64;

use crate::allocation::ChannelRealization;
use crate::error::Result;
use crate::semantics::{FeatureMap, COEFFS_PER_BLOCK};

use super::bits::{BitReader, Bits};
use super::conv::{ChannelCode, ConvK7};
use super::crc::crc16_bits;
use super::entropy::{decode_blocks_dpcm, encode_blocks_dpcm, encoded_len_dpcm, QBlock};
use super::modem::{qpsk_llr, qpsk_modulate, symbol_gains, transmit};
use super::quant::{choose_step_by, dequantize_block, quantize_blocks, StepChoice};
use super::chain::info_capacity;

const CRC_BITS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineFrame {
    pub step: StepChoice,
    pub blocks: Vec<QBlock>,
    /// The entropy stream alone, before CRC and padding.
    pub stream: Bits,
    pub info_bits: Bits,
    pub symbols: Vec<Complex64>,
}

/// Encodes all blocks of `fm` in raster order into a frame of at most
/// `budget` symbols.
pub fn baseline_encode(fm: &FeatureMap, budget: usize) -> BaselineFrame {
    let coeffs: Vec<f64> = fm.blocks.iter().flatten().copied().collect();
    let cap = info_capacity(budget);
    let stream_budget = cap.saturating_sub(CRC_BITS);
    let step = choose_step_by(&coeffs, |q| encoded_len_dpcm(q) <= stream_budget);
    let blocks = if step.fallback {
        vec![[0; COEFFS_PER_BLOCK]; fm.n_blocks()]
    } else {
        quantize_blocks(&coeffs, step.step)
    };
    let mut stream = encode_blocks_dpcm(&blocks);
    if cap < CRC_BITS {
        stream.clear();
    }
    stream.truncate(stream_budget);

    let mut info_bits = stream.clone();
    if cap >= CRC_BITS {
        let crc = crc16_bits(&stream);
        info_bits.extend((0..16).rev().map(|s| (crc >> s) & 1 == 1));
        info_bits.resize(cap, false);
    }
    let symbols = if info_bits.is_empty() {
        Vec::new()
    } else {
        qpsk_modulate(&ConvK7.encode(&info_bits)).0
    };
    BaselineFrame {
        step,
        blocks,
        stream,
        info_bits,
        symbols,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineDecoded {
    /// Blocks after the desync point are all zero.
    pub blocks: Vec<QBlock>,
    pub decoded: usize,
    pub crc_ok: bool,
}

/// Decodes the post-Viterbi information bits regardless of the CRC outcome.
pub fn baseline_decode_bits(info: &[bool], n_blocks: usize) -> BaselineDecoded {
    let dec = decode_blocks_dpcm(info, n_blocks);
    let crc_ok = dec.decoded == n_blocks && {
        let end = encoded_len_dpcm(&dec.blocks);
        let sent = BitReader::new(info.get(end..).unwrap_or(&[])).get_bits(16);
        sent == Some(crc16_bits(&info[..end]) as u64)
    };
    BaselineDecoded {
        blocks: dec.blocks,
        decoded: dec.decoded,
        crc_ok,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineOutcome {
    pub fm: FeatureMap,
    pub step: StepChoice,
    pub symbols_used: usize,
    pub decoded_blocks: usize,
    pub crc_ok: bool,
}

/// Sends `fm` over RBs `0, 1, 2, …` of `ch` and decodes it.
pub fn baseline_classical(
    fm: &FeatureMap,
    budget: usize,
    ch: &ChannelRealization,
    n_re: usize,
    seed: u64,
) -> Result<BaselineOutcome> {
    let frame = baseline_encode(fm, budget);
    let rb_ids: Vec<usize> = (0..frame.symbols.len().div_ceil(n_re)).collect();
    let received = transmit(&frame.symbols, &rb_ids, ch, n_re, seed)?;
    let n_blocks = fm.n_blocks();
    let dec = if received.is_empty() {
        BaselineDecoded {
            blocks: vec![[0; COEFFS_PER_BLOCK]; n_blocks],
            decoded: 0,
            crc_ok: false,
        }
    } else {
        let gains = symbol_gains(&rb_ids, ch, n_re, received.len());
        let info = ConvK7.decode(&qpsk_llr(&received, &gains, ch.noise_var));
        baseline_decode_bits(&info, n_blocks)
    };
    let mut out = FeatureMap::zeros(fm.cols, fm.rows);
    for (dst, q) in out.blocks.iter_mut().zip(&dec.blocks) {
        *dst = dequantize_block(q, frame.step.step);
    }
    Ok(BaselineOutcome {
        fm: out,
        step: frame.step,
        symbols_used: frame.symbols.len(),
        decoded_blocks: dec.decoded,
        crc_ok: dec.crc_ok,
    })
}
