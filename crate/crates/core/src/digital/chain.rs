//! The per-SFV digital chain: quantize, entropy code, packetize, convolve,
//! modulate; and back.

use num_complex::Complex64;

use crate::allocation::{AllocationPlan, ChannelRealization};
use crate::error::{Error, Result};
use crate::semantics::{FeatureMap, Sfv, COEFFS_PER_BLOCK};

use super::bits::{from_bytes, to_bytes, Bits};
use super::conv::{ChannelCode, ConvK7, TAIL_BITS};
use super::entropy::{decode_blocks_dpcm, encode_block, with_dc_residual, QBlock};
use super::modem::{qpsk_llr, qpsk_modulate, symbol_gains, transmit};
use super::packet::{depacketize, Packet};
use super::quant::{choose_step_by, dequantize_block, quantize_blocks, StepChoice};
use super::bits::BitWriter;

/// Everything the transmitter produced for one SFV.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitalFrame {
    pub label: u8,
    pub step: StepChoice,
    /// Quantized indices as the encoder saw them (zero on fallback).
    pub blocks: Vec<QBlock>,
    pub packets: Vec<Packet>,
    /// Leading blocks covered by the packets that fit; the rest is not sent.
    pub sent_blocks: usize,
    pub info_bits: Bits,
    pub coded_bits: Bits,
    pub symbols: Vec<Complex64>,
}

impl DigitalFrame {
    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }
}

/// Greedy packing of blocks into packets of at most `limit` payload bits.
/// DC indices are coded against the previous block of the same packet, so
/// every packet decodes on its own.
pub fn pack_blocks(label: u8, blocks: &[QBlock], limit: usize) -> Vec<Packet> {
    let code = |q: &QBlock, pred: i32| {
        let mut w = BitWriter::new();
        encode_block(&with_dc_residual(q, pred), &mut w);
        w.finish()
    };
    let mut packets: Vec<Packet> = Vec::new();
    for (i, q) in blocks.iter().enumerate() {
        if let Some(p) = packets.last_mut() {
            let continued = code(q, blocks[i - 1][0]);
            if p.payload.len() + continued.len() <= limit {
                p.payload.extend(continued);
                p.n_blocks += 1;
                continue;
            }
        }
        packets.push(Packet {
            sfv_label: label,
            seq: (packets.len() % 256) as u8,
            first_block: u16::try_from(i).expect("block index fits 16 bits"),
            n_blocks: 1,
            payload: code(q, 0),
        });
    }
    packets
}

fn packed_len(packets: &[Packet]) -> usize {
    packets.iter().map(Packet::len).sum()
}

/// Information bits available to a frame of `n_symbols` symbols.
pub fn info_capacity(n_symbols: usize) -> usize {
    n_symbols.saturating_sub(TAIL_BITS)
}

/// Encodes one SFV's coefficients into at most `n_symbols` QPSK symbols.
pub fn encode_sfv_digital(label: u8, coeffs: &[f64], n_symbols: usize, payload_limit: usize) -> DigitalFrame {
    let n_blocks = coeffs.len() / COEFFS_PER_BLOCK;
    let cap = if n_symbols > TAIL_BITS { info_capacity(n_symbols) } else { 0 };
    let step = choose_step_by(coeffs, |q| packed_len(&pack_blocks(label, q, payload_limit)) <= cap);
    let blocks = if step.fallback {
        vec![[0; COEFFS_PER_BLOCK]; n_blocks]
    } else {
        quantize_blocks(coeffs, step.step)
    };

    let mut packets = pack_blocks(label, &blocks, payload_limit);
    let mut used = 0;
    let fitting = packets
        .iter()
        .take_while(|p| {
            used += p.len();
            used <= cap
        })
        .count();
    packets.truncate(fitting);
    let sent_blocks = packets.last().map_or(0, |p| p.block_range().end);

    if cap == 0 {
        return DigitalFrame {
            label,
            step,
            blocks,
            packets,
            sent_blocks,
            info_bits: Vec::new(),
            coded_bits: Vec::new(),
            symbols: Vec::new(),
        };
    }
    let mut info_bits: Bits = packets.iter().flat_map(Packet::to_bits).collect();
    info_bits.resize(cap, false);
    let coded_bits = ConvK7.encode(&info_bits);
    let (symbols, _) = qpsk_modulate(&coded_bits);
    debug_assert_eq!(symbols.len(), n_symbols);
    DigitalFrame {
        label,
        step,
        blocks,
        packets,
        sent_blocks,
        info_bits,
        coded_bits,
        symbols,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DigitalDecoded {
    pub blocks: Vec<QBlock>,
    /// `true` for every block that did not arrive intact.
    pub mask: Vec<bool>,
    pub crc_failures: usize,
}

impl DigitalDecoded {
    fn lost(n_blocks: usize) -> Self {
        Self {
            blocks: vec![[0; COEFFS_PER_BLOCK]; n_blocks],
            mask: vec![true; n_blocks],
            crc_failures: 0,
        }
    }
}

/// Receiver side after channel decoding: depacketize, check CRCs and
/// entropy-decode each surviving packet into its block range.
pub fn decode_info_bits(info: &[bool], label: u8, n_blocks: usize) -> DigitalDecoded {
    let mut out = DigitalDecoded::lost(n_blocks);
    let dep = depacketize(info, label, n_blocks);
    out.crc_failures = dep.crc_failures.len();
    for packet in &dep.packets {
        let first = packet.first_block;
        let dec = decode_blocks_dpcm(&packet.payload, n_blocks - first);
        for (i, q) in dec.blocks.iter().take(dec.decoded).enumerate() {
            out.blocks[first + i] = *q;
            out.mask[first + i] = false;
        }
    }
    out
}

pub fn decode_sfv_digital(
    received: &[Complex64],
    gains: &[f64],
    noise_var: f64,
    label: u8,
    n_blocks: usize,
) -> DigitalDecoded {
    if received.len() <= TAIL_BITS {
        return DigitalDecoded::lost(n_blocks);
    }
    let llrs = qpsk_llr(received, gains, noise_var);
    let info = ConvK7.decode(&llrs);
    decode_info_bits(&info, label, n_blocks)
}

/// Reconstructed feature map, block mask and symbol count of a digital trial.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitalRoundtrip {
    pub fm: FeatureMap,
    pub mask: Vec<bool>,
    pub symbols_used: usize,
    pub steps: Vec<StepChoice>,
}

/// Runs every SFV of `plan` through the digital chain. `sfvs` and the plan
/// entries must be in the same order. Dropped SFVs come back fully masked.
#[allow(clippy::too_many_arguments)]
pub fn digital_roundtrip(
    sfvs: &[Sfv],
    plan: &AllocationPlan,
    ch: &ChannelRealization,
    n_re: usize,
    payload_limit: usize,
    cols: usize,
    rows: usize,
    seed: u64,
) -> Result<DigitalRoundtrip> {
    assert_eq!(sfvs.len(), plan.entries.len());
    let mut fm = FeatureMap::zeros(cols, rows);
    let mut mask = vec![true; cols * rows];
    let mut symbols_used = 0;
    let mut steps = Vec::with_capacity(sfvs.len());
    for (sfv, entry) in sfvs.iter().zip(&plan.entries) {
        debug_assert_eq!(sfv.label, entry.label);
        let n_symbols = if entry.dropped { 0 } else { entry.n_symbols };
        let frame = encode_sfv_digital(sfv.label, &sfv.coeffs, n_symbols, payload_limit);
        steps.push(frame.step);
        symbols_used += frame.symbols.len();
        let received = transmit(
            &frame.symbols,
            &entry.rb_ids,
            ch,
            n_re,
            crate::derive_seed(seed, sfv.label as u64),
        )?;
        let gains = symbol_gains(&entry.rb_ids, ch, n_re, received.len());
        let dec = decode_sfv_digital(&received, &gains, ch.noise_var, sfv.label, sfv.n_blocks());
        for (i, &b) in sfv.blocks.iter().enumerate() {
            if !dec.mask[i] {
                fm.blocks[b] = dequantize_block(&dec.blocks[i], frame.step.step);
                mask[b] = false;
            }
        }
    }
    Ok(DigitalRoundtrip {
        fm,
        mask,
        symbols_used,
        steps,
    })
}

/// Sends a byte string protected by the channel code in exactly `n_symbols`
/// symbols over `rb_ids` and returns what the receiver decodes. The coded
/// frame goes out `repeat` times and the receiver adds the LLRs of all
/// copies. An empty result means nothing could be sent.
pub fn side_info_roundtrip(
    bytes: &[u8],
    n_symbols: usize,
    repeat: usize,
    rb_ids: &[usize],
    ch: &ChannelRealization,
    n_re: usize,
    seed: u64,
) -> Result<Vec<u8>> {
    if repeat == 0 {
        return Err(Error::InvalidArgument("side info repeat must be at least 1".into()));
    }
    let per_copy = n_symbols / repeat;
    let cap = info_capacity(per_copy);
    if per_copy <= TAIL_BITS || bytes.len() * 8 > cap || rb_ids.len() * n_re < n_symbols {
        return Ok(Vec::new());
    }
    let mut info = from_bytes(bytes);
    info.resize(cap, false);
    let (copy, _) = qpsk_modulate(&ConvK7.encode(&info));
    let symbols: Vec<_> = (0..repeat).flat_map(|_| copy.iter().copied()).collect();
    let received = transmit(&symbols, rb_ids, ch, n_re, seed)?;
    let gains = symbol_gains(rb_ids, ch, n_re, received.len());
    let llr = qpsk_llr(&received, &gains, ch.noise_var);
    let len = 2 * per_copy;
    let mut combined = vec![0.0; len];
    for chunk in llr.chunks(len) {
        for (acc, v) in combined.iter_mut().zip(chunk) {
            *acc += v;
        }
    }
    let decoded = ConvK7.decode(&combined);
    Ok(to_bytes(&decoded))
}

/// Symbols needed to carry `n_bytes` through [`side_info_roundtrip`].
pub fn side_info_symbols(n_bytes: usize, repeat: usize) -> usize {
    repeat * (8 * n_bytes + TAIL_BITS)
}
