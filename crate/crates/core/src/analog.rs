//! Integrated chain: SFV coefficients mapped straight onto channel symbols
//! with importance-proportional power, decoded by per-coefficient LMMSE.

use num_complex::Complex64;

use crate::allocation::{AllocationPlan, BandSection, ChannelRealization};
use crate::digital::{symbol_gains, transmit};
use crate::error::Result;
use crate::semantics::{FeatureMap, Sfv, COEFFS_PER_BLOCK};

pub const DEFAULT_FLAG_THRESHOLD: f64 = 0.1;
const SCALE_FLOOR: f64 = 1e-6;
/// Quantization steps per octave of `1 + σ`.
const SCALE_STEPS: f64 = 24.0;

/// Per-SFV power weights `p_i ∝ s_i`, normalized so that `Σ p_i·n_i = Σ n_i`.
pub fn power_allocate(scores: &[f64], n_symbols: &[usize]) -> Vec<f64> {
    assert_eq!(scores.len(), n_symbols.len());
    let total: usize = n_symbols.iter().sum();
    let weighted: f64 = scores.iter().zip(n_symbols).map(|(s, &n)| s * n as f64).sum();
    if total == 0 || weighted <= 0.0 {
        return vec![1.0; scores.len()];
    }
    scores.iter().map(|s| s * total as f64 / weighted).collect()
}

/// Log-quantized band scale; never below the true value.
pub fn quantize_scale(sigma: f64) -> u8 {
    (SCALE_STEPS * (1.0 + sigma.max(0.0)).log2()).ceil().clamp(0.0, 255.0) as u8
}

pub fn dequantize_scale(code: u8) -> f64 {
    (2f64.powf(code as f64 / SCALE_STEPS) - 1.0).max(SCALE_FLOOR)
}

/// Number of leading bands touched when `kept` coefficients are sent band by
/// band across `n_blocks` blocks.
pub fn bands_touched(kept: usize, n_blocks: usize) -> usize {
    if n_blocks == 0 {
        0
    } else {
        kept.div_ceil(n_blocks).min(COEFFS_PER_BLOCK)
    }
}

/// RMS of each of the first `n_bands` bands over the blocks of `coeffs`,
/// quantized.
pub fn band_scale_codes(coeffs: &[f64], n_bands: usize) -> Vec<u8> {
    let n_blocks = coeffs.len() / COEFFS_PER_BLOCK;
    (0..n_bands)
        .map(|b| {
            let energy: f64 = (0..n_blocks)
                .map(|i| coeffs[i * COEFFS_PER_BLOCK + b].powi(2))
                .sum();
            quantize_scale((energy / n_blocks as f64).sqrt())
        })
        .collect()
}

/// Transmission order: band-major, lowest band first. Element `k` is the
/// position in the block-major coefficient vector.
fn zonal_order(n_blocks: usize) -> impl Iterator<Item = usize> {
    (0..COEFFS_PER_BLOCK).flat_map(move |b| (0..n_blocks).map(move |i| i * COEFFS_PER_BLOCK + b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalogFrame {
    pub label: u8,
    pub n_blocks: usize,
    /// Coefficients carried, `min(2·n_symbols, 64·n_blocks)`.
    pub kept: usize,
    pub power: f64,
    pub band_codes: Vec<u8>,
    pub symbols: Vec<Complex64>,
}

pub fn analog_encode(label: u8, coeffs: &[f64], n_symbols: usize, power: f64) -> AnalogFrame {
    let n_blocks = coeffs.len() / COEFFS_PER_BLOCK;
    let kept = (2 * n_symbols).min(coeffs.len());
    let band_codes = band_scale_codes(coeffs, bands_touched(kept, n_blocks));
    let amp = (power / 2.0).sqrt();
    let values: Vec<f64> = zonal_order(n_blocks)
        .take(kept)
        .map(|pos| coeffs[pos] * amp / dequantize_scale(band_codes[pos % COEFFS_PER_BLOCK]))
        .collect();
    let symbols = values
        .chunks(2)
        .map(|pair| Complex64::new(pair[0], pair.get(1).copied().unwrap_or(0.0)))
        .collect();
    AnalogFrame {
        label,
        n_blocks,
        kept,
        power,
        band_codes,
        symbols,
    }
}

/// Receiver-side knowledge of a frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameMeta<'a> {
    pub n_blocks: usize,
    pub kept: usize,
    pub power: f64,
    /// Band scale codes from side information; `None` when it was lost.
    pub band_codes: Option<&'a [u8]>,
}

/// LMMSE estimate of the block-major coefficients. Untransmitted
/// coefficients are 0. Without band codes every scale is taken as 1.
pub fn lmmse_decode(received: &[Complex64], gains: &[f64], noise_var: f64, meta: FrameMeta<'_>) -> Vec<f64> {
    assert_eq!(received.len(), gains.len());
    let mut out = vec![0.0; meta.n_blocks * COEFFS_PER_BLOCK];
    let p = meta.power;
    let amp = (p / 2.0).sqrt();
    let dims = received.iter().zip(gains).flat_map(|(y, &g)| [(y.re, g), (y.im, g)]);
    for (pos, (y, g)) in zonal_order(meta.n_blocks).take(meta.kept).zip(dims) {
        let denom = g * g * p + noise_var;
        let scaled = if denom > 0.0 { g * p / denom * y } else { 0.0 };
        let scale = match meta.band_codes {
            Some(codes) => codes
                .get(pos % COEFFS_PER_BLOCK)
                .map_or(SCALE_FLOOR, |&c| dequantize_scale(c)),
            None => 1.0,
        };
        out[pos] = if amp > 0.0 { scaled * scale / amp } else { 0.0 };
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalogRoundtrip {
    pub fm: FeatureMap,
    /// Blocks dropped, not reached by the zonal cut, or whose DC rode a weak RB.
    pub flags: Vec<bool>,
    pub symbols_used: usize,
    /// Some SFV was decoded without its band scales.
    pub degraded: bool,
}

/// Encoder-side band sections for every transmitted SFV.
pub fn band_sections(sfvs: &[Sfv], plan: &AllocationPlan) -> Vec<BandSection> {
    sfvs.iter()
        .zip(&plan.entries)
        .filter(|(_, e)| !e.dropped && e.n_symbols > 0)
        .map(|(sfv, e)| {
            let kept = (2 * e.n_symbols).min(sfv.coeffs.len());
            BandSection {
                label: sfv.label,
                vars: band_scale_codes(&sfv.coeffs, bands_touched(kept, sfv.n_blocks())),
            }
        })
        .collect()
}

pub struct AnalogParams<'a> {
    pub n_re: usize,
    pub flag_threshold: f64,
    /// Band sections recovered from side information, if any.
    pub priors: Option<&'a [BandSection]>,
    pub seed: u64,
}

/// Encode, transmit and decode every SFV of `plan` (same order as `sfvs`).
pub fn analog_roundtrip(
    sfvs: &[Sfv],
    plan: &AllocationPlan,
    ch: &ChannelRealization,
    cols: usize,
    rows: usize,
    params: &AnalogParams<'_>,
) -> Result<AnalogRoundtrip> {
    assert_eq!(sfvs.len(), plan.entries.len());
    let n_re = params.n_re;
    let active: Vec<usize> = plan
        .entries
        .iter()
        .map(|e| if e.dropped { 0 } else { e.n_symbols })
        .collect();
    let scores: Vec<f64> = sfvs.iter().map(|s| s.score).collect();
    let powers = power_allocate(&scores, &active);

    let mut fm = FeatureMap::zeros(cols, rows);
    let mut flags = vec![true; cols * rows];
    let mut symbols_used = 0;
    let mut degraded = false;
    for ((sfv, entry), (&n, &p)) in sfvs.iter().zip(&plan.entries).zip(active.iter().zip(&powers)) {
        if n == 0 {
            continue;
        }
        let frame = analog_encode(sfv.label, &sfv.coeffs, n, p);
        symbols_used += frame.symbols.len();
        let received = transmit(
            &frame.symbols,
            &entry.rb_ids,
            ch,
            n_re,
            crate::derive_seed(params.seed, sfv.label as u64),
        )?;
        let gains = symbol_gains(&entry.rb_ids, ch, n_re, received.len());
        let codes = params
            .priors
            .and_then(|sections| sections.iter().find(|s| s.label == sfv.label))
            .map(|s| s.vars.as_slice());
        degraded |= codes.is_none();
        let meta = FrameMeta {
            n_blocks: frame.n_blocks,
            kept: frame.kept,
            power: p,
            band_codes: codes,
        };
        let coeffs = lmmse_decode(&received, &gains, ch.noise_var, meta);
        for (i, &b) in sfv.blocks.iter().enumerate() {
            fm.blocks[b].copy_from_slice(&coeffs[i * COEFFS_PER_BLOCK..(i + 1) * COEFFS_PER_BLOCK]);
            // DC of block i is coefficient i of the zonal order, i.e. dimension i
            flags[b] = match gains.get(i / 2) {
                Some(&g) if i < frame.kept => {
                    let snr = if ch.noise_var > 0.0 { g * g / ch.noise_var } else { f64::INFINITY };
                    snr < params.flag_threshold
                }
                _ => true,
            };
        }
    }
    Ok(AnalogRoundtrip {
        fm,
        flags,
        symbols_used,
        degraded,
    })
}
