//! Gray-mapped QPSK, soft demapping and the symbol-level fading channel.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::allocation::ChannelRealization;
use crate::error::{Error, Result};

const AMP: f64 = std::f64::consts::FRAC_1_SQRT_2;
/// LLR magnitude cap; keeps noiseless metrics finite.
const LLR_CAP: f64 = 1e10;

/// Maps bit pairs to unit-energy symbols. An odd-length input is padded with
/// one zero bit; the flag reports whether that happened.
pub fn qpsk_modulate(bits: &[bool]) -> (Vec<Complex64>, bool) {
    let padded = bits.len() % 2 == 1;
    let level = |b: bool| if b { -AMP } else { AMP };
    let symbols = bits
        .chunks(2)
        .map(|pair| Complex64::new(level(pair[0]), level(pair.get(1).copied().unwrap_or(false))))
        .collect();
    (symbols, padded)
}

/// Two LLRs per symbol (real then imaginary); positive favors bit 0.
pub fn qpsk_llr(received: &[Complex64], gains: &[f64], noise_var: f64) -> Vec<f64> {
    assert_eq!(received.len(), gains.len());
    let llr = |y: f64, g: f64| {
        let v = if noise_var > 0.0 {
            4.0 * g * AMP * y / noise_var
        } else {
            g * y * LLR_CAP
        };
        v.clamp(-LLR_CAP, LLR_CAP)
    };
    received
        .iter()
        .zip(gains)
        .flat_map(|(y, &g)| [llr(y.re, g), llr(y.im, g)])
        .collect()
}

/// Gain seen by each of the first `count` symbols laid out over `rb_ids`,
/// `n_re` symbols per RB.
pub fn symbol_gains(rb_ids: &[usize], ch: &ChannelRealization, n_re: usize, count: usize) -> Vec<f64> {
    (0..count).map(|k| ch.gains[rb_ids[k / n_re]]).collect()
}

/// `y = g·x + n` with circularly symmetric Gaussian noise of variance
/// `noise_var` per complex symbol.
pub fn transmit(
    symbols: &[Complex64],
    rb_ids: &[usize],
    ch: &ChannelRealization,
    n_re: usize,
    seed: u64,
) -> Result<Vec<Complex64>> {
    let capacity = rb_ids.len() * n_re;
    if symbols.len() > capacity {
        return Err(Error::RbOverflow {
            symbols: symbols.len(),
            capacity,
        });
    }
    if let Some(&bad) = rb_ids.iter().find(|&&rb| rb >= ch.n_rb()) {
        return Err(Error::InvalidArgument(format!("RB {bad} outside the channel")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = (ch.noise_var / 2.0).sqrt();
    let gains = symbol_gains(rb_ids, ch, n_re, symbols.len());
    Ok(symbols
        .iter()
        .zip(gains)
        .map(|(&x, g)| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            x * g + Complex64::new(re, im) * sigma
        })
        .collect())
}
