//! Dead-zone scalar quantizer and the geometric step ladder.

use crate::semantics::COEFFS_PER_BLOCK;

use super::entropy::{encoded_len, QBlock};

pub const LADDER_LEN: usize = 41;

/// Step `k` of the ladder: `0.25 · 2^(k/4)`.
pub fn ladder_step(k: usize) -> f64 {
    0.25 * 2f64.powf(k as f64 / 4.0)
}

pub fn quantize(x: f64, step: f64) -> i32 {
    debug_assert!(step > 0.0);
    let q = (x.abs() / step).floor();
    (x.signum() * q) as i32
}

pub fn dequantize(q: i32, step: f64) -> f64 {
    if q == 0 {
        0.0
    } else {
        q.signum() as f64 * (q.unsigned_abs() as f64 + 0.5) * step
    }
}

/// Quantizes concatenated 64-coefficient blocks.
pub fn quantize_blocks(coeffs: &[f64], step: f64) -> Vec<QBlock> {
    assert_eq!(coeffs.len() % COEFFS_PER_BLOCK, 0);
    coeffs
        .chunks_exact(COEFFS_PER_BLOCK)
        .map(|chunk| {
            let mut q = [0i32; COEFFS_PER_BLOCK];
            for (dst, &x) in q.iter_mut().zip(chunk) {
                *dst = quantize(x, step);
            }
            q
        })
        .collect()
}

pub fn dequantize_block(q: &QBlock, step: f64) -> [f64; COEFFS_PER_BLOCK] {
    let mut out = [0.0; COEFFS_PER_BLOCK];
    for (dst, &v) in out.iter_mut().zip(q) {
        *dst = dequantize(v, step);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepChoice {
    pub index: usize,
    pub step: f64,
    /// Nothing on the ladder fit; the caller should send all-zero indices.
    pub fallback: bool,
}

/// Smallest ladder step whose quantized blocks satisfy `fits`.
pub fn choose_step_by(coeffs: &[f64], mut fits: impl FnMut(&[QBlock]) -> bool) -> StepChoice {
    for k in 0..LADDER_LEN {
        let step = ladder_step(k);
        if fits(&quantize_blocks(coeffs, step)) {
            return StepChoice {
                index: k,
                step,
                fallback: false,
            };
        }
    }
    StepChoice {
        index: LADDER_LEN - 1,
        step: ladder_step(LADDER_LEN - 1),
        fallback: true,
    }
}

/// Smallest ladder step whose entropy-coded size is within `bit_budget`.
pub fn choose_step(coeffs: &[f64], bit_budget: usize) -> StepChoice {
    choose_step_by(coeffs, |q| encoded_len(q) <= bit_budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dead_zone_examples() {
        assert_eq!(quantize(0.9, 1.0), 0);
        assert_eq!(dequantize(0, 1.0), 0.0);
        assert_eq!(quantize(-2.3, 1.0), -2);
        assert_eq!(dequantize(-2, 1.0), -2.5);
        assert_eq!(quantize(2.0, 1.0), 2);
    }

    #[test]
    fn ladder_bounds() {
        assert_eq!(ladder_step(0), 0.25);
        assert_eq!(ladder_step(4), 0.5);
        assert_eq!(ladder_step(40), 256.0);
    }

    #[test]
    fn zero_coefficients_take_smallest_step() {
        let choice = choose_step(&[0.0; 128], 64);
        assert_eq!((choice.index, choice.fallback), (0, false));
    }

    #[test]
    fn tiny_budget_falls_back() {
        let coeffs: Vec<f64> = (0..64).map(|i| 5000.0 * (i as f64).cos()).collect();
        let choice = choose_step(&coeffs, 1);
        assert!(choice.fallback);
        assert_eq!(choice.index, LADDER_LEN - 1);
    }

    #[test]
    fn more_budget_never_coarser() {
        let coeffs: Vec<f64> = (0..256).map(|i| 300.0 * ((i * 7) as f64).sin() / (1 + i % 64) as f64).collect();
        let mut prev = usize::MAX;
        for budget in [64usize, 128, 256, 512, 1024, 2048] {
            let k = choose_step(&coeffs, budget).index;
            assert!(k <= prev);
            prev = k;
        }
    }
}
