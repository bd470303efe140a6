//! Distortion metrics.

use crate::semantics::{ImportanceMap, SemanticLabelMap};
use crate::source_io::{BlockGrid, SourceImage, BLOCK_SIZE};

pub const PSNR_CAP: f64 = 99.0;

/// `10·log10(255² / mse)`, capped at 99 dB.
pub fn psnr(mse: f64) -> f64 {
    if mse <= 0.0 {
        PSNR_CAP
    } else {
        (10.0 * (255.0f64 * 255.0 / mse).log10()).min(PSNR_CAP)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub mse: f64,
    pub psnr: f64,
    /// Block MSEs weighted by normalized importance.
    pub weighted_mse: f64,
    /// `(label, psnr)` for every label present, ascending label.
    pub per_label_psnr: Vec<(u8, f64)>,
}

/// Squared-error sum and pixel count of every block over original pixels.
fn block_errors(original: &SourceImage, recon: &SourceImage, grid: &BlockGrid) -> Vec<(f64, usize)> {
    let mut acc = vec![(0.0, 0usize); grid.n_blocks()];
    for y in 0..original.height() {
        for x in 0..original.width() {
            let d = original.get(x, y) as f64 - recon.get(x, y) as f64;
            let slot = &mut acc[(y / BLOCK_SIZE) * grid.cols + x / BLOCK_SIZE];
            slot.0 += d * d;
            slot.1 += 1;
        }
    }
    acc
}

pub fn compute_metrics(
    original: &SourceImage,
    recon: &SourceImage,
    imp: &ImportanceMap,
    labels: &SemanticLabelMap,
) -> Metrics {
    assert_eq!(original.dims(), recon.dims(), "image dims");
    let grid = BlockGrid::for_dims(original.width(), original.height());
    let blocks = block_errors(original, recon, &grid);
    let (total, count) = blocks.iter().fold((0.0, 0), |(s, n), &(e, c)| (s + e, n + c));
    let mse = total / count as f64;

    let weights = imp.values();
    let sum_w: f64 = weights.iter().sum();
    let weighted_mse = blocks
        .iter()
        .enumerate()
        .map(|(i, &(e, c))| {
            let w = if sum_w > 0.0 {
                weights[i] / sum_w
            } else {
                1.0 / blocks.len() as f64
            };
            w * e / c as f64
        })
        .sum();

    let mut per_label: Vec<(f64, usize)> = vec![(0.0, 0); labels.num_labels()];
    for (i, &(e, c)) in blocks.iter().enumerate() {
        let slot = &mut per_label[labels.label(i) as usize];
        slot.0 += e;
        slot.1 += c;
    }
    let per_label_psnr = per_label
        .iter()
        .enumerate()
        .filter(|(_, &(_, c))| c > 0)
        .map(|(l, &(e, c))| (l as u8, psnr(e / c as f64)))
        .collect();

    Metrics {
        mse,
        psnr: psnr(mse),
        weighted_mse,
        per_label_psnr,
    }
}
