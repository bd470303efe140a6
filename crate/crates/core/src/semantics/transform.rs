//! Orthonormal 8×8 type-II DCT with zig-zag coefficient ordering.

use std::sync::OnceLock;

use crate::source_io::{BlockGrid, SourceImage, BLOCK_SIZE};

pub const COEFFS_PER_BLOCK: usize = BLOCK_SIZE * BLOCK_SIZE;

/// One block's coefficients in zig-zag order (index 0 is DC).
pub type Block = [f64; COEFFS_PER_BLOCK];

/// `ZIGZAG[k]` is the raster position (row * 8 + col) of zig-zag index `k`.
pub const ZIGZAG: [usize; COEFFS_PER_BLOCK] = [
    0, 1, 8, 16, 9, 2, 3, 10, 17, 24, 32, 25, 18, 11, 4, 5, 12, 19, 26, 33, 40, 48, 41, 34, 27,
    20, 13, 6, 7, 14, 21, 28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51, 58,
    59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63,
];

fn basis() -> &'static [[f64; BLOCK_SIZE]; BLOCK_SIZE] {
    static BASIS: OnceLock<[[f64; BLOCK_SIZE]; BLOCK_SIZE]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut c = [[0.0; BLOCK_SIZE]; BLOCK_SIZE];
        let n = BLOCK_SIZE as f64;
        for (k, row) in c.iter_mut().enumerate() {
            let alpha = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            for (i, v) in row.iter_mut().enumerate() {
                *v = alpha
                    * ((2 * i + 1) as f64 * k as f64 * std::f64::consts::PI / (2.0 * n)).cos();
            }
        }
        c
    })
}

/// Forward transform of one block of spatial values (raster order).
pub fn forward_block(spatial: &[f64; COEFFS_PER_BLOCK]) -> Block {
    let c = basis();
    let mut tmp = [0.0; COEFFS_PER_BLOCK];
    // rows
    for y in 0..BLOCK_SIZE {
        for u in 0..BLOCK_SIZE {
            tmp[y * BLOCK_SIZE + u] = (0..BLOCK_SIZE)
                .map(|x| c[u][x] * spatial[y * BLOCK_SIZE + x])
                .sum();
        }
    }
    let mut out = [0.0; COEFFS_PER_BLOCK];
    for (k, &pos) in ZIGZAG.iter().enumerate() {
        let (v, u) = (pos / BLOCK_SIZE, pos % BLOCK_SIZE);
        out[k] = (0..BLOCK_SIZE)
            .map(|y| c[v][y] * tmp[y * BLOCK_SIZE + u])
            .sum();
    }
    out
}

/// Inverse of [`forward_block`], returning spatial values in raster order.
pub fn inverse_block(coeffs: &Block) -> [f64; COEFFS_PER_BLOCK] {
    let c = basis();
    let mut freq = [0.0; COEFFS_PER_BLOCK];
    for (k, &pos) in ZIGZAG.iter().enumerate() {
        freq[pos] = coeffs[k];
    }
    let mut tmp = [0.0; COEFFS_PER_BLOCK];
    for v in 0..BLOCK_SIZE {
        for x in 0..BLOCK_SIZE {
            tmp[v * BLOCK_SIZE + x] = (0..BLOCK_SIZE)
                .map(|u| c[u][x] * freq[v * BLOCK_SIZE + u])
                .sum();
        }
    }
    let mut out = [0.0; COEFFS_PER_BLOCK];
    for y in 0..BLOCK_SIZE {
        for x in 0..BLOCK_SIZE {
            out[y * BLOCK_SIZE + x] = (0..BLOCK_SIZE)
                .map(|v| c[v][y] * tmp[v * BLOCK_SIZE + x])
                .sum();
        }
    }
    out
}

/// Per-block transform coefficients of an image, blocks in raster order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    pub cols: usize,
    pub rows: usize,
    pub blocks: Vec<Block>,
}

impl FeatureMap {
    pub fn zeros(cols: usize, rows: usize) -> Self {
        Self {
            cols,
            rows,
            blocks: vec![[0.0; COEFFS_PER_BLOCK]; cols * rows],
        }
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn dc(&self, index: usize) -> f64 {
        self.blocks[index][0]
    }

    /// Mean squared coefficient difference over all blocks.
    pub fn mse(&self, other: &FeatureMap) -> f64 {
        assert_eq!(self.blocks.len(), other.blocks.len());
        let total: f64 = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)))
            .sum();
        total / (self.blocks.len() * COEFFS_PER_BLOCK) as f64
    }
}

/// Centers samples around zero (minus 128) and transforms every block.
pub fn forward_transform(padded: &[u8], grid: &BlockGrid) -> FeatureMap {
    let pw = grid.padded_width();
    assert_eq!(padded.len(), pw * grid.padded_height(), "padded sample count");
    let mut blocks = Vec::with_capacity(grid.n_blocks());
    for by in 0..grid.rows {
        for bx in 0..grid.cols {
            let mut spatial = [0.0; COEFFS_PER_BLOCK];
            for y in 0..BLOCK_SIZE {
                for x in 0..BLOCK_SIZE {
                    let s = padded[(by * BLOCK_SIZE + y) * pw + bx * BLOCK_SIZE + x];
                    spatial[y * BLOCK_SIZE + x] = s as f64 - 128.0;
                }
            }
            blocks.push(forward_block(&spatial));
        }
    }
    FeatureMap {
        cols: grid.cols,
        rows: grid.rows,
        blocks,
    }
}

/// Inverse transform, re-centering, rounding (half away from zero), clamping
/// and cropping back to the original image size.
pub fn inverse_transform(fm: &FeatureMap, grid: &BlockGrid) -> SourceImage {
    assert_eq!((fm.cols, fm.rows), (grid.cols, grid.rows), "grid mismatch");
    let mut samples = vec![0u8; grid.width * grid.height];
    for by in 0..grid.rows {
        for bx in 0..grid.cols {
            let spatial = inverse_block(&fm.blocks[by * grid.cols + bx]);
            for y in 0..BLOCK_SIZE {
                let py = by * BLOCK_SIZE + y;
                if py >= grid.height {
                    break;
                }
                for x in 0..BLOCK_SIZE {
                    let px = bx * BLOCK_SIZE + x;
                    if px >= grid.width {
                        break;
                    }
                    let v = (spatial[y * BLOCK_SIZE + x] + 128.0).round();
                    samples[py * grid.width + px] = v.clamp(0.0, 255.0) as u8;
                }
            }
        }
    }
    SourceImage::new(grid.width, grid.height, samples).expect("grid dims are valid")
}
