//! Semantic guidance: analysis transform, importance maps and semantic
//! feature vectors (SFVs).
//!
//! The importance of a block is a weighted sum of an entropy map and a
//! refinement map (center–surround saliency for human viewers, an externally
//! supplied activation map for machine tasks). An SFV's score is the sum of
//! the importance of its blocks.

mod transform;

use std::path::Path;
use std::str::FromStr;

pub use transform::{
    forward_block, forward_transform, inverse_block, inverse_transform, Block, FeatureMap,
    COEFFS_PER_BLOCK, ZIGZAG,
};

use crate::error::{Error, Result};
use crate::source_io::{load_image, BlockGrid};

/// Per-block region labels in `0..num_labels`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticLabelMap {
    cols: usize,
    rows: usize,
    labels: Vec<u8>,
    num_labels: usize,
}

impl SemanticLabelMap {
    pub fn new(cols: usize, rows: usize, labels: Vec<u8>, num_labels: usize) -> Result<Self> {
        if labels.len() != cols * rows || labels.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: (cols, rows),
                found: (labels.len(), 1),
            });
        }
        if num_labels == 0 || num_labels > 256 {
            return Err(Error::InvalidArgument(format!("{num_labels} labels")));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= num_labels) {
            return Err(Error::InvalidArgument(format!(
                "label {bad} outside 0..{num_labels}"
            )));
        }
        Ok(Self {
            cols,
            rows,
            labels,
            num_labels,
        })
    }

    pub fn uniform(cols: usize, rows: usize) -> Self {
        Self {
            cols,
            rows,
            labels: vec![0; cols * rows],
            num_labels: 1,
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn label(&self, index: usize) -> u8 {
        self.labels[index]
    }
}

/// A per-block real-valued map.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMap {
    pub cols: usize,
    pub rows: usize,
    pub values: Vec<f64>,
}

impl BlockMap {
    pub fn filled(cols: usize, rows: usize, value: f64) -> Self {
        Self {
            cols,
            rows,
            values: vec![value; cols * rows],
        }
    }

    fn normalized_by_max(cols: usize, rows: usize, mut values: Vec<f64>) -> Self {
        let max = values.iter().copied().fold(0.0, f64::max);
        if max > 0.0 {
            values.iter_mut().for_each(|v| *v /= max);
        }
        Self { cols, rows, values }
    }
}

/// Fused importance, values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceMap {
    pub map: BlockMap,
    pub weight: f64,
}

impl ImportanceMap {
    pub fn values(&self) -> &[f64] {
        &self.map.values
    }

    pub fn uniform(cols: usize, rows: usize) -> Self {
        Self {
            map: BlockMap::filled(cols, rows, 1.0),
            weight: 1.0,
        }
    }
}

/// Which refinement map is fused with the entropy map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ImportanceMode {
    /// Human viewers: saliency refinement.
    #[default]
    Htc,
    /// Machine tasks: activation-map refinement.
    Mtc,
}

impl FromStr for ImportanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "htc" => Ok(ImportanceMode::Htc),
            "mtc" => Ok(ImportanceMode::Mtc),
            other => Err(Error::Config(format!("unknown importance mode '{other}'"))),
        }
    }
}

/// Gaussian differential entropy of each block's AC coefficients, clamped at
/// zero and normalized by the image maximum.
pub fn entropy_map(fm: &FeatureMap) -> BlockMap {
    let values = fm
        .blocks
        .iter()
        .map(|b| {
            let ac = &b[1..];
            let mean = ac.iter().sum::<f64>() / ac.len() as f64;
            let var = ac.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / ac.len() as f64;
            if var <= 0.0 {
                return 0.0;
            }
            (0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * var).log2()).max(0.0)
        })
        .collect();
    BlockMap::normalized_by_max(fm.cols, fm.rows, values)
}

/// Indices of the existing 8-neighbors of a block.
pub(crate) fn neighbors(cols: usize, rows: usize, index: usize) -> impl Iterator<Item = usize> {
    let (x, y) = ((index % cols) as isize, (index / cols) as isize);
    (-1isize..=1)
        .flat_map(move |dy| (-1isize..=1).map(move |dx| (dx, dy)))
        .filter(|&(dx, dy)| dx != 0 || dy != 0)
        .filter_map(move |(dx, dy)| {
            let (nx, ny) = (x + dx, y + dy);
            (nx >= 0 && ny >= 0 && (nx as usize) < cols && (ny as usize) < rows)
                .then(|| ny as usize * cols + nx as usize)
        })
}

/// Center–surround DC contrast, normalized by the image maximum.
pub fn saliency_map(fm: &FeatureMap) -> BlockMap {
    let values = (0..fm.n_blocks())
        .map(|i| {
            let (sum, n) = neighbors(fm.cols, fm.rows, i)
                .fold((0.0, 0usize), |(s, n), j| (s + fm.dc(j), n + 1));
            if n == 0 {
                0.0
            } else {
                (fm.dc(i) - sum / n as f64).abs()
            }
        })
        .collect();
    BlockMap::normalized_by_max(fm.cols, fm.rows, values)
}

/// Reads a block-resolution activation map (`cols × rows` PGM) scaled to `[0, 1]`.
pub fn load_activation_map(path: impl AsRef<Path>, grid: &BlockGrid) -> Result<BlockMap> {
    let img = load_image(path)?;
    if img.dims() != (grid.cols, grid.rows) {
        return Err(Error::DimensionMismatch {
            expected: (grid.cols, grid.rows),
            found: img.dims(),
        });
    }
    Ok(BlockMap {
        cols: grid.cols,
        rows: grid.rows,
        values: img.samples().iter().map(|&v| v as f64 / 255.0).collect(),
    })
}

pub fn fuse_importance(entropy: &BlockMap, refinement: &BlockMap, w: f64) -> Result<ImportanceMap> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::InvalidWeight(w));
    }
    if (entropy.cols, entropy.rows) != (refinement.cols, refinement.rows) {
        return Err(Error::DimensionMismatch {
            expected: (entropy.cols, entropy.rows),
            found: (refinement.cols, refinement.rows),
        });
    }
    let values = entropy
        .values
        .iter()
        .zip(&refinement.values)
        .map(|(e, r)| w * e + (1.0 - w) * r)
        .collect();
    Ok(ImportanceMap {
        map: BlockMap {
            cols: entropy.cols,
            rows: entropy.rows,
            values,
        },
        weight: w,
    })
}

/// A semantic feature vector: all blocks of one region and their coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Sfv {
    pub label: u8,
    /// Raster indices of the member blocks, ascending.
    pub blocks: Vec<usize>,
    /// Member blocks' coefficients, concatenated in block order.
    pub coeffs: Vec<f64>,
    pub score: f64,
}

impl Sfv {
    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, i: usize) -> &[f64] {
        &self.coeffs[i * COEFFS_PER_BLOCK..(i + 1) * COEFFS_PER_BLOCK]
    }
}

/// Splits the feature map into one SFV per present label, sorted by
/// descending score with ties broken by ascending label.
pub fn segment_sfvs(fm: &FeatureMap, labels: &SemanticLabelMap, imp: &ImportanceMap) -> Vec<Sfv> {
    assert_eq!(fm.n_blocks(), labels.labels.len(), "label map size");
    assert_eq!(fm.n_blocks(), imp.values().len(), "importance map size");
    let mut sfvs: Vec<Sfv> = Vec::new();
    let mut slot = vec![usize::MAX; labels.num_labels];
    for (i, &label) in labels.labels.iter().enumerate() {
        let s = &mut slot[label as usize];
        if *s == usize::MAX {
            *s = sfvs.len();
            sfvs.push(Sfv {
                label,
                blocks: Vec::new(),
                coeffs: Vec::new(),
                score: 0.0,
            });
        }
        let sfv = &mut sfvs[*s];
        sfv.blocks.push(i);
        sfv.coeffs.extend_from_slice(&fm.blocks[i]);
        sfv.score += imp.values()[i];
    }
    sfvs.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.label.cmp(&b.label)));
    sfvs
}
