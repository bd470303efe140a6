//! Semantic distortion correction: error masks, label-guided block
//! inpainting, flat synthesis of dropped regions, and fusion back to pixels.

use crate::allocation::AllocationPlan;
use crate::semantics::{neighbors, inverse_transform, FeatureMap, SemanticLabelMap, Sfv, COEFFS_PER_BLOCK};
use crate::source_io::{BlockGrid, SourceImage};

/// Per-block corruption flags (`true` = untrusted).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorMask {
    pub cols: usize,
    pub rows: usize,
    pub flags: Vec<bool>,
}

impl ErrorMask {
    pub fn clear(cols: usize, rows: usize) -> Self {
        Self {
            cols,
            rows,
            flags: vec![false; cols * rows],
        }
    }

    pub fn count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn fraction(&self) -> f64 {
        if self.flags.is_empty() {
            0.0
        } else {
            self.count() as f64 / self.flags.len() as f64
        }
    }
}

/// Union of the chain's block flags (CRC failures, unsent tails or weak
/// analog symbols) and every block of a dropped SFV.
pub fn build_mask(cols: usize, rows: usize, chain_flags: &[bool], sfvs: &[Sfv], plan: &AllocationPlan) -> ErrorMask {
    assert_eq!(chain_flags.len(), cols * rows);
    let mut mask = ErrorMask {
        cols,
        rows,
        flags: chain_flags.to_vec(),
    };
    for (sfv, entry) in sfvs.iter().zip(&plan.entries) {
        if entry.dropped {
            for &b in &sfv.blocks {
                mask.flags[b] = true;
            }
        }
    }
    mask
}

/// What the receiver knows besides the decoded feature map.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionContext {
    pub labels: SemanticLabelMap,
    /// Per-label fill intensity, when side information arrived.
    pub fills: Option<Vec<u8>>,
}

/// Centered DC of a flat block of intensity `fill`.
pub fn fill_dc(fill: u8) -> f64 {
    8.0 * (fill as f64 - 128.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Trusted,
    Repaired,
    Pending,
}

/// Repairs masked blocks. DC comes from unmasked same-label neighbours,
/// else the label's fill when side info supplied one, else any unmasked
/// neighbours, else 0. AC is the per-band mean over unmasked same-label
/// blocks. Two raster passes: the first takes donors from trusted blocks
/// only, the second also from repaired ones and applies the fallbacks.
pub fn inpaint_feature_map(fm: &FeatureMap, mask: &ErrorMask, ctx: &CorrectionContext) -> FeatureMap {
    let (cols, rows) = (fm.cols, fm.rows);
    assert_eq!((mask.cols, mask.rows), (cols, rows), "mask dims");
    assert_eq!((ctx.labels.cols(), ctx.labels.rows()), (cols, rows), "label dims");
    let mut out = fm.clone();
    if mask.is_empty() {
        return out;
    }

    let n_labels = ctx.labels.num_labels();
    let mut ac_sum = vec![[0.0; COEFFS_PER_BLOCK]; n_labels];
    let mut ac_count = vec![0usize; n_labels];
    for (i, block) in fm.blocks.iter().enumerate() {
        if !mask.flags[i] {
            let l = ctx.labels.label(i) as usize;
            ac_count[l] += 1;
            for (acc, &c) in ac_sum[l].iter_mut().zip(block).skip(1) {
                *acc += c;
            }
        }
    }

    let mut state: Vec<State> = mask
        .flags
        .iter()
        .map(|&m| if m { State::Pending } else { State::Trusted })
        .collect();

    let fill_of = |i: usize| {
        let label = ctx.labels.label(i) as usize;
        ctx.fills.as_ref().and_then(|f| f.get(label)).map(|&f| fill_dc(f))
    };
    let donor_dc = |out: &FeatureMap, state: &[State], i: usize, same_label: bool, accept: &dyn Fn(State) -> bool| {
        let label = ctx.labels.label(i);
        let (sum, n) = neighbors(cols, rows, i)
            .filter(|&j| accept(state[j]) && (!same_label || ctx.labels.label(j) == label))
            .fold((0.0, 0usize), |(s, n), j| (s + out.blocks[j][0], n + 1));
        (n > 0).then(|| sum / n as f64)
    };

    for pass in 0..2 {
        let accept: &dyn Fn(State) -> bool = if pass == 0 {
            &|s| s == State::Trusted
        } else {
            &|s| s != State::Pending
        };
        for i in 0..cols * rows {
            if state[i] != State::Pending {
                continue;
            }
            let own = donor_dc(&out, &state, i, true, accept);
            let dc = match fill_of(i) {
                Some(fill) => own.or((pass == 1).then_some(fill)),
                None => own
                    .or_else(|| donor_dc(&out, &state, i, false, accept))
                    .or((pass == 1).then_some(0.0)),
            };
            let Some(dc) = dc else { continue };
            let label = ctx.labels.label(i) as usize;
            let block = &mut out.blocks[i];
            block[0] = dc;
            for (k, c) in block.iter_mut().enumerate().skip(1) {
                *c = if ac_count[label] > 0 {
                    ac_sum[label][k] / ac_count[label] as f64
                } else {
                    0.0
                };
            }
            state[i] = State::Repaired;
        }
    }
    out
}

/// Flat synthesis: every block of a dropped label becomes a DC-only block at
/// the label's fill intensity.
pub fn synthesize_dropped_regions(
    fm: &FeatureMap,
    labels: &SemanticLabelMap,
    fills: &[u8],
    dropped: &[u8],
) -> FeatureMap {
    let mut out = fm.clone();
    for (i, block) in out.blocks.iter_mut().enumerate() {
        let label = labels.label(i);
        if dropped.contains(&label) {
            *block = [0.0; COEFFS_PER_BLOCK];
            block[0] = fill_dc(fills[label as usize]);
        }
    }
    out
}

pub fn fuse_and_reconstruct(fm: &FeatureMap, grid: &BlockGrid) -> SourceImage {
    inverse_transform(fm, grid)
}
