//! Mode selection, importance-proportional symbol budgets, OFDM resource
//! block (RB) assignment and the side-information codec.

mod assign;
mod channel;
mod side_info;

use std::fmt;

pub use assign::{assign_rbs, AssignStrategy};
pub use channel::{realize_channel, rb_capacity, ChannelConfig, ChannelRealization, Fading};
pub use side_info::{
    decode_label_side_info, decode_side_info, decode_side_info_prefix, encode_label_side_info,
    encode_side_info,
    BandSection, SideInfo, SideInfoLost,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Every SFV is transmitted.
    Overall,
    /// Low-importance SFVs are dropped and synthesized from the label map.
    Selective,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Overall => "overall",
            Mode::Selective => "selective",
        })
    }
}

/// Selective iff the coefficient of variation of the scores exceeds `tau`.
pub fn select_mode(scores: &[f64], tau: f64) -> Mode {
    if scores.is_empty() {
        return Mode::Overall;
    }
    let n = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / n;
    if mean <= 0.0 {
        return Mode::Overall;
    }
    let var = scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
    if var.sqrt() / mean > tau {
        Mode::Selective
    } else {
        Mode::Overall
    }
}

/// `floor(rate · width · height)` complex symbols.
pub fn total_budget(rate: f64, width: usize, height: usize) -> usize {
    (rate * (width * height) as f64).floor() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanEntry {
    pub label: u8,
    pub score: f64,
    pub n_symbols: usize,
    pub rb_ids: Vec<usize>,
    pub dropped: bool,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationPlan {
    pub mode: Mode,
    /// One entry per SFV, descending score.
    pub entries: Vec<PlanEntry>,
    pub side_info_symbols: usize,
    pub side_info_rbs: Vec<usize>,
    /// Side info did not fit into the available RBs.
    pub side_info_truncated: bool,
}

impl AllocationPlan {
    pub fn symbols_used(&self) -> usize {
        self.entries.iter().map(|e| e.n_symbols).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetParams {
    pub drop_quantile: f64,
    pub n_min: usize,
}

impl Default for BudgetParams {
    fn default() -> Self {
        Self {
            drop_quantile: 0.25,
            n_min: 16,
        }
    }
}

/// Linear-interpolation quantile of `values` at `q` in `[0, 1]`.
fn quantile(values: &[f64], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Splits `budget - side_info_symbols` over the SFVs in proportion to their
/// scores. `sfvs` is `(label, score)` sorted by descending score.
pub fn allocate_budgets(
    sfvs: &[(u8, f64)],
    budget: usize,
    side_info_symbols: usize,
    mode: Mode,
    params: BudgetParams,
) -> Result<AllocationPlan> {
    debug_assert!(sfvs.windows(2).all(|w| w[0].1 >= w[1].1), "scores must descend");
    let infeasible = |needed| Error::Infeasible { budget, needed };
    let available = budget
        .checked_sub(side_info_symbols)
        .ok_or_else(|| infeasible(side_info_symbols))?;

    let dropped: Vec<bool> = match mode {
        Mode::Overall => vec![false; sfvs.len()],
        Mode::Selective => {
            let scores: Vec<f64> = sfvs.iter().map(|s| s.1).collect();
            let cut = quantile(&scores, params.drop_quantile);
            scores.iter().map(|&s| s < cut).collect()
        }
    };
    let kept: Vec<usize> = (0..sfvs.len()).filter(|&i| !dropped[i]).collect();
    let needed = params.n_min * kept.len();
    if available < needed {
        return Err(infeasible(needed + side_info_symbols));
    }

    let total_score: f64 = kept.iter().map(|&i| sfvs[i].1).sum();
    let mut n = vec![0usize; sfvs.len()];
    for &i in &kept {
        let share = if total_score > 0.0 {
            sfvs[i].1 / total_score
        } else {
            1.0 / kept.len() as f64
        };
        n[i] = params.n_min.max((available as f64 * share).floor() as usize);
    }
    let sum: usize = n.iter().sum();
    if sum < available {
        if let Some(&top) = kept.first() {
            n[top] += available - sum;
        }
    } else {
        // n_min floors overshot: shave the lowest-score entries first
        let mut excess = sum - available;
        for &i in kept.iter().rev() {
            if excess == 0 {
                break;
            }
            let cut = (n[i] - params.n_min).min(excess);
            n[i] -= cut;
            excess -= cut;
        }
    }

    let entries = sfvs
        .iter()
        .enumerate()
        .map(|(i, &(label, score))| PlanEntry {
            label,
            score,
            n_symbols: n[i],
            rb_ids: Vec::new(),
            dropped: dropped[i],
            truncated: false,
        })
        .collect();
    Ok(AllocationPlan {
        mode,
        entries,
        side_info_symbols,
        side_info_rbs: Vec::new(),
        side_info_truncated: false,
    })
}
