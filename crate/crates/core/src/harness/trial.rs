//! One end-to-end trial.

use std::fmt;

use crate::allocation::{
    allocate_budgets, assign_rbs, decode_side_info_prefix, encode_side_info, realize_channel,
    select_mode, total_budget, AllocationPlan, ChannelConfig, Mode, SideInfo,
};
use crate::analog::{analog_roundtrip, band_sections, AnalogParams};
use crate::correction::{build_mask, fuse_and_reconstruct, inpaint_feature_map, synthesize_dropped_regions, CorrectionContext};
use crate::derive_seed;
use crate::digital::{baseline_classical, digital_roundtrip, side_info_roundtrip, side_info_symbols};
use crate::error::{Error, Result};
use crate::semantics::{
    entropy_map, forward_transform, fuse_importance, load_activation_map, saliency_map, segment_sfvs,
    FeatureMap, ImportanceMap, ImportanceMode, SemanticLabelMap, Sfv,
};
use crate::source_io::{
    block_labels, load_image, load_label_map, pad_and_grid, synthesize_source, BlockGrid, PixelLabelMap,
    SourceImage,
};

use super::config::{Chain, SourceSpec, TrialConfig};
use super::metrics::compute_metrics;

const CHANNEL_STREAM: u64 = 0;
const NOISE_STREAM: u64 = 1;
const SIDE_STREAM: u64 = 2;

/// Seed-independent analysis of the source: everything the transmitter
/// derives before touching the channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub image: SourceImage,
    pub grid: BlockGrid,
    pub fm: FeatureMap,
    pub labels: SemanticLabelMap,
    pub importance: ImportanceMap,
    /// Descending score.
    pub sfvs: Vec<Sfv>,
    /// Mean original intensity per label.
    pub fills: Vec<u8>,
}

pub fn load_source(spec: &SourceSpec) -> Result<(SourceImage, PixelLabelMap)> {
    match spec {
        SourceSpec::File { path, labels } => {
            let image = load_image(path)?;
            let map = match labels {
                Some(l) => load_label_map(l, image.dims())?,
                None => PixelLabelMap::uniform(image.width(), image.height()),
            };
            Ok((image, map))
        }
        SourceSpec::Synthetic { pattern, size, seed } => synthesize_source(*pattern, *size, *seed),
    }
}

fn label_fills(image: &SourceImage, labels: &SemanticLabelMap, grid: &BlockGrid) -> Vec<u8> {
    let mut acc = vec![(0u64, 0u64); labels.num_labels()];
    for y in 0..image.height() {
        for x in 0..image.width() {
            let block = (y / 8) * grid.cols + x / 8;
            let slot = &mut acc[labels.label(block) as usize];
            slot.0 += image.get(x, y) as u64;
            slot.1 += 1;
        }
    }
    acc.iter()
        .map(|&(sum, n)| if n == 0 { 128 } else { ((sum as f64 / n as f64).round()) as u8 })
        .collect()
}

pub fn prepare(cfg: &TrialConfig) -> Result<Prepared> {
    let (image, pixel_labels) = load_source(&cfg.source)?;
    let (padded, grid) = pad_and_grid(&image);
    let fm = forward_transform(&padded, &grid);
    let labels = block_labels(&pixel_labels, &grid);
    let refinement = match cfg.importance_mode {
        ImportanceMode::Htc => saliency_map(&fm),
        ImportanceMode::Mtc => {
            let path = cfg.activation.as_ref().ok_or_else(|| {
                crate::Error::Config("importance.mode = mtc needs importance.activation".into())
            })?;
            load_activation_map(path, &grid)?
        }
    };
    let importance = fuse_importance(&entropy_map(&fm), &refinement, cfg.importance_w)?;
    let sfvs = segment_sfvs(&fm, &labels, &importance);
    let fills = label_fills(&image, &labels, &grid);
    Ok(Prepared {
        image,
        grid,
        fm,
        labels,
        importance,
        sfvs,
        fills,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport {
    pub chain: Chain,
    pub rate: f64,
    pub snr_db: f64,
    pub seed: u64,
    pub psnr: f64,
    pub mse: f64,
    pub weighted_mse: f64,
    pub per_label_psnr: Vec<(u8, f64)>,
    pub budget: usize,
    pub symbols_used: usize,
    pub side_info_symbols: usize,
    /// Fraction of blocks handed to correction as untrusted.
    pub mask_fraction: f64,
    /// `None` for the baseline.
    pub mode: Option<Mode>,
    pub dropped_labels: Vec<u8>,
    pub truncated: bool,
    pub side_info_lost: bool,
    /// Analog decoding ran without band scales for some SFV.
    pub degraded: bool,
    pub image: SourceImage,
    /// Per-block untrusted flags behind `mask_fraction`.
    pub mask: Vec<bool>,
}

impl fmt::Display for ReconstructionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "chain = {}", self.chain)?;
        writeln!(f, "rate = {}", self.rate)?;
        writeln!(f, "snr_db = {}", self.snr_db)?;
        writeln!(f, "seed = {}", self.seed)?;
        match self.mode {
            Some(m) => writeln!(f, "mode = {m}")?,
            None => writeln!(f, "mode = n/a")?,
        }
        writeln!(f, "psnr = {:.4}", self.psnr)?;
        writeln!(f, "mse = {:.6}", self.mse)?;
        writeln!(f, "weighted_mse = {:.6}", self.weighted_mse)?;
        for (label, p) in &self.per_label_psnr {
            writeln!(f, "psnr.label{label} = {p:.4}")?;
        }
        writeln!(f, "budget = {}", self.budget)?;
        writeln!(f, "symbols_used = {}", self.symbols_used)?;
        writeln!(f, "side_info_symbols = {}", self.side_info_symbols)?;
        writeln!(f, "mask_fraction = {:.6}", self.mask_fraction)?;
        if self.mode.is_some() {
            let dropped: Vec<String> = self.dropped_labels.iter().map(u8::to_string).collect();
            writeln!(f, "dropped_labels = {}", dropped.join(","))?;
            writeln!(f, "truncated = {}", self.truncated)?;
            writeln!(f, "side_info_lost = {}", self.side_info_lost)?;
            writeln!(f, "degraded = {}", self.degraded)?;
        }
        Ok(())
    }
}

/// RBs needed to hold the budget plus one spare per SFV and the side info.
fn channel_for(cfg: &TrialConfig, prep: &Prepared, budget: usize) -> Result<crate::allocation::ChannelRealization> {
    let n_rb = match cfg.channel.n_rb {
        0 => budget.div_ceil(cfg.channel.n_re) + prep.sfvs.len() + 1,
        n => n,
    };
    realize_channel(&ChannelConfig {
        n_rb,
        seed: derive_seed(cfg.seed, CHANNEL_STREAM),
        ..cfg.channel.clone()
    })
}

pub fn run_trial(cfg: &TrialConfig) -> Result<ReconstructionReport> {
    run_prepared(&prepare(cfg)?, cfg)
}

/// Runs `cfg.chain` on an already analysed source.
pub fn run_prepared(prep: &Prepared, cfg: &TrialConfig) -> Result<ReconstructionReport> {
    cfg.validate()?;
    let budget = total_budget(cfg.rate, prep.image.width(), prep.image.height());
    match cfg.chain {
        Chain::Baseline => run_baseline(prep, cfg, budget),
        Chain::Digital | Chain::Analog => run_sct(prep, cfg, budget),
    }
}

fn run_baseline(prep: &Prepared, cfg: &TrialConfig, budget: usize) -> Result<ReconstructionReport> {
    let ch = channel_for(cfg, prep, budget)?;
    let out = baseline_classical(&prep.fm, budget, &ch, cfg.channel.n_re, derive_seed(cfg.seed, NOISE_STREAM))?;
    let image = fuse_and_reconstruct(&out.fm, &prep.grid);
    let m = compute_metrics(&prep.image, &image, &prep.importance, &prep.labels);
    Ok(ReconstructionReport {
        chain: Chain::Baseline,
        rate: cfg.rate,
        snr_db: cfg.channel.snr_db,
        seed: cfg.seed,
        psnr: m.psnr,
        mse: m.mse,
        weighted_mse: m.weighted_mse,
        per_label_psnr: m.per_label_psnr,
        budget,
        symbols_used: out.symbols_used,
        side_info_symbols: 0,
        mask_fraction: 0.0,
        mode: None,
        dropped_labels: Vec::new(),
        truncated: false,
        side_info_lost: false,
        degraded: false,
        image,
        mask: vec![false; prep.fm.n_blocks()],
    })
}

/// Allocation with side information reserved. The side-info size depends on
/// the plan when band scales are included, so the reservation grows a byte
/// at a time until it covers what the plan needs.
fn plan_with_side_info(
    prep: &Prepared,
    cfg: &TrialConfig,
    budget: usize,
    mode: Mode,
    with_bands: bool,
) -> Result<(AllocationPlan, Vec<u8>, usize)> {
    let scored: Vec<(u8, f64)> = prep.sfvs.iter().map(|s| (s.label, s.score)).collect();
    let send = mode == Mode::Selective || with_bands;
    if !send {
        return Ok((allocate_budgets(&scored, budget, 0, mode, cfg.budget)?, Vec::new(), 1));
    }
    let side_bytes = |plan: Option<&AllocationPlan>| {
        encode_side_info(&SideInfo {
            labels: prep.labels.clone(),
            fills: prep.fills.clone(),
            bands: match plan {
                Some(p) if with_bands => band_sections(&prep.sfvs, p),
                _ => Vec::new(),
            },
        })
    };
    // fewer copies only when the configured count does not fit
    let mut repeat = cfg.side_info_repeat;
    loop {
        match reserve(&scored, budget, mode, cfg, repeat, &side_bytes) {
            Err(Error::Infeasible { .. }) if repeat > 1 => repeat -= 1,
            other => return other.map(|(plan, bytes)| (plan, bytes, repeat)),
        }
    }
}

fn reserve(
    scored: &[(u8, f64)],
    budget: usize,
    mode: Mode,
    cfg: &TrialConfig,
    repeat: usize,
    side_bytes: &dyn Fn(Option<&AllocationPlan>) -> Vec<u8>,
) -> Result<(AllocationPlan, Vec<u8>)> {
    let mut n_bytes = side_bytes(None).len();
    loop {
        let plan = allocate_budgets(scored, budget, side_info_symbols(n_bytes, repeat), mode, cfg.budget)?;
        let bytes = side_bytes(Some(&plan));
        if bytes.len() <= n_bytes {
            return Ok((plan, bytes));
        }
        n_bytes += 1;
    }
}

fn run_sct(prep: &Prepared, cfg: &TrialConfig, budget: usize) -> Result<ReconstructionReport> {
    let n_re = cfg.channel.n_re;
    let (cols, rows) = (prep.fm.cols, prep.fm.rows);
    let scores: Vec<f64> = prep.sfvs.iter().map(|s| s.score).collect();
    let mode = select_mode(&scores, cfg.tau);
    let with_bands = cfg.chain == Chain::Analog;
    let (plan, side_bytes, repeat) = plan_with_side_info(prep, cfg, budget, mode, with_bands)?;

    let ch = channel_for(cfg, prep, budget)?;
    let plan = assign_rbs(&plan, &ch, n_re, cfg.assign);

    let side = if side_bytes.is_empty() {
        None
    } else {
        let received = side_info_roundtrip(
            &side_bytes,
            plan.side_info_symbols,
            repeat,
            &plan.side_info_rbs,
            &ch,
            n_re,
            derive_seed(cfg.seed, SIDE_STREAM),
        )?;
        Some(decode_side_info_prefix(&received, with_bands).ok())
    };
    let side_info_lost = matches!(side, Some(None));
    let side = side.flatten();

    let noise_seed = derive_seed(cfg.seed, NOISE_STREAM);
    let (fm, flags, symbols_used, degraded) = match cfg.chain {
        Chain::Digital => {
            let rt = digital_roundtrip(&prep.sfvs, &plan, &ch, n_re, cfg.payload_bits, cols, rows, noise_seed)?;
            (rt.fm, rt.mask, rt.symbols_used, false)
        }
        _ => {
            let params = AnalogParams {
                n_re,
                flag_threshold: cfg.flag_threshold,
                priors: side.as_ref().map(|s| s.bands.as_slice()),
                seed: noise_seed,
            };
            let rt = analog_roundtrip(&prep.sfvs, &plan, &ch, cols, rows, &params)?;
            (rt.fm, rt.flags, rt.symbols_used, rt.degraded)
        }
    };

    let mut mask = build_mask(cols, rows, &flags, &prep.sfvs, &plan);
    let dropped_labels: Vec<u8> = plan.entries.iter().filter(|e| e.dropped).map(|e| e.label).collect();
    let fills = side.as_ref().map(|s| s.fills.clone());
    let mut fm = fm;
    if cfg.correction {
        let ctx = CorrectionContext {
            labels: prep.labels.clone(),
            fills: fills.clone(),
        };
        fm = inpaint_feature_map(&fm, &mask, &ctx);
    }
    if !dropped_labels.is_empty() {
        // dropped regions are synthesized from side info or left at zero
        let zeros = vec![128u8; prep.labels.num_labels()];
        fm = synthesize_dropped_regions(&fm, &prep.labels, fills.as_deref().unwrap_or(&zeros), &dropped_labels);
        if fills.is_some() {
            for (i, flag) in mask.flags.iter_mut().enumerate() {
                if dropped_labels.contains(&prep.labels.label(i)) {
                    *flag = false;
                }
            }
        }
    }

    let image = fuse_and_reconstruct(&fm, &prep.grid);
    let m = compute_metrics(&prep.image, &image, &prep.importance, &prep.labels);
    let truncated = plan.side_info_truncated || plan.entries.iter().any(|e| e.truncated);
    Ok(ReconstructionReport {
        chain: cfg.chain,
        rate: cfg.rate,
        snr_db: cfg.channel.snr_db,
        seed: cfg.seed,
        psnr: m.psnr,
        mse: m.mse,
        weighted_mse: m.weighted_mse,
        per_label_psnr: m.per_label_psnr,
        budget,
        symbols_used,
        side_info_symbols: plan.side_info_symbols,
        mask_fraction: mask.fraction(),
        mode: Some(mode),
        dropped_labels,
        truncated,
        side_info_lost,
        degraded,
        image,
        mask: mask.flags,
    })
}
