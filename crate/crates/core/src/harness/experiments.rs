//! Monte Carlo rate-distortion sweeps and the side-by-side comparison of
//! the baseline against the digital chain.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::source_io::{write_image, SourceImage, BLOCK_SIZE};

use super::config::{Chain, TrialConfig};
use super::trial::{prepare, run_prepared, Prepared, ReconstructionReport};

pub const CSV_HEADER: &str =
    "chain,R,snr_db,mode,psnr_mean,psnr_std,wmse_mean,wmse_std,mask_frac_mean,side_info_frac";

/// Sample mean and standard deviation (0 for a single sample).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Usually a chain name; comparison rows use their own tags.
    pub chain: String,
    pub rate: f64,
    pub snr_db: f64,
    pub mode: String,
    pub psnr_mean: f64,
    pub psnr_std: f64,
    pub wmse_mean: f64,
    pub wmse_std: f64,
    pub mask_frac_mean: f64,
    pub side_info_frac: f64,
}

impl SweepRow {
    pub fn from_reports(chain: impl Into<String>, reports: &[ReconstructionReport]) -> Self {
        assert!(!reports.is_empty());
        let col = |f: fn(&ReconstructionReport) -> f64| reports.iter().map(f).collect::<Vec<_>>();
        let (psnr_mean, psnr_std) = mean_std(&col(|r| r.psnr));
        let (wmse_mean, wmse_std) = mean_std(&col(|r| r.weighted_mse));
        let (mask_frac_mean, _) = mean_std(&col(|r| r.mask_fraction));
        let (side_info_frac, _) = mean_std(&col(|r| r.side_info_symbols as f64 / r.budget.max(1) as f64));
        let mut modes: Vec<String> = reports
            .iter()
            .map(|r| r.mode.map_or("n/a".to_string(), |m| m.to_string()))
            .collect();
        modes.sort();
        modes.dedup();
        Self {
            chain: chain.into(),
            rate: reports[0].rate,
            snr_db: reports[0].snr_db,
            mode: modes.join("|"),
            psnr_mean,
            psnr_std,
            wmse_mean,
            wmse_std,
            mask_frac_mean,
            side_info_frac,
        }
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            self.chain,
            self.rate,
            self.snr_db,
            self.mode,
            self.psnr_mean,
            self.psnr_std,
            self.wmse_mean,
            self.wmse_std,
            self.mask_frac_mean,
            self.side_info_frac
        )
    }
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.to_csv());
    }
    out
}

/// Runs `trials` seeds starting at `cfg.seed`, in parallel, returned in
/// seed order.
pub fn run_seeds(prep: &Prepared, cfg: &TrialConfig, trials: usize) -> Result<Vec<ReconstructionReport>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|k| {
            let trial = TrialConfig {
                seed: cfg.seed.wrapping_add(k),
                ..cfg.clone()
            };
            run_prepared(prep, &trial)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    /// One row per (chain, R), chains in fixed order, R as given.
    pub rows: Vec<SweepRow>,
    /// Soft-check violations: mean weighted MSE rising with R.
    pub warnings: Vec<String>,
}

pub fn run_rd_sweep(base: &TrialConfig, rates: &[f64], trials: usize) -> Result<Sweep> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let prep = prepare(base)?;
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for chain in base.enabled_chains() {
        let start = rows.len();
        for &rate in rates {
            let cfg = TrialConfig {
                chain,
                rate,
                ..base.clone()
            };
            let reports = run_seeds(&prep, &cfg, trials)?;
            rows.push(SweepRow::from_reports(chain.to_string(), &reports));
        }
        let chain_rows = &rows[start..];
        for pair in chain_rows.windows(2) {
            if pair[1].rate > pair[0].rate && pair[1].wmse_mean > pair[0].wmse_mean {
                warnings.push(format!(
                    "{chain}: mean weighted MSE rose from {:.3} at R={} to {:.3} at R={}",
                    pair[0].wmse_mean, pair[0].rate, pair[1].wmse_mean, pair[1].rate
                ));
            }
        }
    }
    Ok(Sweep { rows, warnings })
}

/// Reconstruction with untrusted blocks painted black.
pub fn mask_image(image: &SourceImage, mask: &[bool], cols: usize) -> SourceImage {
    let mut samples = image.samples().to_vec();
    let w = image.width();
    for (i, px) in samples.iter_mut().enumerate() {
        let (x, y) = (i % w, i / w);
        if mask[(y / BLOCK_SIZE) * cols + x / BLOCK_SIZE] {
            *px = 0;
        }
    }
    SourceImage::new(w, image.height(), samples).expect("same dims")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig5 {
    pub baseline: ReconstructionReport,
    pub sct_uncorrected: ReconstructionReport,
    pub sct_corrected: ReconstructionReport,
    pub files: Vec<PathBuf>,
}

/// Baseline vs digital SCT without and with correction, same budget,
/// channel and seed. Writes four PGMs and a three-row CSV into `out_dir`.
pub fn run_fig5_comparison(cfg: &TrialConfig, out_dir: impl AsRef<Path>) -> Result<Fig5> {
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let prep = prepare(cfg)?;
    let with = |chain: Chain, correction: bool| TrialConfig {
        chain,
        correction,
        ..cfg.clone()
    };
    let baseline = run_prepared(&prep, &with(Chain::Baseline, false))?;
    let sct_uncorrected = run_prepared(&prep, &with(Chain::Digital, false))?;
    let sct_corrected = run_prepared(&prep, &with(Chain::Digital, true))?;

    let mut files = Vec::new();
    let masked = mask_image(&sct_uncorrected.image, &sct_uncorrected.mask, prep.grid.cols);
    for (name, image) in [
        ("baseline.pgm", &baseline.image),
        ("sct_no_correction.pgm", &sct_uncorrected.image),
        ("sct_correction.pgm", &sct_corrected.image),
        ("sct_mask.pgm", &masked),
    ] {
        let path = out_dir.join(name);
        write_image(&path, image)?;
        files.push(path);
    }
    let rows = [
        SweepRow::from_reports("baseline", std::slice::from_ref(&baseline)),
        SweepRow::from_reports("digital-no-correction", std::slice::from_ref(&sct_uncorrected)),
        SweepRow::from_reports("digital-correction", std::slice::from_ref(&sct_corrected)),
    ];
    let csv_path = out_dir.join("fig5.csv");
    std::fs::write(&csv_path, to_csv(&rows)).map_err(|e| Error::io(&csv_path, e))?;
    files.push(csv_path);
    Ok(Fig5 {
        baseline,
        sct_uncorrected,
        sct_corrected,
        files,
    })
}
