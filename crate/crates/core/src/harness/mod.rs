//! Configuration, trials, metrics and experiment drivers.

pub mod config;
pub mod experiments;
pub mod metrics;
pub mod trial;

pub use config::{Chain, SourceSpec, TrialConfig};
pub use experiments::{
    mean_std, run_fig5_comparison, run_rd_sweep, run_seeds, to_csv, Fig5, Sweep, SweepRow, CSV_HEADER,
};
pub use metrics::{compute_metrics, psnr, Metrics};
pub use trial::{prepare, run_prepared, run_trial, Prepared, ReconstructionReport};
