//! Flat `key = value` trial configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::allocation::{AssignStrategy, BudgetParams, ChannelConfig, Fading};
use crate::analog::DEFAULT_FLAG_THRESHOLD;
use crate::digital::packet::{DEFAULT_PAYLOAD_BITS, MAX_PAYLOAD_BITS};
use crate::error::{Error, Result};
use crate::semantics::ImportanceMode;
use crate::source_io::Pattern;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Chain {
    Digital,
    Analog,
    Baseline,
}

impl Chain {
    pub const ALL: [Chain; 3] = [Chain::Digital, Chain::Analog, Chain::Baseline];
}

impl FromStr for Chain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "digital" => Ok(Chain::Digital),
            "analog" => Ok(Chain::Analog),
            "baseline" => Ok(Chain::Baseline),
            other => Err(Error::Config(format!("unknown chain '{other}'"))),
        }
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Chain::Digital => "digital",
            Chain::Analog => "analog",
            Chain::Baseline => "baseline",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SourceSpec {
    File {
        path: PathBuf,
        /// Pixel label map; a single label when absent.
        labels: Option<PathBuf>,
    },
    Synthetic {
        pattern: Pattern,
        size: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub source: SourceSpec,
    pub importance_mode: ImportanceMode,
    pub importance_w: f64,
    pub activation: Option<PathBuf>,
    pub rate: f64,
    pub chain: Chain,
    /// `n_rb = 0` means "just enough for the budget".
    pub channel: ChannelConfig,
    pub tau: f64,
    pub budget: BudgetParams,
    pub assign: AssignStrategy,
    pub payload_bits: usize,
    pub flag_threshold: f64,
    /// Copies of the coded side-info frame.
    pub side_info_repeat: usize,
    pub correction: bool,
    pub seed: u64,
    /// Chains included in sweeps.
    pub digital_enabled: bool,
    pub analog_enabled: bool,
    pub baseline_enabled: bool,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            source: SourceSpec::Synthetic {
                pattern: Pattern::TwoRegion,
                size: 64,
                seed: 1,
            },
            importance_mode: ImportanceMode::Htc,
            importance_w: 0.5,
            activation: None,
            rate: 0.125,
            chain: Chain::Digital,
            channel: ChannelConfig {
                n_rb: 0,
                ..ChannelConfig::default()
            },
            tau: 0.5,
            budget: BudgetParams::default(),
            assign: AssignStrategy::SymbolCount,
            payload_bits: DEFAULT_PAYLOAD_BITS,
            flag_threshold: DEFAULT_FLAG_THRESHOLD,
            side_info_repeat: 2,
            correction: true,
            seed: 0,
            digital_enabled: true,
            analog_enabled: true,
            baseline_enabled: true,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{value}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected a boolean, got '{value}'"))),
    }
}

impl TrialConfig {
    /// Parses config text. Blank lines and `#` comments are ignored; unknown
    /// or repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = TrialConfig::default();
        let mut seen = std::collections::HashSet::new();
        let mut path: Option<PathBuf> = None;
        let mut labels: Option<PathBuf> = None;
        let (mut pattern, mut size, mut source_seed) = (Pattern::TwoRegion, 64usize, 1u64);

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", lineno + 1)))?;
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!("duplicate key '{key}'")));
            }
            match key {
                "source.path" => path = Some(PathBuf::from(value)),
                "source.labels" => labels = Some(PathBuf::from(value)),
                "source.pattern" => pattern = value.parse()?,
                "source.size" => size = parse_num(key, value)?,
                "source.seed" => source_seed = parse_num(key, value)?,
                "importance.mode" => cfg.importance_mode = value.parse()?,
                "importance.w" => cfg.importance_w = parse_num(key, value)?,
                "importance.activation" => cfg.activation = Some(PathBuf::from(value)),
                "trial.rate" => cfg.rate = parse_num(key, value)?,
                "trial.chain" => cfg.chain = value.parse()?,
                "trial.seed" => cfg.seed = parse_num(key, value)?,
                "channel.snr_db" => cfg.channel.snr_db = parse_num(key, value)?,
                "channel.fading" => cfg.channel.fading = value.parse::<Fading>()?,
                "channel.n_rb" => {
                    cfg.channel.n_rb = if value == "auto" { 0 } else { parse_num(key, value)? }
                }
                "channel.n_re" => cfg.channel.n_re = parse_num(key, value)?,
                "alloc.tau" => cfg.tau = parse_num(key, value)?,
                "alloc.drop_quantile" => cfg.budget.drop_quantile = parse_num(key, value)?,
                "alloc.n_min" => cfg.budget.n_min = parse_num(key, value)?,
                "assign.capacity_aligned" => {
                    cfg.assign = if parse_bool(key, value)? {
                        AssignStrategy::CapacityAligned
                    } else {
                        AssignStrategy::SymbolCount
                    }
                }
                "digital.payload_bits" => cfg.payload_bits = parse_num(key, value)?,
                "digital.code" => {
                    if value != "conv_k7" {
                        return Err(Error::Config(format!("unsupported digital.code '{value}'")));
                    }
                }
                "digital.enabled" => cfg.digital_enabled = parse_bool(key, value)?,
                "analog.enabled" => cfg.analog_enabled = parse_bool(key, value)?,
                "analog.flag_threshold" => cfg.flag_threshold = parse_num(key, value)?,
                "side_info.repeat" => cfg.side_info_repeat = parse_num(key, value)?,
                "baseline.enabled" => cfg.baseline_enabled = parse_bool(key, value)?,
                "correction.enabled" => cfg.correction = parse_bool(key, value)?,
                other => return Err(Error::Config(format!("unknown key '{other}'"))),
            }
        }

        cfg.source = match path {
            Some(path) => SourceSpec::File { path, labels },
            None if labels.is_some() => {
                return Err(Error::Config("source.labels needs source.path".into()));
            }
            None => SourceSpec::Synthetic {
                pattern,
                size,
                seed: source_seed,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and parses a config file. Relative paths inside it resolve
    /// against the file's directory, and every referenced file must exist.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let SourceSpec::File { path, labels } = &mut cfg.source {
            resolve(path);
            if let Some(l) = labels {
                resolve(l);
            }
        }
        if let Some(a) = &mut cfg.activation {
            resolve(a);
        }
        cfg.check_files()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.rate > 0.0 && self.rate.is_finite()) {
            return bad(format!("trial.rate must be positive, got {}", self.rate));
        }
        if !(0.0..=1.0).contains(&self.importance_w) {
            return bad(format!("importance.w must lie in [0, 1], got {}", self.importance_w));
        }
        if !(0.0..=1.0).contains(&self.budget.drop_quantile) {
            return bad(format!("alloc.drop_quantile must lie in [0, 1], got {}", self.budget.drop_quantile));
        }
        if !self.tau.is_finite() || self.tau < 0.0 {
            return bad(format!("alloc.tau must be non-negative, got {}", self.tau));
        }
        if self.channel.n_re == 0 {
            return bad("channel.n_re must be positive".into());
        }
        if !self.channel.snr_db.is_finite() {
            return bad("channel.snr_db must be finite".into());
        }
        if self.side_info_repeat == 0 {
            return bad("side_info.repeat must be at least 1".into());
        }
        if self.payload_bits == 0 || self.payload_bits > MAX_PAYLOAD_BITS {
            return bad(format!("digital.payload_bits must lie in 1..={MAX_PAYLOAD_BITS}"));
        }
        if self.importance_mode == ImportanceMode::Mtc && self.activation.is_none() {
            return bad("importance.mode = mtc needs importance.activation".into());
        }
        if let SourceSpec::Synthetic { size, .. } = self.source {
            if size == 0 || size % crate::source_io::BLOCK_SIZE != 0 {
                return bad(format!("source.size must be a positive multiple of 8, got {size}"));
            }
        }
        Ok(())
    }

    fn check_files(&self) -> Result<()> {
        let mut files: Vec<&Path> = Vec::new();
        if let SourceSpec::File { path, labels } = &self.source {
            files.push(path);
            files.extend(labels.as_deref());
        }
        files.extend(self.activation.as_deref());
        match files.into_iter().find(|f| !f.is_file()) {
            Some(missing) => Err(Error::Config(format!("file not found: {}", missing.display()))),
            None => Ok(()),
        }
    }

    /// Chains enabled for sweeps, in fixed order.
    pub fn enabled_chains(&self) -> Vec<Chain> {
        let on = [self.digital_enabled, self.analog_enabled, self.baseline_enabled];
        Chain::ALL.into_iter().zip(on).filter(|&(_, e)| e).map(|(c, _)| c).collect()
    }
}
