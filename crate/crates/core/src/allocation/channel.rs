use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fading {
    #[default]
    Awgn,
    /// One Rayleigh amplitude per RB, static for the trial.
    RayleighBlock,
}

impl FromStr for Fading {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "awgn" => Ok(Fading::Awgn),
            "rayleigh-block" => Ok(Fading::RayleighBlock),
            other => Err(Error::Config(format!("unknown fading model '{other}'"))),
        }
    }
}

impl fmt::Display for Fading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fading::Awgn => "awgn",
            Fading::RayleighBlock => "rayleigh-block",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub snr_db: f64,
    pub fading: Fading,
    pub n_rb: usize,
    /// Complex symbols per RB.
    pub n_re: usize,
    pub seed: u64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            snr_db: 1.0,
            fading: Fading::Awgn,
            n_rb: 64,
            n_re: 12,
            seed: 0,
        }
    }
}

/// Per-RB amplitude gains and the complex noise variance (unit symbol energy).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub gains: Vec<f64>,
    pub noise_var: f64,
}

impl ChannelRealization {
    pub fn noise_var_for_snr(snr_db: f64) -> f64 {
        10f64.powf(-snr_db / 10.0)
    }

    pub fn n_rb(&self) -> usize {
        self.gains.len()
    }
}

pub fn realize_channel(cfg: &ChannelConfig) -> Result<ChannelRealization> {
    if cfg.n_rb == 0 || cfg.n_re == 0 {
        return Err(Error::InvalidArgument(format!(
            "channel needs n_rb >= 1 and n_re >= 1, got {} and {}",
            cfg.n_rb, cfg.n_re
        )));
    }
    let gains = match cfg.fading {
        Fading::Awgn => vec![1.0; cfg.n_rb],
        Fading::RayleighBlock => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..cfg.n_rb)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    ((re * re + im * im) / 2.0).sqrt()
                })
                .collect()
        }
    };
    Ok(ChannelRealization {
        gains,
        noise_var: ChannelRealization::noise_var_for_snr(cfg.snr_db),
    })
}

/// Shannon capacity of one RB in bits.
pub fn rb_capacity(gain: f64, noise_var: f64, n_re: usize) -> f64 {
    n_re as f64 * (1.0 + gain * gain / noise_var).log2()
}
