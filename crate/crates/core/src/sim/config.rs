//! Experiment configuration. Every key has a default, so an empty file
//! describes the reference setup: 16 receive antennas, 8 beams, 2 users,
//! 4 clusters of 15 rays, 60 GHz carrier, 128 slots, `(W, D, G) = (8, 3, 6)`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{GeometryConfig, TimingConfig, DEFAULT_ANGLE_SPREAD_DEG};
use crate::error::{Error, Result};
use crate::receiver::{ReceiverConfig, WindowSchedule};
use crate::signal::PowerSplit;

/// Receiver/baseline combination evaluated at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Joint channel and data estimation, AirComp on the estimates.
    Full,
    /// Detection and AirComp with the true channel.
    GenieChannel,
    /// Estimated channel, AirComp with the true data symbols.
    GenieSymbols,
    /// True channel and true data symbols.
    GenieBoth,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Full, Mode::GenieChannel, Mode::GenieSymbols, Mode::GenieBoth];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::GenieChannel => "genie-channel",
            Mode::GenieSymbols => "genie-symbols",
            Mode::GenieBoth => "genie-both",
        }
    }

    /// Whether detection runs with the true channel.
    pub fn knows_channel(self) -> bool {
        matches!(self, Mode::GenieChannel | Mode::GenieBoth)
    }

    /// Whether AirComp removes the true data symbols.
    pub fn knows_symbols(self) -> bool {
        matches!(self, Mode::GenieSymbols | Mode::GenieBoth)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s.trim())
            .ok_or_else(|| Error::config(format!("unknown mode `{s}` (expected full, genie-channel, genie-symbols or genie-both)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSection {
    pub num_rx_antennas: usize,
    pub num_users: usize,
    pub num_clusters: usize,
    pub rays_per_cluster: usize,
    pub angle_spread_deg: f64,
}

impl Default for ChannelSection {
    fn default() -> Self {
        Self {
            num_rx_antennas: 16,
            num_users: 2,
            num_clusters: 4,
            rays_per_cluster: 15,
            angle_spread_deg: DEFAULT_ANGLE_SPREAD_DEG,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimingSection {
    pub carrier_freq_hz: f64,
    pub sampling_rate_hz: f64,
    pub dft_size: usize,
    pub guard_fraction: f64,
    pub num_slots: usize,
}

impl Default for TimingSection {
    fn default() -> Self {
        Self { carrier_freq_hz: 60e9, sampling_rate_hz: 2.64e9, dft_size: 512, guard_fraction: 0.25, num_slots: 128 }
    }
}

impl TimingSection {
    pub fn timing(&self, velocity_mps: f64) -> TimingConfig {
        TimingConfig {
            carrier_freq_hz: self.carrier_freq_hz,
            sampling_rate_hz: self.sampling_rate_hz,
            dft_size: self.dft_size,
            guard_fraction: self.guard_fraction,
            velocity_mps,
            num_slots: self.num_slots,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeamformingSection {
    pub num_beams: usize,
}

impl Default for BeamformingSection {
    fn default() -> Self {
        Self { num_beams: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignalSection {
    pub data_power: f64,
    pub computing_power: f64,
}

impl Default for SignalSection {
    fn default() -> Self {
        Self { data_power: 0.99, computing_power: 0.01 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReceiverSection {
    pub window: usize,
    pub overlap: usize,
    pub neighborhood: usize,
    pub iterations: usize,
    pub damping: f64,
}

impl Default for ReceiverSection {
    fn default() -> Self {
        let r = ReceiverConfig::default();
        Self { window: r.window, overlap: r.overlap, neighborhood: r.neighborhood, iterations: r.iterations, damping: r.damping }
    }
}

impl ReceiverSection {
    pub fn config(&self) -> ReceiverConfig {
        ReceiverConfig {
            window: self.window,
            overlap: self.overlap,
            neighborhood: self.neighborhood,
            iterations: self.iterations,
            damping: self.damping,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// `snr_db = -10·log10(N0)` with unit total transmit power.
    pub snr_db: Vec<f64>,
    pub velocity_kmh: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub modes: Vec<Mode>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            snr_db: (-12..=6).step_by(3).map(f64::from).collect(),
            velocity_kmh: vec![10.0, 20.0, 30.0, 40.0],
            trials: 500,
            seed: 1,
            modes: Mode::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub channel: ChannelSection,
    pub timing: TimingSection,
    pub beamforming: BeamformingSection,
    pub signal: SignalSection,
    pub receiver: ReceiverSection,
    pub sweep: SweepSection,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn power_split(&self, snr_db: f64) -> Result<PowerSplit> {
        PowerSplit::new(self.signal.data_power, self.signal.computing_power, noise_power(snr_db))
    }

    /// Checks every module precondition that does not depend on random draws.
    pub fn validate(&self) -> Result<()> {
        let ch = &self.channel;
        let side = (ch.num_rx_antennas as f64).sqrt().round() as usize;
        if ch.num_rx_antennas == 0 || side * side != ch.num_rx_antennas {
            return Err(Error::config(format!("num_rx_antennas = {} is not a positive perfect square", ch.num_rx_antennas)));
        }
        if ch.num_users == 0 || ch.num_clusters == 0 || ch.rays_per_cluster == 0 {
            return Err(Error::config("users, clusters and rays per cluster must be positive"));
        }
        if !(ch.angle_spread_deg >= 0.0 && ch.angle_spread_deg.is_finite()) {
            return Err(Error::config("angle_spread_deg must be finite and nonnegative"));
        }
        let beams = self.beamforming.num_beams;
        if beams == 0 || beams > ch.num_rx_antennas {
            return Err(Error::config(format!("num_beams = {beams} must lie in 1..={}", ch.num_rx_antennas)));
        }
        self.timing.timing(1.0).validate()?;
        PowerSplit::new(self.signal.data_power, self.signal.computing_power, 1.0)?;
        self.receiver.config().validate()?;
        WindowSchedule::new(self.timing.num_slots, self.receiver.window, self.receiver.overlap, self.receiver.neighborhood)?;

        let sw = &self.sweep;
        if sw.snr_db.is_empty() || sw.velocity_kmh.is_empty() || sw.modes.is_empty() {
            return Err(Error::config("sweep axes snr_db, velocity_kmh and modes must be non-empty"));
        }
        if sw.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::config("snr_db values must be finite"));
        }
        if sw.velocity_kmh.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::config("velocity_kmh values must be finite and nonnegative"));
        }
        if sw.trials == 0 {
            return Err(Error::config("trials must be positive"));
        }
        for &v in &sw.velocity_kmh {
            if v > 0.0 {
                crate::channel::coherence_params(&self.timing.timing(crate::channel::kmh_to_mps(v)))?;
            }
        }
        Ok(())
    }

    pub fn random_geometry<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Result<GeometryConfig> {
        let ch = &self.channel;
        GeometryConfig::random(ch.num_rx_antennas, ch.num_users, ch.num_clusters, ch.rays_per_cluster, ch.angle_spread_deg, rng)
    }
}

/// `N0 = 10^(-snr_db/10)`.
pub fn noise_power(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// Parses a comma-separated list, e.g. `-6,0,6`.
pub fn parse_list<T: FromStr>(text: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<T>().map_err(|e| Error::config(format!("invalid list entry `{}`: {e}", s.trim()))))
        .collect()
}
