//! One Monte Carlo trial: a channel realization, a frame, and every requested
//! receiver/baseline on the same draws.

use crate::aircomp::{estimate_function, mmse_combiner, AirCompInputs};
use crate::beamforming::{build_combiner, BeamArrayResponses, SecondOrderStats};
use crate::channel::{coherence_params, kmh_to_mps, ChannelModel, ChannelRealization};
use crate::error::{Error, Result};
use crate::linalg::{frobenius_sq, CMat, CVec};
use crate::receiver::{Receiver, ReceiverOutput};
use crate::rng::{stream_rng, Stream};
use crate::signal::{generate_frame, synthesize_rx, FrameData, PowerSplit};

use super::config::{noise_power, ExperimentConfig, Mode};
use super::metrics::TrialOutcome;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub snr_db: f64,
    pub velocity_kmh: f64,
}

/// Slot-to-slot correlation `r`; a zero velocity gives a static channel.
pub fn correlation(cfg: &ExperimentConfig, velocity_kmh: f64) -> Result<f64> {
    if velocity_kmh == 0.0 {
        return Ok(1.0);
    }
    Ok(coherence_params(&cfg.timing.timing(kmh_to_mps(velocity_kmh)))?.r)
}

/// Everything drawn for one trial, in the beam domain.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub split: PowerSplit,
    pub stats: SecondOrderStats,
    /// True beam-domain channel per slot.
    pub channels: Vec<CMat>,
    pub frame: FrameData,
    pub received: Vec<CVec>,
}

impl Scenario {
    /// Draws from streams keyed by `(seed, trial)` only, so every grid point
    /// and mode sees the same geometry, fading innovations, bits and unit noise.
    pub fn generate(cfg: &ExperimentConfig, point: GridPoint, trial: u64) -> Result<Self> {
        let seed = cfg.sweep.seed;
        let split = cfg.power_split(point.snr_db)?;
        let r = correlation(cfg, point.velocity_kmh)?;
        let k = cfg.timing.num_slots;

        let geometry = cfg.random_geometry(&mut stream_rng(seed, trial, Stream::Geometry))?;
        let model = ChannelModel::new(geometry)?;
        let realization = ChannelRealization::generate(&model, r, k, &mut stream_rng(seed, trial, Stream::Fading));
        let combiner = build_combiner(&realization.raw[0], cfg.beamforming.num_beams)?;
        let channels = realization
            .raw
            .iter()
            .map(|h| combiner.effective_channel(h))
            .collect::<Result<Vec<_>>>()?;
        let beam = BeamArrayResponses::new(&model, &combiner)?;
        let stats = SecondOrderStats::new(&beam, r, cfg.receiver.overlap * cfg.receiver.window);

        let frame = generate_frame(cfg.channel.num_users, k, &split, &mut stream_rng(seed, trial, Stream::Symbols));
        let mut noise_rng = stream_rng(seed, trial, Stream::Noise);
        let received = channels
            .iter()
            .zip(&frame.transmit)
            .map(|(h, x)| synthesize_rx(h, x, noise_power(point.snr_db), &mut noise_rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { split, stats, channels, frame, received })
    }

    pub fn run_jcde(&self, cfg: &ExperimentConfig) -> Result<ReceiverOutput> {
        Receiver::new(cfg.receiver.config(), &self.received, &self.channels[0], &self.stats, self.split)?.run()
    }

    pub fn run_known_channel(&self, cfg: &ExperimentConfig) -> Result<ReceiverOutput> {
        Receiver::with_known_channel(cfg.receiver.config(), &self.received, &self.channels, &self.stats, self.split)?.run()
    }

    pub fn bit_errors(&self, out: &ReceiverOutput) -> (u64, u64) {
        let mut errors = 0;
        let mut bits = 0;
        for (sent, got) in self.frame.bits.iter().zip(&out.bits) {
            for (a, b) in sent.iter().zip(got) {
                errors += (a[0] != b[0]) as u64 + (a[1] != b[1]) as u64;
                bits += 2;
            }
        }
        (errors, bits)
    }

    /// `(Σ_k ‖H - Ĥ‖²_F, Σ_k ‖H‖²_F)`.
    pub fn channel_error(&self, out: &ReceiverOutput) -> (f64, f64) {
        self.channels.iter().zip(&out.channels).fold((0.0, 0.0), |(e, h), (truth, est)| {
            (e + frobenius_sq(&(truth - &est.mean)), h + frobenius_sq(truth))
        })
    }

    /// AirComp over every slot; returns `(Σ|f - f̂|², Σ|f|²)`.
    ///
    /// `xi` is the per-slot data-error variance of `symbols`.
    pub fn aircomp_error<'a>(
        &self,
        channel: impl Fn(usize) -> &'a CMat,
        symbols: impl Fn(usize) -> &'a CVec,
        xi: impl Fn(usize) -> Vec<f64>,
    ) -> Result<(f64, f64)> {
        let mut err = 0.0;
        let mut energy = 0.0;
        for (k, y) in self.received.iter().enumerate() {
            let data_error = xi(k);
            let inputs = AirCompInputs {
                y,
                channel: channel(k),
                symbols: symbols(k),
                data_error: &data_error,
                computing_power: self.split.computing_power,
                noise_power: self.split.noise_power,
            };
            let (u, _) = mmse_combiner(&inputs)?;
            let f = self.frame.target[k];
            err += (f - estimate_function(&inputs, &u)).powi(2);
            energy += f * f;
        }
        Ok((err, energy))
    }
}

/// Data-error variance left once the computing symbol's own power is removed
/// from a soft replica's MSE.
fn data_error_variance(out: &ReceiverOutput, k: usize, computing_power: f64) -> Vec<f64> {
    out.symbols[k].iter().map(|s| (s.mse - computing_power).max(0.0)).collect()
}

fn outcome_for(scenario: &Scenario, mode: Mode, out: &ReceiverOutput) -> Result<TrialOutcome> {
    let (bit_errors, bits) = scenario.bit_errors(out);
    let ec = scenario.split.computing_power;
    let m = scenario.frame.data[0].len();
    let channel_of = |k: usize| if mode.knows_channel() { &scenario.channels[k] } else { &out.channels[k].mean };
    let (function_error, function_energy) = if mode.knows_symbols() {
        scenario.aircomp_error(channel_of, |k| &scenario.frame.data[k], |_| vec![0.0; m])?
    } else {
        scenario.aircomp_error(channel_of, |k| &out.decisions[k], |k| data_error_variance(out, k, ec))?
    };
    Ok(TrialOutcome {
        bit_errors,
        bits,
        channel: (!mode.knows_channel()).then(|| scenario.channel_error(out)),
        function_error,
        function_energy,
    })
}

/// Runs every requested mode on one trial. A numerical failure marks the
/// affected modes as `None`; configuration errors abort.
pub fn run_trial(cfg: &ExperimentConfig, point: GridPoint, modes: &[Mode], trial: u64) -> Result<Vec<Option<TrialOutcome>>> {
    let scenario = Scenario::generate(cfg, point, trial)?;
    let context = |mode: &str| format!("trial {trial} at {} dB, {} km/h, {mode}", point.snr_db, point.velocity_kmh);
    let jcde = match modes.iter().any(|m| !m.knows_channel()) {
        true => tolerate(scenario.run_jcde(cfg), || context("estimated channel"))?,
        false => None,
    };
    let known = match modes.iter().any(|m| m.knows_channel()) {
        true => tolerate(scenario.run_known_channel(cfg), || context("known channel"))?,
        false => None,
    };
    modes
        .iter()
        .map(|&mode| {
            let out = if mode.knows_channel() { &known } else { &jcde };
            match out {
                Some(out) => tolerate(outcome_for(&scenario, mode, out), || context(mode.as_str())),
                None => Ok(None),
            }
        })
        .collect()
}

fn tolerate<T>(result: Result<T>, context: impl FnOnce() -> String) -> Result<Option<T>> {
    match result {
        Ok(v) => Ok(Some(v)),
        Err(Error::Numerical(msg)) => {
            log::warn!("{}: {msg}", context());
            Ok(None)
        }
        Err(e) => Err(e),
    }
}
