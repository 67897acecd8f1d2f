use std::ops::Range;

use crate::beamforming::SecondOrderStats;
use crate::error::{Error, Result};
use crate::linalg::{c64, CMat, CVec};
use crate::signal::PowerSplit;

use super::detection::{damp_symbol, data_combine_all, hard_decide, qpsk_denoise};
use super::estimation::{aged_noise, chan_combine, chan_denoise, chan_sic, own_noise, ChannelObservation};
use super::prediction::{predict_window, ChannelTrack};
use super::schedule::WindowSchedule;
use super::{SoftChannel, SoftSymbol};

/// Receiver design parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverConfig {
    /// New slots per window, `W`.
    pub window: usize,
    /// Window depth in units of `W`, `D`.
    pub overlap: usize,
    /// Time-combining neighbourhood, `G` (even).
    pub neighborhood: usize,
    /// Sweeps per window, `t_max`.
    pub iterations: usize,
    /// Damping `β ∈ [0, 1]`.
    pub damping: f64,
}

impl Default for ReceiverConfig {
    fn default() -> Self {
        Self { window: 8, overlap: 3, neighborhood: 6, iterations: 8, damping: 0.5 }
    }
}

impl ReceiverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::config("at least one iteration is required"));
        }
        if !(0.0..=1.0).contains(&self.damping) {
            return Err(Error::config(format!("damping {} outside [0, 1]", self.damping)));
        }
        Ok(())
    }
}

/// Counts of numerical safeguards that fired during a run.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Diagnostics {
    /// Extrinsic data variances floored at the minimum.
    pub floored_variances: usize,
    /// Hermitian solves that needed diagonal loading.
    pub regularized_solves: usize,
    /// Channel combines with no informative symbol (prior passed through).
    pub uninformed_combines: usize,
}

#[derive(Debug, Clone)]
pub struct ReceiverOutput {
    pub symbols: Vec<Vec<SoftSymbol>>,
    pub channels: Vec<SoftChannel>,
    /// Hard decisions mapped back onto the constellation, one `M`-vector per slot.
    pub decisions: Vec<CVec>,
    pub bits: Vec<Vec<[bool; 2]>>,
    pub diagnostics: Diagnostics,
}

/// Windowed joint channel and data estimator for one frame.
///
/// Within a sweep every slot's data beliefs are refreshed from the previous
/// sweep's channel replicas, then every slot's channel replicas are refreshed
/// from the new symbol replicas; both updates are computed for the whole window
/// before being committed, so results do not depend on slot order.
pub struct Receiver<'a> {
    cfg: ReceiverConfig,
    schedule: WindowSchedule,
    stats: &'a SecondOrderStats,
    split: PowerSplit,
    y: &'a [CVec],
    h0: CMat,
    track: ChannelTrack,
    symbols: Vec<Vec<SoftSymbol>>,
    known_channel: bool,
    diagnostics: Diagnostics,
}

impl<'a> Receiver<'a> {
    /// Receiver that knows only the slot-0 channel `h0` and tracks the rest.
    pub fn new(
        cfg: ReceiverConfig,
        y: &'a [CVec],
        h0: &CMat,
        stats: &'a SecondOrderStats,
        split: PowerSplit,
    ) -> Result<Self> {
        cfg.validate()?;
        split.validate()?;
        let (n, m) = (stats.num_beams(), stats.num_users());
        if h0.shape() != (n, m) {
            return Err(Error::config(format!("known channel is {:?}, expected {n}x{m}", h0.shape())));
        }
        if let Some(bad) = y.iter().find(|v| v.len() != n) {
            return Err(Error::config(format!("received vector of length {}, expected {n}", bad.len())));
        }
        let schedule = WindowSchedule::new(y.len(), cfg.window, cfg.overlap, cfg.neighborhood)?;
        Ok(Self {
            cfg,
            schedule,
            stats,
            split,
            y,
            h0: h0.clone(),
            track: ChannelTrack::new(y.len(), n, m),
            symbols: vec![vec![SoftSymbol::default(); m]; y.len()],
            known_channel: false,
            diagnostics: Diagnostics::default(),
        })
    }

    /// Receiver given the true channel at every slot with zero error; only
    /// the data side runs.
    pub fn with_known_channel(
        cfg: ReceiverConfig,
        y: &'a [CVec],
        channels: &[CMat],
        stats: &'a SecondOrderStats,
        split: PowerSplit,
    ) -> Result<Self> {
        if channels.len() != y.len() {
            return Err(Error::config("one channel matrix per slot is required"));
        }
        let first = channels.first().ok_or_else(|| Error::config("empty frame"))?;
        let mut rx = Self::new(cfg, y, first, stats, split)?;
        let m = stats.num_users();
        for (k, h) in channels.iter().enumerate() {
            let n = h.nrows();
            let genie = SoftChannel { mean: h.clone(), user_cov: vec![CMat::zeros(n, n); m] };
            rx.track.prior[k] = genie.clone();
            rx.track.estimate[k] = genie;
        }
        rx.known_channel = true;
        Ok(rx)
    }

    pub fn schedule(&self) -> &WindowSchedule {
        &self.schedule
    }

    pub fn symbols(&self) -> &[Vec<SoftSymbol>] {
        &self.symbols
    }

    pub fn channels(&self) -> &[SoftChannel] {
        &self.track.estimate
    }

    /// Channel prediction ahead of window `τ`; returns the anchor slot.
    pub fn predict(&mut self, tau: usize) -> Result<usize> {
        if self.known_channel {
            return Ok(0);
        }
        predict_window(tau, &self.schedule, self.stats, &mut self.track, &self.h0)
    }

    /// One data-then-channel sweep over window `τ`. The final sweep of a
    /// window combines each slot's own observation as well.
    pub fn sweep(&mut self, tau: usize, final_sweep: bool) -> Result<()> {
        let window = self.schedule.window_slots(tau);
        self.data_sweep(window.clone())?;
        if !self.known_channel {
            self.channel_sweep(tau, window, final_sweep)?;
        }
        Ok(())
    }

    /// Prediction followed by `t_max` sweeps.
    pub fn run_window(&mut self, tau: usize) -> Result<()> {
        self.predict(tau)?;
        for t in 1..=self.cfg.iterations {
            self.sweep(tau, t == self.cfg.iterations)?;
        }
        Ok(())
    }

    pub fn run(mut self) -> Result<ReceiverOutput> {
        for tau in 1..=self.schedule.tau_max {
            self.run_window(tau)?;
        }
        Ok(self.finish())
    }

    pub fn finish(self) -> ReceiverOutput {
        let amp = self.split.qpsk_amplitude();
        let (decisions, bits) = self
            .symbols
            .iter()
            .map(|slot| {
                let (pts, bits): (Vec<_>, Vec<_>) = slot.iter().map(|s| hard_decide(s.mean, amp)).unzip();
                (CVec::from_vec(pts), bits)
            })
            .unzip();
        ReceiverOutput {
            symbols: self.symbols,
            channels: self.track.estimate,
            decisions,
            bits,
            diagnostics: self.diagnostics,
        }
    }

    fn data_sweep(&mut self, window: Range<usize>) -> Result<()> {
        let noise = self.split.effective_noise();
        let amp = self.split.qpsk_amplitude();
        let beta = self.cfg.damping;
        for k in window {
            let est = &self.track.estimate[k];
            let (beliefs, floored, regularized) =
                data_combine_all(&self.y[k], &est.mean, &self.symbols[k], noise, &est.aggregate_cov())
                    .map_err(|e| Error::numerical(format!("slot {k}: {e}")))?;
            self.diagnostics.floored_variances += floored;
            self.diagnostics.regularized_solves += regularized as usize;
            for (sym, belief) in self.symbols[k].iter_mut().zip(beliefs) {
                *sym = damp_symbol(qpsk_denoise(belief, amp), *sym, beta);
            }
        }
        Ok(())
    }

    fn channel_sweep(&mut self, tau: usize, window: Range<usize>, final_sweep: bool) -> Result<()> {
        let (n_beams, m_users) = (self.stats.num_beams(), self.stats.num_users());
        let noise = self.split.effective_noise();
        let r = self.stats.r;
        let beta = self.cfg.damping;

        // Cancelled observations and their noise for every slot a neighbourhood can reach.
        let lo = window.start.saturating_sub(self.schedule.neighborhood / 2);
        let hi = self.schedule.cumulative_slots(tau).end;
        let mut sic = Vec::with_capacity(hi - lo);
        let mut nu = Vec::with_capacity(hi - lo);
        for s in lo..hi {
            let est = &self.track.estimate[s];
            let syms = &self.symbols[s];
            sic.push(CMat::from_fn(n_beams, m_users, |n, m| chan_sic(self.y[s][n], est, syms, n, m)));
            nu.push(nalgebra::DMatrix::<f64>::from_fn(n_beams, m_users, |n, m| {
                own_noise(est, syms, self.stats.theta[(n, m)], noise, n, m)
            }));
        }

        let mut updates = Vec::with_capacity(window.len());
        let mut obs = Vec::with_capacity(self.schedule.neighborhood + 1);
        let mut observed = CVec::zeros(n_beams);
        let mut observed_var = vec![0.0; n_beams];
        for k in window {
            let mut slots = self.schedule.neighbors(k, tau);
            if final_sweep {
                slots.push(k);
            }
            let old = &self.track.estimate[k];
            let prior = &self.track.prior[k];
            let mut next = old.clone();
            for m in 0..m_users {
                let mut informed = true;
                for n in 0..n_beams {
                    obs.clear();
                    obs.extend(slots.iter().map(|&s| {
                        let d = self.symbols[s][m].mean;
                        let lag = k.abs_diff(s);
                        let omega = self.stats.omega_coeff(lag, n, m);
                        ChannelObservation {
                            value: sic[s - lo][(n, m)] * r.powi(k as i32 - s as i32),
                            symbol: d,
                            noise: aged_noise(nu[s - lo][(n, m)], omega, d.norm_sqr(), r, k, s),
                        }
                    }));
                    match chan_combine(&obs) {
                        Some(b) => {
                            observed[n] = b.mean;
                            observed_var[n] = b.var;
                        }
                        None => {
                            informed = false;
                            break;
                        }
                    }
                }
                let prior_mean = prior.mean.column(m).into_owned();
                let (mean, cov) = if informed {
                    let (mean, cov, regularized) =
                        chan_denoise(&observed, &observed_var, &prior_mean, &prior.user_cov[m])
                            .map_err(|e| Error::numerical(format!("slot {k}, user {m}: {e}")))?;
                    self.diagnostics.regularized_solves += regularized as usize;
                    (mean, cov)
                } else {
                    self.diagnostics.uninformed_combines += 1;
                    (prior_mean, prior.user_cov[m].clone())
                };
                let blended = &mean * c64(beta, 0.0) + old.mean.column(m) * c64(1.0 - beta, 0.0);
                next.mean.set_column(m, &blended);
                next.user_cov[m] = cov * c64(beta, 0.0) + &old.user_cov[m] * c64(1.0 - beta, 0.0);
            }
            updates.push((k, next));
        }
        for (k, next) in updates {
            self.track.estimate[k] = next;
        }
        Ok(())
    }
}

/// Runs the full windowed estimator over a frame.
pub fn run_jcde(
    cfg: ReceiverConfig,
    y: &[CVec],
    h0: &CMat,
    stats: &SecondOrderStats,
    split: PowerSplit,
) -> Result<ReceiverOutput> {
    Receiver::new(cfg, y, h0, stats, split)?.run()
}
