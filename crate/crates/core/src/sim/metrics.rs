//! Per-trial error tallies and their pooled aggregates.

use super::config::Mode;

/// Raw error sums for one trial and one mode, pooled over slots.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TrialOutcome {
    pub bit_errors: u64,
    pub bits: u64,
    /// `(Σ_k ‖H - Ĥ‖²_F, Σ_k ‖H‖²_F)`; absent when the channel is given.
    pub channel: Option<(f64, f64)>,
    /// `Σ_k |f - f̂|²`.
    pub function_error: f64,
    /// `Σ_k |f|²`.
    pub function_energy: f64,
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub snr_db: f64,
    pub velocity_kmh: f64,
    pub mode: Mode,
    pub ber: Option<f64>,
    pub nmse_channel_db: Option<f64>,
    pub nmse_aircomp_db: Option<f64>,
    pub trials_used: usize,
    pub failed_trials: usize,
    pub wall_time_s: Option<f64>,
}

impl MetricsRecord {
    /// Fraction of trials that failed numerically.
    pub fn failure_rate(&self) -> f64 {
        let total = self.trials_used + self.failed_trials;
        if total == 0 {
            0.0
        } else {
            self.failed_trials as f64 / total as f64
        }
    }
}

fn ratio_db(num: f64, den: f64) -> Option<f64> {
    (den > 0.0 && num.is_finite() && den.is_finite()).then(|| 10.0 * (num / den).log10())
}

/// Pools the successful trials: BER over all bits, NMSE as a ratio of sums.
/// Metrics with a zero denominator are left empty.
pub fn aggregate<'a, I>(snr_db: f64, velocity_kmh: f64, mode: Mode, outcomes: I) -> MetricsRecord
where
    I: IntoIterator<Item = Option<&'a TrialOutcome>>,
{
    let mut used = 0;
    let mut failed = 0;
    let (mut errors, mut bits) = (0u64, 0u64);
    let (mut ch_err, mut ch_energy, mut ch_seen) = (0.0, 0.0, false);
    let (mut f_err, mut f_energy) = (0.0, 0.0);
    for outcome in outcomes {
        let Some(o) = outcome else {
            failed += 1;
            continue;
        };
        used += 1;
        errors += o.bit_errors;
        bits += o.bits;
        if let Some((e, h)) = o.channel {
            ch_err += e;
            ch_energy += h;
            ch_seen = true;
        }
        f_err += o.function_error;
        f_energy += o.function_energy;
    }
    MetricsRecord {
        snr_db,
        velocity_kmh,
        mode,
        ber: (bits > 0).then(|| errors as f64 / bits as f64),
        nmse_channel_db: if ch_seen { ratio_db(ch_err, ch_energy) } else { None },
        nmse_aircomp_db: ratio_db(f_err, f_energy),
        trials_used: used,
        failed_trials: failed,
        wall_time_s: None,
    }
}
