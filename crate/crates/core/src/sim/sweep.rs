//! Grid sweeps and CSV output.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::par;

use super::config::{ExperimentConfig, Mode};
use super::metrics::{aggregate, MetricsRecord, TrialOutcome};
use super::trial::{run_trial, GridPoint};

/// Share of failed trials above which a sweep is reported as failed.
pub const FAILURE_BUDGET: f64 = 0.10;

pub const CSV_HEADER: [&str; 9] = [
    "snr_db",
    "velocity_kmh",
    "mode",
    "ber",
    "nmse_channel_db",
    "nmse_aircomp_db",
    "trials_used",
    "failed_trials",
    "wall_time_s",
];

/// Per-trial outcomes at one grid point, indexed `[mode][trial]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointTrials {
    pub point: GridPoint,
    pub modes: Vec<Mode>,
    pub outcomes: Vec<Vec<Option<TrialOutcome>>>,
    pub wall_time_s: f64,
}

impl PointTrials {
    pub fn records(&self) -> Vec<MetricsRecord> {
        self.modes
            .iter()
            .zip(&self.outcomes)
            .map(|(&mode, trials)| {
                let mut rec = aggregate(self.point.snr_db, self.point.velocity_kmh, mode, trials.iter().map(Option::as_ref));
                rec.wall_time_s = Some(self.wall_time_s);
                rec
            })
            .collect()
    }

    pub fn mode(&self, mode: Mode) -> Option<&[Option<TrialOutcome>]> {
        self.modes.iter().position(|&m| m == mode).map(|i| self.outcomes[i].as_slice())
    }
}

/// Runs all trials of one grid point, in parallel when enabled.
pub fn run_point(cfg: &ExperimentConfig, point: GridPoint) -> Result<PointTrials> {
    let start = Instant::now();
    let modes = cfg.sweep.modes.clone();
    let per_trial = par::map_indexed(cfg.sweep.trials, |t| run_trial(cfg, point, &modes, t as u64));
    let mut outcomes = vec![Vec::with_capacity(cfg.sweep.trials); modes.len()];
    for trial in per_trial {
        for (slot, o) in outcomes.iter_mut().zip(trial?) {
            slot.push(o);
        }
    }
    Ok(PointTrials { point, modes, outcomes, wall_time_s: start.elapsed().as_secs_f64() })
}

/// The sweep grid in output order: SNR outer, velocity inner.
pub fn grid(cfg: &ExperimentConfig) -> Vec<GridPoint> {
    cfg.sweep
        .snr_db
        .iter()
        .flat_map(|&snr_db| cfg.sweep.velocity_kmh.iter().map(move |&velocity_kmh| GridPoint { snr_db, velocity_kmh }))
        .collect()
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<MetricsRecord>> {
    cfg.validate()?;
    let mut records = Vec::new();
    for point in grid(cfg) {
        let trials = run_point(cfg, point)?;
        let recs = trials.records();
        log::info!(
            "snr {} dB, {} km/h: {}",
            point.snr_db,
            point.velocity_kmh,
            recs.iter()
                .map(|r| format!("{} ber={}", r.mode, fmt_opt(r.ber)))
                .collect::<Vec<_>>()
                .join(", ")
        );
        records.extend(recs);
    }
    Ok(records)
}

pub fn failure_budget_exceeded(records: &[MetricsRecord]) -> bool {
    records.iter().any(|r| r.failure_rate() > FAILURE_BUDGET)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes one row per record. Wall time is left blank unless `with_timing`,
/// so the file is reproducible byte for byte.
pub fn write_csv_to<W: Write>(writer: W, records: &[MetricsRecord], with_timing: bool) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.snr_db.to_string(),
            r.velocity_kmh.to_string(),
            r.mode.to_string(),
            fmt_opt(r.ber),
            fmt_opt(r.nmse_channel_db),
            fmt_opt(r.nmse_aircomp_db),
            r.trials_used.to_string(),
            r.failed_trials.to_string(),
            if with_timing { fmt_opt(r.wall_time_s) } else { String::new() },
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(path: &Path, records: &[MetricsRecord], with_timing: bool) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    }
    let file = std::fs::File::create(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    write_csv_to(std::io::BufWriter::new(file), records, with_timing).map_err(|source| Error::Csv { path: path.to_path_buf(), source })
}
