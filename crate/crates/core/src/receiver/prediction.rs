use crate::beamforming::SecondOrderStats;
use crate::error::{Error, Result};
use crate::linalg::{c64, CMat};

use super::schedule::WindowSchedule;
use super::SoftChannel;

/// Per-slot channel replicas together with the prediction each slot was last
/// given, which serves as the prior of the channel denoiser.
#[derive(Debug, Clone)]
pub struct ChannelTrack {
    pub estimate: Vec<SoftChannel>,
    pub prior: Vec<SoftChannel>,
}

impl ChannelTrack {
    pub fn new(num_slots: usize, num_beams: usize, num_users: usize) -> Self {
        let zero = SoftChannel::zeros(num_beams, num_users);
        Self { estimate: vec![zero.clone(); num_slots], prior: vec![zero; num_slots] }
    }

    fn set(&mut self, k: usize, value: SoftChannel) {
        self.prior[k] = value.clone();
        self.estimate[k] = value;
    }
}

/// Slot with the smallest summed channel MSE; ties go to the earliest slot.
pub fn anchor_select<I>(mse_table: I) -> Option<usize>
where
    I: IntoIterator<Item = (usize, f64)>,
{
    let mut best: Option<(usize, f64)> = None;
    for (k, mse) in mse_table {
        match best {
            Some((bk, bm)) if mse > bm || (mse == bm && k > bk) => {}
            _ => best = Some((k, mse)),
        }
    }
    best.map(|(k, _)| k)
}

/// Channel prediction ahead of window `τ`.
///
/// For `τ = 1` every slot is predicted from the known `H[0]`:
/// `Ĥ_k = r^k·H[0]` with covariance `Ω_{m,k}`. Later windows anchor on the
/// carried-over slot with minimum MSE and, only for `k > k_τ`, set
/// `Ĥ_k = r^{k-k_τ}·Ĥ_{k_τ}` and `Ψ̂_{m,k} = Ω_{m,k-k_τ} + r^{2(k-k_τ)}·Ψ̂_{m,k_τ}`.
/// Returns the anchor slot.
pub fn predict_window(
    tau: usize,
    schedule: &WindowSchedule,
    stats: &SecondOrderStats,
    track: &mut ChannelTrack,
    h0: &CMat,
) -> Result<usize> {
    let r = stats.r;
    let m_users = stats.num_users();
    let window = schedule.window_slots(tau);
    if tau == 1 {
        for k in window {
            let mean = h0 * c64(r.powi(k as i32), 0.0);
            let user_cov = (0..m_users).map(|m| stats.omega_user(k, m)).collect();
            track.set(k, SoftChannel { mean, user_cov });
        }
        return Ok(0);
    }

    let mut candidates = schedule.carried_slots(tau);
    if candidates.is_empty() {
        // No overlap (D = 1): fall back to the previous window.
        candidates = schedule.window_slots(tau - 1);
    }
    let anchor = anchor_select(candidates.map(|k| (k, track.estimate[k].total_mse())))
        .ok_or_else(|| Error::numerical(format!("no anchor candidates for window {tau}")))?;

    let base = track.estimate[anchor].clone();
    for k in window.filter(|&k| k > anchor) {
        let lag = k - anchor;
        let decay = r.powi(lag as i32);
        let mean = &base.mean * c64(decay, 0.0);
        let user_cov = (0..m_users)
            .map(|m| stats.omega_user(lag, m) + &base.user_cov[m] * c64(decay * decay, 0.0))
            .collect();
        track.set(k, SoftChannel { mean, user_cov });
    }
    Ok(anchor)
}
