//! Joint channel tracking and data detection.
//!
//! Slots are processed in overlapping windows. Before each window the channel
//! is predicted forward from the most reliable estimate; inside the window a
//! bilinear Gaussian belief propagation alternates soft data detection and
//! time-combined channel estimation for a fixed number of sweeps.

mod detection;
mod estimation;
mod jcde;
mod prediction;
mod schedule;

pub use detection::{
    damp, data_combine, data_combine_all, data_covariance, data_sic, deflated_covariance, hard_decide, qpsk_denoise,
    DataBelief,
};
pub use estimation::{
    aged_noise, chan_combine, chan_denoise, chan_noise_terms, chan_sic, own_noise, ChannelBelief, ChannelObservation,
};
pub use jcde::{run_jcde, Diagnostics, Receiver, ReceiverConfig, ReceiverOutput};
pub use prediction::{anchor_select, predict_window, ChannelTrack};
pub use schedule::WindowSchedule;

use crate::linalg::{CMat, C64};

/// Soft replica of one data symbol with its mean squared error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoftSymbol {
    pub mean: C64,
    pub mse: f64,
}

impl Default for SoftSymbol {
    /// Uninformed start: zero mean, unit MSE.
    fn default() -> Self {
        Self { mean: C64::new(0.0, 0.0), mse: 1.0 }
    }
}

/// Soft channel replica for one slot: `N × M` means with one `N × N` error
/// covariance per user.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftChannel {
    pub mean: CMat,
    pub user_cov: Vec<CMat>,
}

impl SoftChannel {
    pub fn zeros(n: usize, m: usize) -> Self {
        Self { mean: CMat::zeros(n, m), user_cov: vec![CMat::zeros(n, n); m] }
    }

    /// `ψ̂ʰ_{nm}`.
    #[inline]
    pub fn coeff_mse(&self, n: usize, m: usize) -> f64 {
        self.user_cov[m][(n, n)].re
    }

    /// `Σ_{n,m} ψ̂ʰ_{nm}`.
    pub fn total_mse(&self) -> f64 {
        self.user_cov.iter().map(|c| c.trace().re).sum()
    }

    /// `Ψ̂ʰ = Σ_m Ψ̂ʰ_m`.
    pub fn aggregate_cov(&self) -> CMat {
        let n = self.mean.nrows();
        self.user_cov.iter().fold(CMat::zeros(n, n), |acc, c| acc + c)
    }
}
