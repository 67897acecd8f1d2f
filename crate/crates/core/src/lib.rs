//! Link-level simulation of an integrated communication and over-the-air
//! computing (AirComp) uplink over time-varying mmWave channels.
//!
//! The crate is organised along the signal chain:
//!
//! - [`channel`]: clustered mmWave channel with AR(1) small-scale fading.
//! - [`beamforming`]: quasi-SVD receive combiner and channel aging statistics.
//! - [`signal`]: QPSK data plus real Gaussian computing symbols, AWGN.
//! - [`receiver`]: windowed channel prediction and bilinear Gaussian belief
//!   propagation for joint channel and data estimation.
//! - [`aircomp`]: MMSE combining of the post-detection residual.
//! - [`sim`]: configuration, Monte Carlo trials, sweeps and CSV output.
//!
//! Trial-level parallelism uses rayon when the `parallel` feature is on
//! (default); without it every sweep runs sequentially with identical output.

pub mod aircomp;
pub mod beamforming;
pub mod channel;
pub mod error;
pub mod linalg;
pub mod par;
pub mod receiver;
pub mod rng;
pub mod signal;
pub mod sim;

pub use error::{Error, Result};
pub use linalg::{CMat, CVec, C64};
