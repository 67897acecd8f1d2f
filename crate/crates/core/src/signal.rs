//! Transmit signal: QPSK data superposed with real Gaussian computing symbols.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{c64, CMat, CVec, C64};
use crate::rng::{complex_normal, normal};

/// Power allocation between data and computing symbols, plus the noise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    pub data_power: f64,
    pub computing_power: f64,
    pub noise_power: f64,
}

impl PowerSplit {
    pub fn new(data_power: f64, computing_power: f64, noise_power: f64) -> Result<Self> {
        let split = Self { data_power, computing_power, noise_power };
        split.validate()?;
        Ok(split)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.data_power >= 0.0 && self.computing_power >= 0.0 && self.noise_power >= 0.0) {
            return Err(Error::config("powers must be nonnegative"));
        }
        if ((self.data_power + self.computing_power) - 1.0).abs() > 1e-12 {
            return Err(Error::config(format!(
                "data and computing power must sum to 1, got {} + {}",
                self.data_power, self.computing_power
            )));
        }
        Ok(())
    }

    /// `Ñ0 = N0 + E_c`: the computing signal is noise to the data detector.
    pub fn effective_noise(&self) -> f64 {
        self.noise_power + self.computing_power
    }

    /// Per-dimension QPSK amplitude `c_d = √(E_d / 2)`.
    pub fn qpsk_amplitude(&self) -> f64 {
        (self.data_power / 2.0).sqrt()
    }

    pub fn with_noise(self, noise_power: f64) -> Self {
        Self { noise_power, ..self }
    }
}

/// Gray-mapped QPSK: bit 0 picks the sign of the real part, bit 1 the sign of
/// the imaginary part, with `0 ↦ +` and `1 ↦ −`.
pub fn qpsk_modulate(bits: [bool; 2], amplitude: f64) -> C64 {
    let sign = |b: bool| if b { -amplitude } else { amplitude };
    c64(sign(bits[0]), sign(bits[1]))
}

/// Inverse of [`qpsk_modulate`] by quadrant; zero components map to bit 0.
pub fn qpsk_demap(z: C64) -> [bool; 2] {
    [z.re < 0.0, z.im < 0.0]
}

/// All four constellation points in bit order `00, 01, 10, 11`.
pub fn qpsk_constellation(amplitude: f64) -> [C64; 4] {
    [
        qpsk_modulate([false, false], amplitude),
        qpsk_modulate([false, true], amplitude),
        qpsk_modulate([true, false], amplitude),
        qpsk_modulate([true, true], amplitude),
    ]
}

/// One frame of transmitted symbols; every per-slot vector has length `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameData {
    pub data: Vec<CVec>,
    pub computing: Vec<Vec<f64>>,
    pub transmit: Vec<CVec>,
    pub bits: Vec<Vec<[bool; 2]>>,
    /// `f[k] = Σ_m s_m[k]`.
    pub target: Vec<f64>,
}

impl FrameData {
    pub fn num_slots(&self) -> usize {
        self.data.len()
    }
}

/// Draws uniform bits and `s ~ N(0, E_c)`; pre- and post-processing are the
/// identity, so `x = d + s`.
pub fn generate_frame<R: Rng + ?Sized>(num_users: usize, num_slots: usize, split: &PowerSplit, rng: &mut R) -> FrameData {
    let amp = split.qpsk_amplitude();
    let sd = split.computing_power.sqrt();
    let mut frame = FrameData {
        data: Vec::with_capacity(num_slots),
        computing: Vec::with_capacity(num_slots),
        transmit: Vec::with_capacity(num_slots),
        bits: Vec::with_capacity(num_slots),
        target: Vec::with_capacity(num_slots),
    };
    for _ in 0..num_slots {
        let bits: Vec<[bool; 2]> = (0..num_users).map(|_| [rng.random(), rng.random()]).collect();
        let s: Vec<f64> = (0..num_users).map(|_| sd * normal(rng)).collect();
        let d = CVec::from_iterator(num_users, bits.iter().map(|&b| qpsk_modulate(b, amp)));
        let x = CVec::from_iterator(num_users, d.iter().zip(&s).map(|(d, s)| d + s));
        frame.target.push(s.iter().sum());
        frame.bits.push(bits);
        frame.data.push(d);
        frame.computing.push(s);
        frame.transmit.push(x);
    }
    frame
}

/// `y = H·x + w`, `w ~ CN(0, N0·I)`.
pub fn synthesize_rx<R: Rng + ?Sized>(h: &CMat, x: &CVec, noise_power: f64, rng: &mut R) -> Result<CVec> {
    if h.ncols() != x.len() {
        return Err(Error::config(format!("channel has {} columns but {} transmit symbols", h.ncols(), x.len())));
    }
    let sd = noise_power.sqrt();
    let mut y = h * x;
    for v in y.iter_mut() {
        // Always draw so the noise stream stays aligned across noise levels.
        *v += complex_normal(rng) * sd;
    }
    Ok(y)
}
