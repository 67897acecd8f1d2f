//! Clustered mmWave channel with first-order autoregressive fading.
//!
//! Each user sees `L` clusters of `C` rays. Ray angles are drawn once per
//! realization and held fixed; all time variation comes from the per-ray
//! small-scale gains, which follow `σ[k] = r·σ[k-1] + √(1-r²)·ω[k]`.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{c64, CMat, CVec, C64};
use crate::rng::complex_normal;

pub const SPEED_OF_LIGHT: f64 = 2.998e8;

/// Standard deviation of the per-ray angular offset around its cluster centre.
pub const DEFAULT_ANGLE_SPREAD_DEG: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayAngle {
    /// Elevation angle of arrival, radians.
    pub theta: f64,
    /// Azimuth angle of arrival, radians.
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    pub num_rx_antennas: usize,
    pub num_users: usize,
    pub num_clusters: usize,
    pub rays_per_cluster: usize,
    /// Indexed by `(l * rays_per_cluster + c) * num_users + m`.
    pub angles: Vec<RayAngle>,
}

impl GeometryConfig {
    /// Draws cluster centres uniformly over `[0, π) × [0, 2π)` independently for
    /// every user, then spreads the rays with Laplacian offsets.
    pub fn random<R: Rng + ?Sized>(
        num_rx_antennas: usize,
        num_users: usize,
        num_clusters: usize,
        rays_per_cluster: usize,
        angle_spread_deg: f64,
        rng: &mut R,
    ) -> Result<Self> {
        // Laplace(0, b) has standard deviation b·√2.
        let scale = angle_spread_deg.to_radians() / SQRT_2;
        let mut angles = vec![RayAngle { theta: 0.0, phi: 0.0 }; num_clusters * rays_per_cluster * num_users];
        for m in 0..num_users {
            for l in 0..num_clusters {
                let theta0 = rng.random::<f64>() * PI;
                let phi0 = rng.random::<f64>() * 2.0 * PI;
                for c in 0..rays_per_cluster {
                    let idx = (l * rays_per_cluster + c) * num_users + m;
                    angles[idx] = RayAngle {
                        theta: theta0 + laplace(scale, rng),
                        phi: phi0 + laplace(scale, rng),
                    };
                }
            }
        }
        let geom = Self { num_rx_antennas, num_users, num_clusters, rays_per_cluster, angles };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_rx_antennas == 0 || side_length(self.num_rx_antennas).is_none() {
            return Err(Error::config(format!(
                "receive antenna count {} is not a positive perfect square",
                self.num_rx_antennas
            )));
        }
        if self.num_users == 0 || self.num_clusters == 0 || self.rays_per_cluster == 0 {
            return Err(Error::config("users, clusters and rays per cluster must all be at least 1"));
        }
        if self.angles.len() != self.num_rays() * self.num_users {
            return Err(Error::config("angle set does not match L x C x M"));
        }
        if self.angles.iter().any(|a| !a.theta.is_finite() || !a.phi.is_finite()) {
            return Err(Error::config("non-finite ray angle"));
        }
        Ok(())
    }

    pub fn num_rays(&self) -> usize {
        self.num_clusters * self.rays_per_cluster
    }

    pub fn angle(&self, ray: usize, user: usize) -> RayAngle {
        self.angles[ray * self.num_users + user]
    }
}

fn laplace<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random::<f64>() - 0.5;
    -scale * u.signum() * (1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE).ln()
}

fn side_length(n: usize) -> Option<usize> {
    let s = (n as f64).sqrt().round() as usize;
    (s * s == n).then_some(s)
}

/// Phase progression `[1, e^{jπν}, …, e^{jπ(P-1)ν}]`.
fn phase_vector(nu: f64, len: usize) -> Vec<C64> {
    (0..len).map(|p| C64::from_polar(1.0, PI * p as f64 * nu)).collect()
}

/// UPA response with half-wavelength spacing:
/// `c(sinθ·cosφ) ⊗ c(cosθ)`, each factor of length `√n_rx`.
pub fn steering_vector(theta: f64, phi: f64, n_rx: usize) -> Result<CVec> {
    let side = side_length(n_rx)
        .filter(|&s| s > 0)
        .ok_or_else(|| Error::config(format!("receive antenna count {n_rx} is not a positive perfect square")))?;
    let outer = phase_vector(theta.sin() * phi.cos(), side);
    let inner = phase_vector(theta.cos(), side);
    Ok(CVec::from_iterator(
        n_rx,
        outer.iter().flat_map(|a| inner.iter().map(move |b| a * b)),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingConfig {
    pub carrier_freq_hz: f64,
    pub sampling_rate_hz: f64,
    pub dft_size: usize,
    /// Guard interval as a fraction of the DFT size.
    pub guard_fraction: f64,
    /// Relative velocity, m/s.
    pub velocity_mps: f64,
    pub num_slots: usize,
}

impl TimingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_freq_hz > 0.0 && self.sampling_rate_hz > 0.0) {
            return Err(Error::config("carrier frequency and sampling rate must be positive"));
        }
        if self.dft_size == 0 || self.num_slots == 0 {
            return Err(Error::config("DFT size and slot count must be positive"));
        }
        if !(0.0..=1.0).contains(&self.guard_fraction) {
            return Err(Error::config("guard fraction must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceParams {
    pub coherence_time_s: f64,
    pub symbol_duration_s: f64,
    pub k_max: u64,
    /// Correlation between adjacent slots.
    pub r: f64,
}

pub fn kmh_to_mps(kmh: f64) -> f64 {
    kmh / 3.6
}

/// Coherence time `0.432·(c/v)/f_c`, symbol duration `N_DFT(1+N_G)/f_s`,
/// `K_max = ⌊T_c/T_s⌋` and `r = exp(ln 0.5 / K_max)`.
pub fn coherence_params(t: &TimingConfig) -> Result<CoherenceParams> {
    t.validate()?;
    if !(t.velocity_mps > 0.0) || !t.velocity_mps.is_finite() {
        return Err(Error::config(format!("velocity must be positive, got {}", t.velocity_mps)));
    }
    let coherence_time_s = 0.432 * (SPEED_OF_LIGHT / t.velocity_mps) / t.carrier_freq_hz;
    let symbol_duration_s = t.dft_size as f64 * (1.0 + t.guard_fraction) / t.sampling_rate_hz;
    let k_max = (coherence_time_s / symbol_duration_s).floor();
    if k_max < 1.0 {
        return Err(Error::config(format!(
            "velocity {} m/s gives a coherence time ({coherence_time_s:.3e} s) shorter than one slot ({symbol_duration_s:.3e} s)",
            t.velocity_mps
        )));
    }
    let r = (0.5_f64.ln() / k_max).exp();
    Ok(CoherenceParams { coherence_time_s, symbol_duration_s, k_max: k_max as u64, r })
}

/// Small-scale gains `σ[l][c][m]` at one slot, flattened as `(l·C + c)·M + m`.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingState {
    pub sigma: Vec<C64>,
    pub slot: usize,
}

pub fn init_fading<R: Rng + ?Sized>(geom: &GeometryConfig, rng: &mut R) -> FadingState {
    let n = geom.num_rays() * geom.num_users;
    FadingState { sigma: (0..n).map(|_| complex_normal(rng)).collect(), slot: 0 }
}

pub fn evolve_fading<R: Rng + ?Sized>(state: &FadingState, r: f64, rng: &mut R) -> FadingState {
    debug_assert!((0.0..=1.0).contains(&r));
    let innov = (1.0 - r * r).max(0.0).sqrt();
    let sigma = state
        .sigma
        .iter()
        .map(|&s| {
            // Draw unconditionally so stream position does not depend on r.
            let w = complex_normal(rng);
            s * r + w * innov
        })
        .collect();
    FadingState { sigma, slot: state.slot + 1 }
}

/// Geometry with every raw array response precomputed.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    pub geometry: GeometryConfig,
    /// Raw response matrix `N_RX × M` for each ray `l·C + c`.
    pub responses: Vec<CMat>,
}

impl ChannelModel {
    pub fn new(geometry: GeometryConfig) -> Result<Self> {
        geometry.validate()?;
        let (n_rx, m) = (geometry.num_rx_antennas, geometry.num_users);
        let mut responses = Vec::with_capacity(geometry.num_rays());
        for ray in 0..geometry.num_rays() {
            let mut a = CMat::zeros(n_rx, m);
            for user in 0..m {
                let ang = geometry.angle(ray, user);
                a.set_column(user, &steering_vector(ang.theta, ang.phi, n_rx)?);
            }
            responses.push(a);
        }
        Ok(Self { geometry, responses })
    }

    /// Column `m` is `Σ_l Σ_c σ_{l,c,m} / √(L·C) · a(θ_{l,c,m}, φ_{l,c,m})`.
    pub fn assemble_raw_channel(&self, state: &FadingState) -> CMat {
        let g = &self.geometry;
        let norm = 1.0 / ((g.num_clusters * g.rays_per_cluster) as f64).sqrt();
        let mut h = CMat::zeros(g.num_rx_antennas, g.num_users);
        for (ray, a) in self.responses.iter().enumerate() {
            for m in 0..g.num_users {
                let gain = state.sigma[ray * g.num_users + m] * norm;
                let mut col = h.column_mut(m);
                col.axpy(gain, &a.column(m), c64(1.0, 0.0));
            }
        }
        h
    }
}

#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub raw: Vec<CMat>,
    /// Beam-domain channels; empty until a combiner is applied.
    pub beam: Vec<CMat>,
    pub fading: Vec<FadingState>,
}

impl ChannelRealization {
    pub fn generate<R: Rng + ?Sized>(model: &ChannelModel, r: f64, num_slots: usize, rng: &mut R) -> Self {
        let mut fading = Vec::with_capacity(num_slots);
        let mut state = init_fading(&model.geometry, rng);
        for _ in 0..num_slots {
            let next = evolve_fading(&state, r, rng);
            fading.push(std::mem::replace(&mut state, next));
        }
        let raw = fading.iter().map(|s| model.assemble_raw_channel(s)).collect();
        Self { raw, beam: Vec::new(), fading }
    }

    pub fn num_slots(&self) -> usize {
        self.raw.len()
    }
}
