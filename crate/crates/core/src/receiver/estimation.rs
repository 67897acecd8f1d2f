//! Channel side of the belief propagation: per-coefficient interference
//! cancellation, aged-belief combining over neighbouring slots, and the vector
//! Gaussian denoiser.

use crate::error::Result;
use crate::linalg::{c64, make_hermitian, CMat, CVec, HermitianSolver, C64};

use super::{SoftChannel, SoftSymbol};

/// `ỹ_{nm} = y_n - Σ_{i≠m} ĥ_{ni}·d̂_i` at one slot.
pub fn chan_sic(y_n: C64, channel: &SoftChannel, symbols: &[SoftSymbol], n: usize, m: usize) -> C64 {
    let mut out = y_n;
    for (i, s) in symbols.iter().enumerate() {
        if i != m {
            out -= channel.mean[(n, i)] * s.mean;
        }
    }
    out
}

/// `ν_{s,nm} = Σ_{i≠m} [|ĥ_{ni}|²ψ̂ᵈ_i + (|d̂_i|² + ψ̂ᵈ_i)ψ̂ʰ_{ni}] + θ_nm·ψ̂ᵈ_m + Ñ0`, all at slot `s`.
pub fn own_noise(
    channel: &SoftChannel,
    symbols: &[SoftSymbol],
    theta_nm: f64,
    effective_noise: f64,
    n: usize,
    m: usize,
) -> f64 {
    let mut nu = theta_nm * symbols[m].mse + effective_noise;
    for (i, s) in symbols.iter().enumerate() {
        if i != m {
            nu += channel.mean[(n, i)].norm_sqr() * s.mse + (s.mean.norm_sqr() + s.mse) * channel.coeff_mse(n, i);
        }
    }
    nu
}

/// Noise of the belief from slot `s` once aged to slot `k`:
/// past (`k > s`): `ω·|d̂_{m,s}|² + r^{2(k-s)}·ν_s`;
/// future (`k < s`): `r^{2(k-s)}·(ω·|d̂_{m,s}|² + ν_s)`;
/// `s = k`: `ν_s`. `ω` is the aging variance at lag `|k - s|`.
pub fn aged_noise(nu_s: f64, omega: f64, symbol_power: f64, r: f64, k: usize, s: usize) -> f64 {
    use std::cmp::Ordering::*;
    let r2 = r.powi(2 * (k as i32 - s as i32));
    match k.cmp(&s) {
        Greater => omega * symbol_power + r2 * nu_s,
        Less => r2 * (omega * symbol_power + nu_s),
        Equal => nu_s,
    }
}

/// `(ν_{s,nm}, ν_{s→k,nm})` for one coefficient.
#[allow(clippy::too_many_arguments)]
pub fn chan_noise_terms(
    channel_s: &SoftChannel,
    symbols_s: &[SoftSymbol],
    stats: &crate::beamforming::SecondOrderStats,
    effective_noise: f64,
    k: usize,
    s: usize,
    n: usize,
    m: usize,
) -> (f64, f64) {
    let nu = own_noise(channel_s, symbols_s, stats.theta[(n, m)], effective_noise, n, m);
    let omega = stats.omega_coeff(k.abs_diff(s), n, m);
    (nu, aged_noise(nu, omega, symbols_s[m].mean.norm_sqr(), stats.r, k, s))
}

/// One aged observation `r^{k-s}·ỹ_{nm,s}` of `h_nm[k]·d̂_{m,s}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelObservation {
    pub value: C64,
    pub symbol: C64,
    pub noise: f64,
}

/// Extrinsic (or, with the own slot included, posterior) channel belief.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelBelief {
    pub mean: C64,
    pub var: f64,
}

/// Gaussian product of the observations:
/// `ψ̄ = (Σ |d̂|²/ν)⁻¹`, `h̄ = ψ̄·Σ d̂*·value/ν`.
/// Returns `None` when no observation carries information.
pub fn chan_combine(observations: &[ChannelObservation]) -> Option<ChannelBelief> {
    let mut info = 0.0;
    let mut acc = C64::default();
    for o in observations {
        info += o.symbol.norm_sqr() / o.noise;
        acc += o.symbol.conj() * o.value / o.noise;
    }
    (info > 0.0 && info.is_finite()).then(|| {
        let var = 1.0 / info;
        ChannelBelief { mean: acc * var, var }
    })
}

/// Vector Gaussian denoiser for one user's channel.
///
/// With prior `N(μ, Ω)` and observation `h̄` of diagonal variance `Ψ̄`,
/// `Λ = Ω + Ψ̄`, the posterior is `ΩΛ⁻¹h̄ + Ψ̄Λ⁻¹μ` with covariance `ΩΛ⁻¹Ψ̄`.
/// Evaluated as `μ + ΩΛ⁻¹(h̄ - μ)` and `Ω - ΩΛ⁻¹Ω`, which are algebraically
/// identical and keep the covariance Hermitian.
pub fn chan_denoise(
    observed: &CVec,
    observed_var: &[f64],
    prior_mean: &CVec,
    prior_cov: &CMat,
) -> Result<(CVec, CMat, bool)> {
    let n = observed.len();
    let mut lambda = prior_cov.clone();
    for i in 0..n {
        lambda[(i, i)] += c64(observed_var[i], 0.0);
    }
    let solver = HermitianSolver::new(&lambda)?;
    let mut rhs = CMat::zeros(n, n + 1);
    rhs.set_column(0, &(observed - prior_mean));
    rhs.columns_mut(1, n).copy_from(prior_cov);
    let x = solver.solve(&rhs);
    let gain_times = prior_cov * x;
    let mean = prior_mean + gain_times.column(0);
    let mut cov = prior_cov - gain_times.columns(1, n);
    make_hermitian(&mut cov);
    Ok((mean, cov, solver.regularized))
}
