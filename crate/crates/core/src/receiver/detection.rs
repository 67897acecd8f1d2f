//! Data side of the belief propagation: soft interference cancellation,
//! vector-Gaussian combining, QPSK denoising and damping.

use crate::error::{Error, Result};
use crate::linalg::{c64, CMat, CVec, HermitianSolver, C64};

use super::SoftSymbol;

/// Lower bound applied to extrinsic data variances.
pub const MIN_VARIANCE: f64 = 1e-12;

/// Extrinsic data belief `(d̄, ψ̄ᵈ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataBelief {
    pub mean: C64,
    pub var: f64,
}

/// `ỹ_m = y - Σ_{i≠m} ĥ_i·d̂_i`.
pub fn data_sic(y: &CVec, h: &CMat, symbols: &[SoftSymbol], m: usize) -> CVec {
    let mut out = y.clone();
    for (i, s) in symbols.iter().enumerate() {
        if i != m {
            out.axpy(-s.mean, &h.column(i), c64(1.0, 0.0));
        }
    }
    out
}

/// `Ξ = Σ_i ĥ_i ĥ_iᴴ ψ̂ᵈ_i + Ñ0·I + Ψ̂ʰ`.
pub fn data_covariance(h: &CMat, symbols: &[SoftSymbol], effective_noise: f64, channel_cov: &CMat) -> CMat {
    let n = h.nrows();
    let mut xi = channel_cov.clone();
    for i in 0..n {
        xi[(i, i)] += c64(effective_noise, 0.0);
    }
    for (i, s) in symbols.iter().enumerate() {
        let col = h.column(i);
        xi.gerc(c64(s.mse, 0.0), &col, &col, c64(1.0, 0.0));
    }
    crate::linalg::make_hermitian(&mut xi);
    xi
}

/// Per-user covariance `Ξ_m = Ξ - ĥ_m ĥ_mᴴ ψ̂ᵈ_m`.
pub fn deflated_covariance(xi: &CMat, h: &CMat, symbols: &[SoftSymbol], m: usize) -> CMat {
    let mut out = xi.clone();
    let col = h.column(m);
    out.gerc(c64(-symbols[m].mse, 0.0), &col, &col, c64(1.0, 0.0));
    out
}

/// Combines one user's cancelled observation through the shared inverse:
/// `η = ĥᴴΞ⁻¹ĥ`, `d̄ = ĥᴴΞ⁻¹ỹ / η`, `ψ̄ = (1 - η·ψ̂ᵈ) / η`.
///
/// The boolean reports whether `ψ̄` had to be floored.
pub fn data_combine(y_tilde: &CVec, h_m: &CVec, xi: &HermitianSolver, prior_mse: f64) -> Result<(DataBelief, bool)> {
    let xi_h = xi.solve_vec(h_m);
    combine_from_solved(h_m, &xi_h, xi_h.dotc(y_tilde), prior_mse)
}

fn combine_from_solved(h_m: &CVec, xi_h: &CVec, numerator: C64, prior_mse: f64) -> Result<(DataBelief, bool)> {
    let eta = h_m.dotc(xi_h).re;
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::numerical(format!("non-positive combining gain η = {eta}")));
    }
    // ĥᴴΞ⁻¹ỹ = (Ξ⁻¹ĥ)ᴴỹ since Ξ is Hermitian.
    let mean = numerator / eta;
    let raw = (1.0 - eta * prior_mse) / eta;
    let floored = !(raw >= MIN_VARIANCE);
    Ok((DataBelief { mean, var: if floored { MIN_VARIANCE } else { raw } }, floored))
}

/// Extrinsic beliefs for every user at one slot from a single factorization of `Ξ`.
pub fn data_combine_all(
    y: &CVec,
    h: &CMat,
    symbols: &[SoftSymbol],
    effective_noise: f64,
    channel_cov: &CMat,
) -> Result<(Vec<DataBelief>, usize, bool)> {
    let m_users = h.ncols();
    let xi = data_covariance(h, symbols, effective_noise, channel_cov);
    let solver = HermitianSolver::new(&xi)?;
    let xi_h = solver.solve(h);
    let mut floored = 0;
    let mut out = Vec::with_capacity(m_users);
    for m in 0..m_users {
        let y_tilde = data_sic(y, h, symbols, m);
        let col = xi_h.column(m).into_owned();
        let (b, f) = combine_from_solved(&h.column(m).into_owned(), &col, col.dotc(&y_tilde), symbols[m].mse)?;
        floored += f as usize;
        out.push(b);
    }
    Ok((out, floored, solver.regularized))
}

/// Bayes-optimal QPSK denoiser with `c_d = √(E_d/2)`:
/// `d̂ = c_d·(tanh(2c_d·Re d̄/ψ̄) + j·tanh(2c_d·Im d̄/ψ̄))`, `ψ̂ = 1 - |d̂|²`.
pub fn qpsk_denoise(belief: DataBelief, amplitude: f64) -> SoftSymbol {
    let g = 2.0 * amplitude / belief.var;
    let mean = c64(amplitude * (g * belief.mean.re).tanh(), amplitude * (g * belief.mean.im).tanh());
    SoftSymbol { mean, mse: 1.0 - mean.norm_sqr() }
}

/// `β·new + (1-β)·old`.
#[inline]
pub fn damp<T>(new: T, old: T, beta: f64) -> T
where
    T: std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
{
    crate::linalg::lerp(beta, new, old)
}

pub(crate) fn damp_symbol(new: SoftSymbol, old: SoftSymbol, beta: f64) -> SoftSymbol {
    SoftSymbol { mean: old.mean + (new.mean - old.mean) * beta, mse: damp(new.mse, old.mse, beta) }
}

/// Nearest QPSK point and its Gray bits. Zero components resolve to the
/// positive half-plane, so `d̂ = 0` decides for bits `(0, 0)`.
pub fn hard_decide(soft: C64, amplitude: f64) -> (C64, [bool; 2]) {
    let bits = crate::signal::qpsk_demap(soft);
    (crate::signal::qpsk_modulate(bits, amplitude), bits)
}
