//! MMSE over-the-air computation on the post-detection residual.

use crate::error::{Error, Result};
use crate::linalg::{c64, CMat, CVec, HermitianSolver};

#[derive(Debug, Clone, Copy)]
pub struct AirCompInputs<'a> {
    pub y: &'a CVec,
    pub channel: &'a CMat,
    /// Data symbols removed from `y` before combining.
    pub symbols: &'a CVec,
    /// Diagonal of the data-error covariance `ξ`.
    pub data_error: &'a [f64],
    pub computing_power: f64,
    pub noise_power: f64,
}

impl AirCompInputs<'_> {
    fn validate(&self) -> Result<()> {
        let (n, m) = self.channel.shape();
        if self.y.len() != n || self.symbols.len() != m || self.data_error.len() != m {
            return Err(Error::config("AirComp input dimensions disagree"));
        }
        if self.data_error.iter().any(|&x| !(x >= 0.0)) {
            return Err(Error::config("data error variances must be nonnegative"));
        }
        Ok(())
    }
}

/// `u = (Ĥ(ξ + E_c·I)Ĥᴴ + N0·I)⁻¹ · E_c·Ĥ·1`.
///
/// Returns the combiner and whether the system needed regularization.
pub fn mmse_combiner(inputs: &AirCompInputs) -> Result<(CVec, bool)> {
    inputs.validate()?;
    let h = inputs.channel;
    let (n, m) = h.shape();
    let mut weighted = h.clone();
    for j in 0..m {
        weighted.column_mut(j).scale_mut(inputs.data_error[j] + inputs.computing_power);
    }
    let mut system = weighted * h.adjoint();
    for i in 0..n {
        system[(i, i)] += c64(inputs.noise_power, 0.0);
    }
    crate::linalg::make_hermitian(&mut system);
    let rhs = h.column_sum() * c64(inputs.computing_power, 0.0);
    if inputs.computing_power == 0.0 {
        return Ok((CVec::zeros(n), false));
    }
    let solver = HermitianSolver::new(&system)?;
    if solver.regularized {
        log::debug!("AirComp combiner system regularized");
    }
    Ok((solver.solve_vec(&rhs), solver.regularized))
}

/// `f̂ = Re{uᴴ(y - Ĥd̂)}`; the target sum is real.
pub fn estimate_function(inputs: &AirCompInputs, u: &CVec) -> f64 {
    let residual = inputs.y - inputs.channel * inputs.symbols;
    u.dotc(&residual).re
}

/// Analytic mean squared error of `f̂ = Re{uᴴr}` for a residual
/// `r = Ĥ(e + s) + w` with `e ~ CN(0, ξ)`, real `s ~ N(0, E_c·I)` and
/// `w ~ CN(0, N0·I)`, against `f = 1ᵀs`.
pub fn analytic_mse(inputs: &AirCompInputs, u: &CVec) -> f64 {
    let h = inputs.channel;
    let g = h.adjoint() * u; // gᵢ = ĥᵢᴴu, so uᴴĥᵢ = gᵢ*
    let mut mse = 0.0;
    for (i, gi) in g.iter().enumerate() {
        // Re{gᵢ* sᵢ} - sᵢ = (Re gᵢ - 1)·sᵢ for real sᵢ.
        mse += (gi.re - 1.0).powi(2) * inputs.computing_power;
        // Circular complex error: Re part carries half the power.
        mse += 0.5 * gi.norm_sqr() * inputs.data_error[i];
    }
    mse + 0.5 * u.norm_squared() * inputs.noise_power
}
