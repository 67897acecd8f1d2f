//! Quasi-SVD receive combining and second-order channel aging statistics.

use std::cmp::Ordering;

use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::linalg::{c64, CMat, CVec};

/// Receive combiner `F_RX` with orthonormal columns, fixed after slot 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Combiner {
    pub f: CMat,
}

impl Combiner {
    pub fn num_beams(&self) -> usize {
        self.f.ncols()
    }

    pub fn num_rx_antennas(&self) -> usize {
        self.f.nrows()
    }

    /// Beam-domain channel `Fᴴ·H_raw`.
    pub fn effective_channel(&self, raw: &CMat) -> Result<CMat> {
        if raw.nrows() != self.f.nrows() {
            return Err(Error::config(format!(
                "channel has {} rows, combiner expects {}",
                raw.nrows(),
                self.f.nrows()
            )));
        }
        Ok(self.f.ad_mul(raw))
    }
}

/// Makes the first non-negligible entry real and positive.
fn fix_phase(v: &mut CVec) {
    let scale = v.camax();
    if let Some(z) = v.iter().copied().find(|z| z.norm() > 1e-9 * scale) {
        let rot = z.conj() / z.norm();
        v.iter_mut().for_each(|x| *x *= rot);
    }
}

/// Left singular vectors of `H[0]` in descending singular-value order; when the
/// channel has fewer than `n` significant directions the basis is completed by
/// Gram–Schmidt over the canonical vectors `e_0, e_1, …`.
pub fn build_combiner(h0_raw: &CMat, n: usize) -> Result<Combiner> {
    let n_rx = h0_raw.nrows();
    if n == 0 || n > n_rx {
        return Err(Error::config(format!("beam count {n} must be in 1..={n_rx}")));
    }
    if h0_raw.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::numerical("non-finite time-zero channel"));
    }

    let svd = h0_raw.clone().svd(true, false);
    let u = svd.u.ok_or_else(|| Error::numerical("SVD did not return left singular vectors"))?;
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));

    let smax = sv.iter().copied().fold(0.0, f64::max);
    let tol = smax * (n_rx.max(h0_raw.ncols()) as f64) * f64::EPSILON;
    let mut basis: Vec<CVec> = Vec::with_capacity(n);
    for &i in &order {
        if basis.len() == n || sv[i] <= tol {
            break;
        }
        let mut col = u.column(i).into_owned();
        fix_phase(&mut col);
        basis.push(col);
    }
    let rank = basis.len();

    let mut e = 0;
    while basis.len() < n && e < n_rx {
        let mut v = CVec::zeros(n_rx);
        v[e] = c64(1.0, 0.0);
        e += 1;
        // Two Gram–Schmidt passes keep the completion orthonormal to working precision.
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&v);
                v.axpy(-proj, b, c64(1.0, 0.0));
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            v /= c64(norm, 0.0);
            basis.push(v);
        }
    }
    if rank < n {
        log::debug!("time-zero channel has rank {rank} < {n} beams; completed the combiner basis");
    }
    Ok(Combiner { f: CMat::from_columns(&basis) })
}

/// Beam-domain array responses `A_{l,c} = F_RXᴴ·Á_{l,c}`, one per ray.
#[derive(Debug, Clone)]
pub struct BeamArrayResponses {
    pub responses: Vec<CMat>,
    pub num_clusters: usize,
    pub rays_per_cluster: usize,
}

impl BeamArrayResponses {
    pub fn new(model: &ChannelModel, combiner: &Combiner) -> Result<Self> {
        let responses = model
            .responses
            .iter()
            .map(|a| combiner.effective_channel(a))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            responses,
            num_clusters: model.geometry.num_clusters,
            rays_per_cluster: model.geometry.rays_per_cluster,
        })
    }

    pub fn num_beams(&self) -> usize {
        self.responses[0].nrows()
    }

    pub fn num_users(&self) -> usize {
        self.responses[0].ncols()
    }
}

/// Aging statistics of the beam-domain channel.
///
/// With `g(k') = (1 - r^{2k'}) / L`:
/// `ω_{nm,k'} = g(k')·θ_nm`, `Ω_{m,k'} = g(k')·Θ_m`, `Ω_{k'} = g(k')·Θ`, where
/// `θ_nm = Σ_{l,c} |[A_{l,c}]_{nm}|² / C`, `Θ_m = Σ_{l,c} a_m a_mᴴ / C` and
/// `Θ = Σ_m Θ_m`.
#[derive(Debug, Clone)]
pub struct SecondOrderStats {
    pub r: f64,
    pub num_clusters: usize,
    /// `θ_nm`, `N × M`.
    pub theta: nalgebra::DMatrix<f64>,
    /// `Θ_m` per user, `N × N`.
    pub theta_user: Vec<CMat>,
    /// `Θ`, `N × N`.
    pub theta_total: CMat,
    aging: Vec<f64>,
}

impl SecondOrderStats {
    /// Precomputes the aging factor for lags `0..=max_lag`; larger lags are
    /// evaluated on demand.
    pub fn new(beam: &BeamArrayResponses, r: f64, max_lag: usize) -> Self {
        let (n, m) = (beam.num_beams(), beam.num_users());
        let inv_c = 1.0 / beam.rays_per_cluster as f64;
        let mut theta = nalgebra::DMatrix::<f64>::zeros(n, m);
        let mut theta_user = vec![CMat::zeros(n, n); m];
        for a in &beam.responses {
            for j in 0..m {
                let col = a.column(j);
                for i in 0..n {
                    theta[(i, j)] += col[i].norm_sqr() * inv_c;
                }
                theta_user[j].gerc(c64(inv_c, 0.0), &col, &col, c64(1.0, 0.0));
            }
        }
        for t in &mut theta_user {
            crate::linalg::make_hermitian(t);
        }
        let theta_total = theta_user.iter().fold(CMat::zeros(n, n), |acc, t| acc + t);
        let mut stats = Self { r, num_clusters: beam.num_clusters, theta, theta_user, theta_total, aging: Vec::new() };
        stats.aging = (0..=max_lag).map(|k| stats.aging_uncached(k)).collect();
        stats
    }

    fn aging_uncached(&self, lag: usize) -> f64 {
        // 1 - r^{2k} via expm1 to keep precision when r is close to 1.
        let one_minus = if self.r >= 1.0 { 0.0 } else { -(2.0 * lag as f64 * self.r.ln()).exp_m1() };
        one_minus / self.num_clusters as f64
    }

    /// `(1 - r^{2·lag}) / L`.
    #[inline]
    pub fn aging(&self, lag: usize) -> f64 {
        match self.aging.get(lag) {
            Some(&g) => g,
            None => self.aging_uncached(lag),
        }
    }

    pub fn num_beams(&self) -> usize {
        self.theta.nrows()
    }

    pub fn num_users(&self) -> usize {
        self.theta.ncols()
    }

    #[inline]
    pub fn omega_coeff(&self, lag: usize, n: usize, m: usize) -> f64 {
        self.aging(lag) * self.theta[(n, m)]
    }

    pub fn omega(&self, lag: usize) -> nalgebra::DMatrix<f64> {
        &self.theta * self.aging(lag)
    }

    pub fn omega_user(&self, lag: usize, m: usize) -> CMat {
        &self.theta_user[m] * c64(self.aging(lag), 0.0)
    }

    pub fn omega_total(&self, lag: usize) -> CMat {
        &self.theta_total * c64(self.aging(lag), 0.0)
    }
}
