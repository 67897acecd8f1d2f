//! Small complex linear-algebra helpers on top of nalgebra.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Diagonal loading applied when a Hermitian system fails to factor.
pub const REGULARIZATION: f64 = 1e-12;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `(A + Aᴴ) / 2`, in place.
pub fn make_hermitian(a: &mut CMat) {
    let n = a.nrows();
    for i in 0..n {
        a[(i, i)] = c64(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let v = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = v;
            a[(j, i)] = v.conj();
        }
    }
}

/// Largest elementwise deviation from Hermitian symmetry.
pub fn hermitian_defect(a: &CMat) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Smallest eigenvalue of the Hermitian part of `a`.
pub fn min_eigenvalue(a: &CMat) -> f64 {
    let mut h = a.clone();
    make_hermitian(&mut h);
    h.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn is_psd(a: &CMat, tol: f64) -> bool {
    hermitian_defect(a) <= tol.max(1e-12) && min_eigenvalue(a) >= -tol
}

/// Cholesky factor, rejected unless every pivot is real and positive.
fn factor(a: CMat) -> Option<nalgebra::Cholesky<C64, nalgebra::Dyn>> {
    let chol = a.cholesky()?;
    let l = chol.l_dirty();
    let ok = (0..l.nrows()).all(|i| {
        let d = l[(i, i)];
        d.re > 0.0 && d.re.is_finite() && d.im.abs() <= 1e-12 * d.re
    });
    ok.then_some(chol)
}

/// Factorization of a Hermitian positive-definite matrix used for repeated solves.
pub struct HermitianSolver {
    chol: nalgebra::Cholesky<C64, nalgebra::Dyn>,
    /// True when diagonal loading was needed to factor the matrix.
    pub regularized: bool,
}

impl HermitianSolver {
    pub fn new(a: &CMat) -> Result<Self> {
        if let Some(chol) = factor(a.clone()) {
            return Ok(Self { chol, regularized: false });
        }
        let scale = (0..a.nrows()).map(|i| a[(i, i)].re.abs()).fold(1.0, f64::max);
        let mut loaded = a.clone();
        make_hermitian(&mut loaded);
        for i in 0..loaded.nrows() {
            loaded[(i, i)] += c64(REGULARIZATION * scale, 0.0);
        }
        match factor(loaded) {
            Some(chol) => {
                log::debug!("regularized a {}x{} Hermitian system", a.nrows(), a.ncols());
                Ok(Self { chol, regularized: true })
            }
            None => Err(Error::numerical(format!(
                "{}x{} Hermitian system is not positive definite",
                a.nrows(),
                a.ncols()
            ))),
        }
    }

    pub fn solve(&self, b: &CMat) -> CMat {
        self.chol.solve(b)
    }

    pub fn solve_vec(&self, b: &CVec) -> CVec {
        self.chol.solve(b)
    }

    pub fn inverse(&self) -> CMat {
        self.chol.inverse()
    }
}

/// `x ↦ a·x + (1-a)·y` over any vector-space-like value.
#[inline]
pub fn lerp<T>(a: f64, x: T, y: T) -> T
where
    T: std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
{
    x * a + y * (1.0 - a)
}

/// Squared Frobenius norm.
pub fn frobenius_sq(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}
