//! Covariance-domain processing: sample covariance, alternating
//! closed-form noise-variance estimation, and recovery of the denoised
//! N x N RIS-enabled covariance via a pseudoinverse sandwich.

use crate::error::{Error, Result};
use crate::linalg::{eigh_desc, frob, hermitianize, pseudo_inverse_full_rank, CMat, CVec};
use crate::scene::ObservationMatrix;

/// L x L sample covariance `Y Y^H` (no normalization; the antenna count
/// stays absorbed in the scale, so the noise floor estimates M*sigma_v^2).
#[derive(Debug, Clone)]
pub struct SampleCovariance {
    pub r_y: CMat,
}

impl SampleCovariance {
    pub fn dim(&self) -> usize {
        self.r_y.nrows()
    }
}

pub fn sample_covariance(obs: &ObservationMatrix) -> SampleCovariance {
    SampleCovariance {
        r_y: hermitianize(&(&obs.y * obs.y.adjoint())),
    }
}

pub fn sample_covariance_of(r_y: CMat) -> Result<SampleCovariance> {
    if r_y.nrows() != r_y.ncols() {
        return Err(Error::InvalidArgument("covariance must be square".into()));
    }
    let h = hermitianize(&r_y);
    if frob(&(&h - &r_y)) > 1e-8 * frob(&r_y).max(1.0) {
        return Err(Error::InvalidArgument("covariance must be Hermitian".into()));
    }
    Ok(SampleCovariance { r_y: h })
}

/// Output of the alternating noise-variance iteration.
#[derive(Debug, Clone)]
pub struct NoiseEstimate {
    pub sigma0: f64,
    /// Rank-1 factor of the signal part at convergence.
    pub c: CVec,
    pub iterations: usize,
    pub converged: bool,
}

/// Alternates a rank-1 eigen-extraction of `R_Y - sigma0 I` with the
/// closed-form trace update `sigma0 = (tr R_Y - ||c||^2)/L` until the
/// relative change in sigma0 stalls.
pub fn estimate_noise_variance(
    cov: &SampleCovariance,
    max_iter: usize,
    tol: f64,
) -> Result<NoiseEstimate> {
    let l = cov.dim();
    if l < 2 {
        return Err(Error::InvalidArgument("need L >= 2 for noise estimation".into()));
    }
    let trace = cov.r_y.trace().re;
    let mut sigma0 = 0.0;
    let mut c = CVec::zeros(l);
    let mut converged = false;
    let mut iterations = 0;

    for i in 1..=max_iter {
        iterations = i;
        let shifted = &cov.r_y - CMat::identity(l, l).map(|z| z * sigma0);
        let (vals, vecs) = eigh_desc(&shifted);
        // sigma0 can transiently overshoot lambda_max; clamp the rank-1 energy
        let top = vals[0].max(0.0);
        c = vecs.column(0).map(|z| z * top.sqrt());
        let prev = sigma0;
        sigma0 = (trace - top) / l as f64;
        if prev != 0.0 && ((sigma0 - prev) / prev).abs() < tol {
            converged = true;
            break;
        }
        if prev == 0.0 && sigma0 == 0.0 {
            converged = true;
            break;
        }
    }
    Ok(NoiseEstimate { sigma0: sigma0.max(0.0), c, iterations, converged })
}

/// Denoised N x N RIS-enabled covariance.
#[derive(Debug, Clone)]
pub struct RisCovariance {
    pub r_hat: CMat,
}

impl RisCovariance {
    pub fn dim(&self) -> usize {
        self.r_hat.nrows()
    }
}

/// `R_hat = (B^T)^+ (R_Y - sigma0 I) (B^*)^+`, with `(B^*)^+` the adjoint
/// of `(B^T)^+` so the sandwich stays Hermitian.
pub fn denoised_ris_covariance(
    cov: &SampleCovariance,
    sigma0: f64,
    b: &CMat,
) -> Result<RisCovariance> {
    let (n, l) = (b.nrows(), b.ncols());
    if l != cov.dim() {
        return Err(Error::InvalidArgument("B column count must match covariance dim".into()));
    }
    if sigma0 < 0.0 {
        return Err(Error::InvalidArgument("sigma0 must be nonnegative".into()));
    }
    let bt = b.transpose();
    let pinv = pseudo_inverse_full_rank(&bt, n).map_err(|(smin, smax)| {
        Error::RankDeficient(format!(
            "B^T is {l}x{n} with singular-value ratio {:.3e} (smin {smin:.3e}, smax {smax:.3e})",
            smin / smax
        ))
    })?;
    let centered = &cov.r_y - CMat::identity(l, l).map(|z| z * sigma0);
    let r_hat = hermitianize(&(&pinv * centered * pinv.adjoint()));
    Ok(RisCovariance { r_hat })
}
