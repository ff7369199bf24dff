//! ADMM iteration for the regularized SDP form of the covariance-domain
//! atomic-norm problem.
//!
//! The iterate splits a 2N x 2N block matrix `S = [[W, R^H], [R, T(mu)]]`
//! from its PSD copy `Z`; primal updates are closed-form, the `Z` update is
//! a projection onto the PSD cone, and `Pi` is the scaled dual ascent step.

use num_complex::Complex64;

use crate::covariance::RisCovariance;
use crate::error::{Error, Result};
use crate::linalg::{frob, hermitianize, CMat, CVec};

use super::toeplitz::{toeplitz_adjoint, toeplitz_build, ToeplitzParam};

#[derive(Debug, Clone)]
pub struct AdmmConfig {
    /// Augmented-Lagrangian penalty.
    pub tau: f64,
    /// Regularization weight on the covariance misfit.
    pub gamma: f64,
    pub max_iter: usize,
    pub eps_abs: f64,
    pub eps_rel: f64,
    /// Coefficient of the `(Pi_0 - I)` term in the W update. Stationarity
    /// of the augmented Lagrangian gives `W = Z_0 + (1/tau)(Pi_0 - I)`
    /// (factor 1, the default). Factor 2 selects the sign-flipped variant
    /// `W = Z_0 - (2/tau)(Pi_0 - I)`, kept available for comparison; it
    /// diverges because the dual error enters with the wrong sign.
    pub w_update_factor: f64,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            tau: 1.0,
            gamma: 1e4,
            max_iter: 5000,
            eps_abs: 1e-6,
            eps_rel: 1e-5,
            w_update_factor: 1.0,
        }
    }
}

impl AdmmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0 && self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidArgument("tau and gamma must be positive".into()));
        }
        if !(self.eps_abs.is_finite() && self.eps_abs > 0.0 && self.eps_rel.is_finite() && self.eps_rel > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if self.w_update_factor != 1.0 && self.w_update_factor != 2.0 {
            return Err(Error::InvalidArgument("w_update_factor must be 1 or 2".into()));
        }
        Ok(())
    }
}

/// Full iterate set plus convergence diagnostics.
#[derive(Debug, Clone)]
pub struct AdmmState {
    pub mu: ToeplitzParam,
    pub w: CMat,
    pub r: CMat,
    pub z: CMat,
    pub pi: CMat,
    pub iter: usize,
    pub primal_res: f64,
    pub dual_res: f64,
    pub converged: bool,
}

/// One per-iteration diagnostics record for the verbose trace stream.
#[derive(Debug, Clone, Copy)]
pub struct IterationTrace {
    pub iter: usize,
    pub primal_res: f64,
    pub dual_res: f64,
    pub objective: f64,
}

/// Frobenius-nearest PSD matrix: eigendecompose, clamp negative
/// eigenvalues, reassemble. Input is symmetrized first.
pub fn psd_project(s: &CMat) -> CMat {
    let se = hermitianize(s).symmetric_eigen();
    let n = s.nrows();
    let pos: Vec<usize> = (0..n).filter(|&i| se.eigenvalues[i] > 0.0).collect();
    if pos.is_empty() {
        return CMat::zeros(n, n);
    }
    let mut v = CMat::zeros(n, pos.len());
    for (j, &i) in pos.iter().enumerate() {
        let scale = se.eigenvalues[i].sqrt();
        v.column_mut(j).copy_from(&se.eigenvectors.column(i).map(|z| z * scale));
    }
    &v * v.adjoint()
}

fn block(m: &CMat, bi: usize, bj: usize, n: usize) -> CMat {
    m.view((bi * n, bj * n), (n, n)).into_owned()
}

fn assemble(w: &CMat, r: &CMat, t: &CMat) -> CMat {
    let n = w.nrows();
    let mut s = CMat::zeros(2 * n, 2 * n);
    s.view_mut((0, 0), (n, n)).copy_from(w);
    s.view_mut((0, n), (n, n)).copy_from(&r.adjoint());
    s.view_mut((n, 0), (n, n)).copy_from(r);
    s.view_mut((n, n), (n, n)).copy_from(t);
    s
}

fn scale_vector(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| if k == 0 { 1.0 / n as f64 } else { 1.0 / (2.0 * (n - k) as f64) })
        .collect()
}

/// Closed-form updates of `(mu, W, R)` given the current `(Z, Pi)` blocks.
fn primal_update(
    z: &CMat,
    pi: &CMat,
    r_hat: &CMat,
    cfg: &AdmmConfig,
) -> (ToeplitzParam, CMat, CMat) {
    let n = r_hat.nrows();
    let (tau, gamma) = (cfg.tau, cfg.gamma);
    let z0 = block(z, 0, 0, n);
    let z1 = block(z, 1, 0, n);
    let z2 = block(z, 1, 1, n);
    let pi0 = block(pi, 0, 0, n);
    let pi1 = block(pi, 1, 0, n);
    let pi2 = block(pi, 1, 1, n);

    let eye = CMat::identity(n, n);
    let w = if cfg.w_update_factor == 2.0 {
        &z0 - (&pi0 - &eye).map(|v| v * (2.0 / tau))
    } else {
        &z0 + (&pi0 - &eye).map(|v| v * (1.0 / tau))
    };
    let w = hermitianize(&w);

    let r = (r_hat.map(|v| v * gamma) + &pi1 + z1.map(|v| v * tau)).map(|v| v / (tau + gamma));

    let arg = &z2 + pi2.map(|v| v / tau);
    let mut adj = toeplitz_adjoint(&arg).expect("square block");
    adj[0] -= Complex64::new(n as f64 / tau, 0.0);
    let lambda = scale_vector(n);
    let mu = CVec::from_iterator(n, (0..n).map(|k| adj[k] * lambda[k]));

    (ToeplitzParam::new(mu), w, r)
}

/// Runs the ADMM iteration to the Boyd-style stopping criteria or the
/// iteration budget, whichever first. Never fails on non-convergence;
/// the best (final) iterate is returned with `converged = false`.
pub fn admm_solve(r_hat: &RisCovariance, cfg: &AdmmConfig) -> Result<AdmmState> {
    admm_solve_traced(r_hat, cfg, |_| {})
}

pub fn admm_solve_traced(
    r_hat: &RisCovariance,
    cfg: &AdmmConfig,
    mut on_iter: impl FnMut(&IterationTrace),
) -> Result<AdmmState> {
    cfg.validate()?;
    let n = r_hat.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("empty covariance".into()));
    }
    let tau = cfg.tau;
    let two_n = 2 * n;

    let mut z = CMat::zeros(two_n, two_n);
    let mut pi = CMat::zeros(two_n, two_n);
    let mut mu = ToeplitzParam::zeros(n);
    let mut w = CMat::zeros(n, n);
    let mut r = r_hat.r_hat.clone();
    let mut primal_res = f64::INFINITY;
    let mut dual_res = f64::INFINITY;
    let mut converged = false;
    let mut iter = 0;

    while iter < cfg.max_iter {
        iter += 1;
        let (mu_new, w_new, r_new) = primal_update(&z, &pi, &r_hat.r_hat, cfg);
        mu = mu_new;
        w = w_new;
        r = r_new;

        let t = toeplitz_build(&mu);
        let s = assemble(&w, &r, &t);
        let z_prev = z.clone();
        z = psd_project(&(&s - pi.map(|v| v / tau)));
        let gap = &z - &s;
        pi += gap.map(|v| v * tau);

        primal_res = frob(&gap);
        dual_res = tau * frob(&(&z - &z_prev));
        let tol_p = (two_n as f64).sqrt() * cfg.eps_abs + cfg.eps_rel * frob(&z).max(frob(&s));
        let tol_d = (two_n as f64).sqrt() * cfg.eps_abs + cfg.eps_rel * frob(&pi);

        let objective = n as f64 * mu.mu[0].re
            + w.trace().re
            + cfg.gamma * frob(&(&r - &r_hat.r_hat)).powi(2);
        on_iter(&IterationTrace { iter, primal_res, dual_res, objective });

        if primal_res <= tol_p && dual_res <= tol_d {
            converged = true;
            break;
        }
    }

    Ok(AdmmState { mu, w, r, z, pi, iter, primal_res, dual_res, converged })
}
