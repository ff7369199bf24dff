//! Hermitian Toeplitz matrix parameterized by its first column, plus the
//! adjoint of the parameterization under the real inner product
//! `Re tr(Q^H T(mu))`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};

/// First column `mu` of a Hermitian Toeplitz matrix `T(mu)`.
#[derive(Debug, Clone)]
pub struct ToeplitzParam {
    pub mu: CVec,
}

impl ToeplitzParam {
    pub fn new(mut mu: CVec) -> Self {
        if !mu.is_empty() {
            mu[0].im = 0.0; // diagonal of a Hermitian matrix is real
        }
        Self { mu }
    }

    pub fn zeros(n: usize) -> Self {
        Self { mu: CVec::zeros(n) }
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }
}

/// `T(mu)[i][j] = mu[i-j]` below the diagonal, conjugated above.
pub fn toeplitz_build(param: &ToeplitzParam) -> CMat {
    let n = param.dim();
    CMat::from_fn(n, n, |i, j| {
        if i >= j {
            param.mu[i - j]
        } else {
            param.mu[j - i].conj()
        }
    })
}

/// Adjoint of `toeplitz_build`: `w[0] = tr Q`; for offset k >= 1,
/// `w[k]` is the k-th subdiagonal sum plus the conjugated k-th
/// superdiagonal sum, so that `Re tr(Q^H T(mu)) = Re <w, mu>` exactly.
pub fn toeplitz_adjoint(q: &CMat) -> Result<CVec> {
    if q.nrows() != q.ncols() {
        return Err(Error::InvalidArgument("adjoint input must be square".into()));
    }
    let n = q.nrows();
    let mut w = CVec::zeros(n);
    w[0] = q.trace();
    for k in 1..n {
        let mut sub = Complex64::ZERO;
        let mut sup = Complex64::ZERO;
        for j in 0..n - k {
            sub += q[(j + k, j)];
            sup += q[(j, j + k)];
        }
        w[k] = sub + sup.conj();
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh_desc, hermitianize};
    use crate::scene::steering_vector;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn random_cvec(n: usize, rng: &mut ChaCha12Rng) -> CVec {
        CVec::from_fn(n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn random_cmat(n: usize, rng: &mut ChaCha12Rng) -> CMat {
        CMat::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn unit_first_entry_gives_identity() {
        let mut mu = CVec::zeros(4);
        mu[0] = Complex64::new(1.0, 0.0);
        let t = toeplitz_build(&ToeplitzParam::new(mu));
        assert!((t - CMat::identity(4, 4)).norm() < 1e-14);
    }

    #[test]
    fn two_by_two_fill() {
        let mu = CVec::from_vec(vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)]);
        let t = toeplitz_build(&ToeplitzParam::new(mu));
        assert_relative_eq!(t[(0, 0)].re, 2.0);
        assert_relative_eq!(t[(1, 0)].im, 1.0);
        assert_relative_eq!(t[(0, 1)].im, -1.0);
        assert_relative_eq!(t[(1, 1)].re, 2.0);
    }

    #[test]
    fn vandermonde_sum_is_low_rank_psd() {
        // mu from diagonal averages of sum_k a(theta_k) a(theta_k)^H
        let n = 8;
        let pos: Vec<f64> = (0..n).map(|i| i as f64 * 0.5).collect();
        let mut acc = CMat::zeros(n, n);
        for &t in &[-12.0f64, 33.0] {
            let a = steering_vector(t, &pos, 1.0).unwrap();
            acc += &a * a.adjoint();
        }
        // steering outer products are exactly Toeplitz for a ULA
        let mu = CVec::from_fn(n, |k, _| acc[(k, 0)]);
        let t = toeplitz_build(&ToeplitzParam::new(mu));
        assert!((&t - &acc).norm() < 1e-10);
        let (vals, _) = eigh_desc(&t);
        assert!(vals[1] > 1e-6);
        assert!(vals[2].abs() < 1e-10 * vals[0], "rank should be 2: {vals:?}");
        assert!(vals[n - 1] > -1e-10);
    }

    #[test]
    fn adjoint_of_identity_is_trace_only() {
        let w = toeplitz_adjoint(&CMat::identity(5, 5)).unwrap();
        assert_relative_eq!(w[0].re, 5.0);
        for k in 1..5 {
            assert!(w[k].norm() < 1e-14);
        }
    }

    #[test]
    fn single_subdiagonal_entry() {
        let mut q = CMat::zeros(2, 2);
        q[(1, 0)] = Complex64::new(1.0, 0.0);
        let w = toeplitz_adjoint(&q).unwrap();
        assert!(w[0].norm() < 1e-14);
        assert_relative_eq!(w[1].re, 1.0);
    }

    #[test]
    fn adjoint_identity_brute_force() {
        // Re tr(Q^H T(mu)) == Re <w, mu> on random instances
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        for _ in 0..50 {
            for &n in &[4usize, 8, 16] {
                let q = hermitianize(&random_cmat(n, &mut rng));
                let mu = random_cvec(n, &mut rng);
                let t = toeplitz_build(&ToeplitzParam::new(mu.clone()));
                let lhs = (q.adjoint() * &t).trace().re;
                let w = toeplitz_adjoint(&q).unwrap();
                let rhs: f64 = (0..n).map(|k| (w[k].conj() * t_mu(&mu, k)).re).sum();
                assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0), "n={n}: {lhs} vs {rhs}");
            }
        }
    }

    // mu as stored in the built matrix (first entry forced real)
    fn t_mu(mu: &CVec, k: usize) -> Complex64 {
        if k == 0 {
            Complex64::new(mu[0].re, 0.0)
        } else {
            mu[k]
        }
    }

    #[test]
    fn adjoint_rejects_non_square() {
        assert!(toeplitz_adjoint(&CMat::zeros(2, 3)).is_err());
    }
}
