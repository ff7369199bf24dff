//! MUSIC subspace scan over the reconstructed Toeplitz matrix.
//!
//! The noise subspace comes from the N-K smallest eigenpairs; angles are
//! the K largest local maxima of the pseudospectrum, optionally refined by
//! parabolic interpolation in the log-spectrum.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigh_desc, CMat, CVec};
use crate::scene::steering_vector;

#[derive(Debug, Clone)]
pub struct MusicConfig {
    /// Scan grid step, degrees.
    pub grid_step_deg: f64,
    /// Scan interval, degrees; the upper bound is exclusive.
    pub scan_range_deg: (f64, f64),
    pub num_sources: usize,
    /// Parabolic peak interpolation in the log-spectrum.
    pub refine: bool,
}

impl Default for MusicConfig {
    fn default() -> Self {
        Self {
            grid_step_deg: 0.01,
            scan_range_deg: (-90.0, 90.0),
            num_sources: 1,
            refine: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DoaEstimate {
    /// Estimated angles, degrees, strictly ascending.
    pub angles_deg: Vec<f64>,
    /// Sampled pseudospectrum (angle, value) pairs when requested.
    pub spectrum: Option<Vec<(f64, f64)>>,
    /// Fewer than K local maxima were found; output padded with the
    /// largest remaining grid values.
    pub degenerate: bool,
}

fn scan_grid(cfg: &MusicConfig) -> Vec<f64> {
    let (lo, hi) = cfg.scan_range_deg;
    let mut grid = Vec::new();
    let mut i = 0usize;
    loop {
        let theta = lo + i as f64 * cfg.grid_step_deg;
        if theta >= hi {
            break;
        }
        grid.push(theta);
        i += 1;
    }
    grid
}

/// Pseudospectrum `P(theta) = 1 / ||E_n^H a(theta)||^2` over the grid.
/// Steering vectors assume the same half-wavelength ULA geometry that
/// produced the Toeplitz structure.
pub fn music_spectrum(t: &CMat, num_sources: usize, grid_deg: &[f64]) -> Result<Vec<f64>> {
    let n = t.nrows();
    if t.ncols() != n {
        return Err(Error::InvalidArgument("matrix must be square".into()));
    }
    if num_sources >= n {
        return Err(Error::InvalidArgument(format!(
            "MUSIC requires K < N (got K={num_sources}, N={n})"
        )));
    }
    let (_, vecs) = eigh_desc(t);
    // noise subspace: eigenvectors of the N-K smallest eigenvalues
    let e_n = vecs.columns(num_sources, n - num_sources).into_owned();
    let positions: Vec<f64> = (0..n).map(|i| i as f64 * 0.5).collect();

    let mut p = Vec::with_capacity(grid_deg.len());
    for &theta in grid_deg {
        let a: CVec = steering_vector(theta, &positions, 1.0)?;
        let proj = e_n.adjoint() * &a;
        let denom = proj.iter().map(Complex64::norm_sqr).sum::<f64>().max(1e-18);
        p.push(1.0 / denom);
    }
    Ok(p)
}

/// Index/value local maxima, strictly greater than both neighbors, ties
/// broken toward the smaller angle by the strict comparison order.
fn local_maxima(p: &[f64]) -> Vec<usize> {
    (1..p.len().saturating_sub(1))
        .filter(|&i| p[i] > p[i - 1] && p[i] > p[i + 1])
        .collect()
}

fn parabolic_offset(lm: f64, l0: f64, lp: f64) -> f64 {
    let denom = lm - 2.0 * l0 + lp;
    if denom.abs() < 1e-300 {
        0.0
    } else {
        0.5 * (lm - lp) / denom
    }
}

pub fn estimate_doas(t: &CMat, cfg: &MusicConfig) -> Result<DoaEstimate> {
    let grid = scan_grid(cfg);
    if grid.len() < 3 {
        return Err(Error::InvalidArgument("scan grid too coarse".into()));
    }
    let p = music_spectrum(t, cfg.num_sources, &grid)?;

    let mut peaks = local_maxima(&p);
    peaks.sort_by(|&a, &b| p[b].partial_cmp(&p[a]).unwrap().then(a.cmp(&b)));
    peaks.truncate(cfg.num_sources);

    let mut degenerate = false;
    if peaks.len() < cfg.num_sources {
        degenerate = true;
        let mut rest: Vec<usize> = (0..p.len()).filter(|i| !peaks.contains(i)).collect();
        rest.sort_by(|&a, &b| p[b].partial_cmp(&p[a]).unwrap().then(a.cmp(&b)));
        peaks.extend(rest.into_iter().take(cfg.num_sources - peaks.len()));
    }

    let mut angles: Vec<f64> = peaks
        .iter()
        .map(|&i| {
            if cfg.refine && i > 0 && i + 1 < p.len() {
                let delta = parabolic_offset(p[i - 1].ln(), p[i].ln(), p[i + 1].ln());
                grid[i] + delta * cfg.grid_step_deg
            } else {
                grid[i]
            }
        })
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());

    Ok(DoaEstimate {
        angles_deg: angles,
        spectrum: Some(grid.into_iter().zip(p).collect()),
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitianize;

    fn exact_toeplitz(n: usize, thetas: &[f64]) -> CMat {
        let pos: Vec<f64> = (0..n).map(|i| i as f64 * 0.5).collect();
        let mut acc = CMat::zeros(n, n);
        for &t in thetas {
            let a = steering_vector(t, &pos, 1.0).unwrap();
            acc += &a * a.adjoint();
        }
        hermitianize(&acc)
    }

    fn default_grid() -> Vec<f64> {
        scan_grid(&MusicConfig::default())
    }

    #[test]
    fn single_source_peak_dominates() {
        let t = exact_toeplitz(8, &[-14.37]);
        let grid = default_grid();
        let p = music_spectrum(&t, 1, &grid).unwrap();
        let (imax, pmax) = p
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, &v)| (i, v))
            .unwrap();
        assert!((grid[imax] - -14.37).abs() <= 0.01);
        let mut sorted = p.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = sorted[sorted.len() / 2];
        assert!(pmax >= 1e3 * median, "peak {pmax} vs median {median}");
    }

    #[test]
    fn identity_matrix_gives_flat_spectrum() {
        let t = CMat::identity(8, 8);
        let grid = default_grid();
        let p = music_spectrum(&t, 1, &grid).unwrap();
        let (min, max) = p.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        assert!((max - min) / max < 1e-9, "flat spectrum expected, spread {}", max - min);
    }

    #[test]
    fn three_default_angles_peak_on_grid() {
        let truth = [5.345, 25.789, 45.456];
        let t = exact_toeplitz(16, &truth);
        let est = estimate_doas(&t, &MusicConfig { num_sources: 3, refine: false, ..Default::default() }).unwrap();
        assert!(!est.degenerate);
        for (e, t) in est.angles_deg.iter().zip(truth.iter()) {
            assert!((e - t).abs() <= 0.01, "est {e} vs true {t}");
        }
    }

    #[test]
    fn on_grid_source_exact() {
        let t = exact_toeplitz(8, &[10.0]);
        let est = estimate_doas(&t, &MusicConfig { num_sources: 1, refine: false, ..Default::default() }).unwrap();
        assert_eq!(est.angles_deg[0], 10.0);
        // refinement keeps an exactly on-grid peak in place
        let est = estimate_doas(&t, &MusicConfig { num_sources: 1, ..Default::default() }).unwrap();
        assert!((est.angles_deg[0] - 10.0).abs() < 1e-6);
    }

    #[test]
    fn off_grid_source_refined() {
        let t = exact_toeplitz(8, &[10.005]);
        let est = estimate_doas(&t, &MusicConfig { num_sources: 1, ..Default::default() }).unwrap();
        assert!(
            (est.angles_deg[0] - 10.005).abs() < 0.002,
            "refined estimate {}",
            est.angles_deg[0]
        );
    }

    #[test]
    fn exact_construction_subspace_orthogonality() {
        let truth = [5.345, 25.789, 45.456];
        let n = 16;
        let t = exact_toeplitz(n, &truth);
        let (_, vecs) = eigh_desc(&t);
        let e_n = vecs.columns(3, n - 3).into_owned();
        let pos: Vec<f64> = (0..n).map(|i| i as f64 * 0.5).collect();
        for &th in &truth {
            let a = steering_vector(th, &pos, 1.0).unwrap();
            let res = (e_n.adjoint() * &a).norm();
            assert!(res < 1e-6, "noise-subspace leakage {res} at {th}");
        }
    }

    #[test]
    fn three_sources_accurate_with_refinement() {
        let truth = [5.345, 25.789, 45.456];
        let t = exact_toeplitz(16, &truth);
        let est = estimate_doas(&t, &MusicConfig { num_sources: 3, ..Default::default() }).unwrap();
        for (e, t) in est.angles_deg.iter().zip(truth.iter()) {
            assert!((e - t).abs() < 0.01, "est {e} vs true {t}");
        }
    }

    #[test]
    fn output_sorted_ascending() {
        let t = exact_toeplitz(12, &[40.0, -20.0, 5.0]);
        let est = estimate_doas(&t, &MusicConfig { num_sources: 3, ..Default::default() }).unwrap();
        assert!(est.angles_deg.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn degenerate_when_too_few_peaks() {
        // one exact source but three requested: at most one true local
        // maximum exists after the two spurious sidelobe peaks, so the
        // output is padded and flagged
        let t = exact_toeplitz(4, &[0.0]);
        let est = estimate_doas(
            &t,
            &MusicConfig { num_sources: 3, grid_step_deg: 30.0, scan_range_deg: (-45.0, 46.0), ..Default::default() },
        )
        .unwrap();
        assert!(est.degenerate);
        assert_eq!(est.angles_deg.len(), 3);
    }

    #[test]
    fn rejects_k_not_less_than_n() {
        let t = CMat::identity(4, 4);
        assert!(music_spectrum(&t, 4, &default_grid()).is_err());
    }

    #[test]
    fn spectrum_strictly_positive() {
        let t = exact_toeplitz(8, &[0.0]);
        let p = music_spectrum(&t, 1, &default_grid()).unwrap();
        assert!(p.iter().all(|&v| v > 0.0));
    }
}
