//! Synthetic NLoS scene generation.
//!
//! Builds the RIS-enabled observation matrix `Y` from a scene description:
//! steering vectors toward the sources, per-slot RIS gain vectors, source
//! signals held constant over the slot block, and circular complex Gaussian
//! noise injected at a prescribed SNR.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};

/// All physical and experiment parameters of one scene.
#[derive(Debug, Clone)]
pub struct SceneConfig {
    /// BS receive antennas (M).
    pub num_antennas: usize,
    /// RIS elements (N).
    pub num_ris: usize,
    /// Sources (K).
    pub num_sources: usize,
    /// Time slots (L).
    pub num_slots: usize,
    /// Source DoAs in degrees, each in [-90, 90).
    pub source_doas_deg: Vec<f64>,
    /// RIS -> BS departure angle, degrees.
    pub dod_alpha_deg: f64,
    /// Arrival angle at the BS, degrees.
    pub doa_beta_deg: f64,
    pub wavelength: f64,
    /// RIS element positions; default half-wavelength ULA.
    pub ris_positions: Vec<f64>,
    /// BS antenna positions; default half-wavelength ULA.
    pub antenna_positions: Vec<f64>,
    /// SNR in dB; `f64::INFINITY` disables noise.
    pub snr_db: f64,
    pub rng_seed: u64,
}

impl SceneConfig {
    pub fn new(
        num_antennas: usize,
        num_ris: usize,
        num_sources: usize,
        num_slots: usize,
        source_doas_deg: Vec<f64>,
        snr_db: f64,
        rng_seed: u64,
    ) -> Result<Self> {
        let wavelength = 1.0;
        let cfg = Self {
            num_antennas,
            num_ris,
            num_sources,
            num_slots,
            source_doas_deg,
            dod_alpha_deg: 0.0,
            doa_beta_deg: 0.0,
            wavelength,
            ris_positions: half_wave_ula(num_ris, wavelength),
            antenna_positions: half_wave_ula(num_antennas, wavelength),
            snr_db,
            rng_seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let (m, n, k, l) = (self.num_antennas, self.num_ris, self.num_sources, self.num_slots);
        if m == 0 || n == 0 || k == 0 || l == 0 {
            return Err(Error::InvalidArgument("M, N, K, L must be positive".into()));
        }
        if k >= n {
            return Err(Error::InvalidArgument(format!(
                "identifiability requires K < N (got K={k}, N={n})"
            )));
        }
        if k >= l {
            return Err(Error::InvalidArgument(format!(
                "identifiability requires K < L (got K={k}, L={l})"
            )));
        }
        if l < n {
            return Err(Error::InvalidArgument(format!(
                "denoising requires L >= N (got L={l}, N={n})"
            )));
        }
        if self.source_doas_deg.len() != k {
            return Err(Error::InvalidArgument(format!(
                "expected {k} source angles, got {}",
                self.source_doas_deg.len()
            )));
        }
        for &t in &self.source_doas_deg {
            if !t.is_finite() || !(-90.0..90.0).contains(&t) {
                return Err(Error::InvalidArgument(format!(
                    "source DoA {t} outside [-90, 90)"
                )));
            }
        }
        for (i, &a) in self.source_doas_deg.iter().enumerate() {
            for &b in &self.source_doas_deg[i + 1..] {
                if a == b {
                    return Err(Error::InvalidArgument(format!("duplicate source DoA {a}")));
                }
            }
        }
        if self.wavelength <= 0.0 || self.wavelength.is_nan() {
            return Err(Error::InvalidArgument("wavelength must be positive".into()));
        }
        if self.ris_positions.len() != n || self.antenna_positions.len() != m {
            return Err(Error::InvalidArgument("position vector length mismatch".into()));
        }
        Ok(())
    }

    /// Per-entry noise variance implied by `snr_db` for a given clean signal.
    ///
    /// SNR_dB = 10 log10( ||clean||_F^2 / (L*M*sigma_v^2) ).
    pub fn noise_variance_for(&self, clean: &CMat) -> f64 {
        if self.snr_db.is_infinite() && self.snr_db > 0.0 {
            return 0.0;
        }
        let sig_power = clean.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let denom = (clean.nrows() * clean.ncols()) as f64;
        sig_power / denom / 10f64.powf(self.snr_db / 10.0)
    }
}

fn half_wave_ula(n: usize, wavelength: f64) -> Vec<f64> {
    (0..n).map(|i| i as f64 * wavelength / 2.0).collect()
}

/// Per-slot RIS reflection amplitudes and phases.
#[derive(Debug, Clone)]
pub struct RisProfile {
    /// L x N amplitudes, strictly positive.
    pub gains: Vec<Vec<f64>>,
    /// L x N phases, radians.
    pub phases: Vec<Vec<f64>>,
}

impl RisProfile {
    pub fn new(gains: Vec<Vec<f64>>, phases: Vec<Vec<f64>>) -> Result<Self> {
        if gains.len() != phases.len() || gains.iter().zip(&phases).any(|(g, p)| g.len() != p.len()) {
            return Err(Error::InvalidArgument("gain/phase dimension mismatch".into()));
        }
        if gains.iter().flatten().any(|&g| g <= 0.0 || g.is_nan()) {
            return Err(Error::InvalidArgument("RIS gains must be strictly positive".into()));
        }
        Ok(Self { gains, phases })
    }

    /// Unit gains, phases drawn i.i.d. uniform from {0, pi} per slot and element.
    pub fn random_binary<R: Rng>(num_slots: usize, num_ris: usize, rng: &mut R) -> Self {
        let gains = vec![vec![1.0; num_ris]; num_slots];
        let phases = (0..num_slots)
            .map(|_| (0..num_ris).map(|_| if rng.random::<bool>() { PI } else { 0.0 }).collect())
            .collect();
        Self { gains, phases }
    }

    pub fn num_slots(&self) -> usize {
        self.gains.len()
    }

    pub fn num_ris(&self) -> usize {
        self.gains.first().map_or(0, Vec::len)
    }
}

/// The L x M observation matrix together with its noiseless copy and the
/// per-entry noise variance actually injected (simulation bookkeeping).
#[derive(Debug, Clone)]
pub struct ObservationMatrix {
    pub y: CMat,
    pub clean: CMat,
    pub noise_var: f64,
}

/// Steering vector `a(theta)`: element n is exp(j 2pi/lambda p_n sin theta).
pub fn steering_vector(theta_deg: f64, positions: &[f64], wavelength: f64) -> Result<CVec> {
    if !theta_deg.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite angle {theta_deg}")));
    }
    if wavelength <= 0.0 || wavelength.is_nan() {
        return Err(Error::InvalidArgument("wavelength must be positive".into()));
    }
    let s = (theta_deg * PI / 180.0).sin();
    Ok(CVec::from_iterator(
        positions.len(),
        positions
            .iter()
            .map(|&p| Complex64::from_polar(1.0, 2.0 * PI / wavelength * p * s)),
    ))
}

/// RIS gain vector `b(l)`: the departure-angle phase ramp times the per-slot
/// complex reflection coefficients, elementwise. Slot index is 1-based.
pub fn ris_gain_vector(
    profile: &RisProfile,
    slot: usize,
    alpha_deg: f64,
    positions: &[f64],
    wavelength: f64,
) -> Result<CVec> {
    if slot == 0 || slot > profile.num_slots() {
        return Err(Error::IndexOutOfRange(format!(
            "slot {slot} outside 1..={}",
            profile.num_slots()
        )));
    }
    let ramp = steering_vector(alpha_deg, positions, wavelength)?;
    let g = &profile.gains[slot - 1];
    let phi = &profile.phases[slot - 1];
    Ok(CVec::from_iterator(
        positions.len(),
        (0..positions.len()).map(|n| Complex64::from_polar(g[n], phi[n]) * ramp[n]),
    ))
}

/// The N x L RIS measurement matrix `B = [b(1), ..., b(L)]`.
pub fn measurement_matrix(cfg: &SceneConfig, profile: &RisProfile) -> Result<CMat> {
    let cols: Vec<CVec> = (1..=cfg.num_slots)
        .map(|l| ris_gain_vector(profile, l, cfg.dod_alpha_deg, &cfg.ris_positions, cfg.wavelength))
        .collect::<Result<_>>()?;
    Ok(CMat::from_columns(&cols))
}

/// K i.i.d. circular complex Gaussian source amplitudes, unit variance,
/// held constant over the whole slot block.
pub fn draw_source_signals<R: Rng>(num_sources: usize, rng: &mut R) -> CVec {
    complex_gaussian_vec(num_sources, 1.0, rng)
}

fn complex_gaussian_vec<R: Rng>(n: usize, var: f64, rng: &mut R) -> CVec {
    let sigma = (var / 2.0).sqrt();
    CVec::from_iterator(
        n,
        (0..n).map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re * sigma, im * sigma)
        }),
    )
}

/// Builds the observation matrix `Y = B^T A(theta) s row(e^{j 2pi/lambda q_m sin beta}) + V`.
pub fn synthesize_observations<R: Rng>(
    cfg: &SceneConfig,
    profile: &RisProfile,
    signals: &CVec,
    rng: &mut R,
) -> Result<ObservationMatrix> {
    cfg.validate()?;
    if signals.len() != cfg.num_sources {
        return Err(Error::InvalidArgument(format!(
            "expected {} source signals, got {}",
            cfg.num_sources,
            signals.len()
        )));
    }
    if profile.num_slots() != cfg.num_slots || profile.num_ris() != cfg.num_ris {
        return Err(Error::InvalidArgument("RIS profile dimensions do not match scene".into()));
    }

    let b = measurement_matrix(cfg, profile)?;
    let a_cols: Vec<CVec> = cfg
        .source_doas_deg
        .iter()
        .map(|&t| steering_vector(t, &cfg.ris_positions, cfg.wavelength))
        .collect::<Result<_>>()?;
    let a = CMat::from_columns(&a_cols);

    // column vector B^T A s, common to every antenna
    let core = b.transpose() * a * signals;
    let beta = (cfg.doa_beta_deg * PI / 180.0).sin();
    let clean = CMat::from_fn(cfg.num_slots, cfg.num_antennas, |l, m| {
        core[l]
            * Complex64::from_polar(
                1.0,
                2.0 * PI / cfg.wavelength * cfg.antenna_positions[m] * beta,
            )
    });

    let noise_var = cfg.noise_variance_for(&clean);
    let y = if noise_var > 0.0 {
        let sigma = (noise_var / 2.0).sqrt();
        CMat::from_fn(cfg.num_slots, cfg.num_antennas, |l, m| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            clean[(l, m)] + Complex64::new(re * sigma, im * sigma)
        })
    } else {
        clean.clone()
    };

    Ok(ObservationMatrix { y, clean, noise_var })
}
