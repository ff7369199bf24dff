//! Monte-Carlo benchmark harness: presets for the SNR / RIS-element /
//! measurement-count / CPU-time sweeps, per-trial pipeline execution,
//! RMSE aggregation with error clipping, and CSV emission.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::anm::{admm_solve, toeplitz_build, AdmmConfig};
use crate::covariance::{denoised_ris_covariance, estimate_noise_variance, sample_covariance};
use crate::error::{Error, Result};
use crate::music::{estimate_doas, MusicConfig};
use crate::scene::{
    draw_source_signals, measurement_matrix, synthesize_observations, RisProfile, SceneConfig,
};

pub const DEFAULT_ANGLES: [f64; 3] = [5.345, 25.789, 45.456];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    SnrSweep,
    RisSweep,
    MeasurementSweep,
    CpuTime,
    Custom,
}

impl Preset {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "snr_sweep" => Ok(Self::SnrSweep),
            "ris_sweep" => Ok(Self::RisSweep),
            "measurement_sweep" => Ok(Self::MeasurementSweep),
            "cpu_time" => Ok(Self::CpuTime),
            "custom" => Ok(Self::Custom),
            other => Err(Error::Config(format!("unknown preset '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::SnrSweep => "snr_sweep",
            Self::RisSweep => "ris_sweep",
            Self::MeasurementSweep => "measurement_sweep",
            Self::CpuTime => "cpu_time",
            Self::Custom => "custom",
        }
    }
}

/// A full sweep description: which scene parameter varies, over which
/// values, and everything held fixed.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub preset: Preset,
    pub sweep_values: Vec<f64>,
    pub trials: usize,
    pub base: SceneConfig,
    /// Per-source error clip in degrees; `None` disables clipping.
    pub clip_deg: Option<f64>,
    pub admm: AdmmConfig,
    pub music: MusicConfig,
    pub seed: u64,
    /// Redraw the RIS phase profile independently for every trial.
    pub ris_redraw_per_trial: bool,
    /// Fixed regularization weight; `None` selects 10/sigma0_hat per trial.
    pub gamma_override: Option<f64>,
    pub serial: bool,
}

impl ExperimentSpec {
    pub fn preset(preset: Preset, seed: u64) -> Result<Self> {
        let base = SceneConfig::new(4, 16, 3, 32, DEFAULT_ANGLES.to_vec(), 3.0, seed)?;
        let (sweep_values, base) = match preset {
            Preset::SnrSweep => (vec![-6.0, -3.0, 0.0, 3.0, 6.0, 9.0, 12.0], base),
            Preset::RisSweep => {
                (vec![12.0, 15.0, 18.0, 21.0, 24.0, 27.0, 30.0], base)
            }
            Preset::MeasurementSweep => {
                (vec![20.0, 23.0, 26.0, 29.0, 32.0, 35.0, 38.0], base)
            }
            Preset::CpuTime => {
                let mut b = base;
                b.num_slots = 36;
                (vec![12.0, 15.0, 18.0, 21.0, 24.0, 27.0, 30.0], b)
            }
            Preset::Custom => (vec![base.snr_db], base),
        };
        Ok(Self {
            preset,
            sweep_values,
            trials: 100,
            base,
            clip_deg: Some(4.0),
            admm: AdmmConfig::default(),
            music: MusicConfig::default(),
            seed,
            ris_redraw_per_trial: true,
            gamma_override: None,
            serial: preset == Preset::CpuTime,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.sweep_values.is_empty() {
            return Err(Error::Config("sweep_values must be nonempty".into()));
        }
        Ok(())
    }

    /// Scene for one sweep point; the varying parameter depends on the preset.
    pub fn scene_at(&self, sweep_value: f64) -> Result<SceneConfig> {
        let mut cfg = self.base.clone();
        match self.preset {
            Preset::SnrSweep | Preset::Custom => cfg.snr_db = sweep_value,
            Preset::RisSweep | Preset::CpuTime => {
                let n = sweep_value as usize;
                cfg.num_ris = n;
                cfg.ris_positions = (0..n).map(|i| i as f64 * cfg.wavelength / 2.0).collect();
                if cfg.num_slots < n {
                    cfg.num_slots = n;
                }
            }
            Preset::MeasurementSweep => cfg.num_slots = sweep_value as usize,
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Outcome of a single pipeline run.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub sweep_value: f64,
    pub trial_index: usize,
    pub true_deg: Vec<f64>,
    pub est_deg: Vec<f64>,
    /// Absolute per-source errors, clipped when clipping is enabled.
    pub per_source_errors_deg: Vec<f64>,
    pub rmse_deg: f64,
    /// Estimation-stage wall time; synthesis excluded.
    pub wall_time_s: f64,
    pub admm_iters: usize,
    pub admm_converged: bool,
    pub sigma0_est: f64,
}

fn trial_rng(seed: u64, sweep_index: usize, trial_index: usize) -> ChaCha12Rng {
    let mut bytes = [0u8; 32];
    bytes[0..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..16].copy_from_slice(&(sweep_index as u64).to_le_bytes());
    bytes[16..24].copy_from_slice(&(trial_index as u64).to_le_bytes());
    bytes[24..32].copy_from_slice(b"risdoa\0\0");
    ChaCha12Rng::from_seed(bytes)
}

/// Regularization weight: fixed override, or 10/sigma0 with a floor that
/// routes effectively-noiseless runs to the large-gamma sentinel.
fn select_gamma(gamma_override: Option<f64>, sigma0: f64, trace_scale: f64) -> f64 {
    if let Some(g) = gamma_override {
        return g;
    }
    if sigma0 > 1e-10 * trace_scale.max(f64::MIN_POSITIVE) {
        10.0 / sigma0
    } else {
        1e4
    }
}

/// One end-to-end trial: synthesize, denoise, solve, scan, score.
#[allow(clippy::too_many_arguments)]
pub fn run_trial(
    cfg: &SceneConfig,
    admm: &AdmmConfig,
    music: &MusicConfig,
    clip_deg: Option<f64>,
    ris_profile: Option<&RisProfile>,
    gamma_override: Option<f64>,
    rng: &mut ChaCha12Rng,
    sweep_value: f64,
    trial_index: usize,
) -> Result<TrialResult> {
    cfg.validate()?;
    let drawn;
    let profile = match ris_profile {
        Some(p) => p,
        None => {
            drawn = RisProfile::random_binary(cfg.num_slots, cfg.num_ris, rng);
            &drawn
        }
    };
    let signals = draw_source_signals(cfg.num_sources, rng);
    let obs = synthesize_observations(cfg, profile, &signals, rng)?;

    let mut truth = cfg.source_doas_deg.clone();
    truth.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let clip = clip_deg.unwrap_or(4.0);

    let start = Instant::now();
    let estimate = (|| -> Result<(f64, usize, bool, Vec<f64>)> {
        let cov = sample_covariance(&obs);
        let noise = estimate_noise_variance(&cov, 100, 1e-8)?;
        let b = measurement_matrix(cfg, profile)?;
        let r_hat = denoised_ris_covariance(&cov, noise.sigma0, &b)?;
        let trace_scale = cov.r_y.trace().re / cov.dim() as f64;
        let admm_cfg = AdmmConfig {
            gamma: select_gamma(gamma_override, noise.sigma0, trace_scale),
            ..admm.clone()
        };
        let sol = admm_solve(&r_hat, &admm_cfg)?;
        let t = toeplitz_build(&sol.mu);
        let mcfg = MusicConfig { num_sources: cfg.num_sources, ..music.clone() };
        let doas = estimate_doas(&t, &mcfg)?;
        Ok((noise.sigma0, sol.iter, sol.converged, doas.angles_deg))
    })();
    let wall_time_s = start.elapsed().as_secs_f64();

    match estimate {
        Ok((sigma0, iters, converged, est)) => {
            let errors: Vec<f64> = truth
                .iter()
                .zip(est.iter())
                .map(|(t, e)| {
                    let err = (t - e).abs();
                    if clip_deg.is_some() { err.min(clip) } else { err }
                })
                .collect();
            let rmse = (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt();
            Ok(TrialResult {
                sweep_value,
                trial_index,
                true_deg: truth,
                est_deg: est,
                per_source_errors_deg: errors,
                rmse_deg: rmse,
                wall_time_s,
                admm_iters: iters,
                admm_converged: converged,
                sigma0_est: sigma0,
            })
        }
        Err(Error::RankDeficient(_)) => {
            // recorded, not discarded: the benchmark must cover every trial
            let k = truth.len();
            Ok(TrialResult {
                sweep_value,
                trial_index,
                true_deg: truth,
                est_deg: vec![f64::NAN; k],
                per_source_errors_deg: vec![clip; k],
                rmse_deg: clip,
                wall_time_s,
                admm_iters: 0,
                admm_converged: false,
                sigma0_est: f64::NAN,
            })
        }
        Err(e) => Err(e),
    }
}

/// Per-sweep-point aggregate.
#[derive(Debug, Clone)]
pub struct SweepSummary {
    pub sweep_value: f64,
    /// Pooled RMSE over all trials and sources, clipping applied
    /// before squaring.
    pub mean_rmse_deg: f64,
    /// Standard deviation of the per-trial RMSEs.
    pub std_rmse_deg: f64,
    pub mean_time_s: f64,
    pub n_trials: usize,
}

pub fn aggregate_rmse(results: &[TrialResult]) -> SweepSummary {
    assert!(!results.is_empty());
    let n = results.len();
    let mut sq_sum = 0.0;
    let mut count = 0usize;
    for r in results {
        for e in &r.per_source_errors_deg {
            sq_sum += e * e;
            count += 1;
        }
    }
    let mean_rmse = (sq_sum / count as f64).sqrt();
    let mean_of_rmse = results.iter().map(|r| r.rmse_deg).sum::<f64>() / n as f64;
    let var = results
        .iter()
        .map(|r| (r.rmse_deg - mean_of_rmse).powi(2))
        .sum::<f64>()
        / n as f64;
    let mean_time = results.iter().map(|r| r.wall_time_s).sum::<f64>() / n as f64;
    SweepSummary {
        sweep_value: results[0].sweep_value,
        mean_rmse_deg: mean_rmse,
        std_rmse_deg: var.sqrt(),
        mean_time_s: mean_time,
        n_trials: n,
    }
}

#[derive(Debug)]
pub struct ExperimentOutput {
    pub summaries: Vec<SweepSummary>,
    pub trials_path: PathBuf,
    pub aggregate_path: PathBuf,
}

fn config_header(spec: &ExperimentSpec) -> String {
    let sweep = spec
        .sweep_values
        .iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(",");
    let angles = spec
        .base
        .source_doas_deg
        .iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(",");
    format!(
        "# preset = {}\n# sweep_values = {}\n# trials = {}\n# seed = {}\n\
         # m = {}\n# n = {}\n# k = {}\n# l = {}\n# theta_deg = {}\n# snr_db = {}\n\
         # clip_deg = {}\n# tau = {}\n# gamma = {}\n# w_update_factor = {}\n\
         # eps_abs = {}\n# eps_rel = {}\n# max_iter = {}\n# grid_step_deg = {}\n\
         # refine = {}\n# ris_redraw_per_trial = {}\n",
        spec.preset.name(),
        sweep,
        spec.trials,
        spec.seed,
        spec.base.num_antennas,
        spec.base.num_ris,
        spec.base.num_sources,
        spec.base.num_slots,
        angles,
        spec.base.snr_db,
        spec.clip_deg.map_or("none".to_string(), |c| c.to_string()),
        spec.admm.tau,
        spec.gamma_override.map_or("auto".to_string(), |g| g.to_string()),
        spec.admm.w_update_factor,
        spec.admm.eps_abs,
        spec.admm.eps_rel,
        spec.admm.max_iter,
        spec.music.grid_step_deg,
        spec.music.refine,
        spec.ris_redraw_per_trial,
    )
}

/// Runs every sweep point for `trials` trials each and writes the
/// per-trial and aggregate CSV artifacts into `out_dir`.
pub fn run_experiment(spec: &ExperimentSpec, out_dir: &Path) -> Result<ExperimentOutput> {
    spec.validate()?;
    fs::create_dir_all(out_dir)?;
    let trials_path = out_dir.join(format!("{}_trials.csv", spec.preset.name()));
    let aggregate_path = out_dir.join(format!("{}_aggregate.csv", spec.preset.name()));
    // fail on unwritable paths before any computation
    let mut trials_file = BufWriter::new(File::create(&trials_path)?);
    let mut agg_file = BufWriter::new(File::create(&aggregate_path)?);

    let header = config_header(spec);
    write!(trials_file, "{header}")?;
    writeln!(
        trials_file,
        "sweep_value,trial,src_index,true_deg,est_deg,err_deg,sigma0_est,admm_iters,admm_converged,time_s"
    )?;
    write!(agg_file, "{header}")?;
    writeln!(agg_file, "sweep_value,mean_rmse_deg,std_rmse_deg,mean_time_s,n_trials")?;

    let serial = spec.serial || spec.preset == Preset::CpuTime;
    let mut summaries = Vec::new();

    for (sweep_index, &sweep_value) in spec.sweep_values.iter().enumerate() {
        let cfg = spec.scene_at(sweep_value)?;
        let shared_profile = if spec.ris_redraw_per_trial {
            None
        } else {
            let mut rng = trial_rng(spec.seed, sweep_index, usize::MAX);
            Some(RisProfile::random_binary(cfg.num_slots, cfg.num_ris, &mut rng))
        };
        let one_trial = |trial: usize| -> Result<TrialResult> {
            let mut rng = trial_rng(spec.seed, sweep_index, trial);
            run_trial(
                &cfg,
                &spec.admm,
                &spec.music,
                spec.clip_deg,
                shared_profile.as_ref(),
                spec.gamma_override,
                &mut rng,
                sweep_value,
                trial,
            )
        };
        let results: Vec<TrialResult> = if serial {
            (0..spec.trials).map(one_trial).collect::<Result<_>>()?
        } else {
            (0..spec.trials)
                .into_par_iter()
                .map(one_trial)
                .collect::<Result<_>>()?
        };

        for r in &results {
            for (k, ((t, e), err)) in r
                .true_deg
                .iter()
                .zip(r.est_deg.iter())
                .zip(r.per_source_errors_deg.iter())
                .enumerate()
            {
                writeln!(
                    trials_file,
                    "{},{},{},{:.6},{:.6},{:.6},{:.6e},{},{},{:.6e}",
                    r.sweep_value,
                    r.trial_index,
                    k,
                    t,
                    e,
                    err,
                    r.sigma0_est,
                    r.admm_iters,
                    r.admm_converged,
                    r.wall_time_s
                )?;
            }
        }

        let summary = aggregate_rmse(&results);
        writeln!(
            agg_file,
            "{},{:.6},{:.6},{:.6e},{}",
            summary.sweep_value,
            summary.mean_rmse_deg,
            summary.std_rmse_deg,
            summary.mean_time_s,
            summary.n_trials
        )?;
        summaries.push(summary);
    }
    trials_file.flush()?;
    agg_file.flush()?;

    Ok(ExperimentOutput { summaries, trials_path, aggregate_path })
}

/// Flat key-value config file: one `key = value` per line, `#` comments.
pub fn parse_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path)?;
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "{}:{}: expected 'key = value', got '{raw}'",
                path.display(),
                lineno + 1
            )));
        };
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

/// Applies one config key to the spec. Unknown keys are config errors.
pub fn apply_config_key(spec: &mut ExperimentSpec, key: &str, value: &str) -> Result<()> {
    fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
        v.parse::<T>()
            .map_err(|_| Error::Config(format!("invalid value '{v}' for key '{key}'")))
    }
    fn list(key: &str, v: &str) -> Result<Vec<f64>> {
        v.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("invalid list '{v}' for key '{key}'")))
            })
            .collect()
    }
    match key {
        "preset" => spec.preset = Preset::parse(value)?,
        "sweep_values" => spec.sweep_values = list(key, value)?,
        "trials" => spec.trials = num(key, value)?,
        "seed" => spec.seed = num(key, value)?,
        "clip_deg" => {
            spec.clip_deg = if value == "none" { None } else { Some(num(key, value)?) }
        }
        "m" => {
            spec.base.num_antennas = num(key, value)?;
            spec.base.antenna_positions = (0..spec.base.num_antennas)
                .map(|i| i as f64 * spec.base.wavelength / 2.0)
                .collect();
        }
        "n" => {
            spec.base.num_ris = num(key, value)?;
            spec.base.ris_positions = (0..spec.base.num_ris)
                .map(|i| i as f64 * spec.base.wavelength / 2.0)
                .collect();
        }
        "l" => spec.base.num_slots = num(key, value)?,
        "theta_deg" => {
            spec.base.source_doas_deg = list(key, value)?;
            spec.base.num_sources = spec.base.source_doas_deg.len();
        }
        "alpha_deg" => spec.base.dod_alpha_deg = num(key, value)?,
        "beta_deg" => spec.base.doa_beta_deg = num(key, value)?,
        "snr_db" => {
            spec.base.snr_db = if value == "inf" { f64::INFINITY } else { num(key, value)? }
        }
        "tau" => spec.admm.tau = num(key, value)?,
        "gamma" => {
            spec.gamma_override = if value == "auto" { None } else { Some(num(key, value)?) }
        }
        "max_iter" => spec.admm.max_iter = num(key, value)?,
        "eps_abs" => spec.admm.eps_abs = num(key, value)?,
        "eps_rel" => spec.admm.eps_rel = num(key, value)?,
        "w_update_factor" => spec.admm.w_update_factor = num(key, value)?,
        "grid_step_deg" => spec.music.grid_step_deg = num(key, value)?,
        "refine" => spec.music.refine = num::<bool>(key, value)?,
        "ris_redraw_per_trial" => spec.ris_redraw_per_trial = num::<bool>(key, value)?,
        "serial" => spec.serial = num::<bool>(key, value)?,
        other => return Err(Error::Config(format!("unknown config key '{other}'"))),
    }
    Ok(())
}
