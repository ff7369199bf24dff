//! Command-line front end: single-trial pipeline dumps, Monte-Carlo
//! sweeps, and MUSIC pseudospectrum exports.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use risdoa::anm::{admm_solve_traced, toeplitz_build, AdmmConfig};
use risdoa::bench::{
    apply_config_key, parse_config_file, run_experiment, run_trial, ExperimentSpec, Preset,
};
use risdoa::covariance::{denoised_ris_covariance, estimate_noise_variance, sample_covariance};
use risdoa::error::Error;
use risdoa::music::{estimate_doas, music_spectrum, MusicConfig};
use risdoa::scene::{draw_source_signals, measurement_matrix, synthesize_observations, RisProfile};

#[derive(Parser)]
#[command(name = "risdoa", version, about = "RIS-enabled gridless DoA estimation benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Flat key = value config file; CLI flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory for CSV artifacts.
    #[arg(long, default_value = ".")]
    out: PathBuf,

    /// Monte-Carlo trials per sweep point.
    #[arg(long)]
    trials: Option<usize>,

    /// Base RNG seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Force sequential trial execution (mandatory for cpu_time).
    #[arg(long)]
    serial: bool,

    /// Emit per-iteration solver diagnostics.
    #[arg(long)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trial and dump every pipeline stage.
    Simulate {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run a Monte-Carlo sweep and write trial + aggregate CSVs.
    Sweep {
        /// snr_sweep | ris_sweep | measurement_sweep | cpu_time | custom
        preset: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Dump the MUSIC pseudospectrum of one trial as CSV.
    Spectrum {
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn build_spec(preset: Preset, common: &CommonOpts) -> Result<ExperimentSpec, Error> {
    let mut spec = ExperimentSpec::preset(preset, 0)?;
    if let Some(path) = &common.config {
        for (k, v) in parse_config_file(path)? {
            apply_config_key(&mut spec, &k, &v)?;
        }
    }
    if let Some(t) = common.trials {
        spec.trials = t;
    }
    if let Some(s) = common.seed {
        spec.seed = s;
        spec.base.rng_seed = s;
    }
    if common.serial {
        spec.serial = true;
    }
    spec.validate()?;
    Ok(spec)
}

fn cmd_simulate(common: &CommonOpts) -> Result<(), Error> {
    let spec = build_spec(Preset::Custom, common)?;
    let cfg = &spec.base;
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);

    let profile = RisProfile::random_binary(cfg.num_slots, cfg.num_ris, &mut rng);
    let signals = draw_source_signals(cfg.num_sources, &mut rng);
    let obs = synthesize_observations(cfg, &profile, &signals, &mut rng)?;
    println!(
        "scene: M={} N={} K={} L={} snr_db={} noise_var={:.6e}",
        cfg.num_antennas, cfg.num_ris, cfg.num_sources, cfg.num_slots, cfg.snr_db, obs.noise_var
    );

    let cov = sample_covariance(&obs);
    let noise = estimate_noise_variance(&cov, 100, 1e-8)?;
    println!(
        "noise estimate: sigma0={:.6e} iterations={} converged={}",
        noise.sigma0, noise.iterations, noise.converged
    );

    let b = measurement_matrix(cfg, &profile)?;
    let r_hat = denoised_ris_covariance(&cov, noise.sigma0, &b)?;

    let gamma = spec.gamma_override.unwrap_or(if noise.sigma0 > 1e-12 {
        10.0 / noise.sigma0
    } else {
        1e4
    });
    let admm_cfg = AdmmConfig { gamma, ..spec.admm.clone() };
    println!("admm: tau={} gamma={:.6e} w_update_factor={}", admm_cfg.tau, gamma, admm_cfg.w_update_factor);
    if common.verbose {
        println!("iter,primal_res,dual_res,objective");
    }
    let sol = admm_solve_traced(&r_hat, &admm_cfg, |t| {
        if common.verbose {
            println!("{},{:.6e},{:.6e},{:.6e}", t.iter, t.primal_res, t.dual_res, t.objective);
        }
    })?;
    println!(
        "admm: iter={} primal_res={:.3e} dual_res={:.3e} converged={}",
        sol.iter, sol.primal_res, sol.dual_res, sol.converged
    );

    let t = toeplitz_build(&sol.mu);
    let mcfg = MusicConfig { num_sources: cfg.num_sources, ..spec.music.clone() };
    let doas = estimate_doas(&t, &mcfg)?;
    let mut truth = cfg.source_doas_deg.clone();
    truth.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!("true DoAs (deg): {truth:?}");
    println!("estimated DoAs (deg): {:?}", doas.angles_deg);
    let errors: Vec<f64> = truth
        .iter()
        .zip(&doas.angles_deg)
        .map(|(t, e)| (t - e).abs())
        .collect();
    println!("per-source errors (deg): {errors:?}");
    Ok(())
}

fn cmd_sweep(preset_name: &str, common: &CommonOpts) -> Result<(), Error> {
    let preset = Preset::parse(preset_name)?;
    let spec = build_spec(preset, common)?;
    let out = run_experiment(&spec, &common.out)?;
    for s in &out.summaries {
        println!(
            "sweep_value={} mean_rmse_deg={:.4} std_rmse_deg={:.4} mean_time_s={:.4e} n_trials={}",
            s.sweep_value, s.mean_rmse_deg, s.std_rmse_deg, s.mean_time_s, s.n_trials
        );
    }
    println!("wrote {}", out.trials_path.display());
    println!("wrote {}", out.aggregate_path.display());
    Ok(())
}

fn cmd_spectrum(common: &CommonOpts) -> Result<(), Error> {
    let spec = build_spec(Preset::Custom, common)?;
    let cfg = &spec.base;
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let value = cfg.snr_db;
    let result = run_trial(
        &cfg.clone(),
        &spec.admm,
        &spec.music,
        spec.clip_deg,
        None,
        spec.gamma_override,
        &mut rng,
        value,
        0,
    )?;

    // rebuild T(mu) for the dump by rerunning with the same stream
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let profile = RisProfile::random_binary(cfg.num_slots, cfg.num_ris, &mut rng);
    let signals = draw_source_signals(cfg.num_sources, &mut rng);
    let obs = synthesize_observations(cfg, &profile, &signals, &mut rng)?;
    let cov = sample_covariance(&obs);
    let noise = estimate_noise_variance(&cov, 100, 1e-8)?;
    let b = measurement_matrix(cfg, &profile)?;
    let r_hat = denoised_ris_covariance(&cov, noise.sigma0, &b)?;
    let gamma = spec
        .gamma_override
        .unwrap_or(if noise.sigma0 > 1e-12 { 10.0 / noise.sigma0 } else { 1e4 });
    let sol = risdoa::anm::admm_solve(&r_hat, &AdmmConfig { gamma, ..spec.admm.clone() })?;
    let t = toeplitz_build(&sol.mu);

    let grid: Vec<f64> = {
        let (lo, hi) = spec.music.scan_range_deg;
        let step = spec.music.grid_step_deg;
        let n = ((hi - lo) / step).ceil() as usize;
        (0..n).map(|i| lo + i as f64 * step).filter(|&v| v < hi).collect()
    };
    let p = music_spectrum(&t, cfg.num_sources, &grid)?;

    fs::create_dir_all(&common.out)?;
    let path = common.out.join("spectrum.csv");
    let mut f = BufWriter::new(File::create(&path)?);
    writeln!(f, "angle_deg,pseudospectrum")?;
    for (a, v) in grid.iter().zip(&p) {
        writeln!(f, "{a:.4},{v:.8e}")?;
    }
    f.flush()?;
    println!("estimated DoAs (deg): {:?}", result.est_deg);
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate { common } => cmd_simulate(common),
        Command::Sweep { preset, common } => cmd_sweep(preset, common),
        Command::Spectrum { common } => cmd_spectrum(common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ (Error::Config(_) | Error::InvalidArgument(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e @ Error::Io(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
