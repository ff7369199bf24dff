//! C ABI for the estimation pipeline: opaque pipeline handles, integer
//! status codes, and a thread-local last-error message. The matching
//! header lives at `include/risdoa.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::ptr;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use risdoa::anm::AdmmConfig;
use risdoa::bench::run_trial;
use risdoa::music::MusicConfig;
use risdoa::scene::SceneConfig;
use risdoa::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RisdoaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    RankDeficient = 3,
    IoError = 4,
    InternalError = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> RisdoaStatus {
    match err {
        Error::InvalidArgument(_) | Error::Config(_) | Error::IndexOutOfRange(_) => {
            RisdoaStatus::InvalidArgument
        }
        Error::RankDeficient(_) => RisdoaStatus::RankDeficient,
        Error::Io(_) => RisdoaStatus::IoError,
    }
}

/// Opaque pipeline configuration handle.
pub struct RisdoaPipeline {
    scene: SceneConfig,
    admm: AdmmConfig,
    music: MusicConfig,
    clip_deg: f64,
}

/// Creates a pipeline handle for a half-wavelength ULA scene with the
/// given dimensions. Source angles default to an even spread and can be
/// overridden with `risdoa_pipeline_set_angles`. Returns NULL on invalid
/// dimensions (see `risdoa_last_error`).
#[no_mangle]
pub extern "C" fn risdoa_pipeline_new(
    num_antennas: usize,
    num_ris: usize,
    num_sources: usize,
    num_slots: usize,
    snr_db: f64,
    seed: u64,
) -> *mut RisdoaPipeline {
    let doas: Vec<f64> = (0..num_sources)
        .map(|k| -60.0 + 120.0 * (k as f64 + 0.5) / num_sources.max(1) as f64)
        .collect();
    match SceneConfig::new(num_antennas, num_ris, num_sources, num_slots, doas, snr_db, seed) {
        Ok(scene) => Box::into_raw(Box::new(RisdoaPipeline {
            scene,
            admm: AdmmConfig::default(),
            music: MusicConfig::default(),
            clip_deg: 4.0,
        })),
        Err(e) => {
            set_last_error(&e.to_string());
            ptr::null_mut()
        }
    }
}

/// Frees a handle returned by `risdoa_pipeline_new`. NULL is a no-op.
///
/// # Safety
/// `p` must be a pointer previously returned by `risdoa_pipeline_new`
/// and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn risdoa_pipeline_free(p: *mut RisdoaPipeline) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Sets the true source DoAs in degrees; `len` must equal the pipeline's
/// source count.
///
/// # Safety
/// `doas_deg` must point to `len` readable doubles; `p` must be a live
/// handle.
#[no_mangle]
pub unsafe extern "C" fn risdoa_pipeline_set_angles(
    p: *mut RisdoaPipeline,
    doas_deg: *const f64,
    len: usize,
) -> RisdoaStatus {
    let Some(pipe) = p.as_mut() else {
        set_last_error("null pipeline");
        return RisdoaStatus::NullPointer;
    };
    if doas_deg.is_null() {
        set_last_error("null angle array");
        return RisdoaStatus::NullPointer;
    }
    let angles = std::slice::from_raw_parts(doas_deg, len).to_vec();
    let mut scene = pipe.scene.clone();
    if len != scene.num_sources {
        set_last_error("angle count does not match source count");
        return RisdoaStatus::InvalidArgument;
    }
    scene.source_doas_deg = angles;
    match scene.validate() {
        Ok(()) => {
            pipe.scene = scene;
            RisdoaStatus::Ok
        }
        Err(e) => {
            set_last_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Per-source error clip in degrees used for the reported RMSE.
///
/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn risdoa_pipeline_set_clip(p: *mut RisdoaPipeline, clip_deg: f64) -> RisdoaStatus {
    let Some(pipe) = p.as_mut() else {
        set_last_error("null pipeline");
        return RisdoaStatus::NullPointer;
    };
    if clip_deg <= 0.0 || clip_deg.is_nan() {
        set_last_error("clip must be positive");
        return RisdoaStatus::InvalidArgument;
    }
    pipe.clip_deg = clip_deg;
    RisdoaStatus::Ok
}

/// Runs one synthetic trial (scene synthesis, denoising, ADMM, MUSIC)
/// with the trial-indexed RNG stream and writes the estimated DoAs,
/// ascending, into `est_deg_out[0..len]`. `rmse_out` may be NULL.
///
/// # Safety
/// `est_deg_out` must point to `len` writable doubles; `rmse_out`, when
/// non-NULL, to one writable double; `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn risdoa_pipeline_run(
    p: *mut RisdoaPipeline,
    trial: u64,
    est_deg_out: *mut f64,
    len: usize,
    rmse_out: *mut f64,
) -> RisdoaStatus {
    let Some(pipe) = p.as_mut() else {
        set_last_error("null pipeline");
        return RisdoaStatus::NullPointer;
    };
    if est_deg_out.is_null() {
        set_last_error("null output array");
        return RisdoaStatus::NullPointer;
    }
    if len != pipe.scene.num_sources {
        set_last_error("output length does not match source count");
        return RisdoaStatus::InvalidArgument;
    }
    let mut rng = ChaCha12Rng::seed_from_u64(pipe.scene.rng_seed.wrapping_add(trial));
    let result = run_trial(
        &pipe.scene,
        &pipe.admm,
        &pipe.music,
        Some(pipe.clip_deg),
        None,
        None,
        &mut rng,
        0.0,
        trial as usize,
    );
    match result {
        Ok(r) => {
            let out = std::slice::from_raw_parts_mut(est_deg_out, len);
            out.copy_from_slice(&r.est_deg);
            if let Some(rmse) = rmse_out.as_mut() {
                *rmse = r.rmse_deg;
            }
            RisdoaStatus::Ok
        }
        Err(e) => {
            set_last_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Thread-local message for the most recent failure on this thread.
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn risdoa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static human-readable name for a status code.
#[no_mangle]
pub extern "C" fn risdoa_status_message(status: RisdoaStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        RisdoaStatus::Ok => b"ok\0",
        RisdoaStatus::NullPointer => b"null pointer\0",
        RisdoaStatus::InvalidArgument => b"invalid argument\0",
        RisdoaStatus::RankDeficient => b"rank-deficient measurement matrix\0",
        RisdoaStatus::IoError => b"I/O error\0",
        RisdoaStatus::InternalError => b"internal error\0",
    };
    msg.as_ptr() as *const c_char
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn risdoa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
