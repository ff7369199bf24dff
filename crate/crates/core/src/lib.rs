//! RIS-enabled gridless multi-source DoA estimation in the covariance
//! domain.
//!
//! The pipeline goes: synthetic NLoS scene ([`scene`]) -> sample
//! covariance and noise-variance estimation ([`covariance`]) -> ADMM
//! reconstruction of the Hermitian Toeplitz matrix ([`anm`]) -> MUSIC
//! angle extraction ([`music`]). [`bench`] wraps the whole chain in a
//! Monte-Carlo sweep harness with CSV output; the `risdoa` binary is its
//! command-line front end.

pub mod anm;
pub mod bench;
pub mod covariance;
pub mod error;
pub mod linalg;
pub mod music;
pub mod scene;

pub use error::{Error, Result};
