//! Analytic models, Monte Carlo histograms and phase fitting for two-photon
//! interference of multimode OPO photon pairs behind an unbalanced
//! interferometer.
//!
//! All times are in seconds and angular frequencies in rad/s. The command
//! line front end in [`cli`] converts from nanoseconds and MHz.

pub mod cli;
pub mod config;
pub mod detector;
pub mod error;
pub mod fitting;
pub mod histogram;
pub mod interferometer;
pub mod montecarlo;
pub mod opo;

pub use config::RunConfig;
pub use detector::{gamma_c, gamma_c0, response_kernel, CoincidenceModelParams, DetectorParams};
pub use error::{Error, Result};
pub use fitting::{fit, phase_scan, residual_report, FitProblem, FitResult, Weighting};
pub use histogram::CoincidenceHistogram;
pub use interferometer::{check_validity, gamma_approx, gamma_full, InterferometerParams};
pub use montecarlo::{apply_jitter, run_simulation, sample_ideal_delay, SamplingMode, SimConfig};
pub use opo::{delta, gamma0, peak_width, OpoParams};
