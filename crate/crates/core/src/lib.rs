//! Neyman-Pearson detection of a zero-mean Gaussian signal in an analog
//! wireless sensor network whose fusion center carries many antennas.
//!
//! Sensors observe a common complex Gaussian signal in measurement noise,
//! scale their observations by per-sensor transmission gains, and forward
//! them over a coherent multiple-access fading channel. The fusion center
//! applies a likelihood-ratio threshold test to the received vector. The
//! crate provides:
//!
//! - [`model`]: network parameters, seeded channel generation, the received
//!   noise covariance, and the detection-quality functional `g` in exact,
//!   inversion-lemma, and large-antenna asymptotic forms;
//! - [`detector`]: the scalar test statistic, false-alarm-targeted
//!   thresholds, the closed-form (PD, PFA) pair, and the binary decision;
//! - [`allocator`]: sensor gain optimizers — the water-filling solution for
//!   the many-antenna regime, the single-antenna beamformer, and equal-power
//!   and low-power baselines;
//! - [`bounds`]: closed-form detection-probability bounds for both fusion
//!   center architectures;
//! - [`montecarlo`]: empirical (PD, PFA) estimation over simulated trials
//!   and the power / antenna-count parameter sweeps;
//! - [`cli`] and [`config`]: the experiment runner behind the `npfusion`
//!   binary, with flat key-value config files and CSV output.
//!
//! All randomness flows through named [`streams`] derived from one base
//! seed, so every experiment is bit-reproducible, including under parallel
//! execution.

pub mod allocator;
pub mod bounds;
pub mod cli;
pub mod config;
pub mod detector;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod streams;

pub use error::Error;
