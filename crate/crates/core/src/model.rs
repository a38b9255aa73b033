//! Domain types, seeded channel generation, covariance assembly, and the
//! detection-quality functional `g` in exact and asymptotic forms.
//!
//! The received-signal model at an `M`-antenna fusion center with `N`
//! sensors is
//!
//! ```text
//! y = H a theta + H D v + n
//! ```
//!
//! where `H` is the `M x N` fading channel, `a` the sensor transmission
//! gains with `D = diag(a)`, `theta` the common signal (zero when absent),
//! `v` the per-sensor measurement noise with covariance
//! `V = diag(meas_noise_vars)`, and `n` the fusion-center noise with
//! covariance `fc_noise_var * I`. The noise component of `y` has covariance
//! `C_w = H D V D^H H^H + fc_noise_var * I`, and detection quality is
//! governed by the scalar
//!
//! ```text
//! g(a) = a^H H^H C_w^{-1} H a .
//! ```
//!
//! `C_w` is never inverted explicitly; it is factored once per
//! `(channel, gains)` pair via a Hermitian positive-definite Cholesky
//! decomposition and reused for every solve against it.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Error;

/// Fixed scalars and per-sensor vectors of the network model.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    /// Number of sensors `N`.
    pub n_sensors: usize,
    /// Number of fusion-center antennas `M`.
    pub n_antennas: usize,
    /// Variance of the signal of interest.
    pub signal_var: f64,
    /// Variance of the additive noise at each fusion-center antenna.
    pub fc_noise_var: f64,
    /// Per-sensor measurement noise variances, length `N`.
    pub meas_noise_vars: Vec<f64>,
    /// Per-sensor distances to the fusion center, length `N`.
    pub distances: Vec<f64>,
    /// Path-loss exponent: channel magnitude decays as `d^{-alpha}`.
    pub path_loss_exp: f64,
}

impl NetworkParams {
    /// Validates and builds the parameter set. Every variance and distance
    /// must be strictly positive and the per-sensor vectors must have
    /// length `n_sensors`.
    pub fn new(
        n_sensors: usize,
        n_antennas: usize,
        signal_var: f64,
        fc_noise_var: f64,
        meas_noise_vars: Vec<f64>,
        distances: Vec<f64>,
        path_loss_exp: f64,
    ) -> Result<Self, Error> {
        let params = NetworkParams {
            n_sensors,
            n_antennas,
            signal_var,
            fc_noise_var,
            meas_noise_vars,
            distances,
            path_loss_exp,
        };
        params.validate()?;
        Ok(params)
    }

    fn validate(&self) -> Result<(), Error> {
        if self.n_sensors == 0 {
            return Err(Error::config("n_sensors must be at least 1"));
        }
        if self.n_antennas == 0 {
            return Err(Error::config("n_antennas must be at least 1"));
        }
        for (name, v) in [
            ("signal_var", self.signal_var),
            ("fc_noise_var", self.fc_noise_var),
            ("path_loss_exp", self.path_loss_exp),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if self.meas_noise_vars.len() != self.n_sensors {
            return Err(Error::config(format!(
                "meas_noise_vars has length {}, expected n_sensors = {}",
                self.meas_noise_vars.len(),
                self.n_sensors
            )));
        }
        if self.distances.len() != self.n_sensors {
            return Err(Error::config(format!(
                "distances has length {}, expected n_sensors = {}",
                self.distances.len(),
                self.n_sensors
            )));
        }
        if let Some(v) = self.meas_noise_vars.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::config(format!("meas_noise_vars entries must be > 0, got {v}")));
        }
        if let Some(d) = self.distances.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            return Err(Error::config(format!("distances entries must be > 0, got {d}")));
        }
        Ok(())
    }

    /// The same network with a different antenna count.
    pub fn with_antennas(&self, n_antennas: usize) -> Result<Self, Error> {
        let mut p = self.clone();
        p.n_antennas = n_antennas;
        p.validate()?;
        Ok(p)
    }

    /// `d_i^{2 alpha}`: the squared path loss of sensor `i`.
    pub(crate) fn squared_path_loss(&self, i: usize) -> f64 {
        self.distances[i].powf(2.0 * self.path_loss_exp)
    }
}

/// One circularly symmetric complex Gaussian draw with total variance
/// `var` (real and imaginary parts independent, each with variance
/// `var / 2`). The real part is drawn first.
pub fn draw_cn<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// One draw of the fading channel between the sensors and the fusion
/// center.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    matrix: DMatrix<Complex64>,
}

impl ChannelRealization {
    /// Wraps an explicit channel matrix (rows = antennas, columns =
    /// sensors).
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self, Error> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::config("channel matrix must be nonempty"));
        }
        Ok(ChannelRealization { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn n_antennas(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_sensors(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn is_single_antenna(&self) -> bool {
        self.matrix.nrows() == 1
    }

    /// For a single-antenna channel, the length-`N` vector of per-sensor
    /// channel gains.
    pub fn single_antenna_vector(&self) -> Result<DVector<Complex64>, Error> {
        if !self.is_single_antenna() {
            return Err(Error::config(format!(
                "expected a single-antenna channel, got {} antennas",
                self.n_antennas()
            )));
        }
        Ok(self.matrix.row(0).transpose())
    }
}

/// Draws one channel realization: column `i` holds `M` independent
/// `CN(0, 1)` entries divided by `d_i^alpha`, so each entry has total
/// variance `d_i^{-2 alpha}`.
///
/// Entries are drawn column by column, antenna-major within a column,
/// real part before imaginary part. This order is part of the
/// reproducibility contract.
pub fn draw_channel<R: Rng + ?Sized>(params: &NetworkParams, rng: &mut R) -> ChannelRealization {
    let m = params.n_antennas;
    let n = params.n_sensors;
    let mut matrix = DMatrix::zeros(m, n);
    for i in 0..n {
        let scale = params.distances[i].powf(-params.path_loss_exp);
        for r in 0..m {
            matrix[(r, i)] = draw_cn(rng, 1.0) * Complex64::new(scale, 0.0);
        }
    }
    ChannelRealization { matrix }
}

/// The per-sensor transmission gains `a` (diagonal form `D = diag(a)`).
#[derive(Debug, Clone, PartialEq)]
pub struct GainVector {
    gains: DVector<Complex64>,
}

impl GainVector {
    pub fn new(gains: DVector<Complex64>) -> Result<Self, Error> {
        if gains.is_empty() {
            return Err(Error::config("gain vector must be nonempty"));
        }
        Ok(GainVector { gains })
    }

    /// Real non-negative gains from squared magnitudes `x_i = |a_i|^2`.
    pub fn from_squared_magnitudes(x: &[f64]) -> Result<Self, Error> {
        if let Some(v) = x.iter().find(|v| **v < 0.0 || !v.is_finite()) {
            return Err(Error::domain(format!("squared magnitudes must be >= 0, got {v}")));
        }
        let gains = DVector::from_iterator(
            x.len(),
            x.iter().map(|v| Complex64::new(v.sqrt(), 0.0)),
        );
        GainVector::new(gains)
    }

    pub fn from_real(gains: &[f64]) -> Result<Self, Error> {
        GainVector::new(DVector::from_iterator(
            gains.len(),
            gains.iter().map(|v| Complex64::new(*v, 0.0)),
        ))
    }

    pub fn as_vector(&self) -> &DVector<Complex64> {
        &self.gains
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }

    /// `x_i = |a_i|^2` for every sensor.
    pub fn squared_magnitudes(&self) -> Vec<f64> {
        self.gains.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Total consumed power `sum_i |a_i|^2`.
    pub fn total_power(&self) -> f64 {
        self.gains.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Element-wise complex conjugate of the gains.
    pub fn conjugated(&self) -> GainVector {
        GainVector {
            gains: self.gains.map(|a| a.conj()),
        }
    }
}

fn check_dims(
    channel: &ChannelRealization,
    gains: &GainVector,
    params: &NetworkParams,
) -> Result<(), Error> {
    if channel.n_sensors() != params.n_sensors || channel.n_antennas() != params.n_antennas {
        return Err(Error::config(format!(
            "channel is {}x{}, params expect {}x{}",
            channel.n_antennas(),
            channel.n_sensors(),
            params.n_antennas,
            params.n_sensors
        )));
    }
    if gains.len() != params.n_sensors {
        return Err(Error::config(format!(
            "gain vector has length {}, expected {}",
            gains.len(),
            params.n_sensors
        )));
    }
    Ok(())
}

/// `H a`: the array response to a unit signal through the given gains.
pub fn signal_column(channel: &ChannelRealization, gains: &GainVector) -> DVector<Complex64> {
    channel.matrix() * gains.as_vector()
}

/// `H D`: the matrix mixing per-sensor measurement noise into the array.
pub fn mixing_matrix(channel: &ChannelRealization, gains: &GainVector) -> DMatrix<Complex64> {
    let mut hd = channel.matrix().clone();
    for (i, a) in gains.as_vector().iter().enumerate() {
        for r in 0..hd.nrows() {
            hd[(r, i)] *= a;
        }
    }
    hd
}

/// The noise covariance `C_w = H D V D^H H^H + fc_noise_var * I` of the
/// received vector. Hermitian positive definite for any gains because the
/// fusion-center noise variance is strictly positive.
pub fn noise_covariance(
    channel: &ChannelRealization,
    gains: &GainVector,
    params: &NetworkParams,
) -> Result<DMatrix<Complex64>, Error> {
    check_dims(channel, gains, params)?;
    let m = params.n_antennas;
    // B = H D sqrt(V); then C_w = B B^H + fc_noise_var I.
    let mut b = mixing_matrix(channel, gains);
    for i in 0..params.n_sensors {
        let s = Complex64::new(params.meas_noise_vars[i].sqrt(), 0.0);
        for r in 0..m {
            b[(r, i)] *= s;
        }
    }
    let mut cov = &b * b.adjoint();
    for r in 0..m {
        cov[(r, r)] += Complex64::new(params.fc_noise_var, 0.0);
    }
    Ok(cov)
}

pub(crate) fn cholesky(
    matrix: DMatrix<Complex64>,
) -> Result<nalgebra::Cholesky<Complex64, nalgebra::Dyn>, Error> {
    matrix
        .cholesky()
        .ok_or_else(|| Error::Internal("covariance factorization failed".into()))
}

/// The detection-quality functional `g(a) = a^H H^H C_w^{-1} H a`,
/// evaluated by factoring `C_w` and solving against `H a`. Nonnegative for
/// any inputs; zero exactly when the gains are all zero.
pub fn g_exact(
    channel: &ChannelRealization,
    gains: &GainVector,
    params: &NetworkParams,
) -> Result<f64, Error> {
    check_dims(channel, gains, params)?;
    let ha = signal_column(channel, gains);
    let cov = noise_covariance(channel, gains, params)?;
    let chol = cholesky(cov)?;
    let z = chol.solve(&ha);
    Ok(ha.dotc(&z).re)
}

/// `g(a)` through the matrix inversion lemma:
///
/// ```text
/// g = a^H G a / s2 - w^H (E^{-1} + G / s2)^{-1} w / s2^2 ,
///     G = H^H H,  E = D V D^H,  w = G a,  s2 = fc_noise_var .
/// ```
///
/// Requires every `|a_i| > 0` so that `E` is invertible; callers holding
/// zero-gain sensors must drop them from the model first. Algebraically
/// identical to [`g_exact`], but costs an `N x N` solve instead of an
/// `M x M` one.
pub fn g_via_lemma(
    channel: &ChannelRealization,
    gains: &GainVector,
    params: &NetworkParams,
) -> Result<f64, Error> {
    check_dims(channel, gains, params)?;
    let x = gains.squared_magnitudes();
    if x.iter().any(|v| *v == 0.0) {
        return Err(Error::domain(
            "g_via_lemma requires every gain magnitude to be strictly positive",
        ));
    }
    let n = params.n_sensors;
    let s2 = params.fc_noise_var;
    let gram = channel.matrix().adjoint() * channel.matrix();
    let w = &gram * gains.as_vector();
    // X = E^{-1} + G / s2 with E = diag(|a_i|^2 meas_noise_vars[i]).
    let mut xmat = gram.map(|v| v / Complex64::new(s2, 0.0));
    for i in 0..n {
        xmat[(i, i)] += Complex64::new(1.0 / (x[i] * params.meas_noise_vars[i]), 0.0);
    }
    let chol = cholesky(xmat)?;
    let y = chol.solve(&w);
    let first = gains.as_vector().dotc(&w).re / s2;
    let second = w.dotc(&y).re / (s2 * s2);
    Ok(first - second)
}

/// The large-antenna limit of `g` as a function of the squared gain
/// magnitudes `x_i = |a_i|^2`:
///
/// ```text
/// g_inf(x) = sum_i M x_i / (fc_noise_var d_i^{2 alpha} + M x_i meas_noise_vars[i]) .
/// ```
///
/// Depends on the gains only through their magnitudes.
pub fn g_asymptotic(x: &[f64], params: &NetworkParams) -> Result<f64, Error> {
    if x.len() != params.n_sensors {
        return Err(Error::config(format!(
            "x has length {}, expected {}",
            x.len(),
            params.n_sensors
        )));
    }
    if let Some(v) = x.iter().find(|v| **v < 0.0 || !v.is_finite()) {
        return Err(Error::domain(format!("x entries must be >= 0, got {v}")));
    }
    let m = params.n_antennas as f64;
    Ok(x.iter()
        .enumerate()
        .map(|(i, xi)| {
            let mx = m * xi;
            mx / (params.fc_noise_var * params.squared_path_loss(i)
                + mx * params.meas_noise_vars[i])
        })
        .sum())
}

/// Which hypothesis generated a sample, or which one the detector
/// declared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// Signal absent.
    H0,
    /// Signal present.
    H1,
}

/// One simulated received vector together with the latent quantities that
/// produced it.
#[derive(Debug, Clone)]
pub struct HypothesisSample {
    pub hypothesis: Hypothesis,
    /// The signal of interest; exactly zero under H0.
    pub theta: Complex64,
    /// Per-sensor measurement noise `v`.
    pub meas_noise: DVector<Complex64>,
    /// Fusion-center noise `n`.
    pub fc_noise: DVector<Complex64>,
    /// `(H a) theta + (H D) v + n`, evaluated in exactly that association
    /// order.
    pub received: DVector<Complex64>,
}

impl HypothesisSample {
    /// Draws one sample. Under H1 the signal comes from `signal_rng`;
    /// under H0 no signal draw is consumed. Measurement noise (sensor by
    /// sensor) and then fusion-center noise (antenna by antenna) come from
    /// `noise_rng`.
    pub fn draw<R: Rng + ?Sized, S: Rng + ?Sized>(
        params: &NetworkParams,
        channel: &ChannelRealization,
        gains: &GainVector,
        hypothesis: Hypothesis,
        signal_rng: &mut S,
        noise_rng: &mut R,
    ) -> Result<Self, Error> {
        check_dims(channel, gains, params)?;
        let theta = match hypothesis {
            Hypothesis::H1 => draw_cn(signal_rng, params.signal_var),
            Hypothesis::H0 => Complex64::new(0.0, 0.0),
        };
        let meas_noise = DVector::from_iterator(
            params.n_sensors,
            (0..params.n_sensors).map(|i| draw_cn(noise_rng, params.meas_noise_vars[i])),
        );
        let fc_noise = DVector::from_iterator(
            params.n_antennas,
            (0..params.n_antennas).map(|_| draw_cn(noise_rng, params.fc_noise_var)),
        );
        let ha = signal_column(channel, gains);
        let hd = mixing_matrix(channel, gains);
        let received = received_from_parts(&ha, &hd, theta, &meas_noise, &fc_noise);
        Ok(HypothesisSample {
            hypothesis,
            theta,
            meas_noise,
            fc_noise,
            received,
        })
    }
}

/// `(H a) theta + (H D) v + n` in the canonical association order used
/// throughout the crate. Kept as a single function so every code path and
/// test produces bit-identical vectors from identical parts.
pub(crate) fn received_from_parts(
    ha: &DVector<Complex64>,
    hd: &DMatrix<Complex64>,
    theta: Complex64,
    meas_noise: &DVector<Complex64>,
    fc_noise: &DVector<Complex64>,
) -> DVector<Complex64> {
    ha.map(|v| v * theta) + hd * meas_noise + fc_noise
}
