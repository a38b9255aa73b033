//! The scalar test statistic, false-alarm-targeted threshold, closed-form
//! (PD, PFA) pair, and the binary decision.
//!
//! The likelihood-ratio test for the model reduces to comparing
//!
//! ```text
//! T(y) = signal_var * | a^H H^H C_w^{-1} y |^2
//! ```
//!
//! against a threshold. Because the signal covariance is rank one, the
//! full quadratic form collapses to one squared inner product: with
//! `w = C_w^{-1} H a` precomputed, each trial costs one dot product
//! instead of an `M x M` solve. Under H0 the statistic is exponential
//! with mean `signal_var * g`, which yields the closed forms
//!
//! ```text
//! pfa = exp(-threshold / (signal_var * g))
//! pd  = exp(-threshold / (signal_var^2 g^2 + signal_var g))
//! ```
//!
//! and the threshold meeting a false-alarm target `eps`:
//! `threshold = -signal_var * g * ln(eps)`.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::Error;
use crate::model::{
    cholesky, noise_covariance, signal_column, ChannelRealization, GainVector, Hypothesis,
    NetworkParams,
};

/// Threshold configuration for one `(g, signal_var)` operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    /// Detection quality `g(a)` the threshold was computed from.
    pub g_value: f64,
    /// Signal variance.
    pub signal_var: f64,
    /// False-alarm target the threshold realizes.
    pub target_pfa: f64,
    /// The statistic threshold.
    pub threshold: f64,
}

impl DetectorConfig {
    /// Builds the configuration whose threshold meets `target_pfa`.
    pub fn for_target_pfa(g_value: f64, signal_var: f64, target_pfa: f64) -> Result<Self, Error> {
        let threshold = threshold_for_pfa(g_value, signal_var, target_pfa)?;
        Ok(DetectorConfig {
            g_value,
            signal_var,
            target_pfa,
            threshold,
        })
    }
}

/// Precomputed per-`(channel, gains)` detector state: the whitened signal
/// direction `w = C_w^{-1} H a` and the quality `g = (H a)^H w`.
#[derive(Debug, Clone)]
pub struct SignalWeights {
    weights: DVector<Complex64>,
    g: f64,
    signal_var: f64,
}

impl SignalWeights {
    /// Factors `C_w` once and solves for the statistic weights.
    pub fn new(
        channel: &ChannelRealization,
        gains: &GainVector,
        params: &NetworkParams,
    ) -> Result<Self, Error> {
        let cov = noise_covariance(channel, gains, params)?;
        let chol = cholesky(cov)?;
        let ha = signal_column(channel, gains);
        let weights = chol.solve(&ha);
        let g = ha.dotc(&weights).re;
        Ok(SignalWeights {
            weights,
            g,
            signal_var: params.signal_var,
        })
    }

    /// The detection quality `g(a)` for this channel and gain pair.
    pub fn g(&self) -> f64 {
        self.g
    }

    /// Evaluates `T(y) = signal_var * |w^H y|^2`.
    pub fn statistic(&self, received: &DVector<Complex64>) -> f64 {
        let inner = self.weights.dotc(received);
        self.signal_var * inner.norm_sqr()
    }
}

/// The test statistic for one received vector, computed from scratch.
/// Sweep code factors `C_w` once per channel via [`SignalWeights`]
/// instead.
pub fn test_statistic(
    received: &DVector<Complex64>,
    channel: &ChannelRealization,
    gains: &GainVector,
    params: &NetworkParams,
) -> Result<f64, Error> {
    if received.len() != params.n_antennas {
        return Err(Error::config(format!(
            "received vector has length {}, expected {}",
            received.len(),
            params.n_antennas
        )));
    }
    Ok(SignalWeights::new(channel, gains, params)?.statistic(received))
}

/// The threshold achieving false-alarm probability `epsilon`:
/// `-signal_var * g * ln(epsilon)`. Zero iff `g` is zero.
pub fn threshold_for_pfa(g: f64, signal_var: f64, epsilon: f64) -> Result<f64, Error> {
    if !(g.is_finite() && g >= 0.0) {
        return Err(Error::domain(format!("g must be finite and >= 0, got {g}")));
    }
    if !(signal_var.is_finite() && signal_var > 0.0) {
        return Err(Error::domain(format!(
            "signal_var must be finite and > 0, got {signal_var}"
        )));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!(
            "target false-alarm probability must lie in (0, 1), got {epsilon}"
        )));
    }
    Ok(-signal_var * g * epsilon.ln())
}

/// The analytic operating point for a threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub pd: f64,
    pub pfa: f64,
    /// Set when `g = 0`: the statistic is identically zero, the detector
    /// never declares H1, and both probabilities are zero by convention.
    pub degenerate: bool,
}

/// Closed-form `(pd, pfa)` at the given threshold.
///
/// `pd >= pfa` always. With `g = 0` the detector is degenerate (never
/// declares H1, see [`decide`]) and the flagged point `(0, 0)` is
/// returned.
pub fn analytic_roc(g: f64, signal_var: f64, threshold: f64) -> Result<RocPoint, Error> {
    if !(g.is_finite() && g >= 0.0) {
        return Err(Error::domain(format!("g must be finite and >= 0, got {g}")));
    }
    if !(signal_var.is_finite() && signal_var > 0.0) {
        return Err(Error::domain(format!(
            "signal_var must be finite and > 0, got {signal_var}"
        )));
    }
    if !(threshold.is_finite() && threshold >= 0.0) {
        return Err(Error::domain(format!(
            "threshold must be finite and >= 0, got {threshold}"
        )));
    }
    if g == 0.0 {
        return Ok(RocPoint {
            pd: 0.0,
            pfa: 0.0,
            degenerate: true,
        });
    }
    let sg = signal_var * g;
    let pfa = (-threshold / sg).exp();
    let pd = (-threshold / (sg * sg / signal_var + sg)).exp();
    Ok(RocPoint {
        pd,
        pfa,
        degenerate: false,
    })
}

/// Declares H1 iff the statistic strictly exceeds the threshold; exact
/// ties decide H0 so the rule stays deterministic.
pub fn decide(statistic: f64, threshold: f64) -> Hypothesis {
    if statistic > threshold {
        Hypothesis::H1
    } else {
        Hypothesis::H0
    }
}
