//! Sensor gain optimizers and baselines.
//!
//! For a many-antenna fusion center the detection quality depends on the
//! gains only through `x_i = |a_i|^2`, and maximizing it under the budget
//! `sum x_i = P` is a concave problem whose solution is a water-filling
//! profile: sensors with favorable path loss and measurement noise get
//! power, unfavorable ones are clamped to zero. The water level enters
//! through a scalar multiplier found by bisection.
//!
//! For a single-antenna fusion center phases matter; the optimum is a
//! whitened matched filter aligned with the channel.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::Error;
use crate::model::{ChannelRealization, GainVector, NetworkParams};

const BUDGET_REL_TOL: f64 = 1e-12;
const MAX_BISECT_ITERS: usize = 200;

fn check_budget(power_budget: f64) -> Result<(), Error> {
    if !(power_budget.is_finite() && power_budget > 0.0) {
        return Err(Error::domain(format!(
            "power budget must be finite and > 0, got {power_budget}"
        )));
    }
    Ok(())
}

/// The clamped per-sensor power profile at multiplier `lambda`:
/// `x_i = (sqrt(M c_i / lambda) - c_i)^+ / (M meas_var_i)` with
/// `c_i = fc_noise_var * d_i^{2 alpha}`.
fn profile_at(params: &NetworkParams, lambda: f64) -> Vec<f64> {
    let m = params.n_antennas as f64;
    (0..params.n_sensors)
        .map(|i| {
            let c = params.fc_noise_var * params.squared_path_loss(i);
            let v = (m * c / lambda).sqrt() - c;
            if v > 0.0 {
                v / (m * params.meas_noise_vars[i])
            } else {
                0.0
            }
        })
        .collect()
}

/// The water-filling gain allocation for the many-antenna regime.
///
/// Returns real non-negative gains whose squared magnitudes maximize
/// [`crate::model::g_asymptotic`] over `{x >= 0, sum x = P}`; the
/// asymptotic objective is phase-blind, so magnitudes are all that is
/// specified. The multiplier is found by bisection on the strictly
/// decreasing map `lambda -> sum_i x_i(lambda)`.
pub fn waterfill_massive(params: &NetworkParams, power_budget: f64) -> Result<GainVector, Error> {
    check_budget(power_budget)?;
    let sum_at = |lambda: f64| profile_at(params, lambda).iter().sum::<f64>();

    // All sensors shut off at lambda_hi = max_i M / c_i.
    let lambda_hi = (0..params.n_sensors)
        .map(|i| params.n_antennas as f64 / (params.fc_noise_var * params.squared_path_loss(i)))
        .fold(0.0, f64::max);
    let mut hi = lambda_hi;
    let mut lo = lambda_hi;
    let mut expansions = 0;
    while sum_at(lo) <= power_budget {
        lo *= 0.5;
        expansions += 1;
        if expansions > 2000 {
            return Err(Error::Internal(
                "water-filling failed to bracket the power budget".into(),
            ));
        }
    }

    let mut lambda = lo;
    for _ in 0..MAX_BISECT_ITERS {
        lambda = 0.5 * (lo + hi);
        let total = sum_at(lambda);
        if ((total - power_budget) / power_budget).abs() <= BUDGET_REL_TOL {
            break;
        }
        if total > power_budget {
            lo = lambda;
        } else {
            hi = lambda;
        }
    }

    // Snap the residual bisection error onto the budget exactly.
    let mut x = profile_at(params, lambda);
    let total: f64 = x.iter().sum();
    debug_assert!(((total - power_budget) / power_budget).abs() < 1e-9);
    let scale = power_budget / total;
    for v in &mut x {
        *v *= scale;
    }
    GainVector::from_squared_magnitudes(&x)
}

/// The optimal single-antenna gains under budget `P`.
///
/// Maximizes `g_s(a) = |h^H a|^2 / (a^H F V F^H a + fc_noise_var)` over
/// `||a||^2 = P`, where `F = diag(h)`. The solution is
/// `a = sqrt(P / (h^H B^{-2} h)) B^{-1} h` with
/// `B = F V F^H + (fc_noise_var / P) I`; since `F` and `V` are diagonal,
/// `B` is diagonal and the solves are per-sensor divisions (no explicit
/// inverse is formed, which keeps small budgets well conditioned where
/// the `fc_noise_var / P` term dominates).
///
/// The returned gains combine the sensors as `h^H a`; the received-signal
/// model of [`crate::model::HypothesisSample`] combines them as `H a`,
/// so simulation code must pass [`GainVector::conjugated`] gains.
pub fn single_antenna_gains(
    channel: &ChannelRealization,
    params: &NetworkParams,
    power_budget: f64,
) -> Result<GainVector, Error> {
    check_budget(power_budget)?;
    if params.n_antennas != 1 {
        return Err(Error::config(format!(
            "single-antenna solution requires n_antennas = 1, got {}",
            params.n_antennas
        )));
    }
    let h = channel.single_antenna_vector()?;
    if channel.n_sensors() != params.n_sensors {
        return Err(Error::config(format!(
            "channel has {} sensors, params expect {}",
            channel.n_sensors(),
            params.n_sensors
        )));
    }
    // u = B^{-1} h; h^H B^{-2} h = ||u||^2.
    let u = DVector::from_iterator(
        params.n_sensors,
        h.iter().enumerate().map(|(i, hi)| {
            let b = hi.norm_sqr() * params.meas_noise_vars[i] + params.fc_noise_var / power_budget;
            hi / Complex64::new(b, 0.0)
        }),
    );
    let norm_sq = u.iter().map(|v| v.norm_sqr()).sum::<f64>();
    if norm_sq == 0.0 {
        return Err(Error::domain(
            "single-antenna channel is identically zero; gains are undetermined",
        ));
    }
    let scale = Complex64::new((power_budget / norm_sq).sqrt(), 0.0);
    GainVector::new(u.map(|v| v * scale))
}

/// The single-antenna quality `g_s(a) = |h^H a|^2 /
/// (a^H F V F^H a + fc_noise_var)` that [`single_antenna_gains`]
/// maximizes.
pub fn single_antenna_quality(
    channel: &ChannelRealization,
    gains: &GainVector,
    params: &NetworkParams,
) -> Result<f64, Error> {
    let h = channel.single_antenna_vector()?;
    if gains.len() != params.n_sensors || channel.n_sensors() != params.n_sensors {
        return Err(Error::config("gain or channel length mismatch"));
    }
    let num = h.dotc(gains.as_vector()).norm_sqr();
    let den: f64 = gains
        .as_vector()
        .iter()
        .enumerate()
        .map(|(i, a)| a.norm_sqr() * h[i].norm_sqr() * params.meas_noise_vars[i])
        .sum::<f64>()
        + params.fc_noise_var;
    Ok(num / den)
}

/// The equal-power baseline: every sensor gets `x_i = P / N`.
pub fn equal_power_gains(params: &NetworkParams, power_budget: f64) -> Result<GainVector, Error> {
    check_budget(power_budget)?;
    let share = power_budget / params.n_sensors as f64;
    GainVector::from_squared_magnitudes(&vec![share; params.n_sensors])
}

/// The low-power construction `|a_i|^2 = fc_noise_var * d_i^{2 alpha} /
/// (2 M meas_var_i)` together with the budget it consumes,
/// `P = (1 / 2M) sum_i fc_noise_var * d_i^{2 alpha} / meas_var_i`.
///
/// Its asymptotic quality is exactly one third of the all-sensor upper
/// bound `sum_i 1 / meas_var_i`, which makes it a convenient guaranteed
/// operating point as the antenna count grows and `P` shrinks like `1/M`.
pub fn low_power_suboptimal_gains(params: &NetworkParams) -> (GainVector, f64) {
    let m = params.n_antennas as f64;
    let x: Vec<f64> = (0..params.n_sensors)
        .map(|i| {
            params.fc_noise_var * params.squared_path_loss(i) / (2.0 * m * params.meas_noise_vars[i])
        })
        .collect();
    let budget = x.iter().sum();
    let gains = GainVector::from_squared_magnitudes(&x)
        .expect("low-power squared magnitudes are nonnegative by construction");
    (gains, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::g_upper_bound;
    use crate::model::{draw_channel, g_asymptotic};
    use crate::streams::stream;

    fn heterogeneous_params(n_antennas: usize) -> NetworkParams {
        NetworkParams::new(
            4,
            n_antennas,
            1.0,
            0.3,
            vec![0.3; 4],
            vec![2.0, 4.0, 6.0, 8.0],
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn waterfill_single_sensor_takes_full_budget() {
        let params = NetworkParams::new(1, 50, 1.0, 0.3, vec![0.5], vec![3.0], 1.0).unwrap();
        let gains = waterfill_massive(&params, 0.7).unwrap();
        let x = gains.squared_magnitudes();
        assert!((x[0] - 0.7).abs() / 0.7 <= 1e-9);
    }

    #[test]
    fn waterfill_identical_sensors_split_evenly() {
        let params =
            NetworkParams::new(3, 50, 1.0, 0.3, vec![0.4; 3], vec![5.0; 3], 1.0).unwrap();
        let gains = waterfill_massive(&params, 0.9).unwrap();
        for x in gains.squared_magnitudes() {
            assert!((x - 0.3).abs() <= 1e-10, "x = {x}");
        }
    }

    #[test]
    fn waterfill_meets_budget_and_beats_equal_power() {
        let params = heterogeneous_params(50);
        for budget in [0.01, 0.5, 3.0, 100.0] {
            let wf = waterfill_massive(&params, budget).unwrap();
            assert!((wf.total_power() - budget).abs() / budget <= 1e-9);
            let g_wf = g_asymptotic(&wf.squared_magnitudes(), &params).unwrap();
            let eq = equal_power_gains(&params, budget).unwrap();
            let g_eq = g_asymptotic(&eq.squared_magnitudes(), &params).unwrap();
            assert!(g_wf >= g_eq - 1e-12, "budget {budget}: {g_wf} < {g_eq}");
        }
    }

    #[test]
    fn waterfill_marginals_equalize() {
        let params = heterogeneous_params(50);
        let budget = 0.5;
        let x = waterfill_massive(&params, budget).unwrap().squared_magnitudes();
        let m = 50.0;
        let marginals: Vec<f64> = (0..4)
            .map(|i| {
                let c = 0.3 * params.squared_path_loss(i);
                m * c / (c + m * params.meas_noise_vars[i] * x[i]).powi(2)
            })
            .collect();
        let active: Vec<f64> = marginals
            .iter()
            .zip(&x)
            .filter(|(_, xi)| **xi > 0.0)
            .map(|(m, _)| *m)
            .collect();
        assert!(!active.is_empty());
        let lambda = active[0];
        for m in &active {
            assert!((m - lambda).abs() / lambda <= 1e-7, "marginal {m} vs {lambda}");
        }
        for (m, xi) in marginals.iter().zip(&x) {
            if *xi == 0.0 {
                assert!(*m <= lambda * (1.0 + 1e-7), "inactive marginal {m} above {lambda}");
            }
        }
    }

    #[test]
    fn waterfill_grows_monotonically_with_budget() {
        let params = heterogeneous_params(50);
        let mut prev = vec![0.0; 4];
        for budget in [0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0] {
            let x = waterfill_massive(&params, budget).unwrap().squared_magnitudes();
            for (xi, pi) in x.iter().zip(&prev) {
                assert!(xi + 1e-12 >= *pi, "x went down: {xi} < {pi} at P = {budget}");
                if *pi > 0.0 {
                    assert!(*xi > 0.0, "active sensor deactivated at P = {budget}");
                }
            }
            prev = x;
        }
    }

    #[test]
    fn waterfill_rejects_nonpositive_budget() {
        let params = heterogeneous_params(50);
        assert!(waterfill_massive(&params, 0.0).is_err());
        assert!(waterfill_massive(&params, -1.0).is_err());
    }

    #[test]
    fn single_antenna_one_sensor_phase_aligns() {
        let params = NetworkParams::new(1, 1, 1.0, 0.3, vec![0.5], vec![2.0], 1.0).unwrap();
        let h = Complex64::new(0.3, -0.4);
        let ch = ChannelRealization::new(nalgebra::DMatrix::from_element(1, 1, h)).unwrap();
        let p = 2.0;
        let gains = single_antenna_gains(&ch, &params, p).unwrap();
        let a = gains.as_vector()[0];
        assert!((a.norm_sqr() - p).abs() / p <= 1e-12);
        // Phase-aligned with h: a / |a| equals h / |h|.
        let dir = a / a.norm();
        let hdir = h / h.norm();
        assert!((dir - hdir).norm() <= 1e-12);
    }

    #[test]
    fn single_antenna_matched_filter_when_symmetric() {
        // Equal |h_i| and equal measurement noise make B proportional to
        // the identity, so the solution is proportional to h.
        let params = NetworkParams::new(3, 1, 1.0, 0.3, vec![0.4; 3], vec![2.0; 3], 1.0).unwrap();
        let r = 0.5f64;
        let h = nalgebra::DMatrix::from_row_slice(
            1,
            3,
            &[
                Complex64::from_polar(r, 0.3),
                Complex64::from_polar(r, -1.2),
                Complex64::from_polar(r, 2.8),
            ],
        );
        let ch = ChannelRealization::new(h.clone()).unwrap();
        let gains = single_antenna_gains(&ch, &params, 1.5).unwrap();
        let ratios: Vec<Complex64> = (0..3)
            .map(|i| gains.as_vector()[i] / h[(0, i)])
            .collect();
        for r in &ratios[1..] {
            assert!((r - ratios[0]).norm() <= 1e-12 * ratios[0].norm());
        }
    }

    #[test]
    fn single_antenna_requires_one_antenna() {
        let params = NetworkParams::new(2, 3, 1.0, 0.3, vec![0.5; 2], vec![2.0; 2], 1.0).unwrap();
        let ch = draw_channel(&params, &mut stream(21, "test/sa", 0, 0));
        assert!(single_antenna_gains(&ch, &params, 1.0).is_err());
    }

    #[test]
    fn single_antenna_budget_is_consumed() {
        let params =
            NetworkParams::new(5, 1, 1.0, 0.3, vec![0.3, 0.4, 0.5, 0.25, 0.45],
                vec![2.0, 3.0, 5.0, 7.0, 9.0], 1.0).unwrap();
        let ch = draw_channel(&params, &mut stream(22, "test/sa-budget", 0, 0));
        for p in [1e-4, 0.1, 10.0] {
            let gains = single_antenna_gains(&ch, &params, p).unwrap();
            assert!((gains.total_power() - p).abs() / p <= 1e-9);
        }
    }

    #[test]
    fn equal_power_shares() {
        let params =
            NetworkParams::new(10, 50, 1.0, 0.3, vec![0.4; 10], vec![5.0; 10], 1.0).unwrap();
        let gains = equal_power_gains(&params, 1.0).unwrap();
        for x in gains.squared_magnitudes() {
            assert!((x - 0.1).abs() <= 1e-15);
        }
        assert!((gains.total_power() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn equal_power_approaches_upper_bound_at_high_budget() {
        let params = NetworkParams::new(
            10,
            50,
            1.0,
            0.3,
            vec![0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.27, 0.33, 0.42, 0.48],
            vec![2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 9.5, 10.0],
            1.0,
        )
        .unwrap();
        let gains = equal_power_gains(&params, 1e6).unwrap();
        let g = g_asymptotic(&gains.squared_magnitudes(), &params).unwrap();
        let bound = g_upper_bound(&params);
        assert!(g >= 0.999 * bound, "g = {g}, bound = {bound}");
        assert!(g <= bound);
    }

    #[test]
    fn low_power_scalar_case() {
        let params = NetworkParams::new(1, 50, 1.0, 0.3, vec![0.5], vec![1.0], 1.0).unwrap();
        let (gains, budget) = low_power_suboptimal_gains(&params);
        let x = gains.squared_magnitudes()[0];
        assert!((x - 0.006).abs() <= 1e-15, "x = {x}");
        assert!((budget - 0.006).abs() <= 1e-15);
        let g = g_asymptotic(&[x], &params).unwrap();
        assert!((g - 2.0 / 3.0).abs() <= 1e-12, "g = {g}");
    }

    #[test]
    fn low_power_is_one_third_of_bound() {
        let params = NetworkParams::new(
            6,
            200,
            1.0,
            0.3,
            vec![0.25, 0.3, 0.35, 0.4, 0.45, 0.5],
            vec![2.0, 3.5, 5.0, 6.5, 8.0, 10.0],
            1.0,
        )
        .unwrap();
        let (gains, _) = low_power_suboptimal_gains(&params);
        let g = g_asymptotic(&gains.squared_magnitudes(), &params).unwrap();
        let ratio = g / g_upper_bound(&params);
        assert!((ratio - 1.0 / 3.0).abs() <= 1e-12, "ratio = {ratio}");
    }

    #[test]
    fn low_power_budget_halves_when_antennas_double() {
        let params = heterogeneous_params(50);
        let (_, p50) = low_power_suboptimal_gains(&params);
        let (_, p100) = low_power_suboptimal_gains(&params.with_antennas(100).unwrap());
        assert!((p50 - 2.0 * p100).abs() <= 1e-15 * p50);
    }
}
