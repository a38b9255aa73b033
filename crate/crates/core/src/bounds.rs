//! Closed-form detection-probability bounds for both fusion-center
//! architectures. These are pure formulas with no regime detection; the
//! sweep layer decides which bound to overlay where.

use crate::error::Error;
use crate::model::{ChannelRealization, NetworkParams};

/// The all-sensor quality ceiling `sum_i 1 / meas_var_i`. No gain
/// allocation can push the asymptotic quality above it.
pub fn g_upper_bound(params: &NetworkParams) -> f64 {
    params.meas_noise_vars.iter().map(|v| 1.0 / v).sum()
}

fn check_pfa(pfa: f64) -> Result<(), Error> {
    if !(pfa > 0.0 && pfa < 1.0) {
        return Err(Error::domain(format!(
            "false-alarm probability must lie in (0, 1), got {pfa}"
        )));
    }
    Ok(())
}

/// Detection-probability ceiling in the high-budget regime:
/// `pfa^(1 / (1 + signal_var * sum_i 1/meas_var_i))`.
pub fn pd_bound_high_power(params: &NetworkParams, pfa: f64) -> Result<f64, Error> {
    check_pfa(pfa)?;
    Ok(pfa.powf(1.0 / (1.0 + params.signal_var * g_upper_bound(params))))
}

/// Detection-probability floor in the shrinking-budget regime:
/// `pfa^(1 / (1 + (signal_var / 3) * sum_i 1/meas_var_i))`. Holds for the
/// optimal allocation at the budget implied by
/// [`crate::allocator::low_power_suboptimal_gains`], and stays strictly
/// above `pfa` for any positive signal variance.
pub fn pd_bound_low_power(params: &NetworkParams, pfa: f64) -> Result<f64, Error> {
    check_pfa(pfa)?;
    Ok(pfa.powf(1.0 / (1.0 + params.signal_var * g_upper_bound(params) / 3.0)))
}

/// Single-antenna detection-probability ceilings for the two budget
/// regimes, as `(high_power_bound, low_power_bound)`:
///
/// ```text
/// high = pfa^(1 / (1 + signal_var * sum_i 1/meas_var_i))
/// low  = pfa^(1 / (1 + (signal_var * P / fc_noise_var) * h^H h))
/// ```
///
/// The high-budget ceiling coincides with [`pd_bound_high_power`]; the
/// low-budget ceiling collapses to `pfa` as `P` vanishes.
pub fn single_antenna_pd_bounds(
    params: &NetworkParams,
    channel: &ChannelRealization,
    power_budget: f64,
    pfa: f64,
) -> Result<(f64, f64), Error> {
    check_pfa(pfa)?;
    if !(power_budget.is_finite() && power_budget > 0.0) {
        return Err(Error::domain(format!(
            "power budget must be finite and > 0, got {power_budget}"
        )));
    }
    let h = channel.single_antenna_vector()?;
    let h_energy: f64 = h.iter().map(|v| v.norm_sqr()).sum();
    let high = pfa.powf(1.0 / (1.0 + params.signal_var * g_upper_bound(params)));
    let low = pfa.powf(
        1.0 / (1.0 + params.signal_var * power_budget / params.fc_noise_var * h_energy),
    );
    Ok((high, low))
}
