//! Exponential-regime rates extracted from simulated decay curves.

use crate::error::{Error, Result};
use crate::series::Channel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub gamma_obs: f64,
    /// Fitted ln of the channel extrapolated to t = 0.
    pub intercept: f64,
    /// Root-mean-square of the log residuals.
    pub residual: f64,
    pub window: (f64, f64),
    pub channel: Channel,
    pub samples: usize,
}

pub const MIN_SAMPLES: usize = 10;

/// Least squares of ln(value) against t over the samples inside `window`.
/// Weights are uniform in log space, so late (small) values count as much as
/// early ones.
pub fn fit_exponential(times: &[f64], values: &[f64], window: (f64, f64), channel: Channel) -> Result<FitResult> {
    let idx: Vec<usize> = (0..times.len()).filter(|&i| times[i] >= window.0 && times[i] <= window.1).collect();
    if idx.len() < MIN_SAMPLES {
        return Err(Error::InsufficientSamples { needed: MIN_SAMPLES, got: idx.len() });
    }
    if let Some(&i) = idx.iter().find(|&&i| !(values[i] > 0.0)) {
        return Err(Error::NonPositiveChannel(values[i]));
    }
    let n = idx.len() as f64;
    let t_mean = idx.iter().map(|&i| times[i]).sum::<f64>() / n;
    let y_mean = idx.iter().map(|&i| values[i].ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &i in &idx {
        let dt = times[i] - t_mean;
        sxy += dt * (values[i].ln() - y_mean);
        sxx += dt * dt;
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * t_mean;
    let sq: f64 = idx
        .iter()
        .map(|&i| {
            let r = values[i].ln() - (intercept + slope * times[i]);
            r * r
        })
        .sum();
    Ok(FitResult {
        gamma_obs: -slope,
        intercept,
        residual: (sq / n).sqrt(),
        window: (times[idx[0]], times[idx[idx.len() - 1]]),
        channel,
        samples: idx.len(),
    })
}

/// Values below this multiple of the floor are excluded from fits.
pub const FLOOR_MARGIN: f64 = 1e3;

/// Window that skips the Zeno head and the first 10 % of decay and stops
/// before the channel approaches `floor`.
pub fn auto_window(times: &[f64], values: &[f64], t_q: f64, floor: f64) -> Result<(f64, f64)> {
    let (Some(&v0), Some(&t_last)) = (values.first(), times.last()) else {
        return Err(Error::WindowCollapsed("empty series".into()));
    };
    let Some(i10) = values.iter().position(|&v| v < 0.9 * v0) else {
        return Err(Error::WindowCollapsed(format!(
            "the channel never drops by 10 % before t = {t_last}; increase t_end"
        )));
    };
    let lo = times[i10].max(2.0 * t_q);
    let hi = match values.iter().rposition(|&v| v > FLOOR_MARGIN * floor) {
        Some(i) => times[i],
        None => return Err(Error::WindowCollapsed("the whole series lies near the floor".into())),
    };
    if !(hi > lo) {
        return Err(Error::WindowCollapsed(format!(
            "window [{lo}, {hi}] is empty; increase t_end or lower the floor"
        )));
    }
    Ok((lo, hi.min(t_last)))
}
