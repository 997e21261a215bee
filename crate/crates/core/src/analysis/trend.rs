//! Shape metrics for a mean-value series.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::harness::AggregateSeries;

pub const MIN_SERIES_LEN: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendReport {
    /// Least-squares slope of the mean over the last 80% of iterations, in
    /// value per iteration.
    pub late_slope: f64,
    /// 1-based iteration of the maximum mean (earliest on ties).
    pub peak_iteration: usize,
    /// Mean at the last iteration over mean at the peak.
    pub final_to_peak_ratio: f64,
    /// Peak within the first 40% of iterations.
    pub early_peak: bool,
}

/// Number of trailing iterations in the late window: `ceil(0.8 * n)`.
pub fn late_window_len(n: usize) -> usize {
    (4 * n).div_ceil(5)
}

/// Ordinary least-squares slope of `ys` against abscissae `first_x, first_x + 1, ...`.
pub fn ols_slope(first_x: f64, ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    if ys.len() < 2 {
        return 0.0;
    }
    let x_mean = first_x + (n - 1.0) / 2.0;
    let y_mean = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let dx = first_x + i as f64 - x_mean;
        sxy += dx * (y - y_mean);
        sxx += dx * dx;
    }
    sxy / sxx
}

pub fn trend_report(series: &AggregateSeries) -> Result<TrendReport> {
    trend_of(&series.mean_total_value)
}

/// [`trend_report`] over a bare mean series.
pub fn trend_of(mean: &[f64]) -> Result<TrendReport> {
    let n = mean.len();
    if n < MIN_SERIES_LEN {
        return Err(SimError::SeriesTooShort {
            len: n,
            min: MIN_SERIES_LEN,
        });
    }
    let late = late_window_len(n);
    let late_start = n - late;
    let late_slope = ols_slope((late_start + 1) as f64, &mean[late_start..]);

    let mut peak = 0;
    for (i, &v) in mean.iter().enumerate() {
        if v > mean[peak] {
            peak = i;
        }
    }
    let peak_value = mean[peak];
    let final_to_peak_ratio = if peak == n - 1 || peak_value <= 0.0 {
        1.0
    } else {
        (mean[n - 1] / peak_value).clamp(0.0, 1.0)
    };
    let peak_iteration = peak + 1;
    Ok(TrendReport {
        late_slope,
        peak_iteration,
        final_to_peak_ratio,
        early_peak: 5 * peak_iteration <= 2 * n,
    })
}
