use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ExperimentError, Result};
use fairrank::rng::rng_from_seed;

pub const DEFAULT_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    Mean,
    Median,
}

impl Statistic {
    /// Sorts `values` in place for the median.
    pub fn compute(self, values: &mut [f64]) -> f64 {
        match self {
            Statistic::Mean => mean(values),
            Statistic::Median => {
                values.sort_by(f64::total_cmp);
                sorted_quantile(values, 0.5)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCi {
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
    pub resamples: usize,
}

impl BootstrapCi {
    pub fn half_width(&self) -> f64 {
        (self.upper - self.lower) / 2.0
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation; 0 for fewer than two values.
pub fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Linear-interpolation quantile of sorted data.
pub fn sorted_quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Percentile bootstrap 95% interval for `statistic` of `values`.
///
/// The interval is widened to include the point estimate when the
/// resampling distribution is skewed past it.
pub fn bootstrap_ci(values: &[f64], statistic: Statistic, resamples: usize, seed: u64) -> Result<BootstrapCi> {
    if values.is_empty() {
        return Err(ExperimentError::Bootstrap("no values".into()));
    }
    if resamples == 0 {
        return Err(ExperimentError::Bootstrap("resamples must be positive".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(ExperimentError::Bootstrap("non-finite value".into()));
    }
    let point = statistic.compute(&mut values.to_vec());
    let n = values.len();
    let mut rng = rng_from_seed(seed);
    let mut buf = vec![0.0; n];
    let mut stats = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        for slot in buf.iter_mut() {
            *slot = values[rng.random_range(0..n)];
        }
        stats.push(statistic.compute(&mut buf));
    }
    stats.sort_by(f64::total_cmp);
    Ok(BootstrapCi {
        point,
        lower: sorted_quantile(&stats, 0.025).min(point),
        upper: sorted_quantile(&stats, 0.975).max(point),
        resamples,
    })
}
