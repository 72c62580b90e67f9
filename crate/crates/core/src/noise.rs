//! Gaussian perturbation of fairness-constraint arithmetic, simulating
//! imperfect knowledge of group membership.
//!
//! Each scheme draws from its own seeded stream. With `sigma = 0` every
//! function returns its input unchanged, bit for bit.

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseScheme {
    /// `N(0, sigma)` added to every matching weight of the IPF baseline.
    IpfWeights,
    /// `N(0, sigma)` added to every per-prefix minimum count of DetConstSort.
    DcsMinCounts,
    /// Lower bounds decreased and upper bounds increased by independent
    /// `|N(0, sigma)|` draws.
    IlpBounds,
}

impl NoiseScheme {
    pub fn name(self) -> &'static str {
        match self {
            NoiseScheme::IpfWeights => "ipf-weights",
            NoiseScheme::DcsMinCounts => "dcs-mincounts",
            NoiseScheme::IlpBounds => "ilp-bounds",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
    pub scheme: NoiseScheme,
}

impl NoiseSpec {
    pub fn new(scheme: NoiseScheme, sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma >= 0.0) || sigma.is_infinite() {
            return Err(Error::InvalidParameter(format!(
                "noise sigma must be finite and >= 0, got {sigma}"
            )));
        }
        Ok(Self {
            sigma,
            seed,
            scheme,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.sigma == 0.0
    }

    fn expect(&self, scheme: NoiseScheme) -> Result<()> {
        if self.scheme == scheme {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "noise scheme is `{}`, expected `{}`",
                self.scheme.name(),
                scheme.name()
            )))
        }
    }

    fn normal(&self) -> Normal<f64> {
        Normal::new(0.0, self.sigma).expect("sigma validated")
    }
}

fn add_gaussian(values: &[f64], noise: &NoiseSpec) -> Vec<f64> {
    if noise.is_zero() {
        return values.to_vec();
    }
    let dist = noise.normal();
    let mut rng = rng_from_seed(noise.seed);
    values.iter().map(|&v| v + dist.sample(&mut rng)).collect()
}

/// Adds an independent `N(0, sigma)` draw to each weight.
pub fn perturb_ipf_weights(weights: &[f64], noise: &NoiseSpec) -> Result<Vec<f64>> {
    noise.expect(NoiseScheme::IpfWeights)?;
    Ok(add_gaussian(weights, noise))
}

/// Adds an independent `N(0, sigma)` draw to each minimum count. The result
/// stays real-valued and is not clamped.
pub fn perturb_min_counts(counts: &[f64], noise: &NoiseSpec) -> Result<Vec<f64>> {
    noise.expect(NoiseScheme::DcsMinCounts)?;
    Ok(add_gaussian(counts, noise))
}

/// Relaxes each `(lower, upper)` pair: `lower - X`, `upper + Y` with
/// independent `X, Y ~ |N(0, sigma)|`. Never shrinks the feasible set.
pub fn perturb_ilp_bounds(
    lower: &[f64],
    upper: &[f64],
    noise: &NoiseSpec,
) -> Result<(Vec<f64>, Vec<f64>)> {
    noise.expect(NoiseScheme::IlpBounds)?;
    if lower.len() != upper.len() {
        return Err(Error::InvalidParameter(format!(
            "{} lower bounds but {} upper bounds",
            lower.len(),
            upper.len()
        )));
    }
    if noise.is_zero() {
        return Ok((lower.to_vec(), upper.to_vec()));
    }
    let dist = noise.normal();
    let mut rng = rng_from_seed(noise.seed);
    let mut lo = Vec::with_capacity(lower.len());
    let mut hi = Vec::with_capacity(upper.len());
    for (&l, &u) in lower.iter().zip(upper) {
        let x: f64 = dist.sample(&mut rng);
        let y: f64 = dist.sample(&mut rng);
        lo.push(l - x.abs());
        hi.push(u + y.abs());
    }
    Ok((lo, hi))
}
