//! Mallows model over permutations under the Kendall tau distance.
//!
//! `P(pi) = exp(-theta d_KT(pi, pi0)) / Z_k(theta)`, where the normalization
//! constant depends only on `k` and `theta`:
//!
//! ```text
//! Z_k(theta) = prod_{j=1..k} sum_{r=0..j-1} exp(-theta r)
//! ```
//!
//! Sampling uses repeated insertion: the `j`-th element of the center is
//! inserted `r` slots above the bottom of the partial ranking with
//! probability proportional to `exp(-theta r)`. Each insertion adds exactly
//! `r` discordant pairs, so the draw is exact.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::kendall_tau;
use crate::ranking::Ranking;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MallowsParams {
    center: Ranking,
    theta: f64,
}

impl MallowsParams {
    pub fn new(center: Ranking, theta: f64) -> Result<Self> {
        if !(theta >= 0.0) || theta.is_infinite() {
            return Err(Error::InvalidParameter(format!(
                "dispersion must be finite and >= 0, got {theta}"
            )));
        }
        if center.is_empty() {
            return Err(Error::InvalidParameter("empty central ranking".into()));
        }
        Ok(Self { center, theta })
    }

    pub fn center(&self) -> &Ranking {
        &self.center
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn len(&self) -> usize {
        self.center.len()
    }

    pub fn is_empty(&self) -> bool {
        self.center.is_empty()
    }
}

/// `sum_{r=0}^{j-1} exp(-theta r)`.
fn level_sum(j: usize, theta: f64) -> f64 {
    if theta == 0.0 {
        return j as f64;
    }
    let q = (-theta).exp();
    // geometric series; the direct form loses precision for tiny theta
    if q > 0.999 {
        (0..j).map(|r| (-theta * r as f64).exp()).sum()
    } else {
        (1.0 - q.powi(j as i32)) / (1.0 - q)
    }
}

/// `Z_k(theta)`. Overflows to infinity for large `k` and small `theta`;
/// use [`log_normalization_constant`] there.
pub fn normalization_constant(k: usize, theta: f64) -> f64 {
    (1..=k).map(|j| level_sum(j, theta)).product()
}

pub fn log_normalization_constant(k: usize, theta: f64) -> f64 {
    (1..=k).map(|j| level_sum(j, theta).ln()).sum()
}

/// Probability of `ranking` under the model.
pub fn pmf(ranking: &Ranking, params: &MallowsParams) -> Result<f64> {
    log_pmf(ranking, params).map(f64::exp)
}

pub fn log_pmf(ranking: &Ranking, params: &MallowsParams) -> Result<f64> {
    let d = kendall_tau(ranking, &params.center)?;
    Ok(-params.theta * d as f64 - log_normalization_constant(params.len(), params.theta))
}

/// Draws the number of inversions `r in 0..j` contributed by the `j`-th
/// insertion: `P(r) = q^r (1 - q) / (1 - q^j)` with `q = exp(-theta)`.
fn insertion_offset<R: Rng + ?Sized>(j: usize, theta: f64, rng: &mut R) -> usize {
    if j == 1 {
        return 0;
    }
    if theta == 0.0 {
        return rng.random_range(0..j);
    }
    let u: f64 = rng.random();
    // inverse CDF: F(r) = (1 - q^(r+1)) / (1 - q^j)
    let log_q = -theta;
    let tail = -(-theta * j as f64).exp_m1(); // 1 - q^j
    let r = ((-u * tail).ln_1p() / log_q).floor();
    if r.is_finite() && r >= 0.0 {
        (r as usize).min(j - 1)
    } else {
        0
    }
}

/// Draws one ranking from the model.
pub fn sample<R: Rng + ?Sized>(params: &MallowsParams, rng: &mut R) -> Ranking {
    let mut order: Vec<usize> = Vec::with_capacity(params.len());
    for (idx, c) in params.center.iter().enumerate() {
        let j = idx + 1;
        let r = insertion_offset(j, params.theta, rng);
        order.insert(order.len() - r, c);
    }
    Ranking::new(order).expect("insertion preserves distinctness")
}

/// `m` independent draws.
pub fn sample_n<R: Rng + ?Sized>(params: &MallowsParams, m: usize, rng: &mut R) -> Vec<Ranking> {
    (0..m).map(|_| sample(params, rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use std::collections::HashMap;

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
            if cur.len() == used.len() {
                out.push(cur.clone());
                return;
            }
            for i in 0..used.len() {
                if !used[i] {
                    used[i] = true;
                    cur.push(i);
                    rec(cur, used, out);
                    cur.pop();
                    used[i] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), &mut vec![false; n], &mut out);
        out
    }

    fn enumerated_z(k: usize, theta: f64) -> f64 {
        let center = Ranking::identity(k);
        permutations(k)
            .into_iter()
            .map(|p| {
                let d = kendall_tau(&Ranking::new(p).unwrap(), &center).unwrap();
                (-theta * d as f64).exp()
            })
            .sum()
    }

    #[test]
    fn small_constants() {
        assert_eq!(normalization_constant(1, 0.7), 1.0);
        assert!((normalization_constant(2, 0.7) - (1.0 + (-0.7f64).exp())).abs() < 1e-15);
        assert_eq!(normalization_constant(5, 0.0), 120.0);
    }

    #[test]
    fn closed_form_matches_enumeration() {
        for k in 1..=6 {
            for &theta in &[0.0, 1e-4, 0.1, 0.5, 1.0, 2.0, 7.5] {
                let exact = enumerated_z(k, theta);
                let closed = normalization_constant(k, theta);
                assert!(
                    ((closed - exact) / exact).abs() < 1e-12,
                    "k={k} theta={theta}: {closed} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn pmf_examples() {
        let p = MallowsParams::new(Ranking::identity(2), 0.8).unwrap();
        let at_center = pmf(&Ranking::identity(2), &p).unwrap();
        assert!((at_center - 1.0 / (1.0 + (-0.8f64).exp())).abs() < 1e-15);

        let uniform = MallowsParams::new(Ranking::identity(4), 0.0).unwrap();
        let r = Ranking::new(vec![3, 1, 0, 2]).unwrap();
        assert!((pmf(&r, &uniform).unwrap() - 1.0 / 24.0).abs() < 1e-15);

        for &theta in &[0.5, 1.0] {
            let p = MallowsParams::new(Ranking::new(vec![2, 0, 3, 1]).unwrap(), theta).unwrap();
            let total: f64 = permutations(4)
                .into_iter()
                .map(|o| pmf(&Ranking::new(o).unwrap(), &p).unwrap())
                .sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pmf_decreases_with_distance() {
        let p = MallowsParams::new(Ranking::identity(5), 0.3).unwrap();
        let mut by_distance: HashMap<u64, f64> = HashMap::new();
        for o in permutations(5) {
            let r = Ranking::new(o).unwrap();
            let d = kendall_tau(&r, p.center()).unwrap();
            by_distance.insert(d, pmf(&r, &p).unwrap());
        }
        for d in 1..=10u64 {
            assert!(by_distance[&d] < by_distance[&(d - 1)]);
        }
        assert!(pmf(&Ranking::identity(4), &p).is_err());
    }

    #[test]
    fn rejects_bad_theta() {
        assert!(MallowsParams::new(Ranking::identity(3), -0.1).is_err());
        assert!(MallowsParams::new(Ranking::identity(3), f64::NAN).is_err());
        assert!(MallowsParams::new(Ranking::identity(3), f64::INFINITY).is_err());
    }

    #[test]
    fn huge_theta_returns_center() {
        let center = Ranking::new(vec![4, 2, 0, 1, 3]).unwrap();
        let p = MallowsParams::new(center.clone(), 50.0).unwrap();
        let mut rng = rng_from_seed(1);
        let hits = (0..1000).filter(|_| sample(&p, &mut rng) == center).count();
        assert!(hits >= 999, "{hits}");
    }

    #[test]
    fn uniform_when_theta_is_zero() {
        let p = MallowsParams::new(Ranking::identity(3), 0.0).unwrap();
        let mut rng = rng_from_seed(2);
        let n = 100_000;
        let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
        for _ in 0..n {
            *counts.entry(sample(&p, &mut rng).into_order()).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        let expected = n as f64 / 6.0;
        let chi2: f64 = counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 5 degrees of freedom, 99.9% quantile
        assert!(chi2 < 20.52, "chi2 = {chi2}");
    }

    #[test]
    fn empirical_matches_exact_pmf() {
        let center = Ranking::new(vec![1, 3, 0, 2]).unwrap();
        let p = MallowsParams::new(center, 1.0).unwrap();
        let mut rng = rng_from_seed(3);
        let n = 200_000;
        let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
        for _ in 0..n {
            *counts.entry(sample(&p, &mut rng).into_order()).or_default() += 1;
        }
        let tv: f64 = permutations(4)
            .into_iter()
            .map(|o| {
                let exact = pmf(&Ranking::new(o.clone()).unwrap(), &p).unwrap();
                let emp = *counts.get(&o).unwrap_or(&0) as f64 / n as f64;
                (exact - emp).abs()
            })
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.01, "tv = {tv}");
    }

    #[test]
    fn mean_distance_falls_with_theta() {
        let center = Ranking::identity(10);
        let mut prev = f64::INFINITY;
        for (i, &theta) in [0.1, 0.5, 1.0, 2.0].iter().enumerate() {
            let p = MallowsParams::new(center.clone(), theta).unwrap();
            let mut rng = rng_from_seed(100 + i as u64);
            let n = 50_000;
            let mean = (0..n)
                .map(|_| kendall_tau(&sample(&p, &mut rng), &center).unwrap() as f64)
                .sum::<f64>()
                / n as f64;
            assert!(mean < prev, "theta={theta}: {mean} >= {prev}");
            prev = mean;
        }
    }

    #[test]
    fn same_seed_same_draws() {
        let p = MallowsParams::new(Ranking::identity(20), 0.4).unwrap();
        let a = sample_n(&p, 5, &mut rng_from_seed(9));
        let b = sample_n(&p, 5, &mut rng_from_seed(9));
        assert_eq!(a, b);
    }

    #[test]
    fn log_constant_is_finite_for_large_k() {
        let lz = log_normalization_constant(2000, 0.0);
        assert!(lz.is_finite() && lz > 0.0);
        assert!(normalization_constant(2000, 0.0).is_infinite());
    }
}
