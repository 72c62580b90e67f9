//! DCG-optimal ranking under per-prefix group-count constraints.
//!
//! Within a group the best-scoring member always takes the group's earliest
//! position (the discount is decreasing, so swapping two same-group members
//! into score order never lowers DCG and never changes any prefix count).
//! A ranking is therefore determined by its group sequence, and the optimum
//! is a longest path over count vectors: state `(c_1, ..., c_g)` after
//! `l = sum c_p` positions, edge "append the next member of group `p`" with
//! gain `s / ln(1 + l + 1)`, restricted to states that admit a fair completion.

use std::collections::BTreeMap;

use super::{Ranker, RankerOutput, RankingTask};
use crate::bounds::{PrefixBounds, Windows};
use crate::error::{Error, Result};
use crate::metrics::position_discount;
use crate::noise::{perturb_ilp_bounds, NoiseScheme, NoiseSpec};
use crate::ranking::Ranking;
use crate::rng::derive_seed;

/// Optimal fair ranking for the task's spec.
pub fn exact_fair_dcg(task: &RankingTask<'_>) -> Result<RankerOutput> {
    let bounds = PrefixBounds::from_spec(task.spec, task.len());
    exact_fair_dcg_with_bounds(task, &bounds)
}

pub fn exact_fair_dcg_with_bounds(
    task: &RankingTask<'_>,
    bounds: &PrefixBounds,
) -> Result<RankerOutput> {
    if bounds.len() != task.len() || bounds.num_groups() != task.groups.num_groups() {
        return Err(Error::InvalidParameter(
            "bounds do not match the task dimensions".into(),
        ));
    }
    let sizes = task.groups.sizes();
    let windows = Windows::new(bounds, &sizes)?;
    let members = task.members_by_score();
    let g = sizes.len();
    let n = task.len();

    // layers[l]: state -> (best DCG so far, group appended last)
    let mut layers: Vec<BTreeMap<Vec<usize>, (f64, usize)>> = Vec::with_capacity(n + 1);
    let mut start = BTreeMap::new();
    start.insert(vec![0; g], (0.0, usize::MAX));
    layers.push(start);
    for l in 0..n {
        let discount = position_discount(l + 1);
        let mut next: BTreeMap<Vec<usize>, (f64, usize)> = BTreeMap::new();
        for (state, &(value, _)) in &layers[l] {
            for p in 0..g {
                if !windows.can_place(state, l, p) {
                    continue;
                }
                let gain = task.set.score(members[p][state[p]]) * discount;
                let mut child = state.clone();
                child[p] += 1;
                let candidate = value + gain;
                match next.get_mut(&child) {
                    Some(slot) if slot.0 >= candidate => {}
                    Some(slot) => *slot = (candidate, p),
                    None => {
                        next.insert(child, (candidate, p));
                    }
                }
            }
        }
        if next.is_empty() {
            return Err(Error::Infeasible {
                prefix: l + 1,
                detail: "no admissible group sequence".into(),
            });
        }
        layers.push(next);
    }

    let mut state = sizes.clone();
    let mut groups_rev = Vec::with_capacity(n);
    for l in (1..=n).rev() {
        let &(_, p) = layers[l].get(&state).ok_or_else(|| Error::Infeasible {
            prefix: n,
            detail: "final state unreachable".into(),
        })?;
        groups_rev.push(p);
        state[p] -= 1;
    }
    let mut taken = vec![0usize; g];
    let order = groups_rev
        .into_iter()
        .rev()
        .map(|p| {
            taken[p] += 1;
            members[p][taken[p] - 1]
        })
        .collect();
    RankerOutput::new(Ranking::new(order)?, task)
}

/// The exact optimizer as a ranker, optionally with relaxed noisy bounds
/// (`floor(beta l) - X`, `ceil(alpha l) + Y`, `X, Y ~ |N(0, sigma)|`, one
/// draw per group, prefix and side).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExactFairDcg {
    sigma: f64,
}

impl ExactFairDcg {
    pub const NAME: &'static str = "exact-fair-dcg";

    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_noise(sigma: f64) -> Result<Self> {
        NoiseSpec::new(NoiseScheme::IlpBounds, sigma, 0)?;
        Ok(Self { sigma })
    }

    /// The (possibly perturbed) bounds this ranker would solve against.
    pub fn bounds(&self, task: &RankingTask<'_>) -> Result<PrefixBounds> {
        let exact = PrefixBounds::from_spec(task.spec, task.len());
        if self.sigma == 0.0 {
            return Ok(exact);
        }
        let noise = NoiseSpec::new(
            NoiseScheme::IlpBounds,
            self.sigma,
            derive_seed(task.seed, &[NoiseScheme::IlpBounds as u64]),
        )?;
        let flat = |f: fn(&PrefixBounds, usize) -> &[i64]| -> Vec<f64> {
            (1..=exact.len())
                .flat_map(|l| f(&exact, l).iter().map(|&v| v as f64))
                .collect()
        };
        let (lo, hi) = perturb_ilp_bounds(
            &flat(PrefixBounds::lower_row),
            &flat(PrefixBounds::upper_row),
            &noise,
        )?;
        let g = exact.num_groups();
        let rows = |v: Vec<f64>| v.chunks(g).map(<[f64]>::to_vec).collect::<Vec<_>>();
        PrefixBounds::from_real(&rows(lo), &rows(hi))
    }
}

impl Ranker for ExactFairDcg {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn rank(&self, task: &RankingTask<'_>) -> Result<RankerOutput> {
        exact_fair_dcg_with_bounds(task, &self.bounds(task)?)
    }
}
