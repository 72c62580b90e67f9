//! Footrule-minimal fair re-ranking by bipartite matching.
//!
//! The `j`-th member of group `p` in input order is matched to a position
//! inside its placement window (see [`crate::bounds::Windows`]) at cost
//! `|position - input position|`. Any matching inside the windows is fair,
//! so the result is fair by construction. Finally the positions each group
//! received are handed back to its members in input order, which keeps
//! within-group order and never raises the displacement cost.

use super::assignment::min_cost_assignment;
use super::{Ranker, RankerOutput, RankingTask};
use crate::bounds::{PrefixBounds, Windows};
use crate::error::Result;
use crate::noise::{perturb_ipf_weights, NoiseScheme, NoiseSpec};
use crate::ranking::Ranking;
use crate::rng::derive_seed;

/// Cost of excluded item/position pairs.
const FORBIDDEN: f64 = 1e12;

/// Hook applied to the `n x n` displacement weights before matching.
pub trait WeightPerturbation {
    fn perturb(&self, weights: &[f64]) -> Result<Vec<f64>>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NoPerturbation;

impl WeightPerturbation for NoPerturbation {
    fn perturb(&self, weights: &[f64]) -> Result<Vec<f64>> {
        Ok(weights.to_vec())
    }
}

impl WeightPerturbation for NoiseSpec {
    fn perturb(&self, weights: &[f64]) -> Result<Vec<f64>> {
        perturb_ipf_weights(weights, self)
    }
}

pub fn approx_multi_valued_ipf(
    task: &RankingTask<'_>,
    perturbation: &dyn WeightPerturbation,
) -> Result<RankerOutput> {
    let n = task.len();
    let sizes = task.groups.sizes();
    let windows = Windows::new(&PrefixBounds::from_spec(task.spec, n), &sizes)?;

    // items[i] = (group, rank within group, input position)
    let mut seen = vec![0usize; sizes.len()];
    let mut items = Vec::with_capacity(n);
    for (idx, c) in task.input.iter().enumerate() {
        let p = task.groups.group_of(c);
        items.push((p, seen[p], idx + 1, c));
        seen[p] += 1;
    }

    let weights: Vec<f64> = items
        .iter()
        .flat_map(|&(_, _, orig, _)| (1..=n).map(move |pos| pos.abs_diff(orig) as f64))
        .collect();
    let mut cost = perturbation.perturb(&weights)?;
    for (i, &(p, j, _, _)) in items.iter().enumerate() {
        let (r, d) = windows.window(p, j);
        for pos in 1..=n {
            if pos < r || pos > d {
                cost[i * n + pos - 1] = FORBIDDEN;
            }
        }
    }
    let col = min_cost_assignment(&cost, n);

    let mut slots: Vec<Vec<usize>> = vec![Vec::new(); sizes.len()];
    for (i, &(p, _, _, _)) in items.iter().enumerate() {
        slots[p].push(col[i]);
    }
    slots.iter_mut().for_each(|s| s.sort_unstable());
    let mut order = vec![usize::MAX; n];
    for &(p, j, _, c) in &items {
        order[slots[p][j]] = c;
    }
    RankerOutput::new(Ranking::new(order)?, task)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ApproxMultiValuedIpf {
    sigma: f64,
}

impl ApproxMultiValuedIpf {
    pub const NAME: &'static str = "approx-multi-valued-ipf";

    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_noise(sigma: f64) -> Result<Self> {
        NoiseSpec::new(NoiseScheme::IpfWeights, sigma, 0)?;
        Ok(Self { sigma })
    }
}

impl Ranker for ApproxMultiValuedIpf {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn rank(&self, task: &RankingTask<'_>) -> Result<RankerOutput> {
        if self.sigma == 0.0 {
            return approx_multi_valued_ipf(task, &NoPerturbation);
        }
        let noise = NoiseSpec::new(
            NoiseScheme::IpfWeights,
            self.sigma,
            derive_seed(task.seed, &[NoiseScheme::IpfWeights as u64]),
        )?;
        approx_multi_valued_ipf(task, &noise)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{FairnessSpec, GroupAssignment};
    use crate::metrics::{footrule_distance, is_fair};
    use crate::rankers::testutil::instance;
    use crate::ranking::CandidateSet;
    use crate::rng::rng_from_seed;
    use rand::seq::SliceRandom;

    fn order_preserved(out: &Ranking, input: &Ranking, groups: &GroupAssignment) -> bool {
        (0..groups.num_groups()).all(|p| {
            let a: Vec<usize> = out.iter().filter(|&c| groups.group_of(c) == p).collect();
            let b: Vec<usize> = input.iter().filter(|&c| groups.group_of(c) == p).collect();
            a == b
        })
    }

    /// Minimum footrule over all fair interleavings of the groups' input orders.
    fn brute_min_footrule(input: &Ranking, groups: &GroupAssignment, spec: &FairnessSpec) -> Option<usize> {
        let per_group: Vec<Vec<usize>> = (0..groups.num_groups())
            .map(|p| input.iter().filter(|&c| groups.group_of(c) == p).collect())
            .collect();
        fn rec(
            per_group: &[Vec<usize>],
            next: &mut Vec<usize>,
            cur: &mut Vec<usize>,
            n: usize,
            input: &Ranking,
            groups: &GroupAssignment,
            spec: &FairnessSpec,
            best: &mut Option<usize>,
        ) {
            if cur.len() == n {
                let r = Ranking::new(cur.clone()).unwrap();
                if is_fair(&r, groups, spec).unwrap() {
                    let f = footrule_distance(&r, input).unwrap();
                    *best = Some(best.map_or(f, |b| b.min(f)));
                }
                return;
            }
            for p in 0..per_group.len() {
                if next[p] < per_group[p].len() {
                    cur.push(per_group[p][next[p]]);
                    next[p] += 1;
                    rec(per_group, next, cur, n, input, groups, spec, best);
                    next[p] -= 1;
                    cur.pop();
                }
            }
        }
        let mut best = None;
        let mut next = vec![0; per_group.len()];
        rec(&per_group, &mut next, &mut Vec::new(), input.len(), input, groups, spec, &mut best);
        best
    }

    #[test]
    fn fair_input_is_kept() {
        let set = CandidateSet::from_scores(&[6.0, 5.0, 4.0, 3.0, 2.0, 1.0]).unwrap();
        let groups = GroupAssignment::new("g", vec!["A".into(), "B".into()], vec![0, 1, 0, 1, 0, 1]).unwrap();
        let spec = FairnessSpec::new(vec![0.5, 0.5], vec![0.5, 0.5], 1).unwrap();
        let task = RankingTask::new(&set, &groups, &spec).unwrap();
        let out = approx_multi_valued_ipf(&task, &NoPerturbation).unwrap();
        assert_eq!(out.ranking, task.input);
        assert_eq!(out.diagnostic("kt_to_input"), Some(0.0));
    }

    #[test]
    fn segregated_input_alternates() {
        let set = CandidateSet::from_scores(&[8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0]).unwrap();
        let groups =
            GroupAssignment::new("g", vec!["A".into(), "B".into()], vec![0, 0, 0, 0, 1, 1, 1, 1]).unwrap();
        let spec = FairnessSpec::new(vec![0.5, 0.5], vec![0.5, 0.5], 1).unwrap();
        let task = RankingTask::new(&set, &groups, &spec).unwrap();
        let out = approx_multi_valued_ipf(&task, &NoPerturbation).unwrap();
        let g: Vec<usize> = out.ranking.iter().map(|c| groups.group_of(c)).collect();
        assert!(g.windows(2).all(|w| w[0] != w[1]), "{g:?}");
        assert!(order_preserved(&out.ranking, &task.input, &groups));
    }

    #[test]
    fn matches_exhaustive_minimum_footrule() {
        let mut rng = rng_from_seed(12);
        for seed in 0..150 {
            let n = 3 + (seed as usize % 8);
            let g = 2 + (seed as usize % 2);
            let (set, groups, spec) = instance(n, g, 900 + seed);
            let mut input: Vec<usize> = (0..n).collect();
            input.shuffle(&mut rng);
            let input = Ranking::new(input).unwrap();
            let task = RankingTask::new(&set, &groups, &spec)
                .unwrap()
                .with_input(input.clone())
                .unwrap();
            let expected = brute_min_footrule(&input, &groups, &spec);
            match approx_multi_valued_ipf(&task, &NoPerturbation) {
                Ok(out) => {
                    assert!(is_fair(&out.ranking, &groups, &spec).unwrap());
                    assert!(order_preserved(&out.ranking, &input, &groups));
                    let f = footrule_distance(&out.ranking, &input).unwrap();
                    assert_eq!(Some(f), expected, "seed {seed}");
                }
                Err(e) => {
                    assert!(e.is_infeasibility());
                    assert_eq!(expected, None);
                }
            }
        }
    }

    #[test]
    fn noisy_weights_keep_fairness() {
        for seed in 0..50 {
            let (set, groups, spec) = instance(30, 3, 4000 + seed);
            let task = RankingTask::new(&set, &groups, &spec).unwrap().with_seed(seed);
            let Ok(out) = ApproxMultiValuedIpf::with_noise(1.0).unwrap().rank(&task) else {
                continue;
            };
            assert!(is_fair(&out.ranking, &groups, &spec).unwrap());
            assert!(order_preserved(&out.ranking, &task.input, &groups));
        }
    }
}
