use super::{Ranker, RankerOutput, RankingTask};
use crate::bounds::{PrefixBounds, Windows};
use crate::error::{Error, Result};
use crate::groups::{FairnessSpec, GroupAssignment};
use crate::ranking::{CandidateSet, Ranking};

/// Greedy score-ordered fair ranking: each position takes the best-scoring
/// remaining candidate whose placement still admits a fair completion.
///
/// The result meets every prefix constraint of `spec` (lengths `>= spec.k()`),
/// lists each group best-first, and has the lexicographically largest score
/// sequence among all such rankings.
pub fn build_weakly_fair_center(
    set: &CandidateSet,
    groups: &GroupAssignment,
    spec: &FairnessSpec,
) -> Result<Ranking> {
    let task = RankingTask::new(set, groups, spec)?;
    let bounds = PrefixBounds::from_spec(spec, set.len());
    greedy_fair_ranking(&task, &bounds)
}

/// [`build_weakly_fair_center`] against arbitrary integer prefix bounds.
pub fn greedy_fair_ranking(task: &RankingTask<'_>, bounds: &PrefixBounds) -> Result<Ranking> {
    let sizes = task.groups.sizes();
    let windows = Windows::new(bounds, &sizes)?;
    let members = task.members_by_score();
    let mut counts = vec![0usize; sizes.len()];
    let mut order = Vec::with_capacity(task.len());
    for placed in 0..task.len() {
        let mut heads: Vec<(usize, usize)> = (0..members.len())
            .filter(|&p| counts[p] < members[p].len())
            .map(|p| (p, members[p][counts[p]]))
            .collect();
        heads.sort_by(|a, b| task.set.cmp_by_score(a.1, b.1));
        let (p, c) = heads
            .into_iter()
            .find(|&(p, _)| windows.can_place(&counts, placed, p))
            .ok_or_else(|| Error::Infeasible {
                prefix: placed + 1,
                detail: "no group can take the next position".into(),
            })?;
        counts[p] += 1;
        order.push(c);
    }
    Ranking::new(order)
}

/// The greedy center as a standalone ranker.
#[derive(Debug, Clone, Copy, Default)]
pub struct WeaklyFairCenter;

impl WeaklyFairCenter {
    pub const NAME: &'static str = "weakly-fair-center";
}

impl Ranker for WeaklyFairCenter {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn rank(&self, task: &RankingTask<'_>) -> Result<RankerOutput> {
        let bounds = PrefixBounds::from_spec(task.spec, task.len());
        RankerOutput::new(greedy_fair_ranking(task, &bounds)?, task)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::is_fair;
    use crate::rankers::testutil::instance;
    use crate::ranking::ranking_from_scores;

    /// Exhaustive depth-first search in score order over candidates, pruning
    /// only on violated prefixes. The first complete ranking found is the
    /// lexicographically best fair score sequence.
    fn lex_best_fair(set: &CandidateSet, groups: &GroupAssignment, spec: &FairnessSpec) -> Option<Vec<f64>> {
        fn rec(
            order: &[usize],
            cur: &mut Vec<usize>,
            used: &mut [bool],
            counts: &mut [usize],
            groups: &GroupAssignment,
            spec: &FairnessSpec,
        ) -> bool {
            let len = cur.len();
            if len > 0 && len >= spec.k() {
                for p in 0..counts.len() {
                    let c = counts[p] as f64;
                    let lo = (spec.beta()[p] * len as f64 + 1e-9).floor();
                    let hi = (spec.alpha()[p] * len as f64 - 1e-9).ceil();
                    if c < lo || c > hi {
                        return false;
                    }
                }
            }
            if len == order.len() {
                return true;
            }
            for &c in order {
                if used[c] {
                    continue;
                }
                used[c] = true;
                counts[groups.group_of(c)] += 1;
                cur.push(c);
                if rec(order, cur, used, counts, groups, spec) {
                    return true;
                }
                cur.pop();
                counts[groups.group_of(c)] -= 1;
                used[c] = false;
            }
            false
        }
        let order = ranking_from_scores(set).into_order();
        let mut cur = Vec::new();
        let mut used = vec![false; set.len()];
        let mut counts = vec![0; groups.num_groups()];
        rec(&order, &mut cur, &mut used, &mut counts, groups, spec)
            .then(|| cur.iter().map(|&c| set.score(c)).collect())
    }

    #[test]
    fn vacuous_constraints_give_score_order() {
        let (set, groups, _) = instance(10, 3, 1);
        let spec = FairnessSpec::unconstrained(3);
        let r = build_weakly_fair_center(&set, &groups, &spec).unwrap();
        assert_eq!(r, ranking_from_scores(&set));
    }

    #[test]
    fn dominant_group_alternates_from_the_top() {
        let scores = [0.9, 0.8, 0.7, 0.6, 0.4, 0.3, 0.2, 0.1];
        let set = CandidateSet::from_scores(&scores).unwrap();
        let groups =
            GroupAssignment::new("g", vec!["A".into(), "B".into()], vec![0, 0, 0, 0, 1, 1, 1, 1]).unwrap();
        let spec = FairnessSpec::new(vec![0.5, 0.5], vec![0.5, 0.5], 1).unwrap();
        let r = build_weakly_fair_center(&set, &groups, &spec).unwrap();
        assert_eq!(r.order(), [0, 4, 1, 5, 2, 6, 3, 7]);
    }

    #[test]
    fn infeasible_spec_names_a_prefix() {
        let set = CandidateSet::from_scores(&[3.0, 2.0, 1.0]).unwrap();
        let groups = GroupAssignment::new("g", vec!["A".into(), "B".into()], vec![0, 0, 0]).unwrap();
        let spec = FairnessSpec::new(vec![0.5, 0.5], vec![0.5, 0.5], 1).unwrap();
        match build_weakly_fair_center(&set, &groups, &spec) {
            Err(Error::Infeasible { prefix, .. }) => assert_eq!(prefix, 2),
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn matches_exhaustive_lexicographic_search() {
        let mut checked = 0;
        for seed in 0..300 {
            let n = 4 + (seed as usize % 9);
            let g = 2 + (seed as usize % 2);
            let (set, groups, spec) = instance(n, g, seed);
            let expected = lex_best_fair(&set, &groups, &spec);
            match build_weakly_fair_center(&set, &groups, &spec) {
                Ok(r) => {
                    assert!(is_fair(&r, &groups, &spec).unwrap());
                    let got: Vec<f64> = r.iter().map(|c| set.score(c)).collect();
                    assert_eq!(Some(got), expected, "seed {seed}");
                    checked += 1;
                }
                Err(e) => {
                    assert!(e.is_infeasibility());
                    assert_eq!(expected, None, "seed {seed}");
                }
            }
        }
        assert!(checked > 100);
    }
}
