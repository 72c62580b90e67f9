//! Fair re-ranking algorithms behind a common [`Ranker`] trait.
//!
//! | Name | Algorithm |
//! |------|-----------|
//! | `mallows` | sample `m` rankings around a weakly fair center, keep the best |
//! | `exact-fair-dcg` | DCG-optimal ranking under every prefix constraint |
//! | `det-const-sort` | greedy minimum-count insertion with upward swaps |
//! | `approx-multi-valued-ipf` | footrule-minimal fair ranking via assignment |
//! | `weakly-fair-center` | greedy score-ordered fair ranking |
//!
//! Rankers are looked up by name in a [`RankerRegistry`].

mod assignment;
mod center;
mod detconst;
mod exact;
mod ipf;
mod noisy;
mod registry;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{FairnessSpec, GroupAssignment};
use crate::metrics::{dcg, infeasible_index, kendall_tau, ndcg};
use crate::ranking::{ranking_from_scores, CandidateSet, Ranking};

pub use assignment::min_cost_assignment;
pub use center::{build_weakly_fair_center, greedy_fair_ranking, WeaklyFairCenter};
pub use detconst::{det_const_sort, DetConstSort, FloorMinCounts, MinCountProvider, NoisyMinCounts};
pub use exact::{exact_fair_dcg, exact_fair_dcg_with_bounds, ExactFairDcg};
pub use ipf::{approx_multi_valued_ipf, ApproxMultiValuedIpf, NoPerturbation, WeightPerturbation};
pub use noisy::{choose_ranking, noisy_ranking, CenterSource, MallowsRanker};
pub use registry::{RankerFactory, RankerRegistry};

/// Everything a ranker needs: candidates, the known protected groups, the
/// fairness targets, a reference input ranking and a seed.
#[derive(Debug, Clone)]
pub struct RankingTask<'a> {
    pub set: &'a CandidateSet,
    pub groups: &'a GroupAssignment,
    pub spec: &'a FairnessSpec,
    /// Reference ranking; defaults to the score order.
    pub input: Ranking,
    pub seed: u64,
}

impl<'a> RankingTask<'a> {
    pub fn new(
        set: &'a CandidateSet,
        groups: &'a GroupAssignment,
        spec: &'a FairnessSpec,
    ) -> Result<Self> {
        if groups.num_candidates() != set.len() {
            return Err(Error::InvalidGroups(format!(
                "{} group memberships for {} candidates",
                groups.num_candidates(),
                set.len()
            )));
        }
        spec.check_groups(groups)?;
        if spec.k() > set.len() {
            return Err(Error::InvalidSpec(format!(
                "prefix threshold {} exceeds {} candidates",
                spec.k(),
                set.len()
            )));
        }
        Ok(Self {
            set,
            groups,
            spec,
            input: ranking_from_scores(set),
            seed: 0,
        })
    }

    pub fn with_input(mut self, input: Ranking) -> Result<Self> {
        if !input.is_permutation_of(self.set.len()) {
            return Err(Error::InvalidRanking(format!(
                "input must rank all {} candidates",
                self.set.len()
            )));
        }
        self.input = input;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    /// Members of each group, best score first.
    pub(crate) fn members_by_score(&self) -> Vec<Vec<usize>> {
        let mut members: Vec<Vec<usize>> = (0..self.groups.num_groups())
            .map(|p| self.groups.members(p))
            .collect();
        for m in &mut members {
            m.sort_by(|&a, &b| self.set.cmp_by_score(a, b));
        }
        members
    }
}

/// A ranker's result plus metrics recomputable from the ranking and task.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankerOutput {
    pub ranking: Ranking,
    pub diagnostics: BTreeMap<String, f64>,
}

impl RankerOutput {
    pub fn new(ranking: Ranking, task: &RankingTask<'_>) -> Result<Self> {
        let diagnostics = diagnostics(&ranking, task)?;
        Ok(Self {
            ranking,
            diagnostics,
        })
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.get(name).copied()
    }
}

/// `dcg`, `ndcg` (when defined), `kt_to_input`, and the fairness report
/// against the task's groups as `infeasible_index:<attribute>` etc.
pub fn diagnostics(ranking: &Ranking, task: &RankingTask<'_>) -> Result<BTreeMap<String, f64>> {
    let mut d = BTreeMap::new();
    d.insert("dcg".into(), dcg(ranking, task.set)?);
    match ndcg(ranking, task.set) {
        Ok(v) => {
            d.insert("ndcg".into(), v);
        }
        Err(Error::ZeroIdealDcg) => {}
        Err(e) => return Err(e),
    }
    d.insert("kt_to_input".into(), kendall_tau(ranking, &task.input)? as f64);
    let rep = infeasible_index(ranking, task.groups, task.spec)?;
    let attr = task.groups.attribute();
    d.insert(format!("infeasible_index:{attr}"), rep.infeasible_index as f64);
    d.insert(format!("lower_violations:{attr}"), rep.lower_violations as f64);
    d.insert(format!("upper_violations:{attr}"), rep.upper_violations as f64);
    d.insert(format!("ppfair:{attr}"), rep.ppfair);
    Ok(d)
}

/// A re-ranking algorithm.
pub trait Ranker: Send + Sync {
    fn name(&self) -> &str;

    fn rank(&self, task: &RankingTask<'_>) -> Result<RankerOutput>;
}

/// How the Mallows ranker picks one of its samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionCriterion {
    /// Highest NDCG.
    #[default]
    MaxNdcg,
    /// Smallest Kendall tau distance to the center.
    MinKendallTau,
    /// Smallest infeasible index w.r.t. the task's groups.
    MinInfeasibleIndex,
}

impl SelectionCriterion {
    pub fn name(self) -> &'static str {
        match self {
            SelectionCriterion::MaxNdcg => "max-ndcg",
            SelectionCriterion::MinKendallTau => "min-kt",
            SelectionCriterion::MinInfeasibleIndex => "min-infeasible-index",
        }
    }
}

impl fmt::Display for SelectionCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SelectionCriterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max-ndcg" => Ok(Self::MaxNdcg),
            "min-kt" => Ok(Self::MinKendallTau),
            "min-infeasible-index" | "min-ii" => Ok(Self::MinInfeasibleIndex),
            other => Err(Error::InvalidParameter(format!(
                "unknown selection criterion `{other}`"
            ))),
        }
    }
}

/// Parameters shared by the registry's ranker factories. Each ranker reads
/// the fields it understands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankerConfig {
    /// Mallows dispersion.
    pub theta: f64,
    /// Number of Mallows samples.
    pub samples: usize,
    pub criterion: SelectionCriterion,
    pub center: CenterSource,
    /// Constraint-noise level for the baselines; 0 runs them vanilla.
    pub sigma: f64,
}

impl Default for RankerConfig {
    fn default() -> Self {
        Self {
            theta: 1.0,
            samples: 1,
            criterion: SelectionCriterion::MaxNdcg,
            center: CenterSource::WeaklyFair,
            sigma: 0.0,
        }
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    /// Random feasible-ish instance: `n` candidates, `g` groups, proportional spec.
    pub fn instance(n: usize, g: usize, seed: u64) -> (CandidateSet, GroupAssignment, FairnessSpec) {
        let mut rng = rng_from_seed(seed);
        let scores: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let set = CandidateSet::from_scores(&scores).unwrap();
        let membership: Vec<usize> = (0..n).map(|i| if i < g { i } else { rng.random_range(0..g) }).collect();
        let labels = (0..g).map(|p| format!("g{p}")).collect();
        let groups = GroupAssignment::new("grp", labels, membership).unwrap();
        let spec = FairnessSpec::proportional(&groups, 1).unwrap();
        (set, groups, spec)
    }
}
