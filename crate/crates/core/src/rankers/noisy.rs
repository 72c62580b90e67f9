use serde::{Deserialize, Serialize};

use super::center::greedy_fair_ranking;
use super::{Ranker, RankerOutput, RankingTask, SelectionCriterion};
use crate::bounds::PrefixBounds;
use crate::error::{Error, Result};
use crate::groups::{FairnessSpec, GroupAssignment};
use crate::mallows::{sample, MallowsParams};
use crate::metrics::{dcg, infeasible_index, kendall_tau};
use crate::ranking::{CandidateSet, Ranking};
use crate::rng::trial_rng;

/// Where the Mallows ranker takes its center from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CenterSource {
    /// Greedy weakly fair ranking built from the task.
    #[default]
    WeaklyFair,
    /// The task's input ranking as given.
    Input,
}

/// Samples `samples` rankings around a center and keeps the best one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MallowsRanker {
    theta: f64,
    samples: usize,
    criterion: SelectionCriterion,
    center: CenterSource,
}

impl MallowsRanker {
    pub const NAME: &'static str = "mallows";

    pub fn new(theta: f64, samples: usize, criterion: SelectionCriterion) -> Result<Self> {
        if !(theta >= 0.0) || theta.is_infinite() {
            return Err(Error::InvalidParameter(format!(
                "theta must be finite and >= 0, got {theta}"
            )));
        }
        if samples == 0 {
            return Err(Error::InvalidParameter("at least one sample is required".into()));
        }
        Ok(Self {
            theta,
            samples,
            criterion,
            center: CenterSource::WeaklyFair,
        })
    }

    pub fn with_center(mut self, center: CenterSource) -> Self {
        self.center = center;
        self
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn criterion(&self) -> SelectionCriterion {
        self.criterion
    }

    pub fn center(&self, task: &RankingTask<'_>) -> Result<Ranking> {
        match self.center {
            CenterSource::WeaklyFair => {
                greedy_fair_ranking(task, &PrefixBounds::from_spec(task.spec, task.len()))
            }
            CenterSource::Input => Ok(task.input.clone()),
        }
    }
}

impl Ranker for MallowsRanker {
    fn name(&self) -> &str {
        Self::NAME
    }

    /// Sample `i` is drawn from `trial_rng(task.seed, [i])`, so runs with
    /// different sample counts share their leading samples.
    fn rank(&self, task: &RankingTask<'_>) -> Result<RankerOutput> {
        let center = self.center(task)?;
        let params = MallowsParams::new(center.clone(), self.theta)?;
        let samples: Vec<Ranking> = (0..self.samples)
            .map(|i| sample(&params, &mut trial_rng(task.seed, &[i as u64])))
            .collect();
        choose_ranking(self.criterion, &samples, &center, task)
    }
}

/// Best sample under `criterion`; the first one wins ties. A single sample
/// is returned as is.
pub fn choose_ranking(
    criterion: SelectionCriterion,
    samples: &[Ranking],
    center: &Ranking,
    task: &RankingTask<'_>,
) -> Result<RankerOutput> {
    let first = samples
        .first()
        .ok_or_else(|| Error::InvalidParameter("no samples to choose from".into()))?;
    if samples.len() == 1 {
        return RankerOutput::new(first.clone(), task);
    }
    // lower is better
    let key = |r: &Ranking| -> Result<f64> {
        Ok(match criterion {
            SelectionCriterion::MaxNdcg => -dcg(r, task.set)?,
            SelectionCriterion::MinKendallTau => kendall_tau(r, center)? as f64,
            SelectionCriterion::MinInfeasibleIndex => {
                infeasible_index(r, task.groups, task.spec)?.infeasible_index as f64
            }
        })
    };
    let mut best = 0;
    let mut best_key = key(first)?;
    for (i, r) in samples.iter().enumerate().skip(1) {
        let k = key(r)?;
        if k < best_key {
            best = i;
            best_key = k;
        }
    }
    RankerOutput::new(samples[best].clone(), task)
}

/// Mallows noise around the weakly fair center with `m` samples.
pub fn noisy_ranking(
    set: &CandidateSet,
    groups: &GroupAssignment,
    spec: &FairnessSpec,
    m: usize,
    criterion: SelectionCriterion,
    theta: f64,
    seed: u64,
) -> Result<RankerOutput> {
    let task = RankingTask::new(set, groups, spec)?.with_seed(seed);
    MallowsRanker::new(theta, m, criterion)?.rank(&task)
}
