//! Greedy minimum-count re-ranking with upward swaps.
//!
//! Positions `k = 1..n` are walked in order. At each `k` every group whose
//! count is below its minimum `tempMinCounts_p(k)` gets its best remaining
//! member appended (deficit groups ordered by that member's score), tagged
//! with the latest position `k` it may occupy. The new entry then bubbles
//! up past lower-scored entries as long as each displaced entry stays within
//! its own latest position. Candidates never forced by a minimum are
//! appended at the end in score order and bubbled the same way.

use super::{Ranker, RankerOutput, RankingTask};
use crate::error::{Error, Result};
use crate::groups::FairnessSpec;
use crate::noise::{perturb_min_counts, NoiseScheme, NoiseSpec};
use crate::ranking::Ranking;
use crate::rng::derive_seed;

/// Per-prefix minimum count of a group.
pub trait MinCountProvider {
    /// Minimum count of group `p` in the top `k` (1-based). May be real.
    fn min_count(&self, k: usize, p: usize) -> f64;

    /// Whether a deficit in an exhausted group is an error. Noisy providers
    /// can demand more members than a group has; they return `false` and
    /// the deficit is skipped.
    fn exhaustion_is_error(&self) -> bool {
        true
    }
}

/// `floor(beta_p k)` for `k >= spec.k()`, zero below.
#[derive(Debug, Clone)]
pub struct FloorMinCounts<'a> {
    spec: &'a FairnessSpec,
}

impl<'a> FloorMinCounts<'a> {
    pub fn new(spec: &'a FairnessSpec) -> Self {
        Self { spec }
    }
}

impl MinCountProvider for FloorMinCounts<'_> {
    fn min_count(&self, k: usize, p: usize) -> f64 {
        if k < self.spec.k() {
            0.0
        } else {
            self.spec.lower_bound(p, k) as f64
        }
    }
}

/// [`FloorMinCounts`] plus one independent `N(0, sigma)` draw per `(k, p)`,
/// kept real-valued and unclamped.
#[derive(Debug, Clone)]
pub struct NoisyMinCounts {
    num_groups: usize,
    table: Vec<f64>,
}

impl NoisyMinCounts {
    pub fn new(spec: &FairnessSpec, n: usize, noise: &NoiseSpec) -> Result<Self> {
        let base = FloorMinCounts::new(spec);
        let g = spec.num_groups();
        let flat: Vec<f64> = (1..=n)
            .flat_map(|k| (0..g).map(move |p| (k, p)))
            .map(|(k, p)| base.min_count(k, p))
            .collect();
        Ok(Self {
            num_groups: g,
            table: perturb_min_counts(&flat, noise)?,
        })
    }
}

impl MinCountProvider for NoisyMinCounts {
    fn min_count(&self, k: usize, p: usize) -> f64 {
        self.table[(k - 1) * self.num_groups + p]
    }

    fn exhaustion_is_error(&self) -> bool {
        false
    }
}

struct Entry {
    candidate: usize,
    score: f64,
    max_index: usize,
}

fn push_and_bubble(list: &mut Vec<Entry>, entry: Entry) {
    list.push(entry);
    let mut i = list.len() - 1;
    // the entry above moves to 1-based position i + 1
    while i > 0 && list[i - 1].max_index > i && list[i - 1].score < list[i].score {
        list.swap(i - 1, i);
        i -= 1;
    }
}

pub fn det_const_sort(task: &RankingTask<'_>, provider: &dyn MinCountProvider) -> Result<RankerOutput> {
    let n = task.len();
    let members = task.members_by_score();
    let g = members.len();
    if provider.exhaustion_is_error() {
        for p in 0..g {
            if let Some(k) = (1..=n).find(|&k| provider.min_count(k, p) > members[p].len() as f64) {
                return Err(Error::Unsatisfiable {
                    group: p,
                    prefix: k,
                    required: provider.min_count(k, p).ceil() as usize,
                    available: members[p].len(),
                });
            }
        }
    }
    let mut counts = vec![0usize; g];
    let mut list: Vec<Entry> = Vec::with_capacity(n);
    for k in 1..=n {
        let mut deficit: Vec<usize> = (0..g)
            .filter(|&p| (counts[p] as f64) < provider.min_count(k, p) && counts[p] < members[p].len())
            .collect();
        deficit.sort_by(|&a, &b| task.set.cmp_by_score(members[a][counts[a]], members[b][counts[b]]));
        for p in deficit {
            let c = members[p][counts[p]];
            counts[p] += 1;
            push_and_bubble(
                &mut list,
                Entry {
                    candidate: c,
                    score: task.set.score(c),
                    max_index: k,
                },
            );
        }
    }
    let mut rest: Vec<usize> = (0..g).flat_map(|p| members[p][counts[p]..].iter().copied()).collect();
    rest.sort_by(|&a, &b| task.set.cmp_by_score(a, b));
    for c in rest {
        push_and_bubble(
            &mut list,
            Entry {
                candidate: c,
                score: task.set.score(c),
                max_index: n,
            },
        );
    }
    let order = list.into_iter().map(|e| e.candidate).collect();
    RankerOutput::new(Ranking::new(order)?, task)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DetConstSort {
    sigma: f64,
}

impl DetConstSort {
    pub const NAME: &'static str = "det-const-sort";

    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_noise(sigma: f64) -> Result<Self> {
        NoiseSpec::new(NoiseScheme::DcsMinCounts, sigma, 0)?;
        Ok(Self { sigma })
    }
}

impl Ranker for DetConstSort {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn rank(&self, task: &RankingTask<'_>) -> Result<RankerOutput> {
        if self.sigma == 0.0 {
            return det_const_sort(task, &FloorMinCounts::new(task.spec));
        }
        let noise = NoiseSpec::new(
            NoiseScheme::DcsMinCounts,
            self.sigma,
            derive_seed(task.seed, &[NoiseScheme::DcsMinCounts as u64]),
        )?;
        det_const_sort(task, &NoisyMinCounts::new(task.spec, task.len(), &noise)?)
    }
}
