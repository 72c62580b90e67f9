use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{FairnessSpec, GroupAssignment};
use crate::ranking::Ranking;

/// Prefix-violation counts of a ranking against a [`FairnessSpec`].
///
/// A prefix may violate a lower bound for one group and an upper bound for
/// another; it is then counted once in each of `lower_violations` and
/// `upper_violations`, so `infeasible_index` can reach `2 |pi|` and `ppfair`
/// can drop below zero. `violating_positions` counts such a prefix once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub lower_violations: usize,
    pub upper_violations: usize,
    pub infeasible_index: usize,
    pub violating_positions: usize,
    pub ppfair: f64,
    pub len: usize,
}

impl FairnessReport {
    /// Percentage of prefixes without any violation, in `[0, 100]`.
    pub fn fair_position_percentage(&self) -> f64 {
        100.0 * (1.0 - self.violating_positions as f64 / self.len as f64)
    }
}

fn check(ranking: &Ranking, groups: &GroupAssignment, spec: &FairnessSpec) -> Result<()> {
    if ranking.is_empty() {
        return Err(Error::InvalidRanking("empty ranking".into()));
    }
    spec.check_groups(groups)?;
    groups.check_covers(ranking)
}

/// Calls `visit(len, counts)` for every prefix length `1..=|ranking|`.
fn for_each_prefix(ranking: &Ranking, groups: &GroupAssignment, mut visit: impl FnMut(usize, &[usize])) {
    let mut counts = vec![0; groups.num_groups()];
    for (i, c) in ranking.iter().enumerate() {
        counts[groups.group_of(c)] += 1;
        visit(i + 1, &counts);
    }
}

/// Two-sided infeasible index: the number of prefix lengths where some group
/// is below `floor(beta_p len)`, plus the number where some group is above
/// `ceil(alpha_p len)`. Every prefix is checked regardless of `spec.k()`.
pub fn infeasible_index(
    ranking: &Ranking,
    groups: &GroupAssignment,
    spec: &FairnessSpec,
) -> Result<FairnessReport> {
    check(ranking, groups, spec)?;
    let (mut lower, mut upper, mut either) = (0, 0, 0);
    for_each_prefix(ranking, groups, |len, counts| {
        let lo = (0..counts.len()).any(|p| counts[p] < spec.lower_bound(p, len));
        let hi = (0..counts.len()).any(|p| counts[p] > spec.upper_bound(p, len));
        lower += lo as usize;
        upper += hi as usize;
        either += (lo || hi) as usize;
    });
    let ii = lower + upper;
    Ok(FairnessReport {
        lower_violations: lower,
        upper_violations: upper,
        infeasible_index: ii,
        violating_positions: either,
        ppfair: 100.0 * (1.0 - ii as f64 / ranking.len() as f64),
        len: ranking.len(),
    })
}

/// `100 (1 - II / |pi|)`.
pub fn ppfair(ranking: &Ranking, groups: &GroupAssignment, spec: &FairnessSpec) -> Result<f64> {
    infeasible_index(ranking, groups, spec).map(|r| r.ppfair)
}

fn prefix_ok(spec: &FairnessSpec, len: usize, counts: &[usize]) -> bool {
    (0..counts.len())
        .all(|p| spec.lower_bound(p, len) <= counts[p] && counts[p] <= spec.upper_bound(p, len))
}

/// Every prefix of length at least `spec.k()` is within bounds.
pub fn is_fair(ranking: &Ranking, groups: &GroupAssignment, spec: &FairnessSpec) -> Result<bool> {
    check(ranking, groups, spec)?;
    if spec.k() > ranking.len() {
        return Err(Error::PrefixOutOfRange {
            k: spec.k(),
            len: ranking.len(),
        });
    }
    let mut fair = true;
    for_each_prefix(ranking, groups, |len, counts| {
        if len >= spec.k() && !prefix_ok(spec, len, counts) {
            fair = false;
        }
    });
    Ok(fair)
}

/// The prefix of length exactly `spec.k()` is within bounds.
pub fn is_weakly_fair(
    ranking: &Ranking,
    groups: &GroupAssignment,
    spec: &FairnessSpec,
) -> Result<bool> {
    check(ranking, groups, spec)?;
    let counts = crate::groups::group_counts_in_prefix(ranking, groups, spec.k())?;
    Ok(prefix_ok(spec, spec.k(), &counts))
}
