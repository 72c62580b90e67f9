//! Protected groups and proportional fairness targets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ranking::{CandidateSet, Ranking};

/// Slack for floor/ceil of `proportion * length` so that e.g. `0.1 * 30`
/// (which is `3.0000000000000004` in binary) is treated as the integer 3.
const ROUNDING_EPS: f64 = 1e-9;

/// Partition of the candidate set into groups by one categorical attribute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAssignment {
    attribute: String,
    labels: Vec<String>,
    membership: Vec<usize>,
}

impl GroupAssignment {
    pub fn new(
        attribute: impl Into<String>,
        labels: Vec<String>,
        membership: Vec<usize>,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidGroups("no group labels".into()));
        }
        if membership.is_empty() {
            return Err(Error::InvalidGroups("no candidates".into()));
        }
        if let Some(bad) = membership.iter().find(|&&g| g >= labels.len()) {
            return Err(Error::InvalidGroups(format!(
                "group index {bad} out of range for {} labels",
                labels.len()
            )));
        }
        Ok(Self {
            attribute: attribute.into(),
            labels,
            membership,
        })
    }

    /// Groups candidates by the value of `attribute`; labels are sorted, so
    /// group `p` is the `p`-th smallest label.
    pub fn from_attribute(set: &CandidateSet, attribute: &str) -> Result<Self> {
        let values = set
            .candidates()
            .iter()
            .map(|c| {
                c.attribute(attribute).ok_or_else(|| {
                    Error::InvalidGroups(format!(
                        "candidate `{}` has no attribute `{attribute}`",
                        c.id
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut labels: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        labels.sort();
        labels.dedup();
        let membership = values
            .iter()
            .map(|v| labels.binary_search_by(|l| l.as_str().cmp(v)).unwrap())
            .collect();
        Self::new(attribute, labels, membership)
    }

    /// Restriction to the candidates at `indices` (as for [`CandidateSet::subset`]).
    /// Labels are kept even if a group ends up empty.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let membership = indices
            .iter()
            .map(|&i| {
                self.membership
                    .get(i)
                    .copied()
                    .ok_or_else(|| Error::InvalidGroups(format!("index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.attribute.clone(), self.labels.clone(), membership)
    }

    pub fn attribute(&self) -> &str {
        &self.attribute
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_groups(&self) -> usize {
        self.labels.len()
    }

    pub fn num_candidates(&self) -> usize {
        self.membership.len()
    }

    pub fn group_of(&self, candidate: usize) -> usize {
        self.membership[candidate]
    }

    pub fn membership(&self) -> &[usize] {
        &self.membership
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_groups()];
        for &g in &self.membership {
            sizes[g] += 1;
        }
        sizes
    }

    pub fn proportions(&self) -> Vec<f64> {
        let n = self.membership.len() as f64;
        self.sizes().into_iter().map(|s| s as f64 / n).collect()
    }

    /// Members of group `p` in candidate-index order.
    pub fn members(&self, p: usize) -> Vec<usize> {
        (0..self.membership.len())
            .filter(|&c| self.membership[c] == p)
            .collect()
    }

    pub(crate) fn check_covers(&self, ranking: &Ranking) -> Result<()> {
        match ranking.iter().find(|&c| c >= self.membership.len()) {
            Some(c) => Err(Error::InvalidGroups(format!(
                "ranked candidate {c} has no group"
            ))),
            None => Ok(()),
        }
    }
}

/// Per-group lower (`beta`) and upper (`alpha`) proportions and the prefix
/// threshold `k`: every prefix of length at least `k` must hold between
/// `floor(beta_p * len)` and `ceil(alpha_p * len)` members of group `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessSpec {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    k: usize,
}

impl FairnessSpec {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, k: usize) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::InvalidSpec(format!(
                "alpha has {} entries but beta has {}",
                alpha.len(),
                beta.len()
            )));
        }
        if alpha.is_empty() {
            return Err(Error::InvalidSpec("no groups".into()));
        }
        if k == 0 {
            return Err(Error::InvalidSpec("prefix threshold k must be >= 1".into()));
        }
        for (p, (&a, &b)) in alpha.iter().zip(&beta).enumerate() {
            if !(a.is_finite() && b.is_finite()) || b < 0.0 || a > 1.0 || b > a {
                return Err(Error::InvalidSpec(format!(
                    "group {p}: need 0 <= beta ({b}) <= alpha ({a}) <= 1"
                )));
            }
        }
        let (sum_a, sum_b) = (alpha.iter().sum::<f64>(), beta.iter().sum::<f64>());
        if sum_b > 1.0 + ROUNDING_EPS || sum_a < 1.0 - ROUNDING_EPS {
            return Err(Error::InvalidSpec(format!(
                "need sum(beta) = {sum_b} <= 1 <= sum(alpha) = {sum_a}"
            )));
        }
        Ok(Self { alpha, beta, k })
    }

    /// `alpha = beta =` the group proportions of the assignment.
    pub fn proportional(groups: &GroupAssignment, k: usize) -> Result<Self> {
        let p = groups.proportions();
        Self::new(p.clone(), p, k)
    }

    /// No constraints: `beta = 0`, `alpha = 1`.
    pub fn unconstrained(num_groups: usize) -> Self {
        Self::new(vec![1.0; num_groups], vec![0.0; num_groups], 1).expect("valid")
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn with_k(mut self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSpec("prefix threshold k must be >= 1".into()));
        }
        self.k = k;
        Ok(self)
    }

    pub fn num_groups(&self) -> usize {
        self.alpha.len()
    }

    /// `floor(beta_p * len)`.
    pub fn lower_bound(&self, p: usize, len: usize) -> usize {
        (self.beta[p] * len as f64 + ROUNDING_EPS).floor() as usize
    }

    /// `ceil(alpha_p * len)`.
    pub fn upper_bound(&self, p: usize, len: usize) -> usize {
        (self.alpha[p] * len as f64 - ROUNDING_EPS).ceil().max(0.0) as usize
    }

    pub(crate) fn check_groups(&self, groups: &GroupAssignment) -> Result<()> {
        if groups.num_groups() != self.num_groups() {
            return Err(Error::InvalidSpec(format!(
                "spec has {} groups but attribute `{}` has {}",
                self.num_groups(),
                groups.attribute(),
                groups.num_groups()
            )));
        }
        Ok(())
    }
}

/// Number of members of each group among the top `k` positions.
pub fn group_counts_in_prefix(
    ranking: &Ranking,
    groups: &GroupAssignment,
    k: usize,
) -> Result<Vec<usize>> {
    if k == 0 || k > ranking.len() {
        return Err(Error::PrefixOutOfRange {
            k,
            len: ranking.len(),
        });
    }
    groups.check_covers(ranking)?;
    let mut counts = vec![0; groups.num_groups()];
    for c in ranking.iter().take(k) {
        counts[groups.group_of(c)] += 1;
    }
    Ok(counts)
}
