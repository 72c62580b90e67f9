//! Exhaustive reference implementations for small instances.
//!
//! Everything here enumerates permutations and recomputes prefix counts,
//! DCG and distances directly, without going through the metric or ranker
//! code of `fairrank`. Factorial time; use only in tests.

use std::collections::BTreeMap;

use fairrank::{CandidateSet, FairnessSpec, GroupAssignment, MallowsParams, Ranking};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{what} = {got} exceeds the enumeration budget of {max}")]
    BudgetExceeded { what: &'static str, got: usize, max: usize },
    #[error("no ranking satisfies the constraints")]
    EmptyFeasibleSet,
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// Largest ranking for which the full Mallows pmf is materialized.
pub const MALLOWS_MAX_LEN: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_len: usize,
    pub max_groups: usize,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self {
            max_len: 8,
            max_groups: 3,
        }
    }
}

impl EnumerationBudget {
    fn check_len(&self, n: usize) -> Result<()> {
        if n > self.max_len {
            return Err(OracleError::BudgetExceeded {
                what: "ranking length",
                got: n,
                max: self.max_len,
            });
        }
        Ok(())
    }

    fn check(&self, n: usize, g: usize) -> Result<()> {
        self.check_len(n)?;
        if g > self.max_groups {
            return Err(OracleError::BudgetExceeded {
                what: "group count",
                got: g,
                max: self.max_groups,
            });
        }
        Ok(())
    }
}

/// Calls `f` on every permutation of `0..n` in lexicographic order.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        f(&p);
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("pivot exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Checks every prefix of `order` of length `>= spec.k()` directly against
/// `floor(beta l)` and `ceil(alpha l)`.
pub fn satisfies_prefix_bounds(order: &[usize], groups: &GroupAssignment, spec: &FairnessSpec) -> bool {
    let g = groups.num_groups();
    let mut counts = vec![0usize; g];
    for (idx, &c) in order.iter().enumerate() {
        counts[groups.group_of(c)] += 1;
        let l = idx + 1;
        if l < spec.k() {
            continue;
        }
        for p in 0..g {
            let lo = (spec.beta()[p] * l as f64 + 1e-9).floor() as usize;
            let hi = (spec.alpha()[p] * l as f64 - 1e-9).ceil() as usize;
            if counts[p] < lo || counts[p] > hi {
                return false;
            }
        }
    }
    true
}

fn dcg_of(order: &[usize], set: &CandidateSet) -> f64 {
    order
        .iter()
        .enumerate()
        .map(|(i, &c)| set.score(c) / ((i + 2) as f64).ln())
        .sum()
}

fn footrule_of(order: &[usize], input: &[usize]) -> usize {
    let mut pos = vec![0usize; input.len()];
    for (i, &c) in input.iter().enumerate() {
        pos[c] = i;
    }
    order.iter().enumerate().map(|(i, &c)| i.abs_diff(pos[c])).sum()
}

fn inversions(order: &[usize], center: &[usize]) -> usize {
    let mut pos = vec![0usize; center.len()];
    for (i, &c) in center.iter().enumerate() {
        pos[c] = i;
    }
    let mapped: Vec<usize> = order.iter().map(|&c| pos[c]).collect();
    let mut d = 0;
    for i in 0..mapped.len() {
        for j in i + 1..mapped.len() {
            if mapped[i] > mapped[j] {
                d += 1;
            }
        }
    }
    d
}

fn check_instance(set: &CandidateSet, groups: &GroupAssignment, spec: &FairnessSpec) -> Result<()> {
    if groups.num_candidates() != set.len() || spec.num_groups() != groups.num_groups() {
        return Err(OracleError::Inconsistent(
            "candidate set, groups and spec disagree in size".into(),
        ));
    }
    Ok(())
}

/// All rankings of `set` that meet every prefix constraint of `spec`, in
/// lexicographic order of their candidate indices.
pub fn enumerate_fair_rankings(
    set: &CandidateSet,
    groups: &GroupAssignment,
    spec: &FairnessSpec,
    budget: EnumerationBudget,
) -> Result<Vec<Ranking>> {
    check_instance(set, groups, spec)?;
    budget.check(set.len(), groups.num_groups())?;
    let mut out = Vec::new();
    for_each_permutation(set.len(), |p| {
        if satisfies_prefix_bounds(p, groups, spec) {
            out.push(Ranking::new(p.to_vec()).expect("permutation"));
        }
    });
    Ok(out)
}

/// Number of fair rankings, counted without enumerating permutations: fair
/// group-label sequences (by recursion over count vectors) times the number
/// of ways to order the members within each group.
pub fn count_fair_rankings(groups: &GroupAssignment, spec: &FairnessSpec) -> u128 {
    fn rec(
        counts: &mut Vec<usize>,
        sizes: &[usize],
        spec: &FairnessSpec,
        memo: &mut BTreeMap<Vec<usize>, u128>,
    ) -> u128 {
        let l: usize = counts.iter().sum();
        if l > 0 && l >= spec.k() {
            for p in 0..sizes.len() {
                let lo = (spec.beta()[p] * l as f64 + 1e-9).floor() as usize;
                let hi = (spec.alpha()[p] * l as f64 - 1e-9).ceil() as usize;
                if counts[p] < lo || counts[p] > hi {
                    return 0;
                }
            }
        }
        if l == sizes.iter().sum::<usize>() {
            return 1;
        }
        if let Some(&v) = memo.get(counts) {
            return v;
        }
        let mut total = 0;
        for p in 0..sizes.len() {
            if counts[p] < sizes[p] {
                counts[p] += 1;
                total += rec(counts, sizes, spec, memo);
                counts[p] -= 1;
            }
        }
        memo.insert(counts.clone(), total);
        total
    }
    let sizes = groups.sizes();
    let sequences = rec(&mut vec![0; sizes.len()], &sizes, spec, &mut BTreeMap::new());
    let orderings: u128 = sizes.iter().map(|&s| (1..=s as u128).product::<u128>()).product();
    sequences * orderings
}

/// Full Mallows pmf by enumeration, normalized by the enumerated sum.
pub fn exact_mallows_distribution(
    params: &MallowsParams,
    budget: EnumerationBudget,
) -> Result<BTreeMap<Ranking, f64>> {
    let k = params.len();
    budget.check_len(k)?;
    if k > MALLOWS_MAX_LEN {
        return Err(OracleError::BudgetExceeded {
            what: "ranking length",
            got: k,
            max: MALLOWS_MAX_LEN,
        });
    }
    let center = params.center().order().to_vec();
    let mut weights = Vec::new();
    for_each_permutation(k, |p| {
        // rankings over the center's items, not 0..k
        let order: Vec<usize> = p.iter().map(|&i| center[i]).collect();
        let d = inversions(&order, &center);
        weights.push((order, (-params.theta() * d as f64).exp()));
    });
    let z: f64 = weights.iter().map(|(_, w)| w).sum();
    Ok(weights
        .into_iter()
        .map(|(o, w)| (Ranking::new(o).expect("permutation"), w / z))
        .collect())
}

/// Normalization constant by summing `exp(-theta d)` over all rankings.
pub fn enumerated_normalization_constant(k: usize, theta: f64, budget: EnumerationBudget) -> Result<f64> {
    budget.check_len(k)?;
    let center: Vec<usize> = (0..k).collect();
    let mut z = 0.0;
    for_each_permutation(k, |p| z += (-theta * inversions(p, &center) as f64).exp());
    Ok(z)
}

/// `E[f(pi)]` under the Mallows model, streaming over all rankings so that
/// nothing of size `k!` is stored.
pub fn exact_mallows_expectation(
    params: &MallowsParams,
    budget: EnumerationBudget,
    mut f: impl FnMut(&Ranking) -> f64,
) -> Result<f64> {
    let k = params.len();
    budget.check_len(k)?;
    let center = params.center().order().to_vec();
    let (mut z, mut acc) = (0.0, 0.0);
    for_each_permutation(k, |p| {
        let order: Vec<usize> = p.iter().map(|&i| center[i]).collect();
        let w = (-params.theta() * inversions(&order, &center) as f64).exp();
        z += w;
        acc += w * f(&Ranking::new(order).expect("permutation"));
    });
    Ok(acc / z)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    MaxDcg,
    /// Minimize the footrule distance to a reference ranking.
    MinFootrule(Ranking),
    /// As [`Objective::MinFootrule`], over rankings that also keep each
    /// group's members in the reference's relative order.
    MinFootruleOrderPreserving(Ranking),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub ranking: Ranking,
    pub value: f64,
}

fn preserves_group_order(order: &[usize], input: &[usize], groups: &GroupAssignment) -> bool {
    let mut pos = vec![0usize; input.len()];
    for (i, &c) in input.iter().enumerate() {
        pos[c] = i;
    }
    let mut last = vec![None::<usize>; groups.num_groups()];
    order.iter().all(|&c| {
        let p = groups.group_of(c);
        let ok = last[p].is_none_or(|prev| prev < pos[c]);
        last[p] = Some(pos[c]);
        ok
    })
}

/// Best fair ranking under `objective`; the lexicographically first one on
/// ties.
pub fn brute_force_optimum(
    set: &CandidateSet,
    groups: &GroupAssignment,
    spec: &FairnessSpec,
    objective: &Objective,
    budget: EnumerationBudget,
) -> Result<Optimum> {
    check_instance(set, groups, spec)?;
    budget.check(set.len(), groups.num_groups())?;
    if let Objective::MinFootrule(r) | Objective::MinFootruleOrderPreserving(r) = objective {
        if !r.is_permutation_of(set.len()) {
            return Err(OracleError::Inconsistent("reference must rank every candidate".into()));
        }
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for_each_permutation(set.len(), |p| {
        if !satisfies_prefix_bounds(p, groups, spec) {
            return;
        }
        // larger is better
        let value = match objective {
            Objective::MaxDcg => dcg_of(p, set),
            Objective::MinFootrule(r) => -(footrule_of(p, r.order()) as f64),
            Objective::MinFootruleOrderPreserving(r) => {
                if !preserves_group_order(p, r.order(), groups) {
                    return;
                }
                -(footrule_of(p, r.order()) as f64)
            }
        };
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((p.to_vec(), value));
        }
    });
    let (order, value) = best.ok_or(OracleError::EmptyFeasibleSet)?;
    let value = match objective {
        Objective::MaxDcg => value,
        _ => -value,
    };
    Ok(Optimum {
        ranking: Ranking::new(order).expect("permutation"),
        value,
    })
}
