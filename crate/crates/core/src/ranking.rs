//! Candidates, candidate sets and rankings.
//!
//! Positions are 1-based everywhere in the public API: position 1 is the top
//! of the ranking. Candidates are referred to by their index in the owning
//! [`CandidateSet`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An item to be ranked: an identifier, a quality score and categorical
/// attributes (e.g. `sex-age -> "<35-female"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: String,
    pub score: f64,
    #[serde(default)]
    pub attributes: BTreeMap<String, String>,
}

impl Candidate {
    pub fn new(id: impl Into<String>, score: f64) -> Self {
        Self {
            id: id.into(),
            score,
            attributes: BTreeMap::new(),
        }
    }

    pub fn with_attribute(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.attributes.insert(name.into(), value.into());
        self
    }

    pub fn attribute(&self, name: &str) -> Option<&str> {
        self.attributes.get(name).map(String::as_str)
    }
}

/// A non-empty set of candidates with distinct ids and finite,
/// non-negative scores.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateSet {
    candidates: Vec<Candidate>,
}

impl CandidateSet {
    pub fn new(candidates: Vec<Candidate>) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::InvalidCandidates("candidate set is empty".into()));
        }
        let mut seen = HashSet::with_capacity(candidates.len());
        for c in &candidates {
            if !seen.insert(c.id.as_str()) {
                return Err(Error::InvalidCandidates(format!("duplicate id `{}`", c.id)));
            }
            if !c.score.is_finite() {
                return Err(Error::InvalidCandidates(format!(
                    "candidate `{}` has non-finite score",
                    c.id
                )));
            }
            if c.score < 0.0 {
                return Err(Error::InvalidCandidates(format!(
                    "candidate `{}` has negative score {}",
                    c.id, c.score
                )));
            }
        }
        Ok(Self { candidates })
    }

    /// Convenience constructor: ids `c0, c1, ...` with the given scores.
    pub fn from_scores(scores: &[f64]) -> Result<Self> {
        Self::new(
            scores
                .iter()
                .enumerate()
                .map(|(i, &s)| Candidate::new(format!("c{i}"), s))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn get(&self, index: usize) -> Option<&Candidate> {
        self.candidates.get(index)
    }

    pub fn score(&self, index: usize) -> f64 {
        self.candidates[index].score
    }

    pub fn scores(&self) -> Vec<f64> {
        self.candidates.iter().map(|c| c.score).collect()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.candidates.iter().position(|c| c.id == id)
    }

    /// A new set holding the candidates at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let picked = indices
            .iter()
            .map(|&i| {
                self.candidates.get(i).cloned().ok_or_else(|| {
                    Error::InvalidCandidates(format!("index {i} out of range"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(picked)
    }

    /// Score-descending comparison with ties broken by id ascending.
    pub fn cmp_by_score(&self, a: usize, b: usize) -> Ordering {
        let (ca, cb) = (&self.candidates[a], &self.candidates[b]);
        cb.score
            .total_cmp(&ca.score)
            .then_with(|| ca.id.cmp(&cb.id))
    }
}

/// An ordering of (a subset of) candidate indices: `order[0]` is at
/// position 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Ranking {
    order: Vec<usize>,
    #[serde(skip)]
    positions: Vec<usize>,
}

const UNRANKED: usize = usize::MAX;

impl Ranking {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let size = order.iter().max().map_or(0, |m| m + 1);
        let mut positions = vec![UNRANKED; size];
        for (i, &c) in order.iter().enumerate() {
            if positions[c] != UNRANKED {
                return Err(Error::InvalidRanking(format!("candidate {c} ranked twice")));
            }
            positions[c] = i + 1;
        }
        Ok(Self { order, positions })
    }

    /// The ranking `0, 1, ..., n-1`.
    pub fn identity(n: usize) -> Self {
        Self {
            order: (0..n).collect(),
            positions: (1..=n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn into_order(self) -> Vec<usize> {
        self.order
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.order.iter().copied()
    }

    /// Candidate at 1-based `position`.
    pub fn candidate_at(&self, position: usize) -> Option<usize> {
        position.checked_sub(1).and_then(|i| self.order.get(i).copied())
    }

    /// 1-based position of `candidate`, if ranked.
    pub fn position_of(&self, candidate: usize) -> Option<usize> {
        match self.positions.get(candidate) {
            Some(&p) if p != UNRANKED => Some(p),
            _ => None,
        }
    }

    pub fn contains(&self, candidate: usize) -> bool {
        self.position_of(candidate).is_some()
    }

    /// The top `len` positions as a ranking of their own.
    pub fn prefix(&self, len: usize) -> Self {
        let len = len.min(self.order.len());
        Self::new(self.order[..len].to_vec()).expect("prefix of a valid ranking")
    }

    pub fn reversed(&self) -> Self {
        let mut order = self.order.clone();
        order.reverse();
        Self::new(order).expect("reversal of a valid ranking")
    }

    /// True when both rankings rank exactly the same candidates.
    pub fn same_items(&self, other: &Ranking) -> bool {
        self.len() == other.len() && self.iter().all(|c| other.contains(c))
    }

    /// True when this ranking is a permutation of all `n` candidates.
    pub fn is_permutation_of(&self, n: usize) -> bool {
        self.len() == n && self.iter().all(|c| c < n)
    }
}

impl TryFrom<Vec<usize>> for Ranking {
    type Error = Error;

    fn try_from(order: Vec<usize>) -> Result<Self> {
        Ranking::new(order)
    }
}

impl From<Ranking> for Vec<usize> {
    fn from(r: Ranking) -> Self {
        r.order
    }
}

/// The quality-optimal ranking: candidates by non-increasing score, ties by
/// id ascending.
pub fn ranking_from_scores(set: &CandidateSet) -> Ranking {
    let mut order: Vec<usize> = (0..set.len()).collect();
    order.sort_by(|&a, &b| set.cmp_by_score(a, b));
    Ranking::new(order).expect("indices are distinct")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set_with_ids(ids: &[&str], scores: &[f64]) -> CandidateSet {
        CandidateSet::new(
            ids.iter()
                .zip(scores)
                .map(|(id, &s)| Candidate::new(*id, s))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn sorts_by_score_descending() {
        let set = set_with_ids(&["a", "b", "c"], &[3.0, 1.0, 2.0]);
        let r = ranking_from_scores(&set);
        let ids: Vec<_> = r.iter().map(|i| set.get(i).unwrap().id.as_str()).collect();
        assert_eq!(ids, ["a", "c", "b"]);
    }

    #[test]
    fn equal_scores_fall_back_to_id_order() {
        let set = set_with_ids(&["d", "b", "a", "c"], &[1.0; 4]);
        let r = ranking_from_scores(&set);
        let ids: Vec<_> = r.iter().map(|i| set.get(i).unwrap().id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c", "d"]);
    }

    #[test]
    fn rejects_bad_candidate_sets() {
        assert!(CandidateSet::new(vec![]).is_err());
        assert!(CandidateSet::from_scores(&[1.0, f64::NAN]).is_err());
        assert!(CandidateSet::from_scores(&[1.0, -0.5]).is_err());
        let dup = vec![Candidate::new("x", 1.0), Candidate::new("x", 2.0)];
        assert!(matches!(
            CandidateSet::new(dup),
            Err(Error::InvalidCandidates(_))
        ));
    }

    #[test]
    fn ranking_rejects_repeats() {
        assert!(Ranking::new(vec![0, 2, 0]).is_err());
        let r = Ranking::new(vec![4, 1]).unwrap();
        assert_eq!(r.position_of(4), Some(1));
        assert_eq!(r.position_of(1), Some(2));
        assert_eq!(r.position_of(0), None);
        assert_eq!(r.position_of(99), None);
        assert_eq!(r.candidate_at(0), None);
        assert_eq!(r.candidate_at(2), Some(1));
    }

    proptest! {
        #[test]
        fn position_views_are_inverse(perm in Just((0..12usize).collect::<Vec<_>>()).prop_shuffle()) {
            let r = Ranking::new(perm.clone()).unwrap();
            for pos in 1..=perm.len() {
                let c = r.candidate_at(pos).unwrap();
                prop_assert_eq!(r.position_of(c), Some(pos));
            }
            for c in 0..perm.len() {
                let pos = r.position_of(c).unwrap();
                prop_assert_eq!(r.candidate_at(pos), Some(c));
            }
        }

        #[test]
        fn score_order_matches_comparison_sort(scores in prop::collection::vec(0.0f64..1.0, 1..40)) {
            let set = CandidateSet::from_scores(&scores).unwrap();
            let r = ranking_from_scores(&set);
            // oracle: sorted score multiset, compared position by position
            let mut expected = scores.clone();
            expected.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let got: Vec<f64> = r.iter().map(|i| scores[i]).collect();
            prop_assert_eq!(got, expected);
        }
    }
}
