use crate::error::{Error, Result};
use crate::ranking::{CandidateSet, Ranking};

/// Discount of 1-based `position`: `1 / ln(1 + position)`.
pub fn position_discount(position: usize) -> f64 {
    1.0 / (1.0 + position as f64).ln()
}

fn check_in_set(ranking: &Ranking, set: &CandidateSet) -> Result<()> {
    match ranking.iter().find(|&c| c >= set.len()) {
        Some(c) => Err(Error::InvalidRanking(format!(
            "candidate {c} not in a set of {}",
            set.len()
        ))),
        None => Ok(()),
    }
}

/// `sum_i s(pi(i)) / ln(1 + i)` over the ranked positions.
pub fn dcg(ranking: &Ranking, set: &CandidateSet) -> Result<f64> {
    check_in_set(ranking, set)?;
    Ok(ranking
        .iter()
        .enumerate()
        .map(|(i, c)| set.score(c) * position_discount(i + 1))
        .sum())
}

/// DCG of the top `len` scores of the whole set in descending order.
pub fn ideal_dcg(set: &CandidateSet, len: usize) -> f64 {
    let mut scores = set.scores();
    scores.sort_by(|a, b| b.total_cmp(a));
    scores
        .iter()
        .take(len)
        .enumerate()
        .map(|(i, s)| s * position_discount(i + 1))
        .sum()
}

/// `DCG / IDCG`, where IDCG ranks the best `|ranking|` candidates of the set.
pub fn ndcg(ranking: &Ranking, set: &CandidateSet) -> Result<f64> {
    let ideal = ideal_dcg(set, ranking.len());
    if ideal <= 0.0 {
        return Err(Error::ZeroIdealDcg);
    }
    Ok(dcg(ranking, set)? / ideal)
}
