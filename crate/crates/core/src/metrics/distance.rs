use crate::error::{Error, Result};
use crate::ranking::Ranking;

fn check_same(a: &Ranking, b: &Ranking) -> Result<()> {
    if a.same_items(b) {
        Ok(())
    } else {
        Err(Error::MismatchedRankings)
    }
}

/// Sum of squared position differences over all ranked candidates.
pub fn spearman_distance(a: &Ranking, b: &Ranking) -> Result<f64> {
    check_same(a, b)?;
    Ok(a.iter()
        .map(|c| {
            let d = a.position_of(c).unwrap() as f64 - b.position_of(c).unwrap() as f64;
            d * d
        })
        .sum())
}

/// Sum of absolute position differences (Spearman's footrule).
pub fn footrule_distance(a: &Ranking, b: &Ranking) -> Result<usize> {
    check_same(a, b)?;
    Ok(a.iter()
        .map(|c| a.position_of(c).unwrap().abs_diff(b.position_of(c).unwrap()))
        .sum())
}

/// Number of candidate pairs ordered differently by `a` and `b`.
///
/// Counts inversions of `b`'s positions read in `a`'s order with a merge
/// sort, so the cost is `O(k log k)`.
pub fn kendall_tau(a: &Ranking, b: &Ranking) -> Result<u64> {
    check_same(a, b)?;
    let mut seq: Vec<usize> = a.iter().map(|c| b.position_of(c).unwrap()).collect();
    let mut buf = vec![0; seq.len()];
    Ok(count_inversions(&mut seq, &mut buf))
}

fn count_inversions(xs: &mut [usize], buf: &mut [usize]) -> u64 {
    let n = xs.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut inv = {
        let (left, right) = xs.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        count_inversions(left, bl) + count_inversions(right, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if xs[i] <= xs[j] {
            buf[k] = xs[i];
            i += 1;
        } else {
            buf[k] = xs[j];
            inv += (mid - i) as u64;
            j += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&xs[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&xs[j..n]);
    xs.copy_from_slice(&buf[..n]);
    inv
}

/// Kendall's tau coefficient `1 - 4 d_KT / (k (k - 1))`, in `[-1, 1]`.
pub fn kendall_tau_coefficient(a: &Ranking, b: &Ranking) -> Result<f64> {
    let d = kendall_tau(a, b)?;
    let k = a.len();
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "tau coefficient needs at least 2 ranked items, got {k}"
        )));
    }
    Ok(1.0 - 4.0 * d as f64 / (k * (k - 1)) as f64)
}
