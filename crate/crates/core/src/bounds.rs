//! Integer per-prefix count bounds and their feasibility structure.
//!
//! A full ranking of `n` candidates meets the bounds iff, for every prefix
//! length `l` and group `p`, `lower(l, p) <= count_p(l) <= upper(l, p)`.
//! Because counts only grow one step at a time, the bounds can be tightened
//! per group into nondecreasing envelopes `lo_p(l) <= count_p(l) <= hi_p(l)`.
//! These turn into a placement window `[release, deadline]` for the `j`-th
//! member of each group: the ranking is feasible iff every group's `j`-th
//! member lands inside its window. Filling unit slots with windowed jobs is
//! solved exactly by earliest-deadline-first.

use crate::error::{Error, Result};
use crate::groups::FairnessSpec;

/// `lower[l-1][p]` / `upper[l-1][p]` for prefix lengths `l = 1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixBounds {
    num_groups: usize,
    lower: Vec<Vec<i64>>,
    upper: Vec<Vec<i64>>,
}

impl PrefixBounds {
    /// `floor(beta_p l)` / `ceil(alpha_p l)` for `l >= spec.k()`, and no
    /// constraint on shorter prefixes.
    pub fn from_spec(spec: &FairnessSpec, n: usize) -> Self {
        let g = spec.num_groups();
        let mut lower = Vec::with_capacity(n);
        let mut upper = Vec::with_capacity(n);
        for l in 1..=n {
            if l >= spec.k() {
                lower.push((0..g).map(|p| spec.lower_bound(p, l) as i64).collect());
                upper.push((0..g).map(|p| spec.upper_bound(p, l) as i64).collect());
            } else {
                lower.push(vec![0; g]);
                upper.push(vec![l as i64; g]);
            }
        }
        Self {
            num_groups: g,
            lower,
            upper,
        }
    }

    /// Integer bounds implied by real-valued ones: `count >= x` becomes
    /// `count >= ceil(x)` and `count <= y` becomes `count <= floor(y)`.
    pub fn from_real(lower: &[Vec<f64>], upper: &[Vec<f64>]) -> Result<Self> {
        const EPS: f64 = 1e-9;
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::InvalidParameter(
                "lower and upper bound tables must have the same non-zero length".into(),
            ));
        }
        let g = lower[0].len();
        if lower.iter().chain(upper).any(|row| row.len() != g) {
            return Err(Error::InvalidParameter("ragged bound table".into()));
        }
        Ok(Self {
            num_groups: g,
            lower: lower
                .iter()
                .map(|row| row.iter().map(|x| (x - EPS).ceil() as i64).collect())
                .collect(),
            upper: upper
                .iter()
                .map(|row| row.iter().map(|y| (y + EPS).floor() as i64).collect())
                .collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn num_groups(&self) -> usize {
        self.num_groups
    }

    /// Lower bound on group `p` in the prefix of length `l` (1-based).
    pub fn lower(&self, l: usize, p: usize) -> i64 {
        self.lower[l - 1][p]
    }

    pub fn upper(&self, l: usize, p: usize) -> i64 {
        self.upper[l - 1][p]
    }

    pub fn lower_row(&self, l: usize) -> &[i64] {
        &self.lower[l - 1]
    }

    pub fn upper_row(&self, l: usize) -> &[i64] {
        &self.upper[l - 1]
    }

    /// True when `counts` (summing to `l`) respects the bounds at prefix `l`.
    pub fn admits(&self, l: usize, counts: &[usize]) -> bool {
        counts.iter().enumerate().all(|(p, &c)| {
            let c = c as i64;
            self.lower(l, p) <= c && c <= self.upper(l, p)
        })
    }
}

/// Placement windows derived from [`PrefixBounds`] and the group sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct Windows {
    n: usize,
    /// `release[p][j]`: earliest position (1-based) of the `(j+1)`-th member.
    release: Vec<Vec<usize>>,
    /// `deadline[p][j]`: latest position (1-based) of the `(j+1)`-th member.
    deadline: Vec<Vec<usize>>,
}

impl Windows {
    /// Fails with [`Error::Infeasible`] when some group's envelope is empty,
    /// or when no complete ranking fits the windows.
    pub fn new(bounds: &PrefixBounds, sizes: &[usize]) -> Result<Self> {
        let n = bounds.len();
        let g = bounds.num_groups();
        if sizes.len() != g {
            return Err(Error::InvalidParameter(format!(
                "{} group sizes for {g} groups",
                sizes.len()
            )));
        }
        if sizes.iter().sum::<usize>() != n {
            return Err(Error::InvalidParameter(format!(
                "group sizes sum to {} but bounds cover {n} positions",
                sizes.iter().sum::<usize>()
            )));
        }
        let mut release = Vec::with_capacity(g);
        let mut deadline = Vec::with_capacity(g);
        for (p, &size) in sizes.iter().enumerate() {
            let size_i = size as i64;
            // hi[l] = min over l' >= l of upper(l'), capped by l and the group size
            let mut hi = vec![0i64; n + 1];
            let mut lo = vec![0i64; n + 1];
            hi[n] = bounds.upper(n, p).min(size_i);
            lo[n] = bounds.lower(n, p).max(size_i);
            for l in (1..n).rev() {
                hi[l] = bounds.upper(l, p).min(hi[l + 1]).min(l as i64);
                lo[l] = bounds.lower(l, p).max(lo[l + 1] - 1).max(0);
            }
            hi[n] = hi[n].min(n as i64);
            if let Some(l) = (1..=n).find(|&l| lo[l] > hi[l] || lo[l] > l as i64) {
                return Err(Error::Infeasible {
                    prefix: l,
                    detail: format!(
                        "group {p} needs at least {} but at most {} members in the top {l}",
                        lo[l], hi[l]
                    ),
                });
            }
            let mut rel = Vec::with_capacity(size);
            let mut dl = Vec::with_capacity(size);
            for j in 1..=size_i {
                rel.push((1..=n).find(|&l| hi[l] >= j).expect("hi[n] = size"));
                dl.push((1..=n).find(|&l| lo[l] >= j).expect("lo[n] = size"));
            }
            release.push(rel);
            deadline.push(dl);
        }
        let w = Self {
            n,
            release,
            deadline,
        };
        w.completion(&vec![0; g], 0)?;
        Ok(w)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn num_groups(&self) -> usize {
        self.release.len()
    }

    /// `(release, deadline)` of the `(j+1)`-th member of group `p`.
    pub fn window(&self, p: usize, j: usize) -> (usize, usize) {
        (self.release[p][j], self.deadline[p][j])
    }

    /// Earliest-deadline-first completion of a partial ranking that has
    /// `counts[p]` members of each group in its top `placed` positions.
    /// Returns the group filling each remaining slot, or the first prefix
    /// length at which no completion exists.
    pub fn completion(&self, counts: &[usize], placed: usize) -> Result<Vec<usize>> {
        let mut next = counts.to_vec();
        let mut seq = Vec::with_capacity(self.n - placed);
        for slot in placed + 1..=self.n {
            let mut best: Option<(usize, usize)> = None;
            for p in 0..next.len() {
                let j = next[p];
                if j >= self.release[p].len() {
                    continue;
                }
                let (r, d) = (self.release[p][j], self.deadline[p][j]);
                if d < slot {
                    return Err(self.missed(p, j, d));
                }
                if r <= slot && best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((p, d));
                }
            }
            match best {
                Some((p, _)) => {
                    next[p] += 1;
                    seq.push(p);
                }
                None => {
                    return Err(Error::Infeasible {
                        prefix: slot,
                        detail: "upper bounds leave position empty".into(),
                    })
                }
            }
        }
        Ok(seq)
    }

    /// True when a partial ranking with `counts` in its top `placed` can
    /// take a member of group `p` next and still be completed.
    pub fn can_place(&self, counts: &[usize], placed: usize, p: usize) -> bool {
        let j = counts[p];
        if j >= self.release[p].len() {
            return false;
        }
        let slot = placed + 1;
        let (r, d) = (self.release[p][j], self.deadline[p][j]);
        if !(r <= slot && slot <= d) {
            return false;
        }
        let mut next = counts.to_vec();
        next[p] += 1;
        self.completion(&next, slot).is_ok()
    }

    fn missed(&self, p: usize, j: usize, d: usize) -> Error {
        Error::Infeasible {
            prefix: d,
            detail: format!("group {p} cannot place member {} by position {d}", j + 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half(n: usize) -> PrefixBounds {
        let spec = FairnessSpec::new(vec![0.5, 0.5], vec![0.5, 0.5], 1).unwrap();
        PrefixBounds::from_spec(&spec, n)
    }

    #[test]
    fn alternation_windows() {
        let w = Windows::new(&half(6), &[3, 3]).unwrap();
        // j-th member of either group must sit at position 2j-1 or 2j
        for p in 0..2 {
            for j in 0..3 {
                assert_eq!(w.window(p, j), (2 * j + 1, 2 * j + 2));
            }
        }
        let seq = w.completion(&[0, 0], 0).unwrap();
        assert_eq!(seq.len(), 6);
        assert!(w.can_place(&[0, 0], 0, 0));
        assert!(!w.can_place(&[1, 0], 1, 0));
        assert!(w.can_place(&[1, 0], 1, 1));
    }

    #[test]
    fn unequal_sizes_are_infeasible_for_halves() {
        let err = Windows::new(&half(6), &[4, 2]).unwrap_err();
        assert!(err.is_infeasibility(), "{err}");
    }

    #[test]
    fn threshold_k_relaxes_short_prefixes() {
        let spec = FairnessSpec::new(vec![0.5, 0.5], vec![0.5, 0.5], 4).unwrap();
        let b = PrefixBounds::from_spec(&spec, 6);
        assert_eq!(b.upper(1, 0), 1);
        assert_eq!(b.upper(3, 1), 3);
        assert_eq!(b.upper(4, 1), 2);
        let w = Windows::new(&b, &[3, 3]).unwrap();
        // AABB is fine at prefix 4, but AAA is not
        assert!(w.can_place(&[1, 0], 1, 0));
        assert!(!w.can_place(&[2, 0], 2, 0));
    }

    #[test]
    fn real_bounds_round_inward() {
        let b = PrefixBounds::from_real(&[vec![0.2, -1.3]], &[vec![1.7, 0.9999999999]]).unwrap();
        assert_eq!(b.lower_row(1), [1, -1]);
        assert_eq!(b.upper_row(1), [1, 1]);
    }
}
