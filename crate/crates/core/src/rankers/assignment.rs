/// Minimum-cost perfect matching on an `n x n` cost matrix given row-major.
/// Returns `col[row]`. O(n^3) shortest augmenting paths with potentials.
pub fn min_cost_assignment(cost: &[f64], n: usize) -> Vec<usize> {
    assert_eq!(cost.len(), n * n, "cost matrix must be n x n");
    assert!(cost.iter().all(|c| c.is_finite()), "costs must be finite");
    // 1-based rows/columns; index 0 is the virtual start column.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col = vec![0usize; n];
    for j in 1..=n {
        col[row_of[j] - 1] = j - 1;
    }
    col
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn brute(cost: &[f64], n: usize) -> f64 {
        fn rec(row: usize, n: usize, used: &mut [bool], cost: &[f64]) -> f64 {
            if row == n {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for j in 0..n {
                if !used[j] {
                    used[j] = true;
                    best = best.min(cost[row * n + j] + rec(row + 1, n, used, cost));
                    used[j] = false;
                }
            }
            best
        }
        rec(0, n, &mut vec![false; n], cost)
    }

    #[test]
    fn identity_is_optimal_for_diagonal_zero() {
        let n = 5;
        let cost: Vec<f64> = (0..n * n)
            .map(|k| if k / n == k % n { 0.0 } else { 1.0 })
            .collect();
        assert_eq!(min_cost_assignment(&cost, n), [0, 1, 2, 3, 4]);
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = rng_from_seed(9);
        for _ in 0..200 {
            let n = rng.random_range(1..=7);
            let cost: Vec<f64> = (0..n * n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let col = min_cost_assignment(&cost, n);
            let mut seen = vec![false; n];
            for &c in &col {
                assert!(!seen[c]);
                seen[c] = true;
            }
            let total: f64 = col.iter().enumerate().map(|(r, &c)| cost[r * n + c]).sum();
            assert!((total - brute(&cost, n)).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_matrix() {
        assert!(min_cost_assignment(&[], 0).is_empty());
    }
}
