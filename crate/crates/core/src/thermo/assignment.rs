//! Row-to-column matching on an overlap matrix.

/// Greedy matching: repeatedly take the largest remaining entry.
/// Returns `assign[row] = col`.
pub(crate) fn greedy_max(weights: &[Vec<f64>]) -> Vec<usize> {
    let n = weights.len();
    let mut entries: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    entries.sort_by(|&(a, b), &(c, d)| weights[c][d].total_cmp(&weights[a][b]).then((a, b).cmp(&(c, d))));
    let mut assign = vec![usize::MAX; n];
    let mut col_used = vec![false; n];
    let mut filled = 0;
    for (i, j) in entries {
        if assign[i] == usize::MAX && !col_used[j] {
            assign[i] = j;
            col_used[j] = true;
            filled += 1;
            if filled == n {
                break;
            }
        }
    }
    assign
}

/// Maximum-weight perfect matching (Hungarian algorithm, O(n^3)).
/// Returns `assign[row] = col`.
pub(crate) fn optimal_max(weights: &[Vec<f64>]) -> Vec<usize> {
    let n = weights.len();
    // Minimize cost = -weight. Potentials u (rows), v (cols), 1-based with a
    // virtual column 0.
    let cost = |i: usize, j: usize| -weights[i - 1][j - 1];
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}

#[cfg(test)]
mod tests {
    use super::*;

    fn total(w: &[Vec<f64>], a: &[usize]) -> f64 {
        a.iter().enumerate().map(|(i, &j)| w[i][j]).sum()
    }

    fn brute_force(w: &[Vec<f64>]) -> f64 {
        fn rec(w: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
            if row == w.len() {
                return 0.0;
            }
            let mut best = f64::NEG_INFINITY;
            for j in 0..w.len() {
                if !used[j] {
                    used[j] = true;
                    best = best.max(w[row][j] + rec(w, row + 1, used));
                    used[j] = false;
                }
            }
            best
        }
        rec(w, 0, &mut vec![false; w.len()])
    }

    #[test]
    fn greedy_can_be_suboptimal_where_hungarian_is_not() {
        let w = vec![vec![0.9, 0.8], vec![0.85, 0.1]];
        assert_eq!(greedy_max(&w), vec![0, 1]);
        assert_eq!(optimal_max(&w), vec![1, 0]);
    }

    #[test]
    fn hungarian_matches_brute_force() {
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for n in 1..=6 {
            for _ in 0..20 {
                let w: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| next()).collect()).collect();
                let a = optimal_max(&w);
                let mut seen = a.clone();
                seen.sort_unstable();
                assert_eq!(seen, (0..n).collect::<Vec<_>>());
                assert!((total(&w, &a) - brute_force(&w)).abs() < 1e-12);
            }
        }
    }
}
