//! Dense O(n^3) Hungarian algorithm (shortest augmenting path with potentials).

/// Minimum-cost perfect matching on a square row-major cost matrix.
///
/// Returns `col_of_row`. All costs must be finite.
pub(crate) fn solve(costs: &[f64], n: usize) -> Vec<usize> {
    debug_assert_eq!(costs.len(), n * n);
    if n == 0 {
        return Vec::new();
    }

    // 1-based potentials; index 0 is the virtual source column.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];

        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = costs[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
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
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }

        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut col_of_row = vec![0usize; n];
    for j in 1..=n {
        if row_of_col[j] > 0 {
            col_of_row[row_of_col[j] - 1] = j - 1;
        }
    }
    col_of_row
}

/// Cost of a matching produced by [`solve`].
pub(crate) fn matching_cost(costs: &[f64], n: usize, col_of_row: &[usize]) -> f64 {
    col_of_row
        .iter()
        .enumerate()
        .map(|(i, &j)| costs[i * n + j])
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn matches_brute_force() {
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64)
        };
        for n in 0..=6 {
            for _ in 0..20 {
                let costs: Vec<f64> = (0..n * n).map(|_| (next() * 100.0).floor()).collect();
                let sol = solve(&costs, n);
                let got = matching_cost(&costs, n, &sol);
                let best = permutations(n)
                    .iter()
                    .map(|p| matching_cost(&costs, n, p))
                    .fold(f64::INFINITY, f64::min);
                let best = if n == 0 { 0.0 } else { best };
                assert_eq!(got, best);
            }
        }
    }
}
