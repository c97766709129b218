//! Dense assignment solvers backing the unit-duration reductions: a
//! potentials-based Hungarian algorithm for the sum objective and a
//! threshold search with augmenting paths for the bottleneck objective.
//! Profits of `f64::NEG_INFINITY` mark forbidden pairs.

/// Maximum-profit perfect assignment on a square profit matrix.
/// Returns (total profit, column assigned to each row).
pub(crate) fn max_sum_assignment(profit: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let n = profit.len();
    debug_assert!(profit.iter().all(|row| row.len() == n));
    const BIG: f64 = 1e18;
    // Minimize cost = -profit with forbidden pairs mapped to a large cost.
    let cost =
        |i: usize, j: usize| -> f64 { if profit[i][j].is_finite() { -profit[i][j] } else { BIG } };

    // Shortest augmenting path formulation with row/column potentials,
    // 1-based arrays with a virtual row 0.
    let mut u = vec![0.0_f64; n + 1];
    let mut v = vec![0.0_f64; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut matched_row = vec![0usize; n + 1]; // column -> row (1-based)
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
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
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if matched_row[j] != 0 {
            assignment[matched_row[j] - 1] = j - 1;
        }
    }
    let total = (0..n).map(|i| profit[i][assignment[i]]).sum();
    (total, assignment)
}

/// Kuhn's augmenting path over the boolean edge set `allowed`.
fn try_augment(
    row: usize,
    allowed: &dyn Fn(usize, usize) -> bool,
    visited: &mut [bool],
    col_match: &mut [Option<usize>],
    n: usize,
) -> bool {
    for col in 0..n {
        if !allowed(row, col) || visited[col] {
            continue;
        }
        visited[col] = true;
        if col_match[col].is_none()
            || try_augment(col_match[col].unwrap(), allowed, visited, col_match, n)
        {
            col_match[col] = Some(row);
            return true;
        }
    }
    false
}

fn perfect_matching_at(profit: &[Vec<f64>], threshold: f64) -> Option<Vec<usize>> {
    let n = profit.len();
    let allowed = |i: usize, j: usize| profit[i][j] >= threshold;
    let mut col_match: Vec<Option<usize>> = vec![None; n];
    for row in 0..n {
        let mut visited = vec![false; n];
        if !try_augment(row, &allowed, &mut visited, &mut col_match, n) {
            return None;
        }
    }
    let mut assignment = vec![0usize; n];
    for (col, row) in col_match.iter().enumerate() {
        assignment[row.unwrap()] = col;
    }
    Some(assignment)
}

/// Maximizes the minimum profit over perfect assignments. Exact: the answer
/// is one of the finite profit values, found by bisecting their sorted list.
/// Returns None when no perfect assignment exists at all.
pub(crate) fn max_bottleneck_assignment(profit: &[Vec<f64>]) -> Option<(f64, Vec<usize>)> {
    let mut values: Vec<f64> = profit
        .iter()
        .flatten()
        .copied()
        .filter(|p| p.is_finite())
        .collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values.dedup();
    if values.is_empty() {
        return None;
    }
    perfect_matching_at(profit, values[0])?;
    // Largest threshold admitting a perfect matching.
    let (mut lo, mut hi) = (0usize, values.len() - 1);
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        if perfect_matching_at(profit, values[mid]).is_some() {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let assignment = perfect_matching_at(profit, values[lo])?;
    Some((values[lo], assignment))
}
