//! Small dense two-phase simplex.
//!
//! Minimizes `c^T x` subject to row constraints over `x >= 0`. Sized for the
//! embedded linear programs of this crate (tens of variables, hundreds of
//! rows); Bland's rule keeps it cycle free.

/// Direction of one constraint row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

/// `minimize c^T x  s.t.  A x (<=|>=|=) b,  x >= 0`.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub minimize: Vec<f64>,
    pub rows: Vec<(Vec<f64>, Cmp, f64)>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpError {
    Infeasible,
    Unbounded,
    IterationLimit,
}

const PIVOT_EPS: f64 = 1e-10;

struct Tableau {
    rows: Vec<Vec<f64>>, // m x (n + 1), last column is the rhs
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let scale = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= scale;
        }
        let pivot_row = self.rows[row].clone();
        for (r, other) in self.rows.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let factor = other[col];
            if factor.abs() <= PIVOT_EPS {
                continue;
            }
            for (v, p) in other.iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
        }
        self.basis[row] = col;
    }

    /// Minimizes `obj` (a full-width cost row) over the current tableau.
    /// Returns the reduced cost row paired with the achieved value.
    fn run(&mut self, obj: &[f64], max_iter: usize) -> Result<(Vec<f64>, f64), LpError> {
        // Reduced costs: z = obj - sum over basis rows.
        let mut z = obj.to_vec();
        let mut value = 0.0;
        for (r, &b) in self.basis.iter().enumerate() {
            let c = z[b];
            if c.abs() <= PIVOT_EPS {
                continue;
            }
            for (j, v) in z.iter_mut().enumerate() {
                *v -= c * self.rows[r][j];
            }
            value -= c * self.rows[r][self.cols];
        }
        for _ in 0..max_iter {
            // Bland: first column with negative reduced cost.
            let Some(col) = (0..self.cols).find(|&j| z[j] < -PIVOT_EPS) else {
                return Ok((z, -value));
            };
            let mut pick: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][col];
                if a > PIVOT_EPS {
                    let ratio = self.rows[r][self.cols] / a;
                    match pick {
                        Some((pr, pratio))
                            if pratio < ratio - PIVOT_EPS
                                || (ratio - pratio).abs() <= PIVOT_EPS
                                    && self.basis[pr] < self.basis[r] => {}
                        _ => pick = Some((r, ratio)),
                    }
                }
            }
            let Some((row, _)) = pick else {
                return Err(LpError::Unbounded);
            };
            self.pivot(row, col);
            let c = z[col];
            for (j, v) in z.iter_mut().enumerate() {
                *v -= c * self.rows[row][j];
            }
            value -= c * self.rows[row][self.cols];
        }
        Err(LpError::IterationLimit)
    }
}

/// Solves the problem, returning the optimal point or the failure kind.
pub fn solve(problem: &LpProblem) -> Result<LpSolution, LpError> {
    let n = problem.minimize.len();
    let m = problem.rows.len();
    // Columns: n structural, then one slack/surplus per inequality, then one
    // artificial per row that needs it.
    let mut slack_of: Vec<Option<usize>> = vec![None; m];
    let mut next = n;
    for (r, (_, cmp, _)) in problem.rows.iter().enumerate() {
        if *cmp != Cmp::Eq {
            slack_of[r] = Some(next);
            next += 1;
        }
    }
    let slack_end = next;
    let mut artificial_of: Vec<Option<usize>> = vec![None; m];
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut basis = vec![usize::MAX; m];
    // First pass to know which rows need artificials (negative rhs flips).
    let mut needs_artificial = vec![false; m];
    for (r, (coeffs, cmp, rhs)) in problem.rows.iter().enumerate() {
        debug_assert_eq!(coeffs.len(), n);
        let flip = *rhs < 0.0;
        let eff_cmp = match (cmp, flip) {
            (Cmp::Le, false) | (Cmp::Ge, true) => Cmp::Le,
            (Cmp::Ge, false) | (Cmp::Le, true) => Cmp::Ge,
            (Cmp::Eq, _) => Cmp::Eq,
        };
        needs_artificial[r] = eff_cmp != Cmp::Le;
    }
    for (r, need) in needs_artificial.iter().enumerate() {
        if *need {
            artificial_of[r] = Some(next);
            next += 1;
        }
    }
    let total = next;

    for (r, (coeffs, cmp, rhs)) in problem.rows.iter().enumerate() {
        let mut row = vec![0.0; total + 1];
        let flip = if *rhs < 0.0 { -1.0 } else { 1.0 };
        for (j, &c) in coeffs.iter().enumerate() {
            row[j] = flip * c;
        }
        row[total] = flip * rhs;
        if let Some(s) = slack_of[r] {
            // Slack sign follows the effective direction after the flip.
            let sign = match (cmp, *rhs < 0.0) {
                (Cmp::Le, false) | (Cmp::Ge, true) => 1.0,
                _ => -1.0,
            };
            row[s] = sign;
            if sign > 0.0 {
                basis[r] = s;
            }
        }
        if let Some(a) = artificial_of[r] {
            row[a] = 1.0;
            basis[r] = a;
        }
        rows.push(row);
    }
    debug_assert!(basis.iter().all(|&b| b != usize::MAX));

    let mut tab = Tableau { rows, basis, cols: total };
    let max_iter = 50 * (total + m + 10);

    if artificial_of.iter().any(Option::is_some) {
        let mut phase1 = vec![0.0; total + 1];
        for a in artificial_of.iter().flatten() {
            phase1[*a] = 1.0;
        }
        let (_, value) = tab.run(&phase1, max_iter)?;
        if value > 1e-7 {
            return Err(LpError::Infeasible);
        }
        // Drive leftover artificials out of the basis where possible.
        for r in 0..m {
            if tab.basis[r] >= slack_end && artificial_of.contains(&Some(tab.basis[r])) {
                if let Some(col) = (0..slack_end).find(|&j| tab.rows[r][j].abs() > 1e-8) {
                    tab.pivot(r, col);
                }
            }
        }
        // Forbid artificial columns from re-entering.
        for row in tab.rows.iter_mut() {
            for a in artificial_of.iter().flatten() {
                row[*a] = 0.0;
            }
        }
    }

    let mut phase2 = vec![0.0; total + 1];
    phase2[..n].copy_from_slice(&problem.minimize);
    let (_, objective) = tab.run(&phase2, max_iter)?;

    let mut x = vec![0.0; n];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rows[r][total];
        }
    }
    Ok(LpSolution { x, objective })
}
