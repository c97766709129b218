//! Brute-force reference solvers.
//!
//! Everything here enumerates permutations behind a factorial guard and is
//! meant to ground the fast solvers in tests. Per permutation, jobs are
//! placed at their earliest feasible starts; since utilities are
//! non-increasing this dominates every other start vector for that order,
//! so the enumeration is exact. An optional grid policy additionally sweeps
//! start times over the `release + k * p` grid of equal-duration instances,
//! which is only useful to confirm that the earliest-start policy loses
//! nothing.
//!
//! The permutation space is split by the choice of the first job and, with
//! the `parallel` feature, the branches run on the rayon pool.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Result, SolverError};
use crate::instance::Instance;
use crate::schedule::{report_for_order, Diagnostics, Schedule, SolveReport};
use crate::tol;
use crate::Objective;

/// Hard cap on the factorial guard.
pub const MAX_ORACLE_JOBS: usize = 10;

/// Start-time policy for the enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartPolicy {
    /// Each job starts at `max(release, previous completion)`.
    Earliest,
    /// Additionally sweep starts over the `release + k * duration` grid.
    /// Only supported for equal-duration instances and very small `n`.
    Grid,
}

/// Configuration for the brute-force solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Factorial guard; instances above this are rejected.
    pub max_n: usize,
    pub objective: Objective,
    pub start_policy: StartPolicy,
    /// Evaluate permutation branches on the rayon pool. Ignored when the
    /// crate is built without the `parallel` feature.
    pub parallel: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_n: 9,
            objective: Objective::MaxMin,
            start_policy: StartPolicy::Earliest,
            parallel: true,
        }
    }
}

impl OracleConfig {
    pub fn maxmin() -> Self {
        OracleConfig::default()
    }

    pub fn sum() -> Self {
        OracleConfig {
            objective: Objective::Sum,
            ..OracleConfig::default()
        }
    }

    pub fn sequential(mut self) -> Self {
        self.parallel = false;
        self
    }

    fn guard(&self, n: usize) -> Result<()> {
        let limit = self.max_n.min(MAX_ORACLE_JOBS);
        if n > limit {
            return Err(SolverError::SizeLimit { n, limit });
        }
        Ok(())
    }
}

/// Candidate kept while scanning permutations. Ties on the objective go to
/// the lexicographically smaller order so parallel and sequential runs agree.
#[derive(Debug, Clone)]
pub(crate) struct PermCandidate {
    pub(crate) key: f64,
    pub(crate) order: Vec<usize>,
    starts: Option<Vec<f64>>,
}

impl PermCandidate {
    pub(crate) fn new(key: f64, order: Vec<usize>) -> Self {
        PermCandidate { key, order, starts: None }
    }
}

fn better(current: &Option<PermCandidate>, key: f64, order: &[usize]) -> bool {
    match current {
        None => true,
        Some(b) => key > b.key || (key == b.key && order < b.order.as_slice()),
    }
}

fn merge(a: Option<PermCandidate>, b: Option<PermCandidate>) -> Option<PermCandidate> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            if better(&Some(x.clone()), y.key, &y.order) {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

/// Calls `visit` for every permutation of `pool` appended to `prefix`.
fn permute_rest(prefix: &mut Vec<usize>, pool: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if pool.is_empty() {
        visit(prefix);
        return;
    }
    for i in 0..pool.len() {
        let x = pool.remove(i);
        prefix.push(x);
        permute_rest(prefix, pool, visit);
        prefix.pop();
        pool.insert(i, x);
    }
}

/// Scans all permutations of `0..n`, folding with `eval` which may return a
/// candidate objective key for the order. The scan is split on the first
/// element; with the `parallel` feature and `parallel` set, branches run
/// concurrently and results merge by maximum key.
pub(crate) fn scan_permutations(
    n: usize,
    parallel: bool,
    eval: &(impl Fn(&[usize]) -> Option<PermCandidate> + Sync),
) -> Option<PermCandidate> {
    if n == 0 {
        return None;
    }
    let branch = |first: usize| -> Option<PermCandidate> {
        let mut best: Option<PermCandidate> = None;
        let mut prefix = vec![first];
        let mut pool: Vec<usize> = (0..n).filter(|&j| j != first).collect();
        permute_rest(&mut prefix, &mut pool, &mut |order| {
            if let Some(cand) = eval(order) {
                if better(&best, cand.key, &cand.order) {
                    best = Some(cand);
                }
            }
        });
        best
    };

    #[cfg(feature = "parallel")]
    if parallel {
        return (0..n)
            .into_par_iter()
            .map(branch)
            .reduce(|| None, merge);
    }
    let _ = parallel;
    (0..n).map(branch).fold(None, merge)
}

fn objective_key(inst: &Instance, order: &[usize], objective: Objective) -> f64 {
    let mut free = 0.0_f64;
    let mut min_u = f64::INFINITY;
    let mut sum_u = 0.0_f64;
    for &idx in order {
        let job = inst.job(idx);
        let start = free.max(job.release);
        free = start + job.duration;
        let u = job.utility.eval(free);
        min_u = min_u.min(u);
        sum_u += u;
    }
    match objective {
        Objective::MaxMin => min_u,
        Objective::Sum => sum_u,
    }
}

/// Exhaustive solver for the max-min or total-utility objective.
pub fn brute_force(inst: &Instance, cfg: &OracleConfig) -> Result<SolveReport> {
    cfg.guard(inst.len())?;
    match cfg.start_policy {
        StartPolicy::Earliest => {
            let best = scan_permutations(inst.len(), cfg.parallel, &|order| {
                Some(PermCandidate::new(
                    objective_key(inst, order, cfg.objective),
                    order.to_vec(),
                ))
            })
            .expect("non-empty instance");
            Ok(report_for_order(inst, &best.order, Diagnostics::default()))
        }
        StartPolicy::Grid => brute_force_grid(inst, cfg),
    }
}

/// Grid-policy enumeration for equal-duration instances: per permutation,
/// start times are chosen from the `release + k * duration` grid instead of
/// being forced to the earliest slot.
fn brute_force_grid(inst: &Instance, cfg: &OracleConfig) -> Result<SolveReport> {
    let n = inst.len();
    if n > 6 {
        return Err(SolverError::SizeLimit { n, limit: 6 });
    }
    let p = inst.job(0).duration;
    if !inst.jobs().iter().all(|j| tol::eq(j.duration, p)) {
        return Err(SolverError::UnsupportedVariant(
            "grid start policy requires equal durations".into(),
        ));
    }
    let mut grid: Vec<f64> = Vec::new();
    for job in inst.jobs() {
        for k in 0..n {
            grid.push(job.release + k as f64 * p);
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| tol::eq(*a, *b));

    let eval = |order: &[usize]| -> Option<PermCandidate> {
        // Recursively choose a grid start per position.
        fn go(
            inst: &Instance,
            grid: &[f64],
            order: &[usize],
            pos: usize,
            free: f64,
            min_u: f64,
            sum_u: f64,
            objective: Objective,
            starts: &mut Vec<f64>,
            best: &mut Option<(f64, Vec<f64>)>,
        ) {
            if pos == order.len() {
                let key = match objective {
                    Objective::MaxMin => min_u,
                    Objective::Sum => sum_u,
                };
                if best.as_ref().map_or(true, |(k, _)| key > *k) {
                    *best = Some((key, starts.clone()));
                }
                return;
            }
            let job = inst.job(order[pos]);
            for &t in grid {
                if tol::lt(t, free) || tol::lt(t, job.release) {
                    continue;
                }
                let u = job.utility.eval(t + job.duration);
                starts.push(t);
                go(
                    inst,
                    grid,
                    order,
                    pos + 1,
                    t + job.duration,
                    min_u.min(u),
                    sum_u + u,
                    objective,
                    starts,
                    best,
                );
                starts.pop();
            }
        }
        let mut best = None;
        let mut starts = Vec::with_capacity(order.len());
        go(
            inst,
            &grid,
            order,
            0,
            0.0,
            f64::INFINITY,
            0.0,
            cfg.objective,
            &mut starts,
            &mut best,
        );
        best.map(|(key, starts)| PermCandidate {
            key,
            order: order.to_vec(),
            starts: Some(starts),
        })
    };

    let best = scan_permutations(n, cfg.parallel, &eval)
        .ok_or_else(|| SolverError::Infeasible("no grid placement".into()))?;
    let starts = best.starts.expect("grid eval records starts");
    let entries = best
        .order
        .iter()
        .zip(&starts)
        .map(|(&idx, &start)| crate::schedule::ScheduleEntry {
            job: inst.job(idx).id.clone(),
            start,
        })
        .collect();
    let mut report = crate::schedule::evaluate_schedule(inst, &Schedule::new(entries))?;
    report.diagnostics = Diagnostics::default();
    Ok(report)
}

/// Minimum number of late jobs over all permutations, with a witness order.
pub fn brute_force_late_count(inst: &Instance, cfg: &OracleConfig) -> Result<(usize, Vec<usize>)> {
    cfg.guard(inst.len())?;
    for job in inst.jobs() {
        if job.due_date.is_none() {
            return Err(SolverError::UnsupportedVariant(format!(
                "late-count oracle requires due dates, {} has none",
                job.id
            )));
        }
    }
    let best = scan_permutations(inst.len(), cfg.parallel, &|order| {
        let mut free = 0.0_f64;
        let mut late = 0usize;
        for &idx in order {
            let job = inst.job(idx);
            free = free.max(job.release) + job.duration;
            if !tol::le(free, job.due_date.unwrap()) {
                late += 1;
            }
        }
        Some(PermCandidate::new(-(late as f64), order.to_vec()))
    })
    .expect("non-empty instance");
    Ok(((-best.key) as usize, best.order))
}

/// Best achievable minimum utility over on-time jobs when at most
/// `max_late` jobs may miss their due dates. Late jobs are excluded from the
/// minimum. Returns the optimum value.
pub fn brute_force_bounded_late(inst: &Instance, max_late: usize, cfg: &OracleConfig) -> Result<f64> {
    cfg.guard(inst.len())?;
    let best = scan_permutations(inst.len(), cfg.parallel, &|order| {
        let mut free = 0.0_f64;
        let mut late = 0usize;
        let mut min_on_time = f64::INFINITY;
        for &idx in order {
            let job = inst.job(idx);
            free = free.max(job.release) + job.duration;
            if tol::le(free, job.due_date.unwrap_or(f64::INFINITY)) {
                min_on_time = min_on_time.min(job.utility.eval(free));
            } else {
                late += 1;
            }
        }
        if late > max_late {
            return None;
        }
        Some(PermCandidate::new(min_on_time, order.to_vec()))
    });
    best.map(|b| b.key)
        .ok_or_else(|| SolverError::Infeasible("no order keeps enough jobs on time".into()))
}

/// Exact rescheduling by full enumeration of insertion orders, applying
/// each variant's feasibility closed form per order (individual losses
/// covered, aggregate change plus budget non-negative, or the water-fill
/// shortfall against the fair floor within budget).
pub fn brute_force_resched(
    prob: &crate::resched::ReschedProblem,
    cfg: &OracleConfig,
) -> Result<(SolveReport, crate::resched::Compensation)> {
    crate::resched::solve_by_enumeration(prob, cfg.max_n.min(MAX_ORACLE_JOBS), cfg.parallel)
}

/// Best total utility of on-time jobs when at most `max_late` jobs may be
/// late; late jobs contribute nothing.
pub fn brute_force_sum_on_time(inst: &Instance, max_late: usize, cfg: &OracleConfig) -> Result<f64> {
    cfg.guard(inst.len())?;
    let best = scan_permutations(inst.len(), cfg.parallel, &|order| {
        let mut free = 0.0_f64;
        let mut late = 0usize;
        let mut sum_on_time = 0.0_f64;
        for &idx in order {
            let job = inst.job(idx);
            free = free.max(job.release) + job.duration;
            if tol::le(free, job.due_date.unwrap_or(f64::INFINITY)) {
                sum_on_time += job.utility.eval(free);
            } else {
                late += 1;
            }
        }
        if late > max_late {
            return None;
        }
        Some(PermCandidate::new(sum_on_time, order.to_vec()))
    });
    best.map(|b| b.key)
        .ok_or_else(|| SolverError::Infeasible("no order keeps enough jobs on time".into()))
}
