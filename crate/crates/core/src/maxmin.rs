//! Fair-schedule solvers for instances without release dates.
//!
//! The workhorse is a backward greedy: starting at the total duration `T`,
//! repeatedly place the job with the highest utility at time `T` into the
//! last open slot and shrink `T` by its duration. For non-increasing
//! utilities this is exact for the max-min objective. A generic bracketed
//! search over target utility values is provided as the alternative route:
//! each candidate target maps to per-job due dates through the generalized
//! inverse, and a caller-supplied feasibility test decides the direction.

use crate::error::{Result, SolverError};
use crate::instance::Instance;
use crate::schedule::{report_for_order, Diagnostics, SolveReport};
use crate::tol;

/// Bracket, tolerance and iteration cap for target-value searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinarySearchConfig {
    pub lo: f64,
    pub hi: f64,
    pub eps: f64,
    pub max_iter: usize,
}

impl BinarySearchConfig {
    pub fn bracket(lo: f64, hi: f64) -> Self {
        BinarySearchConfig {
            lo,
            hi,
            eps: tol::EPS,
            max_iter: 200,
        }
    }

    /// Default bounds for an instance: every schedule completes by the
    /// horizon, so `min_j u_j(horizon)` is feasible, and no utility can
    /// exceed `max_j u_j(0)`.
    pub fn for_instance(inst: &Instance) -> Self {
        let horizon = inst.completion_horizon();
        let lo = inst
            .jobs()
            .iter()
            .map(|j| j.utility.eval(horizon))
            .fold(f64::INFINITY, f64::min);
        let hi = inst
            .jobs()
            .iter()
            .map(|j| j.utility.value_at_zero())
            .fold(f64::NEG_INFINITY, f64::max);
        BinarySearchConfig::bracket(lo, hi.max(lo))
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }
}

/// Outcome of a bracketed search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOutcome {
    pub value: f64,
    pub iterations: usize,
}

/// Backward greedy over arbitrary per-index utilities. `eval(j, t)` must be
/// non-increasing in `t` for every `j`. With `deadlines`, only jobs whose
/// deadline covers the current time compete for the last slot; `None` there
/// means the step has no admissible job. Exact ties go to the later-listed
/// candidate, so earlier-listed jobs end up earlier in the schedule.
pub(crate) fn greedy_order(
    durations: &[f64],
    eval: impl Fn(usize, f64) -> f64,
    deadlines: Option<&[f64]>,
) -> Option<Vec<usize>> {
    let n = durations.len();
    let mut alive = vec![true; n];
    let mut order = vec![0usize; n];
    let mut t: f64 = durations.iter().sum();
    for slot in (0..n).rev() {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if !alive[j] {
                continue;
            }
            if let Some(ds) = deadlines {
                if !tol::ge(ds[j], t) {
                    continue;
                }
            }
            let u = eval(j, t);
            match best {
                Some((_, bu)) if u < bu => {}
                _ => best = Some((j, u)),
            }
        }
        let (j, _) = best?;
        order[slot] = j;
        alive[j] = false;
        t -= durations[j];
    }
    Some(order)
}

fn require_no_releases(inst: &Instance, what: &str) -> Result<()> {
    if inst.has_release_dates() {
        return Err(SolverError::UnsupportedVariant(format!(
            "{what} requires all release dates to be zero"
        )));
    }
    Ok(())
}

/// Exact max-min solver for instances without release dates. The returned
/// schedule is idle-free and semi-active.
pub fn max_min_greedy(inst: &Instance) -> Result<SolveReport> {
    require_no_releases(inst, "max_min_greedy")?;
    let durations: Vec<f64> = inst.jobs().iter().map(|j| j.duration).collect();
    let order = greedy_order(&durations, |j, t| inst.job(j).utility.eval(t), None)
        .expect("greedy without deadlines always selects");
    Ok(report_for_order(inst, &order, Diagnostics::default()))
}

/// Max-min greedy treating due dates as hard deadlines: at each backward
/// step only jobs whose due date reaches the current time compete. Requires
/// every job to have a due date and the earliest-due-date order to be
/// feasible.
pub fn max_min_greedy_deadlines(inst: &Instance) -> Result<SolveReport> {
    require_no_releases(inst, "max_min_greedy_deadlines")?;
    let mut pairs = Vec::with_capacity(inst.len());
    for job in inst.jobs() {
        let d = job.due_date.ok_or_else(|| {
            SolverError::UnsupportedVariant(format!(
                "deadline variant requires a due date on every job, {} has none",
                job.id
            ))
        })?;
        pairs.push((job.duration, d));
    }
    let (feasible, _) = edd_check(&pairs);
    if !feasible {
        return Err(SolverError::Infeasible(
            "no schedule meets all due dates".into(),
        ));
    }
    let durations: Vec<f64> = inst.jobs().iter().map(|j| j.duration).collect();
    let deadlines: Vec<f64> = inst.jobs().iter().map(|j| j.due_date.unwrap()).collect();
    let order = greedy_order(
        &durations,
        |j, t| inst.job(j).utility.eval(t),
        Some(&deadlines),
    )
    .ok_or_else(|| SolverError::Infeasible("no schedule meets all due dates".into()))?;
    Ok(report_for_order(inst, &order, Diagnostics::default()))
}

/// Sorts by due date (ties by input position), schedules back to back from 0
/// and reports whether every completion meets its due date. Returns the
/// order with start times either way.
pub fn edd_check(jobs: &[(f64, f64)]) -> (bool, Vec<(usize, f64)>) {
    let mut idx: Vec<usize> = (0..jobs.len()).collect();
    idx.sort_by(|&a, &b| {
        jobs[a]
            .1
            .partial_cmp(&jobs[b].1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut schedule = Vec::with_capacity(jobs.len());
    let mut t = 0.0;
    let mut feasible = true;
    for &j in &idx {
        schedule.push((j, t));
        t += jobs[j].0;
        if !tol::le(t, jobs[j].1) {
            feasible = false;
        }
    }
    (feasible, schedule)
}

/// Bracketed search for the largest target `t` with `feasible(t, dues)`
/// true. The search maps each candidate target to per-job due dates through
/// the generalized inverse before invoking the predicate (`+inf` when the
/// target is always met, `-inf` when it is unreachable even at time 0).
///
/// The bracket must satisfy: `cfg.lo` feasible, and either `cfg.hi` is the
/// global utility cap or `cfg.hi + eps` is infeasible.
pub fn binary_search_maxmin(
    inst: &Instance,
    mut feasible: impl FnMut(f64, &[f64]) -> bool,
    cfg: &BinarySearchConfig,
) -> Result<SearchOutcome> {
    let dues_for = |target: f64| -> Vec<f64> {
        inst.jobs()
            .iter()
            .map(|j| j.utility.inverse(target))
            .collect()
    };
    let mut check = |target: f64| feasible(target, &dues_for(target));

    let mut lo = cfg.lo;
    let mut hi = cfg.hi;
    if lo > hi {
        return Err(SolverError::ContractViolation(format!(
            "search bracket is inverted ({lo} > {hi})"
        )));
    }
    let mut iterations = 0;
    if check(hi) {
        return Ok(SearchOutcome { value: hi, iterations: 1 });
    }
    if !check(lo) {
        return Err(SolverError::ContractViolation(
            "feasibility predicate rejected the lower bracket".into(),
        ));
    }
    iterations += 2;
    while hi - lo > cfg.eps {
        if iterations >= cfg.max_iter {
            return Err(SolverError::NoConvergence(cfg.max_iter));
        }
        let mid = 0.5 * (lo + hi);
        if check(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(SearchOutcome { value: lo, iterations })
}

/// Ratio rule for the total-utility objective: linear utilities, no release
/// dates, jobs sorted by decrease-rate over duration, non-increasing.
pub fn system_optimal_linear(inst: &Instance) -> Result<SolveReport> {
    require_no_releases(inst, "system_optimal_linear")?;
    let mut ratios = Vec::with_capacity(inst.len());
    for (i, job) in inst.jobs().iter().enumerate() {
        let (slope, _) = job.utility.linear_coefficients().ok_or_else(|| {
            SolverError::UnsupportedVariant(format!(
                "system_optimal_linear requires linear utilities, {} is not",
                job.id
            ))
        })?;
        ratios.push((i, slope / job.duration));
    }
    ratios.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });
    let order: Vec<usize> = ratios.into_iter().map(|(i, _)| i).collect();
    Ok(report_for_order(inst, &order, Diagnostics::default()))
}

/// Max-min over range-normalized utilities: each agent's utility is divided
/// by its attainable range before running the greedy. Linear utilities
/// without release dates only (the range has a closed form there).
pub fn kalai_smorodinsky(inst: &Instance) -> Result<SolveReport> {
    let (_, ranges) = crate::schedule::normalize_and_ranges(inst)?;
    let scaled = inst.map_utilities(|_, j| {
        let (slope, intercept) = j.utility.linear_coefficients().unwrap();
        let range = ranges[&j.id];
        if range > 0.0 {
            crate::utility::UtilityFunction::Linear {
                slope: slope / range,
                intercept: intercept / range,
            }
        } else {
            j.utility.clone()
        }
    })?;
    let normalized = max_min_greedy(&scaled)?;
    let order = normalized.schedule.order_indices(&scaled)?;
    Ok(report_for_order(inst, &order, normalized.diagnostics))
}
