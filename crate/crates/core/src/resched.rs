//! Rescheduling around a newly arriving agent.
//!
//! A solved instance (its fair schedule and utilities) is given; a new job
//! must be inserted so that its own utility is maximal while the original
//! agents are protected, possibly through compensation payments drawn from
//! a budget. Three protection rules are supported:
//!
//! - every original agent keeps at least its old utility (compensations
//!   make up individual losses);
//! - the original agents keep their old utility in aggregate (the budget is
//!   simply added to the total);
//! - every original agent keeps at least the old fair level.
//!
//! The first two rules are solved exactly by permutation enumeration behind
//! a desk-scale guard. The third is polynomial: a search over completion
//! targets for the new job, each decided by running the fair greedy with an
//! artificial top-priority utility for the new job and then water-filling
//! the original agents' utilities with the compensation budget.

use std::collections::BTreeMap;

use crate::adjust::water_fill;
use crate::error::{Result, SolverError};
use crate::instance::{Instance, Job, JobId};
use crate::maxmin::greedy_order;
use crate::oracle::{scan_permutations, PermCandidate};
use crate::schedule::{evaluate_schedule, Diagnostics, Schedule, SolveReport};
use crate::tol;

/// Protection rule for the original agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReschedVariant {
    /// `u_j(new) + comp_j >= u_j(old)` for every original job.
    IndividualNonDecrease,
    /// `sum_j u_j(new) + budget >= sum_j u_j(old)`.
    AggregateNonDecrease,
    /// `u_j(new) + comp_j >= fair floor` for every original job.
    PreserveFairLevel,
}

/// Compensation payments: per-job amounts plus the aggregate actually
/// needed. The aggregate rule assigns no per-job split.
#[derive(Debug, Clone, PartialEq)]
pub struct Compensation {
    pub per_job: BTreeMap<JobId, f64>,
    pub aggregate: f64,
}

/// A rescheduling problem: the solved base, the arriving job, the budget
/// and the protection rule.
#[derive(Debug, Clone)]
pub struct ReschedProblem {
    pub base: Instance,
    pub base_schedule: Schedule,
    pub new_job: Job,
    pub budget: f64,
    pub variant: ReschedVariant,
    /// Floor for [`ReschedVariant::PreserveFairLevel`]; defaults to the
    /// minimum utility of the base schedule.
    pub lower_bound: Option<f64>,
    /// Size guard for the enumeration variants (number of base jobs).
    pub desk_cap: usize,
}

impl ReschedProblem {
    pub fn new(
        base: Instance,
        base_schedule: Schedule,
        new_job: Job,
        budget: f64,
        variant: ReschedVariant,
    ) -> Result<Self> {
        evaluate_schedule(&base, &base_schedule)?;
        if base.index_of(&new_job.id).is_some() {
            return Err(SolverError::InvalidInstance(format!(
                "new job id {} collides with a base job",
                new_job.id
            )));
        }
        if base.has_release_dates() || new_job.release > 0.0 {
            return Err(SolverError::UnsupportedVariant(
                "rescheduling variants are defined without release dates".into(),
            ));
        }
        // The aggregate rule tolerates a negative budget (a required
        // increase of total utility); the per-job rules do not.
        if budget < 0.0 && variant != ReschedVariant::AggregateNonDecrease {
            return Err(SolverError::ContractViolation(
                "compensation budget must be non-negative".into(),
            ));
        }
        Ok(ReschedProblem {
            base,
            base_schedule,
            new_job,
            budget,
            variant,
            lower_bound: None,
            desk_cap: 9,
        })
    }

    pub fn with_lower_bound(mut self, floor: f64) -> Self {
        self.lower_bound = Some(floor);
        self
    }

    pub fn with_desk_cap(mut self, cap: usize) -> Self {
        self.desk_cap = cap;
        self
    }

    /// Base jobs followed by the new job.
    pub fn extended_instance(&self) -> Instance {
        let mut jobs = self.base.jobs().to_vec();
        jobs.push(self.new_job.clone());
        Instance::new(jobs).expect("validated parts")
    }

    /// Utilities of the original jobs in the base schedule, by base index.
    pub fn base_utilities(&self) -> Vec<f64> {
        let report = evaluate_schedule(&self.base, &self.base_schedule)
            .expect("validated at construction");
        self.base
            .jobs()
            .iter()
            .map(|j| report.per_job_utility[&j.id])
            .collect()
    }

    /// Fair floor protected by [`ReschedVariant::PreserveFairLevel`].
    pub fn fair_floor(&self) -> f64 {
        self.lower_bound.unwrap_or_else(|| {
            self.base_utilities()
                .into_iter()
                .fold(f64::INFINITY, f64::min)
        })
    }
}

/// Utility change of each original agent between the base schedule and `s`,
/// compensation included. Compensation entries must be non-negative and
/// refer to base jobs.
pub fn disruption(
    prob: &ReschedProblem,
    s: &Schedule,
    comp: &BTreeMap<JobId, f64>,
) -> Result<BTreeMap<JobId, f64>> {
    for (id, &beta) in comp {
        if prob.base.index_of(id).is_none() {
            return Err(SolverError::ContractViolation(format!(
                "compensation names unknown job {id}"
            )));
        }
        if beta < 0.0 {
            return Err(SolverError::ContractViolation(format!(
                "compensation of {id} is negative ({beta})"
            )));
        }
    }
    let ext = prob.extended_instance();
    let new_report = evaluate_schedule(&ext, s)?;
    let base_u = prob.base_utilities();
    Ok(prob
        .base
        .jobs()
        .iter()
        .enumerate()
        .map(|(i, job)| {
            let beta = comp.get(&job.id).copied().unwrap_or(0.0);
            let delta = new_report.per_job_utility[&job.id] + beta - base_u[i];
            (job.id.clone(), delta)
        })
        .collect())
}

fn compensation_for(
    prob: &ReschedProblem,
    report: &SolveReport,
    floor_per_job: &[f64],
) -> Compensation {
    let mut per_job = BTreeMap::new();
    let mut aggregate = 0.0;
    for (i, job) in prob.base.jobs().iter().enumerate() {
        let shortfall = (floor_per_job[i] - report.per_job_utility[&job.id]).max(0.0);
        aggregate += shortfall;
        if prob.variant != ReschedVariant::AggregateNonDecrease {
            per_job.insert(job.id.clone(), shortfall);
        }
    }
    if prob.variant == ReschedVariant::AggregateNonDecrease {
        per_job = prob
            .base
            .jobs()
            .iter()
            .map(|j| (j.id.clone(), 0.0))
            .collect();
    }
    Compensation { per_job, aggregate }
}

/// Exact solver by permutation enumeration; shared with the oracle. The
/// guard counts the extended job set.
pub(crate) fn solve_by_enumeration(
    prob: &ReschedProblem,
    max_jobs: usize,
    parallel: bool,
) -> Result<(SolveReport, Compensation)> {
    let ext = prob.extended_instance();
    let n1 = ext.len();
    if n1 > max_jobs {
        return Err(SolverError::SizeLimit { n: n1, limit: max_jobs });
    }
    let new_idx = n1 - 1;
    let base_u = prob.base_utilities();
    let floor = match prob.variant {
        ReschedVariant::PreserveFairLevel => prob.fair_floor(),
        _ => 0.0,
    };
    let budget = prob.budget;
    let variant = prob.variant;

    let best = scan_permutations(n1, parallel, &|order| {
        let mut t = 0.0_f64;
        let mut u_new = 0.0_f64;
        let mut need = 0.0_f64;
        let mut aggregate_change = 0.0_f64;
        for &idx in order {
            let job = ext.job(idx);
            t += job.duration;
            let u = job.utility.eval(t);
            if idx == new_idx {
                u_new = u;
            } else {
                match variant {
                    ReschedVariant::IndividualNonDecrease => {
                        need += (base_u[idx] - u).max(0.0)
                    }
                    ReschedVariant::AggregateNonDecrease => {
                        aggregate_change += u - base_u[idx]
                    }
                    ReschedVariant::PreserveFairLevel => need += (floor - u).max(0.0),
                }
            }
        }
        let feasible = match variant {
            ReschedVariant::AggregateNonDecrease => {
                tol::ge(aggregate_change + budget, 0.0)
            }
            _ => tol::le(need, budget),
        };
        feasible.then(|| PermCandidate::new(u_new, order.to_vec()))
    });
    let best = best.ok_or_else(|| {
        SolverError::Infeasible("no insertion order satisfies the protection rule".into())
    })?;
    let report = crate::schedule::report_for_order(&ext, &best.order, Diagnostics::default());
    let floors: Vec<f64> = match prob.variant {
        ReschedVariant::IndividualNonDecrease => base_u,
        ReschedVariant::AggregateNonDecrease => base_u,
        ReschedVariant::PreserveFairLevel => vec![prob.fair_floor(); prob.base.len()],
    };
    let comp = compensation_for(prob, &report, &floors);
    Ok((report, comp))
}

/// Artificial utility level strictly above everything a real job can reach.
fn priority_level(ext: &Instance) -> f64 {
    ext.jobs()
        .iter()
        .map(|j| j.utility.value_at_zero())
        .fold(0.0_f64, f64::max)
        + 1.0
}

/// Subset cap for the exact shortfall dynamic program.
const SHORTFALL_DP_CAP: usize = 20;

/// Minimum total shortfall against `floor` over all schedules completing
/// the new job by `target`, by dynamic programming over prefix subsets.
/// Exact; exponential in the job count, so guarded by
/// [`SHORTFALL_DP_CAP`]. Returns the witness order when within budget.
fn min_shortfall_schedule(
    prob: &ReschedProblem,
    ext: &Instance,
    target: f64,
    floor: f64,
) -> Option<Schedule> {
    let n1 = ext.len();
    let new_idx = n1 - 1;
    let full: usize = (1 << n1) - 1;
    let durations: Vec<f64> = ext.jobs().iter().map(|j| j.duration).collect();
    let mut cost = vec![f64::INFINITY; full + 1];
    let mut parent = vec![usize::MAX; full + 1];
    let mut psum = vec![0.0_f64; full + 1];
    for mask in 1..=full {
        let low = mask.trailing_zeros() as usize;
        psum[mask] = psum[mask & (mask - 1)] + durations[low];
    }
    cost[0] = 0.0;
    for mask in 0..=full {
        if !cost[mask].is_finite() {
            continue;
        }
        for j in 0..n1 {
            if mask & (1 << j) != 0 {
                continue;
            }
            let next = mask | (1 << j);
            let completion = psum[next];
            let step = if j == new_idx {
                if tol::le(completion, target) {
                    0.0
                } else {
                    continue;
                }
            } else {
                (floor - ext.job(j).utility.eval(completion)).max(0.0)
            };
            let c = cost[mask] + step;
            if c < cost[next] {
                cost[next] = c;
                parent[next] = j;
            }
        }
    }
    if !tol::le(cost[full], prob.budget) {
        return None;
    }
    let mut order_rev = Vec::with_capacity(n1);
    let mut mask = full;
    while mask != 0 {
        let j = parent[mask];
        order_rev.push(j);
        mask &= !(1 << j);
    }
    order_rev.reverse();
    Some(Schedule::from_order(ext, &order_rev))
}

/// Feasibility of one completion target for the fair-floor variant: run the
/// greedy with the new job carrying a top-priority step utility, then cover
/// the original agents' shortfalls against the floor from the budget. The
/// greedy basis can under-report feasibility (it balances the minimum while
/// the budget test is a sum), so a negative verdict is re-checked by the
/// exact subset program when the instance is small enough.
fn preserve_fair_feasible(
    prob: &ReschedProblem,
    ext: &Instance,
    target: f64,
    floor: f64,
) -> Option<Schedule> {
    greedy_waterfill_feasible(prob, ext, target, floor).or_else(|| {
        if ext.len() <= SHORTFALL_DP_CAP {
            min_shortfall_schedule(prob, ext, target, floor)
        } else {
            None
        }
    })
}

fn greedy_waterfill_feasible(
    prob: &ReschedProblem,
    ext: &Instance,
    target: f64,
    floor: f64,
) -> Option<Schedule> {
    let new_idx = ext.len() - 1;
    let level = priority_level(ext);
    let durations: Vec<f64> = ext.jobs().iter().map(|j| j.duration).collect();
    let order = greedy_order(
        &durations,
        |j, t| {
            if j == new_idx {
                if tol::le(t, target) {
                    level
                } else {
                    0.0
                }
            } else {
                ext.job(j).utility.eval(t)
            }
        },
        None,
    )
    .expect("greedy without deadlines always selects");
    let schedule = Schedule::from_order(ext, &order);
    let report = evaluate_schedule(ext, &schedule).expect("constructed order");
    let completions = schedule.completions(ext).unwrap();
    let pos_new = order.iter().position(|&j| j == new_idx).unwrap();
    if !tol::le(completions[pos_new], target) {
        return None;
    }
    // Water fill over the original agents only.
    let originals: Vec<f64> = prob
        .base
        .jobs()
        .iter()
        .map(|j| report.per_job_utility[&j.id])
        .collect();
    let need: f64 = originals.iter().map(|&u| (floor - u).max(0.0)).sum();
    if !tol::le(need, prob.budget) {
        return None;
    }
    if prob.budget > 0.0 {
        // The filled level is what the budget can guarantee; the shortfall
        // test above is its binding form.
        debug_assert!(tol::ge(water_fill(&originals, prob.budget).level, floor));
    }
    Some(schedule)
}

/// Solves the rescheduling problem. The two per-permutation variants run
/// the exact enumeration behind the desk-scale cap; the fair-floor variant
/// runs the polynomial target search (integer targets when all durations
/// are integral, bisection otherwise).
pub fn resched_solve(prob: &ReschedProblem) -> Result<(SolveReport, Compensation)> {
    match prob.variant {
        ReschedVariant::IndividualNonDecrease | ReschedVariant::AggregateNonDecrease => {
            solve_by_enumeration(prob, prob.desk_cap + 1, true)
        }
        ReschedVariant::PreserveFairLevel => solve_preserve_fair(prob),
    }
}

fn solve_preserve_fair(prob: &ReschedProblem) -> Result<(SolveReport, Compensation)> {
    let ext = prob.extended_instance();
    let floor = prob.fair_floor();
    let total = ext.total_duration();
    let p_new = prob.new_job.duration;
    let integral = ext.jobs().iter().all(|j| tol::is_integer(j.duration));

    let mut iterations = 0usize;
    let mut best: Schedule;
    if integral {
        let mut lo = p_new.round() as i64;
        let mut hi = total.round() as i64;
        match preserve_fair_feasible(prob, &ext, hi as f64, floor) {
            Some(s) => best = s,
            None => {
                return Err(SolverError::Infeasible(
                    "even appending the new job last violates the floor".into(),
                ))
            }
        }
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            iterations += 1;
            match preserve_fair_feasible(prob, &ext, mid as f64, floor) {
                Some(s) => {
                    best = s;
                    hi = mid;
                }
                None => lo = mid + 1,
            }
        }
    } else {
        let mut lo = p_new;
        let mut hi = total;
        match preserve_fair_feasible(prob, &ext, hi, floor) {
            Some(s) => best = s,
            None => {
                return Err(SolverError::Infeasible(
                    "even appending the new job last violates the floor".into(),
                ))
            }
        }
        if let Some(s) = preserve_fair_feasible(prob, &ext, lo, floor) {
            best = s;
        } else {
            while hi - lo > tol::EPS && iterations < 200 {
                let mid = 0.5 * (lo + hi);
                iterations += 1;
                match preserve_fair_feasible(prob, &ext, mid, floor) {
                    Some(s) => {
                        best = s;
                        hi = mid;
                    }
                    None => lo = mid,
                }
            }
        }
    }
    let schedule = best;
    let mut report = evaluate_schedule(&ext, &schedule)?;
    report.diagnostics = Diagnostics {
        iterations,
        tolerance: tol::EPS,
    };
    let floors = vec![floor; prob.base.len()];
    let comp = compensation_for(prob, &report, &floors);
    Ok((report, comp))
}

/// Fair-floor variant without compensations, decided per target by the
/// deadline-filtered greedy: the new job gets the candidate completion as a
/// hard deadline and top priority; a target is feasible when the new job
/// meets it and every original stays at or above the floor.
pub fn na3_zero_budget(prob: &ReschedProblem) -> Result<(SolveReport, Compensation)> {
    if prob.variant != ReschedVariant::PreserveFairLevel {
        return Err(SolverError::UnsupportedVariant(
            "the zero-budget route only applies to the fair-floor variant".into(),
        ));
    }
    if prob.budget.abs() > tol::EPS {
        return Err(SolverError::ContractViolation(
            "the zero-budget route requires a zero budget".into(),
        ));
    }
    let ext = prob.extended_instance();
    let new_idx = ext.len() - 1;
    let floor = prob.fair_floor();
    let level = priority_level(&ext);
    let durations: Vec<f64> = ext.jobs().iter().map(|j| j.duration).collect();
    let total = ext.total_duration();
    let p_new = prob.new_job.duration;

    let feasible = |target: f64| -> Option<Schedule> {
        let deadlines: Vec<f64> = (0..ext.len())
            .map(|j| if j == new_idx { target } else { f64::INFINITY })
            .collect();
        let order = greedy_order(
            &durations,
            |j, t| {
                if j == new_idx {
                    level
                } else {
                    ext.job(j).utility.eval(t)
                }
            },
            Some(&deadlines),
        )?;
        let schedule = Schedule::from_order(&ext, &order);
        let report = evaluate_schedule(&ext, &schedule).ok()?;
        let completions = schedule.completions(&ext).ok()?;
        let pos_new = order.iter().position(|&j| j == new_idx).unwrap();
        if !tol::le(completions[pos_new], target) {
            return None;
        }
        let ok = prob
            .base
            .jobs()
            .iter()
            .all(|j| tol::ge(report.per_job_utility[&j.id], floor));
        ok.then_some(schedule)
    };

    let integral = ext.jobs().iter().all(|j| tol::is_integer(j.duration));
    let mut iterations = 0usize;
    let mut best = feasible(total).ok_or_else(|| {
        SolverError::Infeasible("even appending the new job last violates the floor".into())
    })?;
    if integral {
        let mut lo = p_new.round() as i64;
        let mut hi = total.round() as i64;
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            iterations += 1;
            match feasible(mid as f64) {
                Some(s) => {
                    best = s;
                    hi = mid;
                }
                None => lo = mid + 1,
            }
        }
    } else {
        let mut lo = p_new;
        let mut hi = total;
        while hi - lo > tol::EPS && iterations < 200 {
            let mid = 0.5 * (lo + hi);
            iterations += 1;
            match feasible(mid) {
                Some(s) => {
                    best = s;
                    hi = mid;
                }
                None => lo = mid,
            }
        }
    }
    let mut report = evaluate_schedule(&ext, &best)?;
    report.diagnostics = Diagnostics {
        iterations,
        tolerance: tol::EPS,
    };
    let comp = Compensation {
        per_job: prob.base.jobs().iter().map(|j| (j.id.clone(), 0.0)).collect(),
        aggregate: 0.0,
    };
    Ok((report, comp))
}

/// Lexicographic extension of the zero-budget route: minimize the listed
/// jobs' completion times in priority order, freezing each optimum as a
/// hard deadline before moving to the next. All original jobs stay at or
/// above the floor throughout. Returns the final schedule and the frozen
/// completion time per priority job.
pub fn na3_lexicographic(
    prob: &ReschedProblem,
    priority: &[JobId],
) -> Result<(SolveReport, Vec<(JobId, f64)>)> {
    if prob.variant != ReschedVariant::PreserveFairLevel {
        return Err(SolverError::UnsupportedVariant(
            "the lexicographic extension only applies to the fair-floor variant".into(),
        ));
    }
    if prob.budget.abs() > tol::EPS {
        return Err(SolverError::ContractViolation(
            "the lexicographic extension requires a zero budget".into(),
        ));
    }
    let ext = prob.extended_instance();
    let new_idx = ext.len() - 1;
    let floor = prob.fair_floor();
    let level = priority_level(&ext);
    let durations: Vec<f64> = ext.jobs().iter().map(|j| j.duration).collect();
    let total = ext.total_duration();
    let integral = ext.jobs().iter().all(|j| tol::is_integer(j.duration));

    let mut fixed: Vec<(usize, f64)> = Vec::new();
    let mut frozen: Vec<(JobId, f64)> = Vec::new();
    let mut last: Option<Schedule> = None;

    for id in priority {
        let q = ext
            .index_of(id)
            .ok_or_else(|| SolverError::InvalidInstance(format!("no job {id}")))?;
        if fixed.iter().any(|&(j, _)| j == q) {
            return Err(SolverError::ContractViolation(format!(
                "job {id} listed twice in the priority order"
            )));
        }
        let feasible = |target: f64| -> Option<Schedule> {
            let mut deadlines = vec![f64::INFINITY; ext.len()];
            for &(j, c) in &fixed {
                deadlines[j] = c;
            }
            deadlines[q] = deadlines[q].min(target);
            let order = greedy_order(
                &durations,
                |j, t| {
                    if j == new_idx || fixed.iter().any(|&(f, _)| f == j) || j == q {
                        // Priority jobs never drag the greedy's minimum.
                        level
                    } else {
                        ext.job(j).utility.eval(t)
                    }
                },
                Some(&deadlines),
            )?;
            let schedule = Schedule::from_order(&ext, &order);
            let report = evaluate_schedule(&ext, &schedule).ok()?;
            let completions = schedule.completions(&ext).ok()?;
            for (pos, &j) in order.iter().enumerate() {
                if !tol::le(completions[pos], deadlines[j]) {
                    return None;
                }
            }
            let ok = prob
                .base
                .jobs()
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != q && !fixed.iter().any(|&(f, _)| f == *i))
                .all(|(_, j)| tol::ge(report.per_job_utility[&j.id], floor));
            ok.then_some(schedule)
        };

        let p_q = ext.job(q).duration;
        let mut best = match feasible(total) {
            Some(s) => s,
            None => {
                return Err(SolverError::Infeasible(format!(
                    "no schedule meets the frozen deadlines and the floor while finishing {id}"
                )))
            }
        };
        let star;
        if integral {
            let mut lo = p_q.round() as i64;
            let mut hi = total.round() as i64;
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                match feasible(mid as f64) {
                    Some(s) => {
                        best = s;
                        hi = mid;
                    }
                    None => lo = mid + 1,
                }
            }
            star = hi as f64;
        } else {
            let mut lo = p_q;
            let mut hi = total;
            let mut iterations = 0;
            while hi - lo > tol::EPS && iterations < 200 {
                let mid = 0.5 * (lo + hi);
                iterations += 1;
                match feasible(mid) {
                    Some(s) => {
                        best = s;
                        hi = mid;
                    }
                    None => lo = mid,
                }
            }
            star = hi;
        }
        fixed.push((q, star));
        frozen.push((id.clone(), star));
        last = Some(best);
    }

    let schedule = last.ok_or_else(|| {
        SolverError::ContractViolation("empty priority list".into())
    })?;
    let report = evaluate_schedule(&ext, &schedule)?;
    Ok((report, frozen))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxmin::max_min_greedy;

    fn base_instance() -> (Instance, Schedule) {
        let inst = Instance::new(vec![
            Job::linear("a", 2.0, 1.0, 12.0),
            Job::linear("b", 1.0, 2.0, 13.0),
            Job::linear("c", 1.0, 1.0, 8.0),
        ])
        .unwrap();
        let fair = max_min_greedy(&inst).unwrap();
        (inst, fair.schedule)
    }

    #[test]
    fn disruption_zero_when_appended_with_zero_comp() {
        let (inst, sched) = base_instance();
        let new_job = Job::linear("x", 2.0, 1.0, 20.0);
        let prob = ReschedProblem::new(
            inst.clone(),
            sched.clone(),
            new_job.clone(),
            0.0,
            ReschedVariant::IndividualNonDecrease,
        )
        .unwrap();
        let mut entries = sched.entries().to_vec();
        let t = inst.total_duration();
        entries.push(crate::schedule::ScheduleEntry {
            job: new_job.id.clone(),
            start: t,
        });
        let appended = Schedule::new(entries);
        let deltas = disruption(&prob, &appended, &BTreeMap::new()).unwrap();
        assert!(deltas.values().all(|&d| d.abs() < 1e-12));
    }

    #[test]
    fn disruption_tracks_shift_and_rejects_negative_comp() {
        let (inst, sched) = base_instance();
        let new_job = Job::linear("x", 1.0, 1.0, 20.0);
        let prob = ReschedProblem::new(
            inst.clone(),
            sched.clone(),
            new_job.clone(),
            0.0,
            ReschedVariant::IndividualNonDecrease,
        )
        .unwrap();
        // Insert the new job first: every original completes one unit later.
        let mut entries = vec![crate::schedule::ScheduleEntry {
            job: new_job.id.clone(),
            start: 0.0,
        }];
        for e in sched.entries() {
            entries.push(crate::schedule::ScheduleEntry {
                job: e.job.clone(),
                start: e.start + 1.0,
            });
        }
        let shifted = Schedule::new(entries);
        let deltas = disruption(&prob, &shifted, &BTreeMap::new()).unwrap();
        for (i, job) in inst.jobs().iter().enumerate() {
            let (slope, _) = inst.job(i).utility.linear_coefficients().unwrap();
            assert!((deltas[&job.id] + slope).abs() < 1e-12);
        }
        let mut bad = BTreeMap::new();
        bad.insert(JobId::new("a"), -1.0);
        assert!(matches!(
            disruption(&prob, &shifted, &bad),
            Err(SolverError::ContractViolation(_))
        ));
    }

    #[test]
    fn individual_rule_with_zero_budget_appends_for_free() {
        let (inst, sched) = base_instance();
        let new_job = Job::linear("x", 2.0, 1.0, 20.0);
        let prob = ReschedProblem::new(
            inst,
            sched,
            new_job,
            0.0,
            ReschedVariant::IndividualNonDecrease,
        )
        .unwrap();
        let (report, comp) = resched_solve(&prob).unwrap();
        // No budget: the new job must slot in without hurting anyone, which
        // means completing last here.
        let last = report.schedule.entries().last().unwrap();
        assert_eq!(last.job.as_str(), "x");
        assert!(comp.aggregate.abs() < 1e-9);
    }

    #[test]
    fn aggregate_rule_with_big_budget_puts_new_job_first() {
        let (inst, sched) = base_instance();
        let new_job = Job::linear("x", 1.0, 3.0, 30.0);
        let prob = ReschedProblem::new(
            inst,
            sched,
            new_job,
            1000.0,
            ReschedVariant::AggregateNonDecrease,
        )
        .unwrap();
        let (report, _) = resched_solve(&prob).unwrap();
        assert_eq!(report.schedule.entries()[0].job.as_str(), "x");
        assert!((report.per_job_utility[&"x".into()] - 27.0).abs() < 1e-9);
    }

    #[test]
    fn variant_dominance_ordering() {
        let (inst, sched) = base_instance();
        let new_job = Job::linear("x", 2.0, 2.0, 18.0);
        let budget = 3.0;
        let u = |variant: ReschedVariant, budget: f64| -> f64 {
            let prob =
                ReschedProblem::new(inst.clone(), sched.clone(), new_job.clone(), budget, variant)
                    .unwrap();
            let (report, _) = resched_solve(&prob).unwrap();
            report.per_job_utility[&"x".into()]
        };
        let na1_zero = u(ReschedVariant::IndividualNonDecrease, 0.0);
        let na1 = u(ReschedVariant::IndividualNonDecrease, budget);
        let na2 = u(ReschedVariant::AggregateNonDecrease, budget);
        assert!(na2 >= na1 - 1e-9);
        assert!(na1 >= na1_zero - 1e-9);
    }

    #[test]
    fn fair_floor_route_matches_enumeration() {
        let (inst, sched) = base_instance();
        let new_job = Job::linear("x", 2.0, 2.0, 18.0);
        for budget in [0.0, 1.0, 4.0] {
            let prob = ReschedProblem::new(
                inst.clone(),
                sched.clone(),
                new_job.clone(),
                budget,
                ReschedVariant::PreserveFairLevel,
            )
            .unwrap();
            let (fast, comp) = resched_solve(&prob).unwrap();
            let (slow, _) = solve_by_enumeration(&prob, 10, false).unwrap();
            assert!(
                (fast.per_job_utility[&"x".into()] - slow.per_job_utility[&"x".into()]).abs()
                    < 1e-9,
                "budget {budget}"
            );
            // Every original is at or above the floor once compensated.
            let floor = prob.fair_floor();
            for job in prob.base.jobs() {
                let u = fast.per_job_utility[&job.id] + comp.per_job[&job.id];
                assert!(u >= floor - 1e-9);
            }
            let spent: f64 = comp.per_job.values().sum();
            assert!(spent <= budget + 1e-9);
        }
    }

    #[test]
    fn fair_floor_zero_budget_routes_agree() {
        let (inst, sched) = base_instance();
        let new_job = Job::linear("x", 1.0, 1.0, 9.0);
        let prob = ReschedProblem::new(
            inst,
            sched,
            new_job,
            0.0,
            ReschedVariant::PreserveFairLevel,
        )
        .unwrap();
        let (general, _) = resched_solve(&prob).unwrap();
        let (special, _) = na3_zero_budget(&prob).unwrap();
        assert!(
            (general.per_job_utility[&"x".into()] - special.per_job_utility[&"x".into()]).abs()
                < 1e-9
        );
    }

    #[test]
    fn lexicographic_first_entry_matches_single_target_route() {
        let (inst, sched) = base_instance();
        let new_job = Job::linear("x", 1.0, 1.0, 9.0);
        let prob = ReschedProblem::new(
            inst,
            sched,
            new_job,
            0.0,
            ReschedVariant::PreserveFairLevel,
        )
        .unwrap();
        let (single, _) = na3_zero_budget(&prob).unwrap();
        let single_c = single
            .schedule
            .entries()
            .iter()
            .find(|e| e.job.as_str() == "x")
            .map(|e| e.start + 1.0)
            .unwrap();
        let (_, frozen) = na3_lexicographic(&prob, &[JobId::new("x")]).unwrap();
        assert_eq!(frozen.len(), 1);
        assert!((frozen[0].1 - single_c).abs() < 1e-9);
    }

    #[test]
    fn lexicographic_second_job_improves_without_hurting_first() {
        let (inst, sched) = base_instance();
        let new_job = Job::linear("x", 1.0, 1.0, 9.0);
        let prob = ReschedProblem::new(
            inst,
            sched,
            new_job,
            0.0,
            ReschedVariant::PreserveFairLevel,
        )
        .unwrap();
        let (report, frozen) =
            na3_lexicographic(&prob, &[JobId::new("x"), JobId::new("b")]).unwrap();
        let ext = prob.extended_instance();
        let completion_of = |id: &str| -> f64 {
            report
                .schedule
                .entries()
                .iter()
                .find(|e| e.job.as_str() == id)
                .map(|e| e.start + ext.job(ext.index_of(&e.job).unwrap()).duration)
                .unwrap()
        };
        assert!(completion_of("x") <= frozen[0].1 + 1e-9);
        assert!(completion_of("b") <= frozen[1].1 + 1e-9);
    }

    #[test]
    fn negative_budget_allowed_only_for_aggregate_rule() {
        let (inst, sched) = base_instance();
        let new_job = Job::linear("x", 1.0, 1.0, 9.0);
        assert!(ReschedProblem::new(
            inst.clone(),
            sched.clone(),
            new_job.clone(),
            -2.0,
            ReschedVariant::AggregateNonDecrease,
        )
        .is_ok());
        assert!(matches!(
            ReschedProblem::new(
                inst,
                sched,
                new_job,
                -2.0,
                ReschedVariant::IndividualNonDecrease,
            ),
            Err(SolverError::ContractViolation(_))
        ));
    }

    #[test]
    fn desk_cap_guards_enumeration() {
        let jobs: Vec<Job> = (0..10)
            .map(|i| Job::linear(format!("j{i}"), 1.0, 1.0, 30.0))
            .collect();
        let inst = Instance::new(jobs).unwrap();
        let sched = max_min_greedy(&inst).unwrap().schedule;
        let prob = ReschedProblem::new(
            inst,
            sched,
            Job::linear("x", 1.0, 1.0, 9.0),
            0.0,
            ReschedVariant::IndividualNonDecrease,
        )
        .unwrap();
        assert!(matches!(
            resched_solve(&prob),
            Err(SolverError::SizeLimit { .. })
        ));
    }
}
