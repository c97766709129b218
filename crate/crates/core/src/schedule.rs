//! Schedules, evaluation, and utility normalization.

use std::collections::BTreeMap;

use crate::error::{Result, SolverError};
use crate::instance::{Instance, JobId};
use crate::tol;

/// One scheduled job with an explicit start time. Idle time between entries
/// is allowed; overlap is not.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleEntry {
    pub job: JobId,
    pub start: f64,
}

/// An ordered sequence of jobs with explicit starts.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    entries: Vec<ScheduleEntry>,
}

impl Schedule {
    pub fn new(entries: Vec<ScheduleEntry>) -> Self {
        Schedule { entries }
    }

    /// Earliest-start schedule for the given job order: each job starts at
    /// the maximum of its release date and the previous completion.
    pub fn from_order(inst: &Instance, order: &[usize]) -> Schedule {
        let mut entries = Vec::with_capacity(order.len());
        let mut free = 0.0_f64;
        for &idx in order {
            let job = inst.job(idx);
            let start = free.max(job.release);
            entries.push(ScheduleEntry {
                job: job.id.clone(),
                start,
            });
            free = start + job.duration;
        }
        Schedule { entries }
    }

    pub fn entries(&self) -> &[ScheduleEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Instance indices in sequence order.
    pub fn order_indices(&self, inst: &Instance) -> Result<Vec<usize>> {
        self.entries
            .iter()
            .map(|e| {
                inst.index_of(&e.job).ok_or_else(|| {
                    SolverError::InvalidSchedule(format!("unknown job {}", e.job))
                })
            })
            .collect()
    }

    /// Completion time per entry, in sequence order.
    pub fn completions(&self, inst: &Instance) -> Result<Vec<f64>> {
        self.order_indices(inst).map(|order| {
            order
                .iter()
                .zip(&self.entries)
                .map(|(&idx, e)| e.start + inst.job(idx).duration)
                .collect()
        })
    }
}

/// Iteration count and tolerance actually used by a solver run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub iterations: usize,
    pub tolerance: f64,
}

impl Default for Diagnostics {
    fn default() -> Self {
        Diagnostics {
            iterations: 0,
            tolerance: tol::EPS,
        }
    }
}

/// A solved schedule together with its per-agent utilities.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub schedule: Schedule,
    pub per_job_utility: BTreeMap<JobId, f64>,
    pub min_utility: f64,
    pub total_utility: f64,
    pub diagnostics: Diagnostics,
}

impl SolveReport {
    pub fn utility_of(&self, id: &JobId) -> Option<f64> {
        self.per_job_utility.get(id).copied()
    }
}

/// Validates `s` against the instance and scores it. Errors name the first
/// violated invariant.
pub fn evaluate_schedule(inst: &Instance, s: &Schedule) -> Result<SolveReport> {
    if s.len() != inst.len() {
        return Err(SolverError::InvalidSchedule(format!(
            "schedule has {} entries for {} jobs",
            s.len(),
            inst.len()
        )));
    }
    let order = s.order_indices(inst)?;
    let mut seen = vec![false; inst.len()];
    for &idx in &order {
        if seen[idx] {
            return Err(SolverError::InvalidSchedule(format!(
                "job {} appears more than once",
                inst.job(idx).id
            )));
        }
        seen[idx] = true;
    }
    let mut prev_end = 0.0_f64;
    let mut prev_start = f64::NEG_INFINITY;
    for (&idx, entry) in order.iter().zip(s.entries()) {
        let job = inst.job(idx);
        if entry.start < prev_start - tol::EPS {
            return Err(SolverError::InvalidSchedule(format!(
                "job {} starts before its predecessor",
                job.id
            )));
        }
        if entry.start < prev_end - tol::EPS {
            return Err(SolverError::InvalidSchedule(format!(
                "job {} overlaps its predecessor (start {} < {})",
                job.id, entry.start, prev_end
            )));
        }
        if entry.start < job.release - tol::EPS {
            return Err(SolverError::InvalidSchedule(format!(
                "job {} starts at {} before its release date {}",
                job.id, entry.start, job.release
            )));
        }
        prev_start = entry.start;
        prev_end = entry.start + job.duration;
    }

    let mut per_job_utility = BTreeMap::new();
    let mut min_utility = f64::INFINITY;
    let mut total_utility = 0.0;
    for (&idx, entry) in order.iter().zip(s.entries()) {
        let job = inst.job(idx);
        let u = job.utility.eval(entry.start + job.duration);
        min_utility = min_utility.min(u);
        total_utility += u;
        per_job_utility.insert(job.id.clone(), u);
    }
    Ok(SolveReport {
        schedule: s.clone(),
        per_job_utility,
        min_utility,
        total_utility,
        diagnostics: Diagnostics::default(),
    })
}

/// Builds a report for an order produced by a solver, attaching diagnostics.
pub(crate) fn report_for_order(
    inst: &Instance,
    order: &[usize],
    diagnostics: Diagnostics,
) -> SolveReport {
    let schedule = Schedule::from_order(inst, order);
    let mut report =
        evaluate_schedule(inst, &schedule).expect("solver-produced order must be valid");
    report.diagnostics = diagnostics;
    report
}

/// Shifts all utilities upward by `M = max(0, -min_j u_j(horizon))` so every
/// utility is non-negative over all feasible completions. Returns the shifted
/// instance and the shift applied.
pub fn normalize(inst: &Instance) -> (Instance, f64) {
    let horizon = inst.completion_horizon();
    let min_u = inst
        .jobs()
        .iter()
        .map(|j| j.utility.eval(horizon))
        .fold(f64::INFINITY, f64::min);
    let shift = (-min_u).max(0.0);
    if shift == 0.0 {
        return (inst.clone(), 0.0);
    }
    let shifted = inst
        .map_utilities(|_, j| j.utility.shifted(shift))
        .expect("shifting preserves validity");
    (shifted, shift)
}

/// Normalizes and computes each agent's attainable utility range over
/// semi-active schedules. The closed form `range_j = slope_j * (P - p_j)`
/// only holds for linear utilities without release dates; other instances
/// are rejected.
pub fn normalize_and_ranges(inst: &Instance) -> Result<(Instance, BTreeMap<JobId, f64>)> {
    if inst.has_release_dates() {
        return Err(SolverError::UnsupportedVariant(
            "utility ranges are only defined for instances without release dates".into(),
        ));
    }
    if !inst.all_linear() {
        return Err(SolverError::UnsupportedVariant(
            "utility ranges are only defined for linear utilities".into(),
        ));
    }
    let total = inst.total_duration();
    let ranges = inst
        .jobs()
        .iter()
        .map(|j| {
            let (slope, _) = j.utility.linear_coefficients().unwrap();
            (j.id.clone(), slope * (total - j.duration))
        })
        .collect();
    let (shifted, _) = normalize(inst);
    Ok((shifted, ranges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Job;

    fn two_job_example() -> Instance {
        // Two unit jobs; the first has a steep utility, the second a shallow
        // one. Scheduling the shallow job first equalizes both utilities.
        let m = 10.0;
        Instance::new(vec![
            Job::linear("1", 1.0, m, 2.0 * m + 1.0),
            Job::linear("2", 1.0, 1.0, 2.0),
        ])
        .unwrap()
    }

    #[test]
    fn evaluates_fair_and_greedy_orders() {
        let inst = two_job_example();
        let fair = Schedule::from_order(&inst, &[1, 0]);
        let r = evaluate_schedule(&inst, &fair).unwrap();
        assert_eq!(r.utility_of(&JobId::new("1")), Some(1.0));
        assert_eq!(r.utility_of(&JobId::new("2")), Some(1.0));
        assert_eq!(r.min_utility, 1.0);
        assert_eq!(r.total_utility, 2.0);

        let greedy = Schedule::from_order(&inst, &[0, 1]);
        let r = evaluate_schedule(&inst, &greedy).unwrap();
        assert_eq!(r.utility_of(&JobId::new("1")), Some(11.0));
        assert_eq!(r.utility_of(&JobId::new("2")), Some(0.0));
        assert_eq!(r.total_utility, 11.0);
    }

    #[test]
    fn single_job_min_utility() {
        let inst = Instance::new(vec![Job::linear("a", 3.0, 1.0, 5.0)]).unwrap();
        let s = Schedule::from_order(&inst, &[0]);
        let r = evaluate_schedule(&inst, &s).unwrap();
        assert_eq!(r.min_utility, 2.0);
    }

    #[test]
    fn rejects_overlap_and_release_violation() {
        let inst = Instance::new(vec![
            Job::linear("a", 2.0, 1.0, 5.0),
            Job::linear("b", 1.0, 1.0, 5.0).with_release(4.0),
        ])
        .unwrap();
        let overlapping = Schedule::new(vec![
            ScheduleEntry { job: JobId::new("a"), start: 0.0 },
            ScheduleEntry { job: JobId::new("b"), start: 1.0 },
        ]);
        assert!(matches!(
            evaluate_schedule(&inst, &overlapping),
            Err(SolverError::InvalidSchedule(_))
        ));
        let early = Schedule::new(vec![
            ScheduleEntry { job: JobId::new("b"), start: 3.0 },
            ScheduleEntry { job: JobId::new("a"), start: 5.0 },
        ]);
        assert!(matches!(
            evaluate_schedule(&inst, &early),
            Err(SolverError::InvalidSchedule(_))
        ));
    }

    #[test]
    fn normalization_ranges_match_closed_form() {
        let inst = two_job_example();
        let (shifted, ranges) = normalize_and_ranges(&inst).unwrap();
        assert_eq!(ranges[&JobId::new("1")], 10.0);
        assert_eq!(ranges[&JobId::new("2")], 1.0);
        // Already non-negative everywhere, so the shift is zero.
        assert_eq!(shifted, inst);
    }

    #[test]
    fn normalization_shifts_negative_utilities() {
        let inst = Instance::new(vec![Job::linear("a", 1.0, 2.0, 1.0)]).unwrap();
        let (shifted, shift) = normalize(&inst);
        assert_eq!(shift, 1.0);
        assert_eq!(shifted.job(0).utility.eval(1.0), 0.0);
    }

    #[test]
    fn ranges_rejected_for_release_dates() {
        let inst = Instance::new(vec![
            Job::linear("a", 1.0, 1.0, 2.0).with_release(1.0),
        ])
        .unwrap();
        assert!(matches!(
            normalize_and_ranges(&inst),
            Err(SolverError::UnsupportedVariant(_))
        ));
    }
}
