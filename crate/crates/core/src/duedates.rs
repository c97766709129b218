//! Late-job minimization and the fair objective under a cap on late jobs.

use crate::error::{Result, SolverError};
use crate::instance::Instance;
use crate::maxmin::BinarySearchConfig;
use crate::schedule::{evaluate_schedule, Diagnostics, Schedule, ScheduleEntry, SolveReport};
use crate::tol;

/// Partition of jobs into on-time and late sets. Indices refer to the input
/// slice. The on-time set is listed in its due-date schedule order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LateReport {
    pub on_time: Vec<usize>,
    pub late: Vec<usize>,
    pub late_count: usize,
}

/// Minimum-cardinality late set for `(duration, due date)` pairs.
///
/// Classic ejection sweep: walk jobs in due-date order, and on the first
/// late completion eject the longest job seen so far (ties go to the one
/// listed first). On-time jobs run back to back in due-date order, late jobs
/// are appended behind them.
pub fn moore_hodgson(jobs: &[(f64, f64)]) -> LateReport {
    let mut idx: Vec<usize> = (0..jobs.len()).collect();
    idx.sort_by(|&a, &b| {
        jobs[a]
            .1
            .partial_cmp(&jobs[b].1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut on_time: Vec<usize> = Vec::new();
    let mut late: Vec<usize> = Vec::new();
    let mut t = 0.0_f64;
    for &j in &idx {
        on_time.push(j);
        t += jobs[j].0;
        if !tol::le(t, jobs[j].1) {
            // Eject the longest accepted job; smaller index wins ties.
            let (pos, &victim) = on_time
                .iter()
                .enumerate()
                .max_by(|(_, &a), (_, &b)| {
                    jobs[a]
                        .0
                        .partial_cmp(&jobs[b].0)
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(b.cmp(&a))
                })
                .unwrap();
            t -= jobs[victim].0;
            on_time.remove(pos);
            late.push(victim);
        }
    }
    late.sort_unstable();
    LateReport {
        late_count: late.len(),
        on_time,
        late,
    }
}

fn due_dates_of(inst: &Instance) -> Result<Vec<f64>> {
    inst.jobs()
        .iter()
        .map(|j| {
            j.due_date.ok_or_else(|| {
                SolverError::UnsupportedVariant(format!(
                    "every job needs a due date, {} has none",
                    j.id
                ))
            })
        })
        .collect()
}

/// Schedule: on-time set in due-date order from 0, late jobs appended in
/// listing order. Late jobs contribute no utility and are excluded from the
/// reported minimum.
fn bounded_late_report(
    inst: &Instance,
    late_report: &LateReport,
    diagnostics: Diagnostics,
) -> Result<SolveReport> {
    let mut entries = Vec::with_capacity(inst.len());
    let mut t = 0.0;
    for &j in late_report.on_time.iter().chain(&late_report.late) {
        entries.push(ScheduleEntry {
            job: inst.job(j).id.clone(),
            start: t,
        });
        t += inst.job(j).duration;
    }
    let schedule = Schedule::new(entries);
    let mut report = evaluate_schedule(inst, &schedule)?;
    report.diagnostics = diagnostics;
    let mut min_on_time = f64::INFINITY;
    for &j in &late_report.on_time {
        min_on_time = min_on_time.min(report.per_job_utility[&inst.job(j).id]);
    }
    for &j in &late_report.late {
        report.per_job_utility.insert(inst.job(j).id.clone(), 0.0);
    }
    report.min_utility = min_on_time;
    report.total_utility = report.per_job_utility.values().sum();
    Ok(report)
}

/// Largest target utility reachable by all on-time jobs when at most `k`
/// jobs may be late.
///
/// Searches over target values; each candidate tightens every due date to
/// the smaller of the original one and the latest completion still meeting
/// the target, and the candidate is feasible when the ejection sweep leaves
/// at most `k` jobs late. Requires `k` at least the unconstrained minimum
/// number of late jobs.
pub fn bounded_late_maxmin(
    inst: &Instance,
    k: usize,
    cfg: &BinarySearchConfig,
) -> Result<SolveReport> {
    if inst.has_release_dates() {
        return Err(SolverError::UnsupportedVariant(
            "bounded_late_maxmin requires all release dates to be zero".into(),
        ));
    }
    let dues = due_dates_of(inst)?;
    let pairs: Vec<(f64, f64)> = inst
        .jobs()
        .iter()
        .zip(&dues)
        .map(|(j, &d)| (j.duration, d))
        .collect();
    let baseline = moore_hodgson(&pairs);
    if baseline.late_count > k {
        return Err(SolverError::Infeasible(format!(
            "at least {} jobs are late on every schedule, cap is {}",
            baseline.late_count, k
        )));
    }

    let mut best = baseline;
    let outcome = crate::maxmin::binary_search_maxmin(
        inst,
        |_, target_dues| {
            let tightened: Vec<(f64, f64)> = inst
                .jobs()
                .iter()
                .zip(target_dues)
                .zip(&dues)
                .map(|((j, &dt), &d)| (j.duration, d.min(dt)))
                .collect();
            let rep = moore_hodgson(&tightened);
            let ok = rep.late_count <= k;
            if ok {
                best = rep;
            }
            ok
        },
        cfg,
    )?;
    bounded_late_report(
        inst,
        &best,
        Diagnostics {
            iterations: outcome.iterations,
            tolerance: cfg.eps,
        },
    )
}
