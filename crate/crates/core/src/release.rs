//! Solvers for the release-date variants.
//!
//! Three problem classes are handled:
//!
//! - exactly one job released after time zero, integer data: a dynamic
//!   program over `(work before, work after)` split states, wrapped in a
//!   target-value search for the fair objective or a direct value
//!   maximization for the total objective, iterated over every feasible
//!   start of the released job;
//! - unit durations with integer release dates: either the slot-shift
//!   greedy or a reduction to bottleneck / sum assignment over the
//!   minimum-makespan slot set;
//! - equal durations with arbitrary release dates: target-value search over
//!   a feasibility kernel that may insert deliberate idle time, with start
//!   times restricted to the `release + k * duration` grid.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::assignment::{max_bottleneck_assignment, max_sum_assignment};
use crate::error::{Result, SolverError};
use crate::instance::Instance;
use crate::maxmin::BinarySearchConfig;
use crate::schedule::{evaluate_schedule, Diagnostics, Schedule, ScheduleEntry, SolveReport};
use crate::tol;
use crate::Objective;

/// Work scheduled before and after the released job in a DP split state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DpState {
    pub before: i64,
    pub after: i64,
}

/// How `unit_time_solve` should compute its answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitTimeMethod {
    /// Slot-shift greedy; fair objective only.
    Greedy,
    /// Reduction to an assignment problem over the minimum-makespan slots.
    Assignment,
}

fn integer_or_reject(x: f64, what: &str) -> Result<i64> {
    if !tol::is_integer(x) {
        return Err(SolverError::UnsupportedVariant(format!(
            "{what} must be integral, got {x}"
        )));
    }
    Ok(x.round() as i64)
}

struct SingleRelease {
    released: usize,
    others: Vec<usize>,
    durations: Vec<i64>,
    release: i64,
    rest_total: i64,
}

fn split_single_release(inst: &Instance) -> Result<SingleRelease> {
    let released: Vec<usize> = (0..inst.len())
        .filter(|&i| inst.job(i).release > 0.0)
        .collect();
    if released.len() != 1 {
        return Err(SolverError::UnsupportedVariant(format!(
            "single-release solver needs exactly one positive release date, found {}",
            released.len()
        )));
    }
    let released = released[0];
    let mut durations = vec![0i64; inst.len()];
    for (i, job) in inst.jobs().iter().enumerate() {
        durations[i] = integer_or_reject(job.duration, "durations")?;
    }
    let release = integer_or_reject(inst.job(released).release, "the release date")?;
    let others: Vec<usize> = (0..inst.len()).filter(|&i| i != released).collect();
    let rest_total = others.iter().map(|&i| durations[i]).sum();
    Ok(SingleRelease {
        released,
        others,
        durations,
        release,
        rest_total,
    })
}

/// Assignment of the non-released jobs for one feasible DP outcome.
struct SplitSchedule {
    before: Vec<usize>,
    after: Vec<usize>,
}

/// Feasibility DP for one start of the released job and one target value.
/// `dues[i]` is the latest completion of job `i` still meeting the target.
/// Jobs that can no longer finish on time after the released job form a
/// mandatory prefix; the rest are split by the state expansion in due-date
/// order.
fn dp_feasible_at_start(
    sr: &SingleRelease,
    start: i64,
    dues: &[f64],
    released_duration: i64,
) -> Option<SplitSchedule> {
    let resume = start + released_duration;
    if tol::lt(dues[sr.released], (start + released_duration) as f64) {
        return None;
    }
    let mut mandatory: Vec<usize> = Vec::new();
    let mut rest: Vec<usize> = Vec::new();
    for &i in &sr.others {
        if dues[i] <= (resume + sr.durations[i] - 1) as f64 + tol::EPS {
            mandatory.push(i);
        } else {
            rest.push(i);
        }
    }
    let by_due = |a: &usize, b: &usize| {
        dues[*a]
            .partial_cmp(&dues[*b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(b))
    };
    mandatory.sort_by(by_due);
    rest.sort_by(by_due);

    // The mandatory jobs run first; they must fit before the released job
    // and meet their own due dates there.
    let mut prefix = 0i64;
    for &i in &mandatory {
        prefix += sr.durations[i];
        if !tol::le(prefix as f64, dues[i]) {
            return None;
        }
    }
    if prefix > start {
        return None;
    }

    // States keyed by work placed before; work after is implied by the
    // prefix processed so far. Parent links reconstruct the split.
    #[derive(Clone, Copy)]
    struct Node {
        state: DpState,
        parent: usize,
        went_before: bool,
    }
    let mut arena: Vec<Node> = vec![Node {
        state: DpState { before: prefix, after: 0 },
        parent: usize::MAX,
        went_before: false,
    }];
    let mut layer: Vec<usize> = vec![0];

    for &i in &rest {
        let p = sr.durations[i];
        let mut next: Vec<usize> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for &k in &layer {
            let node = arena[k];
            if node.state.before + p <= start {
                let s = DpState {
                    before: node.state.before + p,
                    after: node.state.after,
                };
                if seen.insert(s.before) {
                    arena.push(Node { state: s, parent: k, went_before: true });
                    next.push(arena.len() - 1);
                }
            }
            if tol::ge(dues[i], (resume + node.state.after + p) as f64) {
                let s = DpState {
                    before: node.state.before,
                    after: node.state.after + p,
                };
                if seen.insert(s.before) {
                    arena.push(Node { state: s, parent: k, went_before: false });
                    next.push(arena.len() - 1);
                }
            }
        }
        if next.is_empty() {
            return None;
        }
        layer = next;
    }

    // Walk any surviving state back to the root.
    let mut before_rev: Vec<usize> = Vec::new();
    let mut after_rev: Vec<usize> = Vec::new();
    let mut at = layer[0];
    for &i in rest.iter().rev() {
        let node = arena[at];
        if node.went_before {
            before_rev.push(i);
        } else {
            after_rev.push(i);
        }
        at = node.parent;
    }
    let mut before = mandatory;
    before.extend(before_rev.iter().rev());
    let after: Vec<usize> = after_rev.iter().rev().copied().collect();
    Some(SplitSchedule { before, after })
}

fn schedule_from_split(
    inst: &Instance,
    sr: &SingleRelease,
    start: i64,
    split: &SplitSchedule,
) -> Schedule {
    let mut entries = Vec::with_capacity(inst.len());
    let mut t = 0i64;
    for &i in &split.before {
        entries.push(ScheduleEntry {
            job: inst.job(i).id.clone(),
            start: t as f64,
        });
        t += sr.durations[i];
    }
    entries.push(ScheduleEntry {
        job: inst.job(sr.released).id.clone(),
        start: start as f64,
    });
    let mut t = start + sr.durations[sr.released];
    for &i in &split.after {
        entries.push(ScheduleEntry {
            job: inst.job(i).id.clone(),
            start: t as f64,
        });
        t += sr.durations[i];
    }
    Schedule::new(entries)
}

#[derive(Clone, Copy)]
struct SumNode {
    before: i64,
    after: i64,
    value: f64,
    parent: usize,
    went_before: bool,
}

fn push_best(
    arena: &mut Vec<SumNode>,
    best: &mut std::collections::HashMap<i64, usize>,
    node: SumNode,
) {
    use std::collections::hash_map::Entry;
    match best.entry(node.before) {
        Entry::Vacant(e) => {
            arena.push(node);
            e.insert(arena.len() - 1);
        }
        Entry::Occupied(mut e) => {
            if node.value > arena[*e.get()].value {
                arena.push(node);
                e.insert(arena.len() - 1);
            }
        }
    }
}

/// Best split for one start under the total-utility objective: jobs in
/// ratio order, each state keeps the best accumulated utility.
fn dp_sum_at_start(inst: &Instance, sr: &SingleRelease, start: i64) -> Option<(f64, SplitSchedule)> {
    let resume = start + sr.durations[sr.released];
    let mut order = sr.others.clone();
    order.sort_by(|&a, &b| {
        let ra = ratio(inst, a);
        let rb = ratio(inst, b);
        rb.partial_cmp(&ra)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    let mut arena = vec![SumNode {
        before: 0,
        after: 0,
        value: 0.0,
        parent: usize::MAX,
        went_before: false,
    }];
    let mut layer: Vec<usize> = vec![0];
    for &i in &order {
        let p = sr.durations[i];
        let mut best: std::collections::HashMap<i64, usize> = std::collections::HashMap::new();
        for &k in &layer {
            let node = arena[k];
            if node.before + p <= start {
                let u = inst.job(i).utility.eval((node.before + p) as f64);
                push_best(
                    &mut arena,
                    &mut best,
                    SumNode {
                        before: node.before + p,
                        after: node.after,
                        value: node.value + u,
                        parent: k,
                        went_before: true,
                    },
                );
            }
            let u = inst.job(i).utility.eval((resume + node.after + p) as f64);
            push_best(
                &mut arena,
                &mut best,
                SumNode {
                    before: node.before,
                    after: node.after + p,
                    value: node.value + u,
                    parent: k,
                    went_before: false,
                },
            );
        }
        layer = best.into_values().collect();
        layer.sort_unstable();
        if layer.is_empty() {
            return None;
        }
    }
    let &final_idx = layer
        .iter()
        .max_by(|&&a, &&b| {
            arena[a]
                .value
                .partial_cmp(&arena[b].value)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(b.cmp(&a))
        })
        .unwrap();
    let total = arena[final_idx].value + inst.job(sr.released).utility.eval(resume as f64);

    let mut before_rev = Vec::new();
    let mut after_rev = Vec::new();
    let mut at = final_idx;
    for &i in order.iter().rev() {
        let n = arena[at];
        if n.went_before {
            before_rev.push(i);
        } else {
            after_rev.push(i);
        }
        at = n.parent;
    }
    Some((
        total,
        SplitSchedule {
            before: before_rev.into_iter().rev().collect(),
            after: after_rev.into_iter().rev().collect(),
        },
    ))
}

fn ratio(inst: &Instance, i: usize) -> f64 {
    let (slope, _) = inst.job(i).utility.linear_coefficients().unwrap();
    slope / inst.job(i).duration
}

/// Exact solver for instances where exactly one job has a positive release
/// date and all data is integral. Iterates the released job's start over
/// `release ..= release + P` (with `P` the total work of the other jobs) and
/// keeps the best outcome; under the `parallel` feature the starts are
/// evaluated on the rayon pool.
pub fn dp_single_release(
    inst: &Instance,
    objective: Objective,
    cfg: &BinarySearchConfig,
) -> Result<SolveReport> {
    let sr = split_single_release(inst)?;
    if objective == Objective::Sum && !inst.all_linear() {
        return Err(SolverError::UnsupportedVariant(
            "the total-utility DP requires linear utilities".into(),
        ));
    }
    let starts: Vec<i64> = (sr.release..=sr.release + sr.rest_total).collect();

    let eval_start = |&start: &i64| -> Option<(f64, Schedule, usize)> {
        match objective {
            Objective::Sum => dp_sum_at_start(inst, &sr, start).map(|(value, split)| {
                (value, schedule_from_split(inst, &sr, start, &split), 0)
            }),
            Objective::MaxMin => {
                let mut best: Option<Schedule> = None;
                let dues_for = |target: f64| -> Vec<f64> {
                    inst.jobs()
                        .iter()
                        .map(|j| j.utility.inverse(target))
                        .collect()
                };
                let mut feasible = |target: f64| -> bool {
                    match dp_feasible_at_start(
                        &sr,
                        start,
                        &dues_for(target),
                        sr.durations[sr.released],
                    ) {
                        Some(split) => {
                            best = Some(schedule_from_split(inst, &sr, start, &split));
                            true
                        }
                        None => false,
                    }
                };
                let mut lo = cfg.lo;
                let mut hi = cfg.hi;
                let mut iterations = 0usize;
                if !feasible(lo) {
                    return None;
                }
                if feasible(hi) {
                    lo = hi;
                }
                while hi - lo > cfg.eps && iterations < cfg.max_iter {
                    let mid = 0.5 * (lo + hi);
                    if feasible(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    iterations += 1;
                }
                let schedule = best.expect("lo was feasible");
                let value = evaluate_schedule(inst, &schedule)
                    .expect("dp schedule is valid")
                    .min_utility;
                Some((value, schedule, iterations))
            }
        }
    };

    #[cfg(feature = "parallel")]
    let candidates: Vec<Option<(f64, Schedule, usize)>> =
        starts.par_iter().map(eval_start).collect();
    #[cfg(not(feature = "parallel"))]
    let candidates: Vec<Option<(f64, Schedule, usize)>> = starts.iter().map(eval_start).collect();

    let mut best: Option<(f64, Schedule)> = None;
    let mut iterations = 0usize;
    for cand in candidates.into_iter().flatten() {
        iterations += cand.2;
        match &best {
            Some((v, _)) if *v >= cand.0 => {}
            _ => best = Some((cand.0, cand.1)),
        }
    }
    let (_, schedule) = best.ok_or_else(|| {
        SolverError::Infeasible("no feasible start for the released job".into())
    })?;
    let mut report = evaluate_schedule(inst, &schedule)?;
    report.diagnostics = Diagnostics {
        iterations,
        tolerance: cfg.eps,
    };
    Ok(report)
}

/// Minimum-makespan completion slots for unit jobs sorted by release date.
/// Returns (sorted job indices, slot per position).
fn unit_slots(inst: &Instance) -> Result<(Vec<usize>, Vec<i64>)> {
    let mut order: Vec<usize> = (0..inst.len()).collect();
    for job in inst.jobs() {
        if !tol::eq(job.duration, 1.0) {
            return Err(SolverError::UnsupportedVariant(format!(
                "unit-duration solver got duration {} on {}",
                job.duration, job.id
            )));
        }
        integer_or_reject(job.release, "release dates")?;
    }
    order.sort_by(|&a, &b| {
        inst.job(a)
            .release
            .partial_cmp(&inst.job(b).release)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut slots = Vec::with_capacity(inst.len());
    let mut completion = 0i64;
    for &i in &order {
        let r = inst.job(i).release.round() as i64;
        completion = (r + 1).max(completion + 1);
        slots.push(completion);
    }
    Ok((order, slots))
}

/// Fair or total-utility solver for unit durations with integer releases.
///
/// The greedy fills completion slots from the last one backwards, choosing
/// the highest utility among the jobs whose removal lets every successor
/// shift one slot earlier; a job whose predecessor chain hits a start equal
/// to its release anchors the walk. The assignment method instead matches
/// jobs to the same slot set with profit `u_i(slot)`, either bottleneck
/// (fair) or sum.
pub fn unit_time_solve(
    inst: &Instance,
    objective: Objective,
    method: UnitTimeMethod,
) -> Result<SolveReport> {
    let (order, slots) = unit_slots(inst)?;
    match (objective, method) {
        (Objective::MaxMin, UnitTimeMethod::Greedy) => unit_time_greedy(inst, order, slots),
        (Objective::Sum, UnitTimeMethod::Greedy) => Err(SolverError::UnsupportedVariant(
            "the slot-shift greedy only handles the fair objective".into(),
        )),
        (_, UnitTimeMethod::Assignment) => unit_time_assignment(inst, objective, order, slots),
    }
}

fn unit_time_greedy(inst: &Instance, order: Vec<usize>, slots: Vec<i64>) -> Result<SolveReport> {
    let mut seq = order; // current sequence, release-sorted
    let mut completion = slots;
    let mut assigned: Vec<(usize, i64)> = Vec::with_capacity(inst.len());
    let release =
        |i: usize| -> i64 { inst.job(i).release.round() as i64 };

    while seq.len() > 1 {
        let t = *completion.last().unwrap();
        // Walk left from the last job while the current one starts strictly
        // after its release; everyone passed can shift one slot earlier.
        let mut pos = seq.len() - 1;
        let mut best_pos = pos;
        let mut best_u = inst.job(seq[pos]).utility.eval(t as f64);
        while completion[pos] - 1 > release(seq[pos]) && pos > 0 {
            pos -= 1;
            let u = inst.job(seq[pos]).utility.eval(t as f64);
            if u > best_u {
                best_u = u;
                best_pos = pos;
            }
        }
        let chosen = seq.remove(best_pos);
        completion.remove(best_pos);
        for c in completion.iter_mut().skip(best_pos) {
            *c -= 1;
        }
        assigned.push((chosen, t));
    }
    assigned.push((seq[0], completion[0]));

    assigned.sort_by_key(|&(_, c)| c);
    let entries = assigned
        .iter()
        .map(|&(i, c)| ScheduleEntry {
            job: inst.job(i).id.clone(),
            start: (c - 1) as f64,
        })
        .collect();
    evaluate_schedule(inst, &Schedule::new(entries))
}

fn unit_time_assignment(
    inst: &Instance,
    objective: Objective,
    order: Vec<usize>,
    slots: Vec<i64>,
) -> Result<SolveReport> {
    let n = inst.len();
    let mut profit = vec![vec![f64::NEG_INFINITY; n]; n];
    for (row, &i) in order.iter().enumerate() {
        let r = inst.job(i).release.round() as i64;
        for (col, &c) in slots.iter().enumerate() {
            if c >= r + 1 {
                profit[row][col] = inst.job(i).utility.eval(c as f64);
            }
        }
    }
    let assignment = match objective {
        Objective::MaxMin => {
            max_bottleneck_assignment(&profit)
                .ok_or_else(|| SolverError::Infeasible("no feasible slot assignment".into()))?
                .1
        }
        Objective::Sum => max_sum_assignment(&profit).1,
    };
    let mut placed: Vec<(usize, i64)> = assignment
        .iter()
        .enumerate()
        .map(|(row, &col)| (order[row], slots[col]))
        .collect();
    placed.sort_by_key(|&(_, c)| c);
    let entries = placed
        .iter()
        .map(|&(i, c)| ScheduleEntry {
            job: inst.job(i).id.clone(),
            start: (c - 1) as f64,
        })
        .collect();
    evaluate_schedule(inst, &Schedule::new(entries))
}

/// Feasibility kernel for equal durations: is there a schedule placing every
/// job's start inside `[release_j, due_j - p]`? Start times are restricted
/// to the `release + k * p` grid, which is sufficient; deliberate idle time
/// before a released job is where the kernel earns its keep. Returns a
/// witness as `(index, start)` pairs when feasible.
pub fn equal_time_feasible(p: f64, windows: &[(f64, f64)]) -> (bool, Option<Vec<(usize, f64)>>) {
    let n = windows.len();
    if n == 0 {
        return (true, Some(Vec::new()));
    }
    for &(r, d) in windows {
        if tol::lt(d - p, r) {
            return (false, None);
        }
    }

    // Depth-first over start times; at each chosen start the job with the
    // earliest deadline among the released ones is forced, so branching is
    // only over how long to wait. Candidate starts: the current free time
    // and each later release date.
    fn dfs(
        p: f64,
        windows: &[(f64, f64)],
        remaining: &mut Vec<usize>,
        free: f64,
        picked: &mut Vec<(usize, f64)>,
    ) -> bool {
        if remaining.is_empty() {
            return true;
        }
        let latest_ok = remaining
            .iter()
            .map(|&j| windows[j].1 - p)
            .fold(f64::INFINITY, f64::min);
        let mut candidates: Vec<f64> = vec![free];
        for &j in remaining.iter() {
            if tol::gt(windows[j].0, free) {
                candidates.push(windows[j].0);
            }
        }
        candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
        candidates.dedup_by(|a, b| tol::eq(*a, *b));
        for t in candidates {
            if tol::gt(t, latest_ok) {
                break;
            }
            // Earliest deadline among jobs released by t.
            let mut pick: Option<usize> = None;
            for (k, &j) in remaining.iter().enumerate() {
                if !tol::le(windows[j].0, t) || tol::lt(windows[j].1 - p, t) {
                    continue;
                }
                match pick {
                    Some(cur) if windows[remaining[cur]].1 <= windows[j].1 => {}
                    _ => pick = Some(k),
                }
            }
            let Some(k) = pick else { continue };
            let j = remaining.remove(k);
            picked.push((j, t));
            if dfs(p, windows, remaining, t + p, picked) {
                return true;
            }
            picked.pop();
            remaining.insert(k, j);
        }
        false
    }

    let mut remaining: Vec<usize> = (0..n).collect();
    let mut picked = Vec::with_capacity(n);
    if dfs(p, windows, &mut remaining, 0.0, &mut picked) {
        (true, Some(picked))
    } else {
        (false, None)
    }
}

/// Fair solver for equal durations with arbitrary release dates. Searches
/// target values, turning each candidate into start windows for the
/// feasibility kernel. The result may contain unforced idle time.
pub fn equal_time_maxmin(inst: &Instance, cfg: &BinarySearchConfig) -> Result<SolveReport> {
    let p = inst.job(0).duration;
    for job in inst.jobs() {
        if !tol::eq(job.duration, p) {
            return Err(SolverError::UnsupportedVariant(format!(
                "equal-duration solver got durations {} and {}",
                p, job.duration
            )));
        }
    }
    let horizon = inst.completion_horizon();
    let mut best: Option<Vec<(usize, f64)>> = None;
    let outcome = crate::maxmin::binary_search_maxmin(
        inst,
        |_, dues| {
            if dues.iter().any(|&d| d == f64::NEG_INFINITY) {
                return false;
            }
            let windows: Vec<(f64, f64)> = inst
                .jobs()
                .iter()
                .zip(dues)
                .map(|(j, &d)| (j.release, d.min(horizon + p)))
                .collect();
            let (ok, witness) = equal_time_feasible(p, &windows);
            if ok {
                best = witness;
            }
            ok
        },
        cfg,
    )?;
    let mut placed = best.ok_or_else(|| SolverError::Infeasible("no feasible schedule".into()))?;
    placed.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let entries = placed
        .iter()
        .map(|&(i, start)| ScheduleEntry {
            job: inst.job(i).id.clone(),
            start,
        })
        .collect();
    let mut report = evaluate_schedule(inst, &Schedule::new(entries))?;
    report.diagnostics = Diagnostics {
        iterations: outcome.iterations,
        tolerance: cfg.eps,
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Job;
    use crate::maxmin::max_min_greedy;
    use crate::oracle::{brute_force, OracleConfig};

    #[test]
    fn partition_style_yes_instance_scores_its_planted_value() {
        // Two unit jobs plus one released job; splitting the unit jobs
        // around the released one is optimal and every agent ends at 1.
        let b = 1.0;
        let inst = Instance::new(vec![
            Job::linear("1", 1.0, 1.0 / 3.0, 2.0 * b),
            Job::linear("2", 1.0, 1.0 / 3.0, 2.0 * b),
            Job::linear("r", 1.0, 2.0, 5.0 * b).with_release(b),
        ])
        .unwrap();
        let cfg = BinarySearchConfig::for_instance(&inst);
        let r = dp_single_release(&inst, Objective::MaxMin, &cfg).unwrap();
        assert!((r.min_utility - b).abs() < 1e-6);
    }

    #[test]
    fn far_release_reduces_to_greedy_plus_append() {
        let inst = Instance::new(vec![
            Job::linear("a", 2.0, 1.0, 9.0),
            Job::linear("b", 1.0, 2.0, 11.0),
            Job::linear("r", 1.0, 1.0, 30.0).with_release(5.0),
        ])
        .unwrap();
        let cfg = BinarySearchConfig::for_instance(&inst);
        let r = dp_single_release(&inst, Objective::MaxMin, &cfg).unwrap();
        let first_two = Instance::new(vec![
            Job::linear("a", 2.0, 1.0, 9.0),
            Job::linear("b", 1.0, 2.0, 11.0),
        ])
        .unwrap();
        let greedy = max_min_greedy(&first_two).unwrap();
        let released_u = 30.0 - (5.0 + 1.0);
        assert!((r.min_utility - greedy.min_utility.min(released_u)).abs() < 1e-6);
    }

    #[test]
    fn dp_both_objectives_match_oracle_on_small_instance() {
        let inst = Instance::new(vec![
            Job::linear("a", 2.0, 3.0, 20.0),
            Job::linear("b", 1.0, 1.0, 8.0),
            Job::linear("c", 2.0, 2.0, 14.0),
            Job::linear("r", 1.0, 4.0, 25.0).with_release(2.0),
        ])
        .unwrap();
        let cfg = BinarySearchConfig::for_instance(&inst).with_eps(1e-9);
        let fair = dp_single_release(&inst, Objective::MaxMin, &cfg).unwrap();
        let fair_oracle = brute_force(&inst, &OracleConfig::maxmin()).unwrap();
        assert!((fair.min_utility - fair_oracle.min_utility).abs() < 1e-6);
        let sum = dp_single_release(&inst, Objective::Sum, &cfg).unwrap();
        let sum_oracle = brute_force(&inst, &OracleConfig::sum()).unwrap();
        assert!((sum.total_utility - sum_oracle.total_utility).abs() < 1e-9);
    }

    #[test]
    fn dp_rejects_bad_shapes() {
        let two_released = Instance::new(vec![
            Job::linear("a", 1.0, 1.0, 5.0).with_release(1.0),
            Job::linear("b", 1.0, 1.0, 5.0).with_release(2.0),
        ])
        .unwrap();
        let cfg = BinarySearchConfig::bracket(0.0, 5.0);
        assert!(matches!(
            dp_single_release(&two_released, Objective::MaxMin, &cfg),
            Err(SolverError::UnsupportedVariant(_))
        ));
        let fractional = Instance::new(vec![
            Job::linear("a", 1.5, 1.0, 5.0),
            Job::linear("b", 1.0, 1.0, 5.0).with_release(2.0),
        ])
        .unwrap();
        assert!(matches!(
            dp_single_release(&fractional, Objective::MaxMin, &cfg),
            Err(SolverError::UnsupportedVariant(_))
        ));
    }

    #[test]
    fn unit_greedy_keeps_min_makespan() {
        let inst = Instance::new(vec![
            Job::linear("a", 1.0, 1.0, 3.0),
            Job::linear("b", 1.0, 1.0, 5.0),
            Job::linear("c", 1.0, 1.0, 4.0).with_release(2.0),
        ])
        .unwrap();
        let r = unit_time_solve(&inst, Objective::MaxMin, UnitTimeMethod::Greedy).unwrap();
        let last = r
            .schedule
            .entries()
            .iter()
            .map(|e| e.start + 1.0)
            .fold(0.0, f64::max);
        assert_eq!(last, 3.0);
        // Only the released job can take the last slot here, so the best
        // minimum utility is its value there.
        let oracle = brute_force(&inst, &OracleConfig::maxmin()).unwrap();
        assert_eq!(r.min_utility, oracle.min_utility);
        assert_eq!(r.min_utility, 1.0);
    }

    #[test]
    fn unit_methods_agree_with_each_other_and_oracle() {
        let inst = Instance::new(vec![
            Job::linear("a", 1.0, 2.0, 9.0),
            Job::linear("b", 1.0, 1.0, 6.0).with_release(1.0),
            Job::linear("c", 1.0, 3.0, 14.0),
            Job::linear("d", 1.0, 1.0, 7.0).with_release(3.0),
        ])
        .unwrap();
        let greedy = unit_time_solve(&inst, Objective::MaxMin, UnitTimeMethod::Greedy).unwrap();
        let bottleneck =
            unit_time_solve(&inst, Objective::MaxMin, UnitTimeMethod::Assignment).unwrap();
        let oracle = brute_force(&inst, &OracleConfig::maxmin()).unwrap();
        assert_eq!(greedy.min_utility, bottleneck.min_utility);
        assert_eq!(greedy.min_utility, oracle.min_utility);
        let sum = unit_time_solve(&inst, Objective::Sum, UnitTimeMethod::Assignment).unwrap();
        let sum_oracle = brute_force(&inst, &OracleConfig::sum()).unwrap();
        assert!((sum.total_utility - sum_oracle.total_utility).abs() < 1e-9);
    }

    #[test]
    fn unit_all_released_at_zero_matches_plain_greedy() {
        let inst = Instance::new(vec![
            Job::linear("a", 1.0, 2.0, 9.0),
            Job::linear("b", 1.0, 1.0, 6.0),
            Job::linear("c", 1.0, 3.0, 14.0),
        ])
        .unwrap();
        let unit = unit_time_solve(&inst, Objective::MaxMin, UnitTimeMethod::Greedy).unwrap();
        let greedy = max_min_greedy(&inst).unwrap();
        assert_eq!(unit.min_utility, greedy.min_utility);
    }

    #[test]
    fn unit_greedy_rejects_wrong_durations() {
        let inst = Instance::new(vec![Job::linear("a", 2.0, 1.0, 5.0)]).unwrap();
        assert!(matches!(
            unit_time_solve(&inst, Objective::MaxMin, UnitTimeMethod::Greedy),
            Err(SolverError::UnsupportedVariant(_))
        ));
    }

    #[test]
    fn feasibility_kernel_examples() {
        // Overlapping forced windows.
        let (ok, _) = equal_time_feasible(2.0, &[(0.0, 2.0), (1.0, 3.0)]);
        assert!(!ok);
        // Waiting for the second job first makes room for both.
        let (ok, witness) = equal_time_feasible(2.0, &[(0.0, 5.0), (1.0, 3.0)]);
        assert!(ok);
        let w = witness.unwrap();
        assert!(w.contains(&(1, 1.0)) && w.contains(&(0, 3.0)));
        // A single job fits exactly at its release.
        let (ok, witness) = equal_time_feasible(2.0, &[(1.0, 3.0)]);
        assert!(ok);
        assert_eq!(witness.unwrap(), vec![(0, 1.0)]);
    }

    #[test]
    fn feasibility_kernel_matches_exhaustive_grid() {
        // Cross-check against brute enumeration over grid start vectors.
        fn exhaustive(p: f64, windows: &[(f64, f64)]) -> bool {
            let n = windows.len();
            let mut grid: Vec<f64> = Vec::new();
            for &(r, _) in windows {
                for k in 0..n {
                    grid.push(r + k as f64 * p);
                }
            }
            grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
            grid.dedup_by(|a, b| tol::eq(*a, *b));
            fn go(
                p: f64,
                windows: &[(f64, f64)],
                grid: &[f64],
                used: &mut Vec<bool>,
                starts: &mut Vec<f64>,
            ) -> bool {
                let j = used.iter().position(|&u| !u);
                let Some(j) = j else {
                    // Check pairwise non-overlap.
                    let mut v: Vec<f64> = starts.clone();
                    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    return v.windows(2).all(|w| tol::ge(w[1], w[0] + p));
                };
                used[j] = true;
                for &t in grid {
                    if tol::ge(t, windows[j].0) && tol::le(t + p, windows[j].1) {
                        starts.push(t);
                        if go(p, windows, grid, used, starts) {
                            used[j] = false;
                            starts.pop();
                            return true;
                        }
                        starts.pop();
                    }
                }
                used[j] = false;
                false
            }
            let mut used = vec![false; n];
            let mut starts = Vec::new();
            go(p, windows, &grid, &mut used, &mut starts)
        }

        let cases: Vec<(f64, Vec<(f64, f64)>)> = vec![
            (2.0, vec![(0.0, 2.0), (1.0, 3.0)]),
            (2.0, vec![(0.0, 5.0), (1.0, 3.0)]),
            (2.0, vec![(0.0, 6.0), (1.0, 5.0), (0.0, 7.0)]),
            (3.0, vec![(0.0, 9.0), (2.0, 5.0), (4.0, 12.0)]),
            (2.0, vec![(0.0, 4.0), (1.0, 3.0)]),
            (1.0, vec![(0.0, 1.0), (0.0, 2.0), (0.0, 3.0)]),
            (2.0, vec![(1.0, 4.0), (0.0, 8.0), (3.0, 7.0), (2.0, 11.0)]),
        ];
        for (p, windows) in cases {
            let (ok, witness) = equal_time_feasible(p, &windows);
            assert_eq!(ok, exhaustive(p, &windows), "windows {windows:?}");
            if let Some(w) = witness {
                for &(j, t) in &w {
                    assert!(tol::ge(t, windows[j].0));
                    assert!(tol::le(t + p, windows[j].1));
                }
            }
        }
    }

    #[test]
    fn equal_time_uses_idle_when_it_pays() {
        let inst = Instance::new(vec![
            Job::linear("1", 2.0, 1.0, 6.0),
            Job::linear("2", 2.0, 1.0, 4.0).with_release(1.0),
        ])
        .unwrap();
        let cfg = BinarySearchConfig::for_instance(&inst);
        let r = equal_time_maxmin(&inst, &cfg).unwrap();
        assert!((r.min_utility - 1.0).abs() < 1e-6);
        // The released job runs first after a deliberate wait.
        assert_eq!(r.schedule.entries()[0].job.as_str(), "2");
        assert!((r.schedule.entries()[0].start - 1.0).abs() < 1e-6);
        // Strictly better than the best release-sorted semi-active schedule.
        let semi_active = evaluate_schedule(&inst, &Schedule::from_order(&inst, &[0, 1])).unwrap();
        assert!(r.min_utility > semi_active.min_utility + 0.5);
    }

    #[test]
    fn equal_time_no_releases_matches_greedy() {
        let inst = Instance::new(vec![
            Job::linear("a", 2.0, 2.0, 13.0),
            Job::linear("b", 2.0, 1.0, 8.0),
            Job::linear("c", 2.0, 3.0, 17.0),
        ])
        .unwrap();
        let cfg = BinarySearchConfig::for_instance(&inst);
        let eq = equal_time_maxmin(&inst, &cfg).unwrap();
        let greedy = max_min_greedy(&inst).unwrap();
        assert!((eq.min_utility - greedy.min_utility).abs() < 1e-6);
    }
}
