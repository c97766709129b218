//! Enforcing a target sequence on a self-interested follower.
//!
//! A leader wants the follower's schedule to come out as a given order
//! `sigma_T`. The follower either runs the fair backward greedy or the
//! ratio rule for total utility; the leader may raise intercepts or cut
//! slopes, and in the signed setting also move them the other way at the
//! same absolute cost. The non-negative cases have closed-form forward
//! passes over the target's prefix completion times. The signed cases are
//! small linear programs; for the ratio-rule follower with slope changes a
//! dynamic program over the original ratio values gives the same optimum
//! combinatorially.

use std::collections::BTreeMap;

use crate::adjust::Adjustment;
use crate::error::{Result, SolverError};
use crate::instance::{Instance, JobId};
use crate::simplex::{self, Cmp, LpProblem};
use crate::tol;
use crate::utility::UtilityFunction;

/// Which solver the follower runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Follower {
    /// Backward greedy maximizing the minimum utility.
    FairGreedy,
    /// Ratio rule maximizing the total utility of linear agents.
    Wspt,
}

/// Which utility parameter the leader modifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lever {
    Intercept,
    Slope,
}

/// The target order plus the follower model and modification rules.
#[derive(Debug, Clone)]
pub struct TargetSpec {
    pub order: Vec<JobId>,
    pub follower: Follower,
    pub lever: Lever,
    pub signed: bool,
    /// Extra margin added to each selection inequality when the target job
    /// would lose an exact tie under the follower's deterministic rule.
    pub tie_margin: f64,
}

impl TargetSpec {
    pub fn new(order: Vec<JobId>, follower: Follower, lever: Lever, signed: bool) -> Result<Self> {
        if follower == Follower::Wspt && lever == Lever::Intercept {
            // The ratio rule never looks at intercepts.
            return Err(SolverError::UnsupportedVariant(
                "intercept changes cannot steer the ratio-rule follower".into(),
            ));
        }
        Ok(TargetSpec {
            order,
            follower,
            lever,
            signed,
            tie_margin: 0.0,
        })
    }

    pub fn with_tie_margin(mut self, margin: f64) -> Self {
        self.tie_margin = margin;
        self
    }
}

pub(crate) struct TargetData {
    /// Instance index per target position.
    idx: Vec<usize>,
    /// Completion time per target position.
    prefix: Vec<f64>,
    slopes: Vec<f64>,
    intercepts: Vec<f64>,
    durations: Vec<f64>,
}

fn target_data(inst: &Instance, spec: &TargetSpec) -> Result<TargetData> {
    if inst.has_release_dates() {
        return Err(SolverError::UnsupportedVariant(
            "sequence enforcement requires all release dates to be zero".into(),
        ));
    }
    if spec.order.len() != inst.len() {
        return Err(SolverError::ContractViolation(format!(
            "target order lists {} jobs, instance has {}",
            spec.order.len(),
            inst.len()
        )));
    }
    let mut idx = Vec::with_capacity(inst.len());
    let mut seen = vec![false; inst.len()];
    for id in &spec.order {
        let i = inst
            .index_of(id)
            .ok_or_else(|| SolverError::ContractViolation(format!("no job {id}")))?;
        if seen[i] {
            return Err(SolverError::ContractViolation(format!(
                "job {id} listed twice in the target order"
            )));
        }
        seen[i] = true;
        idx.push(i);
    }
    let mut prefix = Vec::with_capacity(inst.len());
    let mut t = 0.0;
    let mut slopes = Vec::new();
    let mut intercepts = Vec::new();
    let mut durations = Vec::new();
    for &i in &idx {
        let job = inst.job(i);
        let (a, b) = job.utility.linear_coefficients().ok_or_else(|| {
            SolverError::UnsupportedVariant(format!(
                "sequence enforcement requires linear utilities, {} is not",
                job.id
            ))
        })?;
        t += job.duration;
        prefix.push(t);
        slopes.push(a);
        intercepts.push(b);
        durations.push(job.duration);
    }
    Ok(TargetData {
        idx,
        prefix,
        slopes,
        intercepts,
        durations,
    })
}

/// Margin the target job at position `j` needs against the competitor at
/// position `l` to survive the follower's deterministic tie rule (the
/// later-listed job wins greedy selection; equal ratios sort by listing).
fn tie_margin_needed(inst_idx_j: usize, inst_idx_l: usize, follower: Follower, margin: f64) -> f64 {
    let loses = match follower {
        // Selection at the later slot: the larger listing index wins a tie,
        // and winning the later slot is what position j needs.
        Follower::FairGreedy => inst_idx_j < inst_idx_l,
        // Equal ratios are laid out in listing order.
        Follower::Wspt => inst_idx_j < inst_idx_l,
    };
    if loses {
        margin
    } else {
        0.0
    }
}

fn adjustment_from(
    inst: &Instance,
    spec: &TargetSpec,
    data: &TargetData,
    deltas_by_pos: &[f64],
) -> Result<Adjustment> {
    let mut per_job_delta = BTreeMap::new();
    for (pos, &i) in data.idx.iter().enumerate() {
        per_job_delta.insert(inst.job(i).id.clone(), deltas_by_pos[pos]);
    }
    let budget_used = deltas_by_pos.iter().map(|d| d.abs()).sum();
    let modified = apply_deltas(inst, &per_job_delta, spec.lever)?;
    let achieved_min = match spec.follower {
        Follower::FairGreedy => crate::maxmin::max_min_greedy(&modified)?.min_utility,
        Follower::Wspt => crate::maxmin::system_optimal_linear(&modified)?.min_utility,
    };
    Ok(Adjustment {
        per_job_delta,
        budget_used,
        achieved_min,
    })
}

/// Applies per-job deltas to an instance: intercepts move up by the delta,
/// slopes move down by it. Slope results within tolerance below zero are
/// clamped.
pub fn apply_deltas(
    inst: &Instance,
    deltas: &BTreeMap<JobId, f64>,
    lever: Lever,
) -> Result<Instance> {
    let mut jobs = inst.jobs().to_vec();
    for job in jobs.iter_mut() {
        let delta = deltas.get(&job.id).copied().unwrap_or(0.0);
        let (a, b) = job.utility.linear_coefficients().ok_or_else(|| {
            SolverError::UnsupportedVariant(format!("{} is not linear", job.id))
        })?;
        job.utility = match lever {
            Lever::Intercept => UtilityFunction::Linear {
                slope: a,
                intercept: b + delta,
            },
            Lever::Slope => {
                let s = a - delta;
                let s = if s < 0.0 && s > -1e-7 { 0.0 } else { s };
                UtilityFunction::linear(s, b)?
            }
        };
    }
    Instance::new(jobs)
}

/// Cheapest non-negative modification making the follower reproduce the
/// target order: one forward pass over target positions, each position
/// raised (intercepts) or cut (slopes) just enough to win its slot against
/// every earlier position. Slope demands beyond the available slope are
/// infeasible and name the failing position.
pub fn enforce_nonneg(inst: &Instance, spec: &TargetSpec) -> Result<Adjustment> {
    if spec.signed {
        return Err(SolverError::ContractViolation(
            "enforce_nonneg expects signed = false".into(),
        ));
    }
    let data = target_data(inst, spec)?;
    let n = data.idx.len();
    let mut deltas = vec![0.0_f64; n];
    match (spec.follower, spec.lever) {
        (Follower::FairGreedy, Lever::Intercept) => {
            for j in 1..n {
                let t = data.prefix[j];
                let own = data.intercepts[j] - data.slopes[j] * t;
                let mut need = 0.0_f64;
                for l in 0..j {
                    let margin =
                        tie_margin_needed(data.idx[j], data.idx[l], spec.follower, spec.tie_margin);
                    let rival = data.intercepts[l] + deltas[l] - data.slopes[l] * t;
                    need = need.max(rival - own + margin);
                }
                deltas[j] = need.max(0.0);
            }
        }
        (Follower::FairGreedy, Lever::Slope) => {
            for j in 1..n {
                let t = data.prefix[j];
                let mut need = 0.0_f64;
                for l in 0..j {
                    let margin =
                        tie_margin_needed(data.idx[j], data.idx[l], spec.follower, spec.tie_margin);
                    let cut = data.slopes[j] - (data.slopes[l] - deltas[l])
                        + (data.intercepts[l] - data.intercepts[j] + margin) / t;
                    need = need.max(cut);
                }
                deltas[j] = need.max(0.0);
                if deltas[j] > data.slopes[j] + tol::EPS {
                    return Err(SolverError::Infeasible(format!(
                        "position {} ({}) needs a slope cut of {} but only {} is available",
                        j + 1,
                        spec.order[j],
                        deltas[j],
                        data.slopes[j]
                    )));
                }
            }
        }
        (Follower::Wspt, Lever::Slope) => {
            let mut min_ratio = f64::INFINITY;
            for j in 0..n {
                if j > 0 {
                    let mut margin = 0.0_f64;
                    for l in 0..j {
                        margin = margin.max(tie_margin_needed(
                            data.idx[j],
                            data.idx[l],
                            spec.follower,
                            spec.tie_margin,
                        ));
                    }
                    // The margin is in ratio units.
                    let cut =
                        data.slopes[j] - data.durations[j] * (min_ratio - margin);
                    deltas[j] = cut.max(0.0);
                    if deltas[j] > data.slopes[j] + tol::EPS {
                        return Err(SolverError::Infeasible(format!(
                            "position {} ({}) needs a slope cut of {} but only {} is available",
                            j + 1,
                            spec.order[j],
                            deltas[j],
                            data.slopes[j]
                        )));
                    }
                }
                let ratio = (data.slopes[j] - deltas[j]) / data.durations[j];
                min_ratio = min_ratio.min(ratio);
            }
        }
        (Follower::Wspt, Lever::Intercept) => unreachable!("rejected at construction"),
    }
    adjustment_from(inst, spec, &data, &deltas)
}

/// Signed routes for [`enforce_signed`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignedMethod {
    /// Linear program minimizing the total absolute change.
    Lp,
    /// Ratio-grid dynamic program; ratio-rule follower with slopes only.
    Dp,
}

/// Minimum total absolute modification enforcing the target order when
/// deltas of both signs are allowed.
pub fn enforce_signed(
    inst: &Instance,
    spec: &TargetSpec,
    method: SignedMethod,
) -> Result<Adjustment> {
    if !spec.signed {
        return Err(SolverError::ContractViolation(
            "enforce_signed expects signed = true".into(),
        ));
    }
    let data = target_data(inst, spec)?;
    match method {
        SignedMethod::Lp => enforce_signed_lp(inst, spec, &data),
        SignedMethod::Dp => {
            if spec.follower != Follower::Wspt || spec.lever != Lever::Slope {
                return Err(SolverError::UnsupportedVariant(
                    "the ratio-grid dynamic program needs the ratio-rule follower and slopes"
                        .into(),
                ));
            }
            let (_, deltas) = wspt_slope_dp(&data);
            adjustment_from(inst, spec, &data, &deltas)
        }
    }
}

fn enforce_signed_lp(inst: &Instance, spec: &TargetSpec, data: &TargetData) -> Result<Adjustment> {
    let n = data.idx.len();
    // Variables: positive and negative parts per position.
    let minimize = vec![1.0; 2 * n];
    let mut rows: Vec<(Vec<f64>, Cmp, f64)> = Vec::new();
    let var = |pos: usize, negative: bool| -> usize { pos + if negative { n } else { 0 } };

    for j in 1..n {
        let t = data.prefix[j];
        for l in 0..j {
            let margin =
                tie_margin_needed(data.idx[j], data.idx[l], spec.follower, spec.tie_margin);
            let mut coeffs = vec![0.0; 2 * n];
            match (spec.follower, spec.lever) {
                (Follower::FairGreedy, Lever::Intercept) => {
                    // delta_j - delta_l >= b_l - b_j - (a_l - a_j) t
                    coeffs[var(j, false)] = 1.0;
                    coeffs[var(j, true)] = -1.0;
                    coeffs[var(l, false)] = -1.0;
                    coeffs[var(l, true)] = 1.0;
                    let rhs = data.intercepts[l] - data.intercepts[j]
                        - (data.slopes[l] - data.slopes[j]) * t
                        + margin;
                    rows.push((coeffs, Cmp::Ge, rhs));
                }
                (Follower::FairGreedy, Lever::Slope) => {
                    // (delta_j - delta_l) t >= b_l - b_j - (a_l - a_j) t
                    coeffs[var(j, false)] = t;
                    coeffs[var(j, true)] = -t;
                    coeffs[var(l, false)] = -t;
                    coeffs[var(l, true)] = t;
                    let rhs = data.intercepts[l] - data.intercepts[j]
                        - (data.slopes[l] - data.slopes[j]) * t
                        + margin;
                    rows.push((coeffs, Cmp::Ge, rhs));
                }
                (Follower::Wspt, Lever::Slope) => {
                    // Ratio order (a_j - delta_j)/p_j <= (a_l - delta_l)/p_l:
                    // delta_j - (p_j / p_l) delta_l >= a_j - (p_j / p_l) a_l
                    let scale = data.durations[j] / data.durations[l];
                    coeffs[var(j, false)] = 1.0;
                    coeffs[var(j, true)] = -1.0;
                    coeffs[var(l, false)] = -scale;
                    coeffs[var(l, true)] = scale;
                    let rhs = data.slopes[j] - scale * data.slopes[l]
                        + margin * data.durations[j];
                    rows.push((coeffs, Cmp::Ge, rhs));
                }
                (Follower::Wspt, Lever::Intercept) => unreachable!(),
            }
        }
    }
    if spec.lever == Lever::Slope {
        for j in 0..n {
            let mut coeffs = vec![0.0; 2 * n];
            coeffs[var(j, false)] = 1.0;
            coeffs[var(j, true)] = -1.0;
            rows.push((coeffs, Cmp::Le, data.slopes[j]));
        }
    }
    let solution = simplex::solve(&LpProblem { minimize, rows }).map_err(|e| match e {
        simplex::LpError::Infeasible => {
            SolverError::Infeasible("no signed modification enforces the target order".into())
        }
        other => SolverError::ContractViolation(format!("simplex failed: {other:?}")),
    })?;
    let deltas: Vec<f64> = (0..n)
        .map(|j| solution.x[var(j, false)] - solution.x[var(j, true)])
        .collect();
    adjustment_from(inst, spec, &data, &deltas)
}

/// Ratio-grid dynamic program for the signed ratio-rule case: optimal new
/// ratios only take original values. `cost[pos][r]` is the cheapest way to
/// pin position `pos` at grid ratio `r` with all later positions at ratios
/// at most `r`; a prefix minimum makes each layer a linear sweep. Returns
/// the cost table (grid ascending) and the optimal deltas.
pub(crate) fn wspt_slope_dp(data: &TargetData) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = data.idx.len();
    let mut grid: Vec<f64> = (0..n)
        .map(|j| data.slopes[j] / data.durations[j])
        .collect();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| *a == *b);
    let m = grid.len();

    // table[pos][g]: cost with position pos fixed at grid[g], later ones <=.
    let mut table = vec![vec![0.0_f64; m]; n];
    let mut suffix_prefix_min = vec![0.0_f64; m]; // min over rho <= r of next layer
    for j in (0..n).rev() {
        for (g, &r) in grid.iter().enumerate() {
            let own = (data.slopes[j] - data.durations[j] * r).abs();
            let tail = if j + 1 < n { suffix_prefix_min[g] } else { 0.0 };
            table[j][g] = own + tail;
        }
        let mut running = f64::INFINITY;
        for g in 0..m {
            running = running.min(table[j][g]);
            suffix_prefix_min[g] = running;
        }
    }

    // Recover ratios: first position takes the global argmin, each later
    // one the argmin among grid values at most its predecessor's.
    let mut deltas = vec![0.0_f64; n];
    let mut bound = m - 1;
    for j in 0..n {
        let mut best_g = 0;
        for g in 0..=bound {
            if table[j][g] < table[j][best_g] {
                best_g = g;
            }
        }
        deltas[j] = data.slopes[j] - data.durations[j] * grid[best_g];
        bound = best_g;
    }
    (table, deltas)
}

/// Re-runs the declared follower on a (modified) instance and checks that
/// the target order is among the orders consistent with its choices: at
/// each step the target job must be within the tie margin of the best
/// candidate (fair greedy), or consecutive ratios must be non-increasing
/// (ratio rule).
pub fn verify_target(inst: &Instance, spec: &TargetSpec) -> bool {
    let Ok(data) = target_data(inst, spec) else {
        return false;
    };
    let slack = spec.tie_margin.max(tol::EPS);
    match spec.follower {
        Follower::FairGreedy => {
            let n = data.idx.len();
            let mut t = data.prefix[n - 1];
            let mut remaining: Vec<usize> = (0..n).collect();
            for pos in (0..n).rev() {
                let best = remaining
                    .iter()
                    .map(|&p| data.intercepts[p] - data.slopes[p] * t)
                    .fold(f64::NEG_INFINITY, f64::max);
                let own = data.intercepts[pos] - data.slopes[pos] * t;
                if own < best - slack {
                    return false;
                }
                remaining.retain(|&p| p != pos);
                t -= data.durations[pos];
            }
            true
        }
        Follower::Wspt => {
            let ratios: Vec<f64> = (0..data.idx.len())
                .map(|j| data.slopes[j] / data.durations[j])
                .collect();
            ratios.windows(2).all(|w| w[1] <= w[0] + slack)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Job;
    use crate::maxmin::{max_min_greedy, system_optimal_linear};

    fn linear_instance(data: &[(f64, f64, f64)]) -> Instance {
        Instance::new(
            data.iter()
                .enumerate()
                .map(|(i, &(p, a, b))| Job::linear(format!("j{i}"), p, a, b))
                .collect(),
        )
        .unwrap()
    }

    fn ids(names: &[&str]) -> Vec<JobId> {
        names.iter().map(|&s| JobId::new(s)).collect()
    }

    #[test]
    fn wspt_intercept_rejected() {
        assert!(matches!(
            TargetSpec::new(ids(&["j0"]), Follower::Wspt, Lever::Intercept, false),
            Err(SolverError::UnsupportedVariant(_))
        ));
    }

    #[test]
    fn natural_order_costs_nothing() {
        let inst = linear_instance(&[(1.0, 2.0, 11.0), (2.0, 1.0, 7.0), (1.0, 3.0, 15.0)]);
        let natural = max_min_greedy(&inst).unwrap();
        let order: Vec<JobId> = natural
            .schedule
            .entries()
            .iter()
            .map(|e| e.job.clone())
            .collect();
        let spec = TargetSpec::new(order, Follower::FairGreedy, Lever::Intercept, false).unwrap();
        let adj = enforce_nonneg(&inst, &spec).unwrap();
        assert!(adj.per_job_delta.values().all(|&d| d.abs() < 1e-9));
        assert_eq!(adj.budget_used, 0.0);

        let wspt = system_optimal_linear(&inst).unwrap();
        let order: Vec<JobId> = wspt.schedule.entries().iter().map(|e| e.job.clone()).collect();
        let spec = TargetSpec::new(order, Follower::Wspt, Lever::Slope, false).unwrap();
        let adj = enforce_nonneg(&inst, &spec).unwrap();
        assert!(adj.per_job_delta.values().all(|&d| d.abs() < 1e-9));
    }

    #[test]
    fn intercept_enforcement_worked_pair() {
        // Both unit jobs, second far below the first; forcing (j0, j1)
        // requires lifting j1 to tie j0 at time 2.
        let inst = linear_instance(&[(1.0, 1.0, 5.0), (1.0, 1.0, 1.0)]);
        let spec = TargetSpec::new(
            ids(&["j0", "j1"]),
            Follower::FairGreedy,
            Lever::Intercept,
            false,
        )
        .unwrap();
        let adj = enforce_nonneg(&inst, &spec).unwrap();
        assert_eq!(adj.per_job_delta[&"j0".into()], 0.0);
        assert_eq!(adj.per_job_delta[&"j1".into()], 4.0);
        let modified = apply_deltas(&inst, &adj.per_job_delta, Lever::Intercept).unwrap();
        assert!(verify_target(&modified, &spec));
        // Per-position minimality: a hair less and j0 wins the last slot.
        let mut less = adj.per_job_delta.clone();
        *less.get_mut(&"j1".into()).unwrap() -= 1e-3;
        let broken = apply_deltas(&inst, &less, Lever::Intercept).unwrap();
        let r = max_min_greedy(&broken).unwrap();
        assert_eq!(r.schedule.entries()[1].job.as_str(), "j0");
    }

    #[test]
    fn slope_enforcement_can_be_infeasible() {
        // j1 has a tiny intercept and must precede a huge-intercept job;
        // even a full slope cut cannot lift it enough at time 2.
        let inst = linear_instance(&[(1.0, 1.0, 2.0), (1.0, 1.0, 50.0)]);
        let spec = TargetSpec::new(
            ids(&["j0", "j1"]),
            Follower::FairGreedy,
            Lever::Slope,
            false,
        )
        .unwrap();
        // Wait: position 2 is j1 (huge intercept), it wins anyway. Force the
        // reverse order instead: j1 first, j0 second.
        let spec_rev = TargetSpec::new(
            ids(&["j1", "j0"]),
            Follower::FairGreedy,
            Lever::Slope,
            false,
        )
        .unwrap();
        assert!(enforce_nonneg(&inst, &spec).is_ok());
        match enforce_nonneg(&inst, &spec_rev) {
            Err(SolverError::Infeasible(msg)) => assert!(msg.contains("j0")),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn wspt_slope_enforcement_reorders_ratios() {
        let inst = linear_instance(&[(2.0, 1.0, 9.0), (1.0, 3.0, 9.0)]);
        // Natural ratio order: j1 (3) then j0 (0.5). Force j0 first.
        let spec = TargetSpec::new(ids(&["j0", "j1"]), Follower::Wspt, Lever::Slope, false)
            .unwrap();
        let adj = enforce_nonneg(&inst, &spec).unwrap();
        let modified = apply_deltas(&inst, &adj.per_job_delta, Lever::Slope).unwrap();
        assert!(verify_target(&modified, &spec));
        // j1's ratio must drop to j0's: cut 3 - 1*0.5 = 2.5.
        assert!((adj.per_job_delta[&"j1".into()] - 2.5).abs() < 1e-9);
    }

    #[test]
    fn signed_lp_at_most_nonneg_cost() {
        let inst = linear_instance(&[
            (1.0, 1.0, 4.0),
            (2.0, 2.0, 9.0),
            (1.0, 1.0, 12.0),
            (2.0, 3.0, 16.0),
        ]);
        let order = ids(&["j2", "j0", "j3", "j1"]);
        let nonneg = TargetSpec::new(
            order.clone(),
            Follower::FairGreedy,
            Lever::Intercept,
            false,
        )
        .unwrap();
        let signed =
            TargetSpec::new(order, Follower::FairGreedy, Lever::Intercept, true).unwrap();
        let a = enforce_nonneg(&inst, &nonneg).unwrap();
        let b = enforce_signed(&inst, &signed, SignedMethod::Lp).unwrap();
        assert!(b.budget_used <= a.budget_used + 1e-7);
        let modified = apply_deltas(&inst, &b.per_job_delta, Lever::Intercept).unwrap();
        assert!(verify_target(&modified, &signed));
    }

    #[test]
    fn signed_lp_beats_delta_grid_on_three_jobs() {
        // Natural order is (j2, j1, j0); the target reverses it. Allowing
        // negative deltas halves the non-negative cost.
        let inst = linear_instance(&[(1.0, 1.0, 2.0), (1.0, 1.0, 1.5), (1.0, 1.0, 1.0)]);
        let order = ids(&["j0", "j1", "j2"]);
        let spec =
            TargetSpec::new(order, Follower::FairGreedy, Lever::Intercept, true).unwrap();
        let lp = enforce_signed(&inst, &spec, SignedMethod::Lp).unwrap();
        // Grid search over deltas in [-1.5, 1.5] at resolution 0.01.
        let steps: Vec<f64> = (-150..=150).map(|k| k as f64 / 100.0).collect();
        let mut best = f64::INFINITY;
        let base: Vec<f64> = vec![2.0, 1.5, 1.0];
        // Selection constraints at prefix times 2 and 3 for order (j0, j1, j2).
        for &d2 in &steps {
            for &d1 in &steps {
                for &d0 in &steps {
                    let u = |j: usize, t: f64| -> f64 { base[j] + [d0, d1, d2][j] - t };
                    if u(1, 2.0) >= u(0, 2.0) - 1e-12
                        && u(2, 3.0) >= u(0, 3.0) - 1e-12
                        && u(2, 3.0) >= u(1, 3.0) - 1e-12
                    {
                        best = best.min(d0.abs() + d1.abs() + d2.abs());
                    }
                }
            }
        }
        assert!(lp.budget_used <= best + 1e-7);
        assert!(best <= lp.budget_used + 0.05);
        // And the signed optimum undercuts the non-negative forward pass.
        let nonneg_spec = TargetSpec::new(
            ids(&["j0", "j1", "j2"]),
            Follower::FairGreedy,
            Lever::Intercept,
            false,
        )
        .unwrap();
        let nonneg = enforce_nonneg(&inst, &nonneg_spec).unwrap();
        assert!(lp.budget_used < nonneg.budget_used - 0.25);
    }

    #[test]
    fn dp_and_lp_agree_for_ratio_follower() {
        let inst = linear_instance(&[
            (2.0, 4.0, 20.0),
            (1.0, 1.0, 8.0),
            (3.0, 5.0, 30.0),
            (2.0, 2.0, 12.0),
            (1.0, 3.0, 10.0),
        ]);
        let order = ids(&["j1", "j3", "j0", "j4", "j2"]);
        let spec = TargetSpec::new(order, Follower::Wspt, Lever::Slope, true).unwrap();
        let lp = enforce_signed(&inst, &spec, SignedMethod::Lp).unwrap();
        let dp = enforce_signed(&inst, &spec, SignedMethod::Dp).unwrap();
        assert!((lp.budget_used - dp.budget_used).abs() < 1e-6);
        let modified = apply_deltas(&inst, &dp.per_job_delta, Lever::Slope).unwrap();
        assert!(verify_target(&modified, &spec));
    }

    #[test]
    fn dp_table_prefix_minima_are_monotone() {
        let inst = linear_instance(&[(2.0, 4.0, 20.0), (1.0, 1.0, 8.0), (3.0, 5.0, 30.0)]);
        let spec = TargetSpec::new(
            ids(&["j1", "j0", "j2"]),
            Follower::Wspt,
            Lever::Slope,
            true,
        )
        .unwrap();
        let data = target_data(&inst, &spec).unwrap();
        let (table, _) = wspt_slope_dp(&data);
        for layer in &table {
            let mut running = f64::INFINITY;
            let mut prefix = Vec::new();
            for &v in layer {
                running = running.min(v);
                prefix.push(running);
            }
            for w in prefix.windows(2) {
                assert!(w[1] <= w[0] + 1e-12);
            }
        }
    }

    #[test]
    fn verify_rejects_wrong_order_on_unmodified_instance() {
        let inst = linear_instance(&[(1.0, 1.0, 5.0), (1.0, 1.0, 1.0)]);
        let spec = TargetSpec::new(
            ids(&["j0", "j1"]),
            Follower::FairGreedy,
            Lever::Intercept,
            false,
        )
        .unwrap();
        assert!(!verify_target(&inst, &spec));
    }
}
