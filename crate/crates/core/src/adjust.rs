//! Budget-constrained modification of linear utilities.
//!
//! All procedures start from the fair greedy schedule; the modifications
//! below never change which order the greedy picks, so raising the lowest
//! utilities on the fixed base sequence is optimal. Intercept raises are a
//! plain water fill over utility levels; slope cuts are a water fill with
//! per-job rates `1 / C_j` and per-job caps. The signed variants equalize
//! all utilities at a common level. Fixed-area reshaping turns every linear
//! utility into the best non-negative line of the same area, which sorts
//! jobs by area. A single agent's best response is a sawtooth curve, traced
//! by re-running the greedy just past each structural breakpoint.

use std::collections::BTreeMap;

use crate::error::{Result, SolverError};
use crate::instance::{Instance, JobId};
use crate::maxmin::max_min_greedy;
use crate::schedule::{evaluate_schedule, Diagnostics, SolveReport};
use crate::tol;
use crate::utility::UtilityFunction;

/// Which parameter a budget acts on and whether negative deltas are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdjustMode {
    /// Raise intercepts, `delta >= 0`.
    InterceptUp,
    /// Cut slopes, `0 <= delta <= slope`.
    SlopeDown,
    /// Intercept changes of either sign; all utilities end up equal.
    InterceptSigned,
    /// Slope changes of either sign; utilities are equalized, then raised
    /// jointly until the budget runs out or a slope hits zero.
    SlopeSigned,
}

/// Per-job deltas plus the budget actually consumed and the utility level
/// reached by the worst-off agent.
#[derive(Debug, Clone, PartialEq)]
pub struct Adjustment {
    pub per_job_delta: BTreeMap<JobId, f64>,
    pub budget_used: f64,
    pub achieved_min: f64,
}

/// Water-fill outcome over plain utility levels.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterFill {
    pub level: f64,
    pub deltas: Vec<f64>,
}

/// Final level for a break set of size `count`: identical formula in both
/// water-fill implementations so their outputs match bit for bit on exact
/// input data.
fn level_for(prefix_sum: f64, count: usize, budget: f64) -> f64 {
    (prefix_sum + budget) / count as f64
}

/// Iterative water fill: raise the lowest group of values to each next
/// distinct level until the budget is exhausted. Spends the whole budget.
pub fn water_fill(values: &[f64], budget: f64) -> WaterFill {
    assert!(!values.is_empty() && budget >= 0.0);
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut prefix = sorted[0];
    let mut k = 1usize;
    while k < sorted.len() {
        // Cost to lift the first k values to the next one.
        let cost = sorted[k] * k as f64 - prefix;
        if cost > budget {
            break;
        }
        prefix += sorted[k];
        k += 1;
    }
    let level = level_for(prefix, k, budget);
    let deltas = values.iter().map(|&v| (level - v).max(0.0)).collect();
    WaterFill { level, deltas }
}

fn median_of_medians(values: &mut [f64]) -> f64 {
    if values.len() <= 5 {
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return values[values.len() / 2];
    }
    let mut medians: Vec<f64> = values
        .chunks_mut(5)
        .map(|c| {
            c.sort_by(|a, b| a.partial_cmp(b).unwrap());
            c[c.len() / 2]
        })
        .collect();
    median_of_medians(&mut medians)
}

/// Selection-based water fill: finds the break job by repeated
/// median-of-medians partitioning instead of sorting, linear time overall.
/// Produces the same break set as [`water_fill`] and finishes with the same
/// level formula.
pub fn water_fill_select(values: &[f64], budget: f64) -> WaterFill {
    assert!(!values.is_empty() && budget >= 0.0);
    let mut scratch: Vec<f64> = values.to_vec();
    let mut low_count = 0usize;
    let mut low_sum = 0.0_f64;
    loop {
        if scratch.is_empty() {
            break;
        }
        let pivot = median_of_medians(&mut scratch.clone());
        let below: Vec<f64> = scratch.iter().copied().filter(|&v| v < pivot).collect();
        let at: usize = scratch.iter().filter(|&&v| v == pivot).count();
        let above: Vec<f64> = scratch.iter().copied().filter(|&v| v > pivot).collect();
        let below_sum: f64 = below.iter().sum();
        // Raising everything strictly below the pivot up to it costs:
        let cost =
            (low_count + below.len()) as f64 * pivot - (low_sum + below_sum);
        if cost > budget {
            scratch = below;
        } else {
            low_count += below.len() + at;
            low_sum += below_sum + pivot * at as f64;
            scratch = above;
            if scratch.is_empty() {
                break;
            }
            // Can the level pass the smallest remaining value?
            let next = scratch.iter().copied().fold(f64::INFINITY, f64::min);
            let cost_next = low_count as f64 * next - low_sum;
            if cost_next > budget {
                break;
            }
        }
    }
    // The break set is everything accounted in (low_count, low_sum), but the
    // final level must match the iterative arithmetic: recompute the prefix
    // sum over the identified break set in ascending order.
    let mut members: Vec<f64> = values.to_vec();
    members.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = low_count.max(1);
    let prefix: f64 = members[..k].iter().sum();
    let level = level_for(prefix, k, budget);
    let deltas = values.iter().map(|&v| (level - v).max(0.0)).collect();
    WaterFill { level, deltas }
}

fn base_data(inst: &Instance) -> Result<(SolveReport, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    if !inst.all_linear() {
        return Err(SolverError::UnsupportedVariant(
            "budget adjustment requires linear utilities".into(),
        ));
    }
    let base = max_min_greedy(inst)?;
    let order = base.schedule.order_indices(inst)?;
    let mut completion = vec![0.0; inst.len()];
    let mut t = 0.0;
    for &idx in &order {
        t += inst.job(idx).duration;
        completion[idx] = t;
    }
    let mut slopes = vec![0.0; inst.len()];
    let mut intercepts = vec![0.0; inst.len()];
    let mut utilities = vec![0.0; inst.len()];
    for (i, job) in inst.jobs().iter().enumerate() {
        let (a, b) = job.utility.linear_coefficients().unwrap();
        slopes[i] = a;
        intercepts[i] = b;
        utilities[i] = base.per_job_utility[&job.id];
    }
    Ok((base, completion, slopes, intercepts, utilities))
}

fn require_positive_slopes(slopes: &[f64]) -> Result<()> {
    if slopes.iter().any(|&a| a <= 0.0) {
        return Err(SolverError::UnsupportedVariant(
            "slope adjustment requires strictly positive decrease rates".into(),
        ));
    }
    Ok(())
}

/// Slope cut by water fill with per-job rates and caps. Stops at the first
/// job whose slope hits zero; its utility cannot rise further, so neither
/// can the minimum.
fn slope_down_level(
    utilities: &[f64],
    intercepts: &[f64],
    completion: &[f64],
    budget: f64,
) -> f64 {
    let n = utilities.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| utilities[a].partial_cmp(&utilities[b]).unwrap());
    let mut level = utilities[order[0]];
    let mut active: Vec<usize> = Vec::new();
    let mut pos = 0usize;
    let mut remaining = budget;
    loop {
        while pos < n && utilities[order[pos]] <= level + tol::EPS {
            active.push(order[pos]);
            pos += 1;
        }
        let rate: f64 = active.iter().map(|&j| 1.0 / completion[j]).sum();
        let cap = active
            .iter()
            .map(|&j| intercepts[j])
            .fold(f64::INFINITY, f64::min);
        let next_value = if pos < n {
            utilities[order[pos]]
        } else {
            f64::INFINITY
        };
        let target = cap.min(next_value);
        let cost = (target - level) * rate;
        if !target.is_finite() || cost >= remaining {
            level += remaining / rate;
            break;
        }
        remaining -= cost;
        level = target;
        if cap <= next_value {
            // Saturation: some active job reached a zero slope.
            break;
        }
    }
    level
}

/// Budget-constrained utility improvement on the fair greedy schedule.
/// Returns the per-job deltas and the report of the base sequence evaluated
/// under the modified utilities.
pub fn budget_adjust(
    inst: &Instance,
    mode: AdjustMode,
    budget: f64,
) -> Result<(Adjustment, SolveReport)> {
    if budget < 0.0 {
        return Err(SolverError::ContractViolation(
            "budget must be non-negative".into(),
        ));
    }
    let (base, completion, slopes, intercepts, utilities) = base_data(inst)?;
    let n = inst.len();

    let (deltas, budget_used, achieved): (Vec<f64>, f64, f64) = match mode {
        AdjustMode::InterceptUp => {
            let wf = water_fill(&utilities, budget);
            let used = wf.deltas.iter().sum();
            (wf.deltas, used, wf.level)
        }
        AdjustMode::SlopeDown => {
            require_positive_slopes(&slopes)?;
            let level = slope_down_level(&utilities, &intercepts, &completion, budget);
            let deltas: Vec<f64> = (0..n)
                .map(|j| {
                    let need = (level - utilities[j]) / completion[j];
                    need.max(0.0).min(slopes[j])
                })
                .collect();
            let used = deltas.iter().sum();
            (deltas, used, level)
        }
        AdjustMode::InterceptSigned => {
            let total: f64 = utilities.iter().sum();
            let level = (total + budget) / n as f64;
            let deltas: Vec<f64> = utilities.iter().map(|&u| level - u).collect();
            (deltas, budget, level)
        }
        AdjustMode::SlopeSigned => {
            require_positive_slopes(&slopes)?;
            // Equalizing down is free in the signed budget; the common level
            // then rises until the budget binds or some slope reaches zero.
            let inv_c: f64 = completion.iter().map(|&c| 1.0 / c).sum();
            let slope_sum: f64 = slopes.iter().sum();
            let ratio_sum: f64 = intercepts
                .iter()
                .zip(&completion)
                .map(|(&b, &c)| b / c)
                .sum();
            let level_budget = (budget - slope_sum + ratio_sum) / inv_c;
            let cap = intercepts.iter().copied().fold(f64::INFINITY, f64::min);
            let level = level_budget.min(cap);
            let deltas: Vec<f64> = (0..n)
                .map(|j| slopes[j] - (intercepts[j] - level) / completion[j])
                .collect();
            let used = deltas.iter().sum();
            (deltas, used, level)
        }
    };

    let modified = inst.map_utilities(|i, job| {
        let (a, b) = job.utility.linear_coefficients().unwrap();
        match mode {
            AdjustMode::InterceptUp | AdjustMode::InterceptSigned => UtilityFunction::Linear {
                slope: a,
                intercept: b + deltas[i],
            },
            AdjustMode::SlopeDown | AdjustMode::SlopeSigned => UtilityFunction::Linear {
                slope: a - deltas[i],
                intercept: b,
            },
        }
    })?;
    let mut report = evaluate_schedule(&modified, &base.schedule)?;
    report.diagnostics = Diagnostics::default();

    let per_job_delta = inst
        .jobs()
        .iter()
        .zip(&deltas)
        .map(|(job, &d)| (job.id.clone(), d))
        .collect();
    Ok((
        Adjustment {
            per_job_delta,
            budget_used,
            achieved_min: achieved,
        },
        report,
    ))
}

/// Fair schedule when every agent reshapes its line to the best non-negative
/// one of its fixed area: jobs run in order of non-decreasing area.
pub fn area_schedule(inst: &Instance) -> Result<SolveReport> {
    let total = inst.total_duration();
    let mut areas = Vec::with_capacity(inst.len());
    for job in inst.jobs() {
        match job.utility {
            UtilityFunction::Area { area, horizon } if tol::eq(horizon, total) => {
                areas.push(area)
            }
            UtilityFunction::Area { horizon, .. } => {
                return Err(SolverError::UnsupportedVariant(format!(
                    "area utility of {} spans {horizon}, instance total is {total}",
                    job.id
                )))
            }
            _ => {
                return Err(SolverError::UnsupportedVariant(format!(
                    "area scheduling requires area utilities, {} is not",
                    job.id
                )))
            }
        }
    }
    let mut order: Vec<usize> = (0..inst.len()).collect();
    order.sort_by(|&a, &b| {
        areas[a]
            .partial_cmp(&areas[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    Ok(crate::schedule::report_for_order(
        inst,
        &order,
        Diagnostics::default(),
    ))
}

/// Which parameter a single agent tunes in [`single_agent_curve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveMode {
    Intercept,
    Slope,
    Area,
}

/// One affine piece of the modified-utility curve, covering
/// `[delta_from, delta_to)` with `utility = value_at_start + slope * (delta - delta_from)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePiece {
    pub delta_from: f64,
    pub delta_to: f64,
    pub slope: f64,
    pub value_at_start: f64,
}

impl CurvePiece {
    pub fn value_at(&self, delta: f64) -> f64 {
        self.value_at_start + self.slope * (delta - self.delta_from)
    }
}

/// Piecewise-affine utility of one agent as a function of its own parameter
/// change, with the local maxima at the left limits of each drop.
#[derive(Debug, Clone, PartialEq)]
pub struct SawtoothCurve {
    pub pieces: Vec<CurvePiece>,
    pub local_maxima: Vec<(f64, f64)>,
}

impl SawtoothCurve {
    pub fn value_at(&self, delta: f64) -> Option<f64> {
        self.pieces
            .iter()
            .find(|p| delta >= p.delta_from - tol::EPS && delta <= p.delta_to + tol::EPS)
            .map(|p| p.value_at(delta))
    }

    /// Best utility over the whole range and the delta attaining it.
    pub fn best(&self) -> (f64, f64) {
        self.local_maxima
            .iter()
            .fold((0.0, f64::NEG_INFINITY), |acc, &(d, v)| {
                if v > acc.1 {
                    (d, v)
                } else {
                    acc
                }
            })
    }
}

// Nudge past a breakpoint when re-running the follower, small against any
// utility gap in the data but large against accumulated rounding.
const KICK: f64 = 1e-9;

/// Traces the modified utility of job `id` as its intercept, slope or area
/// grows by up to `delta_max`, re-running the fair schedule just past each
/// structural breakpoint. Within a piece the curve is affine; at each
/// breakpoint the job displaces a later-scheduled one and its utility drops.
pub fn single_agent_curve(
    inst: &Instance,
    id: &JobId,
    mode: CurveMode,
    delta_max: f64,
) -> Result<SawtoothCurve> {
    let i = inst
        .index_of(id)
        .ok_or_else(|| SolverError::InvalidInstance(format!("no job {id}")))?;
    if delta_max <= 0.0 {
        return Err(SolverError::ContractViolation(
            "delta_max must be positive".into(),
        ));
    }
    match mode {
        CurveMode::Intercept | CurveMode::Slope => {
            if !inst.all_linear() {
                return Err(SolverError::UnsupportedVariant(
                    "intercept and slope curves require linear utilities".into(),
                ));
            }
            if inst.has_release_dates() {
                return Err(SolverError::UnsupportedVariant(
                    "modification curves require all release dates to be zero".into(),
                ));
            }
        }
        CurveMode::Area => {
            let total = inst.total_duration();
            if !inst.jobs().iter().all(|j| j.utility.is_area())
                || !inst.jobs().iter().all(|j| match j.utility {
                    UtilityFunction::Area { horizon, .. } => tol::eq(horizon, total),
                    _ => false,
                })
            {
                return Err(SolverError::UnsupportedVariant(
                    "area curves require area utilities over the instance total".into(),
                ));
            }
        }
    }
    let (slope_i, intercept_i) = match mode {
        CurveMode::Area => (0.0, 0.0),
        _ => inst.job(i).utility.linear_coefficients().unwrap(),
    };
    if mode == CurveMode::Slope && delta_max > slope_i + tol::EPS {
        return Err(SolverError::ContractViolation(format!(
            "slope delta {delta_max} exceeds the decrease rate {slope_i}"
        )));
    }
    let total = inst.total_duration();

    let modified_at = |delta: f64| -> Result<Instance> {
        let u = match mode {
            CurveMode::Intercept => UtilityFunction::Linear {
                slope: slope_i,
                intercept: intercept_i + delta,
            },
            CurveMode::Slope => UtilityFunction::Linear {
                slope: slope_i - delta,
                intercept: intercept_i,
            },
            CurveMode::Area => match inst.job(i).utility {
                UtilityFunction::Area { area, horizon } => UtilityFunction::Area {
                    area: area + delta,
                    horizon,
                },
                _ => unreachable!(),
            },
        };
        inst.with_utility(i, u)
    };

    let solve_at = |delta: f64| -> Result<(f64, Vec<f64>)> {
        let m = modified_at(delta)?;
        let report = match mode {
            CurveMode::Area => area_schedule(&m)?,
            _ => max_min_greedy(&m)?,
        };
        let order = report.schedule.order_indices(&m)?;
        let mut completion = vec![0.0; m.len()];
        let mut t = 0.0;
        for &idx in &order {
            t += m.job(idx).duration;
            completion[idx] = t;
        }
        Ok((completion[i], completion))
    };

    let value_at = |delta: f64, c_i: f64| -> f64 {
        match mode {
            CurveMode::Intercept => intercept_i + delta - slope_i * c_i,
            CurveMode::Slope => intercept_i - (slope_i - delta) * c_i,
            CurveMode::Area => match inst.job(i).utility {
                UtilityFunction::Area { area, horizon } => {
                    UtilityFunction::Area {
                        area: area + delta,
                        horizon,
                    }
                    .eval(c_i)
                }
                _ => unreachable!(),
            },
        }
    };

    let piece_slope = |c_i: f64| -> f64 {
        match mode {
            CurveMode::Intercept => 1.0,
            CurveMode::Slope => c_i,
            CurveMode::Area => {
                if c_i <= total / 2.0 {
                    2.0 / total * (1.0 - c_i / total)
                } else {
                    1.0 / total
                }
            }
        }
    };

    let mut pieces: Vec<CurvePiece> = Vec::new();
    let mut local_maxima: Vec<(f64, f64)> = Vec::new();
    let mut delta = 0.0_f64;
    loop {
        let probe = if delta == 0.0 { 0.0 } else { delta + KICK };
        let (c_i, completions) = solve_at(probe)?;

        // Smallest further increase at which this job overtakes one that
        // currently completes later.
        let mut next: Option<f64> = None;
        for (k, job) in inst.jobs().iter().enumerate() {
            if k == i || completions[k] <= c_i + tol::EPS {
                continue;
            }
            let u_k = job.utility.eval(completions[k]);
            let threshold = match mode {
                CurveMode::Intercept => u_k - (intercept_i - slope_i * completions[k]),
                CurveMode::Slope => {
                    (u_k - intercept_i + slope_i * completions[k]) / completions[k]
                }
                CurveMode::Area => match (inst.job(i).utility.clone(), job.utility.clone()) {
                    (
                        UtilityFunction::Area { area: a_i, .. },
                        UtilityFunction::Area { area: a_k, .. },
                    ) => a_k - a_i,
                    _ => unreachable!(),
                },
            };
            if threshold > delta + 2.0 * KICK && next.map_or(true, |n| threshold < n) {
                next = Some(threshold);
            }
        }

        let slope = piece_slope(c_i);
        let start_value = value_at(delta, c_i);
        match next {
            Some(b) if b < delta_max => {
                pieces.push(CurvePiece {
                    delta_from: delta,
                    delta_to: b,
                    slope,
                    value_at_start: start_value,
                });
                local_maxima.push((b, start_value + slope * (b - delta)));
                delta = b;
            }
            _ => {
                pieces.push(CurvePiece {
                    delta_from: delta,
                    delta_to: delta_max,
                    slope,
                    value_at_start: start_value,
                });
                local_maxima.push((delta_max, start_value + slope * (delta_max - delta)));
                break;
            }
        }
    }
    Ok(SawtoothCurve {
        pieces,
        local_maxima,
    })
}
