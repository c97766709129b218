//! Non-increasing utility functions of the completion time.
//!
//! Three shapes are supported: plain linear functions, piecewise linear
//! functions with optional downward jumps, and the area-parameterized family
//! used by the fixed-area solvers (a triangle ramp that flattens at half the
//! horizon). Inverses are generalized: `inverse(t)` is the latest completion
//! time at which the target utility `t` is still reached, with `+inf` /
//! `-inf` as the "always" / "never" markers.

use crate::error::{Result, SolverError};
use crate::tol;

/// One piece of a piecewise linear utility. The piece covers
/// `[start, next_start)` and evaluates to `value - rate * (c - start)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub value: f64,
    /// Non-negative decrease per unit of time.
    pub rate: f64,
}

impl Segment {
    pub fn new(start: f64, value: f64, rate: f64) -> Self {
        Segment { start, value, rate }
    }
}

/// A non-increasing map from completion time to utility.
#[derive(Debug, Clone, PartialEq)]
pub enum UtilityFunction {
    /// `u(C) = intercept - slope * C` with `slope >= 0`.
    Linear { slope: f64, intercept: f64 },
    /// Left-closed segments; at a jump the value of the segment starting
    /// there applies (the right limit).
    Piecewise { segments: Vec<Segment> },
    /// Fixed-area family over `[0, horizon]`: a triangle of area `area`
    /// until half the horizon, constant `area / horizon` afterwards.
    Area { area: f64, horizon: f64 },
}

impl UtilityFunction {
    pub fn linear(slope: f64, intercept: f64) -> Result<Self> {
        if !slope.is_finite() || !intercept.is_finite() {
            return Err(SolverError::InvalidInstance(
                "utility coefficients must be finite".into(),
            ));
        }
        if slope < 0.0 {
            return Err(SolverError::InvalidInstance(format!(
                "linear utility requires a non-negative decrease rate, got {slope}"
            )));
        }
        Ok(UtilityFunction::Linear { slope, intercept })
    }

    /// Validated piecewise constructor. Segment starts must begin at 0 and be
    /// strictly increasing, rates non-negative, and values non-increasing
    /// across boundaries (downward jumps allowed).
    pub fn piecewise(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(SolverError::InvalidInstance(
                "piecewise utility needs at least one segment".into(),
            ));
        }
        if segments[0].start != 0.0 {
            return Err(SolverError::InvalidInstance(
                "piecewise utility must start at time 0".into(),
            ));
        }
        for seg in &segments {
            if !seg.start.is_finite() || !seg.value.is_finite() || !seg.rate.is_finite() {
                return Err(SolverError::InvalidInstance(
                    "piecewise segment fields must be finite".into(),
                ));
            }
            if seg.rate < 0.0 {
                return Err(SolverError::InvalidInstance(format!(
                    "piecewise segment at {} increases (rate {})",
                    seg.start, seg.rate
                )));
            }
        }
        for w in segments.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b.start <= a.start {
                return Err(SolverError::InvalidInstance(format!(
                    "piecewise segment starts must be strictly increasing ({} then {})",
                    a.start, b.start
                )));
            }
            let left_limit = a.value - a.rate * (b.start - a.start);
            if b.value > left_limit + tol::EPS {
                return Err(SolverError::InvalidInstance(format!(
                    "piecewise utility increases at the boundary {} ({} -> {})",
                    b.start, left_limit, b.value
                )));
            }
        }
        Ok(UtilityFunction::Piecewise { segments })
    }

    /// `u(C) = min(cap, intercept - slope * C)`: a plateau followed by the
    /// linear tail.
    pub fn capped_linear(slope: f64, intercept: f64, cap: f64) -> Result<Self> {
        if slope <= 0.0 || cap >= intercept {
            // No plateau; the cap never binds or the function is constant.
            return if cap >= intercept {
                Self::linear(slope, intercept)
            } else {
                Ok(UtilityFunction::Linear { slope: 0.0, intercept: cap.min(intercept) })
            };
        }
        let knee = (intercept - cap) / slope;
        Self::piecewise(vec![
            Segment::new(0.0, cap, 0.0),
            Segment::new(knee, cap, slope),
        ])
    }

    pub fn area(area: f64, horizon: f64) -> Result<Self> {
        if area < 0.0 || !area.is_finite() {
            return Err(SolverError::InvalidInstance(format!(
                "area utility requires a non-negative area, got {area}"
            )));
        }
        if horizon <= 0.0 || !horizon.is_finite() {
            return Err(SolverError::InvalidInstance(format!(
                "area utility requires a positive horizon, got {horizon}"
            )));
        }
        Ok(UtilityFunction::Area { area, horizon })
    }

    /// Utility at completion time `c >= 0`.
    #[inline]
    pub fn eval(&self, c: f64) -> f64 {
        debug_assert!(c >= -tol::EPS, "completion times are non-negative");
        match self {
            UtilityFunction::Linear { slope, intercept } => intercept - slope * c,
            UtilityFunction::Piecewise { segments } => {
                // Last segment whose start is <= c holds the value; at a jump
                // this is the right limit.
                let mut seg = &segments[0];
                for s in segments.iter().skip(1) {
                    if s.start <= c {
                        seg = s;
                    } else {
                        break;
                    }
                }
                seg.value - seg.rate * (c - seg.start)
            }
            UtilityFunction::Area { area, horizon } => {
                if c <= horizon / 2.0 {
                    2.0 * area / horizon * (1.0 - c / horizon)
                } else {
                    area / horizon
                }
            }
        }
    }

    /// Generalized inverse: `sup { C : u(C) >= target }`.
    ///
    /// Returns `f64::INFINITY` when the utility never drops below `target`
    /// and `f64::NEG_INFINITY` when even `u(0) < target`.
    pub fn inverse(&self, target: f64) -> f64 {
        match self {
            UtilityFunction::Linear { slope, intercept } => {
                if *slope == 0.0 {
                    if *intercept >= target {
                        f64::INFINITY
                    } else {
                        f64::NEG_INFINITY
                    }
                } else if *intercept < target {
                    f64::NEG_INFINITY
                } else {
                    (intercept - target) / slope
                }
            }
            UtilityFunction::Piecewise { segments } => {
                // Walk segments from the latest; the first one reaching the
                // target bounds the sup.
                for (i, seg) in segments.iter().enumerate().rev() {
                    if seg.value < target {
                        continue;
                    }
                    let end = segments.get(i + 1).map(|s| s.start);
                    if seg.rate == 0.0 {
                        return end.unwrap_or(f64::INFINITY);
                    }
                    let hit = seg.start + (seg.value - target) / seg.rate;
                    return match end {
                        Some(e) => hit.min(e),
                        None => hit,
                    };
                }
                f64::NEG_INFINITY
            }
            UtilityFunction::Area { area, horizon } => {
                let peak = 2.0 * area / horizon;
                let plateau = area / horizon;
                if target <= plateau {
                    f64::INFINITY
                } else if target > peak {
                    f64::NEG_INFINITY
                } else {
                    // Invert the ramp 2A/P (1 - C/P).
                    horizon * (1.0 - target / peak)
                }
            }
        }
    }

    /// The same function raised by the constant `shift`. Area utilities are
    /// materialized as their explicit two-piece form when shifted.
    pub fn shifted(&self, shift: f64) -> UtilityFunction {
        if shift == 0.0 {
            return self.clone();
        }
        match self {
            UtilityFunction::Linear { slope, intercept } => UtilityFunction::Linear {
                slope: *slope,
                intercept: intercept + shift,
            },
            UtilityFunction::Piecewise { segments } => UtilityFunction::Piecewise {
                segments: segments
                    .iter()
                    .map(|s| Segment::new(s.start, s.value + shift, s.rate))
                    .collect(),
            },
            UtilityFunction::Area { area, horizon } => {
                let peak = 2.0 * area / horizon;
                let plateau = area / horizon;
                UtilityFunction::Piecewise {
                    segments: vec![
                        Segment::new(0.0, peak + shift, peak / horizon),
                        Segment::new(horizon / 2.0, plateau + shift, 0.0),
                    ],
                }
            }
        }
    }

    pub fn value_at_zero(&self) -> f64 {
        self.eval(0.0)
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, UtilityFunction::Linear { .. })
    }

    pub fn is_area(&self) -> bool {
        matches!(self, UtilityFunction::Area { .. })
    }

    /// Decrease rate and intercept of a linear utility.
    pub fn linear_coefficients(&self) -> Option<(f64, f64)> {
        match self {
            UtilityFunction::Linear { slope, intercept } => Some((*slope, *intercept)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_eval_matches_two_job_example() {
        let u = UtilityFunction::linear(10.0, 21.0).unwrap();
        assert_eq!(u.eval(2.0), 1.0);
        assert_eq!(u.eval(0.0), 21.0);
    }

    #[test]
    fn capped_linear_has_plateau() {
        // min(5, 10 - C): constant until C = 5, linear afterwards.
        let u = UtilityFunction::capped_linear(1.0, 10.0, 5.0).unwrap();
        assert_eq!(u.eval(3.0), 5.0);
        assert_eq!(u.eval(5.0), 5.0);
        assert_eq!(u.eval(7.0), 3.0);
    }

    #[test]
    fn inverse_linear() {
        let u = UtilityFunction::linear(10.0, 21.0).unwrap();
        assert_eq!(u.inverse(1.0), 2.0);
        let flat = UtilityFunction::linear(0.0, 5.0).unwrap();
        assert_eq!(flat.inverse(3.0), f64::INFINITY);
        assert_eq!(flat.inverse(6.0), f64::NEG_INFINITY);
    }

    #[test]
    fn inverse_piecewise_jump_returns_boundary() {
        // Drop from 8 to 2 at time 4.
        let u = UtilityFunction::piecewise(vec![
            Segment::new(0.0, 8.0, 0.0),
            Segment::new(4.0, 2.0, 0.0),
        ])
        .unwrap();
        assert_eq!(u.inverse(5.0), 4.0);
        assert_eq!(u.eval(4.0), 2.0); // right limit at the jump
        assert_eq!(u.eval(3.9999), 8.0);
        assert_eq!(u.inverse(2.0), f64::INFINITY);
        assert_eq!(u.inverse(9.0), f64::NEG_INFINITY);
    }

    #[test]
    fn area_midpoint_and_inverse() {
        let u = UtilityFunction::area(4.0, 2.0).unwrap();
        // Passes through the midpoint (P/2, A/P).
        assert!(tol::eq(u.eval(1.0), 2.0));
        assert!(tol::eq(u.eval(0.5), 3.0));
        assert!(tol::eq(u.eval(1.7), 2.0));
        assert_eq!(u.inverse(2.0), f64::INFINITY);
        assert!(tol::eq(u.inverse(3.0), 0.5));
        assert_eq!(u.inverse(4.5), f64::NEG_INFINITY);
    }

    #[test]
    fn piecewise_rejects_increasing_values() {
        let err = UtilityFunction::piecewise(vec![
            Segment::new(0.0, 1.0, 0.0),
            Segment::new(1.0, 2.0, 0.0),
        ]);
        assert!(err.is_err());
    }

    #[test]
    fn shift_preserves_shape() {
        let u = UtilityFunction::linear(2.0, 1.0).unwrap();
        let s = u.shifted(1.0);
        assert_eq!(s.eval(1.0), u.eval(1.0) + 1.0);
        let a = UtilityFunction::area(4.0, 2.0).unwrap().shifted(3.0);
        assert!(tol::eq(a.eval(0.5), 6.0));
        assert!(tol::eq(a.eval(1.5), 5.0));
    }
}
