//! Absolute comparison tolerance used by every ordering test in the crate.
//!
//! All solvers work in `f64` and the search layers are tolerance based, so a
//! single global absolute epsilon keeps the feasibility tests of different
//! modules consistent with each other.

/// Default absolute tolerance for `>=` / `<=` style tests.
pub const EPS: f64 = 1e-9;

/// `a >= b` up to the global tolerance.
#[inline]
pub fn ge(a: f64, b: f64) -> bool {
    a >= b - EPS
}

/// `a <= b` up to the global tolerance.
#[inline]
pub fn le(a: f64, b: f64) -> bool {
    a <= b + EPS
}

/// `a == b` up to the global tolerance.
#[inline]
pub fn eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= EPS
}

/// `a > b` by more than the global tolerance.
#[inline]
pub fn gt(a: f64, b: f64) -> bool {
    a > b + EPS
}

/// `a < b` by more than the global tolerance.
#[inline]
pub fn lt(a: f64, b: f64) -> bool {
    a < b - EPS
}

/// True when `x` is within tolerance of an integer.
#[inline]
pub fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() <= EPS
}
