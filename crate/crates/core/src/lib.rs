//! Solvers for single-machine scheduling of self-interested agents whose
//! utilities decrease with their completion time.
//!
//! Two objectives are covered throughout: the fair one, maximizing the
//! minimum agent utility, and the system one, maximizing the utility sum.
//! The solvable variants each get a dedicated module:
//!
//! - [`maxmin`]: the backward greedy for the base problem, the generic
//!   target-value search, the earliest-due-date feasibility check and the
//!   ratio rule for linear total utility.
//! - [`release`]: a single release-dated job (dynamic program over split
//!   states, both objectives), unit durations (greedy and assignment
//!   reductions) and equal durations (search plus a start-grid feasibility
//!   kernel that may insert deliberate idle time).
//! - [`duedates`]: late-job minimization and the fair objective under a cap
//!   on the number of late jobs.
//! - [`adjust`]: budget-constrained modification of linear utilities
//!   (intercept raises, slope cuts, their signed extensions, fixed-area
//!   reshaping) and single-agent modification curves.
//! - [`resched`]: inserting a new agent into a solved schedule under
//!   compensation budgets.
//! - [`bilevel`]: enforcing a target sequence on a fair-scheduling or
//!   ratio-rule follower by modifying intercepts or slopes.
//! - [`oracle`]: permutation brute force grounding all of the above in
//!   tests.
//!
//! All solvers are pure functions over immutable inputs. With the default
//! `parallel` feature the permutation oracle and the release-date dynamic
//! program fan out on the rayon pool; without it everything runs
//! sequentially.

pub mod adjust;
pub mod bilevel;
pub mod duedates;
pub mod error;
pub mod instance;
pub mod maxmin;
pub mod oracle;
pub mod release;
pub mod resched;
pub mod schedule;
pub mod simplex;
pub mod tol;
pub mod utility;

mod assignment;

pub use error::{Result, SolverError};
pub use instance::{Instance, Job, JobId};
pub use schedule::{evaluate_schedule, normalize, normalize_and_ranges, Diagnostics, Schedule, ScheduleEntry, SolveReport};
pub use utility::{Segment, UtilityFunction};

/// Which of the two objectives a solver should optimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Maximize the minimum agent utility.
    MaxMin,
    /// Maximize the total utility.
    Sum,
}
