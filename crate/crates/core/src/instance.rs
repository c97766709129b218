//! Jobs and problem instances.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Result, SolverError};
use crate::utility::UtilityFunction;

/// Opaque job identifier. Solvers work on dense indices internally and use
/// ids only at the API boundary.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JobId(pub String);

impl JobId {
    pub fn new(s: impl Into<String>) -> Self {
        JobId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for JobId {
    fn from(s: &str) -> Self {
        JobId(s.to_owned())
    }
}

/// One agent's job: a duration, an optional release date and due date, and
/// the agent's utility function of the completion time.
#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub id: JobId,
    pub duration: f64,
    pub release: f64,
    pub due_date: Option<f64>,
    pub utility: UtilityFunction,
}

impl Job {
    pub fn new(id: impl Into<String>, duration: f64, utility: UtilityFunction) -> Self {
        Job {
            id: JobId::new(id),
            duration,
            release: 0.0,
            due_date: None,
            utility,
        }
    }

    /// Shorthand for a job with a linear utility `intercept - slope * C`.
    pub fn linear(id: impl Into<String>, duration: f64, slope: f64, intercept: f64) -> Self {
        Job::new(
            id,
            duration,
            UtilityFunction::Linear { slope, intercept },
        )
    }

    pub fn with_release(mut self, release: f64) -> Self {
        self.release = release;
        self
    }

    pub fn with_due_date(mut self, due: f64) -> Self {
        self.due_date = Some(due);
        self
    }
}

/// A validated, immutable set of jobs.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    jobs: Vec<Job>,
    total: f64,
}

impl Instance {
    /// Validates and builds an instance. Ids must be distinct, durations
    /// positive, release dates non-negative and due dates positive. A due
    /// date below the duration is accepted: such a job simply can never be
    /// on time, which is meaningful for the late-job-tolerant solvers.
    pub fn new(jobs: Vec<Job>) -> Result<Self> {
        if jobs.is_empty() {
            return Err(SolverError::InvalidInstance("no jobs given".into()));
        }
        let mut seen = HashSet::new();
        for job in &jobs {
            if !seen.insert(job.id.clone()) {
                return Err(SolverError::InvalidInstance(format!(
                    "duplicate job id {}",
                    job.id
                )));
            }
            if !(job.duration > 0.0) || !job.duration.is_finite() {
                return Err(SolverError::InvalidInstance(format!(
                    "job {} has non-positive duration {}",
                    job.id, job.duration
                )));
            }
            if job.release < 0.0 || !job.release.is_finite() {
                return Err(SolverError::InvalidInstance(format!(
                    "job {} has negative release date {}",
                    job.id, job.release
                )));
            }
            if let Some(d) = job.due_date {
                if !(d > 0.0) || !d.is_finite() {
                    return Err(SolverError::InvalidInstance(format!(
                        "job {} has non-positive due date {}",
                        job.id, d
                    )));
                }
            }
        }
        let total = jobs.iter().map(|j| j.duration).sum();
        Ok(Instance { jobs, total })
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn job(&self, idx: usize) -> &Job {
        &self.jobs[idx]
    }

    /// Sum of all durations.
    pub fn total_duration(&self) -> f64 {
        self.total
    }

    /// Upper bound on any completion time: the largest release date plus the
    /// total duration.
    pub fn completion_horizon(&self) -> f64 {
        let max_release = self
            .jobs
            .iter()
            .map(|j| j.release)
            .fold(0.0_f64, f64::max);
        max_release + self.total
    }

    pub fn index_of(&self, id: &JobId) -> Option<usize> {
        self.jobs.iter().position(|j| &j.id == id)
    }

    pub fn has_release_dates(&self) -> bool {
        self.jobs.iter().any(|j| j.release > 0.0)
    }

    pub fn all_linear(&self) -> bool {
        self.jobs.iter().all(|j| j.utility.is_linear())
    }

    /// Rebuilds the instance with one job's utility replaced.
    pub fn with_utility(&self, idx: usize, utility: UtilityFunction) -> Result<Instance> {
        let mut jobs = self.jobs.clone();
        jobs[idx].utility = utility;
        Instance::new(jobs)
    }

    /// Rebuilds the instance mapping every utility through `f`.
    pub fn map_utilities(
        &self,
        mut f: impl FnMut(usize, &Job) -> UtilityFunction,
    ) -> Result<Instance> {
        let jobs = self
            .jobs
            .iter()
            .enumerate()
            .map(|(i, j)| {
                let mut job = j.clone();
                job.utility = f(i, j);
                job
            })
            .collect();
        Instance::new(jobs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_ids() {
        let jobs = vec![Job::linear("a", 1.0, 1.0, 2.0), Job::linear("a", 1.0, 1.0, 2.0)];
        assert!(matches!(
            Instance::new(jobs),
            Err(SolverError::InvalidInstance(_))
        ));
    }

    #[test]
    fn rejects_nonpositive_duration() {
        let jobs = vec![Job::linear("a", 0.0, 1.0, 2.0)];
        assert!(Instance::new(jobs).is_err());
    }

    #[test]
    fn caches_total_duration() {
        let inst = Instance::new(vec![
            Job::linear("a", 1.5, 1.0, 2.0),
            Job::linear("b", 2.5, 1.0, 2.0),
        ])
        .unwrap();
        assert_eq!(inst.total_duration(), 4.0);
        assert_eq!(inst.completion_horizon(), 4.0);
    }

    #[test]
    fn accepts_due_date_below_duration() {
        // Such a job can never meet its due date; the bounded-late solvers
        // rely on being able to express that.
        let inst = Instance::new(vec![Job::linear("a", 4.0, 1.0, 10.0).with_due_date(2.0)]);
        assert!(inst.is_ok());
    }
}
