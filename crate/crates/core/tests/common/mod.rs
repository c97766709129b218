//! Random instance samplers shared by the integration tests. Parameters are
//! small integers so greedy, assignment and DP answers compare exactly
//! against the enumeration oracle.

use fairsched::{Instance, Job, Segment, UtilityFunction};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn linear_jobs(rng: &mut ChaCha8Rng, n: usize) -> Vec<Job> {
    (0..n)
        .map(|i| {
            let p = rng.gen_range(1..=4) as f64;
            let a = rng.gen_range(0..=5) as f64;
            let b = rng.gen_range(5..=40) as f64;
            Job::linear(format!("j{i}"), p, a, b)
        })
        .collect()
}

pub fn linear_instance(rng: &mut ChaCha8Rng, n: usize) -> Instance {
    Instance::new(linear_jobs(rng, n)).unwrap()
}

/// Strictly positive decrease rates, for the solvers that require them.
pub fn positive_slope_instance(rng: &mut ChaCha8Rng, n: usize) -> Instance {
    Instance::new(
        (0..n)
            .map(|i| {
                let p = rng.gen_range(1..=4) as f64;
                let a = rng.gen_range(1..=5) as f64;
                let b = rng.gen_range(5..=40) as f64;
                Job::linear(format!("j{i}"), p, a, b)
            })
            .collect(),
    )
    .unwrap()
}

/// Continuous piecewise utilities with integer breakpoints and rates.
pub fn piecewise_instance(rng: &mut ChaCha8Rng, n: usize) -> Instance {
    let jobs = (0..n)
        .map(|i| {
            let p = rng.gen_range(1..=3) as f64;
            let mut segments = Vec::new();
            let mut start = 0.0;
            let mut value = rng.gen_range(10..=40) as f64;
            let pieces = rng.gen_range(1..=3);
            for k in 0..pieces {
                let rate = rng.gen_range(0..=4) as f64;
                segments.push(Segment::new(start, value, rate));
                if k + 1 < pieces {
                    let span = rng.gen_range(1..=4) as f64;
                    value -= rate * span;
                    start += span;
                }
            }
            Job::new(
                format!("j{i}"),
                p,
                UtilityFunction::piecewise(segments).unwrap(),
            )
        })
        .collect();
    Instance::new(jobs).unwrap()
}

pub fn single_release_instance(rng: &mut ChaCha8Rng, n: usize) -> Instance {
    let mut jobs = linear_jobs(rng, n - 1);
    let p = rng.gen_range(1..=3) as f64;
    let r = rng.gen_range(1..=5) as f64;
    let a = rng.gen_range(0..=5) as f64;
    let b = rng.gen_range(10..=40) as f64;
    jobs.push(Job::linear("rel", p, a, b).with_release(r));
    Instance::new(jobs).unwrap()
}

pub fn unit_time_instance(rng: &mut ChaCha8Rng, n: usize) -> Instance {
    Instance::new(
        (0..n)
            .map(|i| {
                let r = rng.gen_range(0..=4) as f64;
                let a = rng.gen_range(0..=4) as f64;
                let b = rng.gen_range(8..=40) as f64;
                Job::linear(format!("j{i}"), 1.0, a, b).with_release(r)
            })
            .collect(),
    )
    .unwrap()
}

pub fn equal_time_instance(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Instance {
    Instance::new(
        (0..n)
            .map(|i| {
                let r = rng.gen_range(0..=5) as f64;
                let a = rng.gen_range(0..=4) as f64;
                let b = rng.gen_range(10..=40) as f64;
                Job::linear(format!("j{i}"), p, a, b).with_release(r)
            })
            .collect(),
    )
    .unwrap()
}

pub fn due_date_instance(rng: &mut ChaCha8Rng, n: usize) -> Instance {
    Instance::new(
        (0..n)
            .map(|i| {
                let p = rng.gen_range(1..=4) as f64;
                let a = rng.gen_range(0..=4) as f64;
                let b = rng.gen_range(10..=40) as f64;
                let d = rng.gen_range(1..=14) as f64;
                Job::linear(format!("j{i}"), p, a, b).with_due_date(d)
            })
            .collect(),
    )
    .unwrap()
}
