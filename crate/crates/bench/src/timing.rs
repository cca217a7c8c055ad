//! Warm, repeated timing windows.

use std::time::{Duration, Instant};

use crate::error::{BenchError, Result};
use crate::stats::mean_std;

/// Source of monotonic time.
pub trait Clock {
    /// Time since some fixed origin.
    fn now(&self) -> Duration;
}

/// Wall clock backed by [`Instant`].
#[derive(Debug, Clone, Copy)]
pub struct MonotonicClock {
    origin: Instant,
}

impl Default for MonotonicClock {
    fn default() -> Self {
        Self {
            origin: Instant::now(),
        }
    }
}

impl Clock for MonotonicClock {
    fn now(&self) -> Duration {
        self.origin.elapsed()
    }
}

/// Longest unmeasured warmup.
pub const MAX_WARMUP_WINDOWS: usize = 10;

/// Warmup stops once a window's mean is within this fraction of the previous one.
pub const WARMUP_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRecord {
    /// Seconds per fitness evaluation in each measured window.
    pub per_window: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation; needs two windows.
    pub std: Option<f64>,
    pub warmup_windows: usize,
}

/// One window: calls `run` until at least `length` has passed and returns
/// the elapsed time divided by the evaluations the runs reported.
fn window<C, F>(clock: &C, length: Duration, run: &mut F) -> Result<f64>
where
    C: Clock,
    F: FnMut() -> Result<u64>,
{
    let start = clock.now();
    let mut evaluations = 0u64;
    let elapsed = loop {
        evaluations += run()?;
        let elapsed = clock.now() - start;
        if elapsed >= length {
            break elapsed;
        }
    };
    if evaluations == 0 {
        return Err(BenchError::ZeroEvaluations);
    }
    Ok(elapsed.as_secs_f64() / evaluations as f64)
}

/// Times `run`, which performs one complete optimizer run and returns its
/// evaluation count.
///
/// Unmeasured windows come first, until two consecutive ones agree within
/// [`WARMUP_TOLERANCE`] or [`MAX_WARMUP_WINDOWS`] have passed. Then `windows`
/// windows are measured.
pub fn timed_windows<C, F>(clock: &C, length: Duration, windows: usize, mut run: F) -> Result<TimingRecord>
where
    C: Clock,
    F: FnMut() -> Result<u64>,
{
    if windows == 0 {
        return Err(BenchError::Config("at least one timing window is needed".into()));
    }
    if length.is_zero() {
        return Err(BenchError::Config("window length must be positive".into()));
    }
    let mut previous = window(clock, length, &mut run)?;
    let mut warmup_windows = 1;
    while warmup_windows < MAX_WARMUP_WINDOWS {
        let current = window(clock, length, &mut run)?;
        warmup_windows += 1;
        let settled = (current - previous).abs() < WARMUP_TOLERANCE * previous;
        previous = current;
        if settled {
            break;
        }
    }
    let per_window = (0..windows)
        .map(|_| window(clock, length, &mut run))
        .collect::<Result<Vec<_>>>()?;
    let (mean, std) = mean_std(&per_window);
    Ok(TimingRecord {
        per_window,
        mean,
        std,
        warmup_windows,
    })
}
