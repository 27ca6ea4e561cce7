//! Bounded scoped-thread fan-out for the embarrassingly parallel spectral
//! checks. Results come back in job order regardless of scheduling, so
//! anything built from them stays deterministic.

use std::collections::VecDeque;
use std::sync::Mutex;

pub type Job<'a, T> = Box<dyn FnOnce() -> T + Send + 'a>;

/// Worker cap: `SWANKIT_THREADS` when set to a positive integer, otherwise
/// the machine's available parallelism (at most 8). Unparsable values fall
/// back to 1 rather than erroring; an env var is not a config file.
pub fn thread_cap() -> usize {
    match std::env::var("SWANKIT_THREADS") {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => n,
            _ => 1,
        },
        Err(_) => std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
            .min(8),
    }
}

/// Run every job, at most `thread_cap()` at a time.
pub fn run_all<'a, T: Send>(jobs: Vec<Job<'a, T>>) -> Vec<T> {
    let n = jobs.len();
    let cap = thread_cap().min(n);
    if cap <= 1 {
        return jobs.into_iter().map(|job| job()).collect();
    }

    let queue: Mutex<VecDeque<(usize, Job<'a, T>)>> =
        Mutex::new(jobs.into_iter().enumerate().collect());
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..n).map(|_| None).collect());

    std::thread::scope(|scope| {
        for _ in 0..cap {
            scope.spawn(|| loop {
                // Pop under the lock, run outside it.
                let next = queue.lock().expect("queue lock").pop_front();
                match next {
                    Some((index, job)) => {
                        let result = job();
                        slots.lock().expect("slot lock")[index] = Some(result);
                    }
                    None => break,
                }
            });
        }
    });

    slots
        .into_inner()
        .expect("slot lock")
        .into_iter()
        .map(|slot| slot.expect("every job ran"))
        .collect()
}
