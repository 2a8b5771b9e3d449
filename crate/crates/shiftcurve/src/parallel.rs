use rayon::prelude::*;
use shiftcurve_core::ReplicationRunner;

/// Fans replications out over the rayon pool. Outputs come back in index
/// order, so results match [`shiftcurve_core::Sequential`] bit for bit.
#[derive(Debug, Clone, Copy, Default)]
pub struct Parallel;

impl ReplicationRunner for Parallel {
    fn run<T, F>(&self, count: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        (0..count as u64).into_par_iter().map(job).collect()
    }
}

/// Either runner, picked at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Runner {
    Sequential,
    Parallel,
}

impl ReplicationRunner for Runner {
    fn run<T, F>(&self, count: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match self {
            Runner::Sequential => shiftcurve_core::Sequential.run(count, job),
            Runner::Parallel => Parallel.run(count, job),
        }
    }
}
