//! Thread-pool execution of the per-sample training phase.
//!
//! Sample slots are independent within a step and every slot owns its RNG
//! streams, so any schedule produces bit-identical results; the pool only
//! changes wall-clock time.

use msnn_core::learners::{SampleExecutor, SampleSlot, SequentialExecutor};
use rayon::prelude::*;

pub struct PoolExecutor {
    pool: rayon::ThreadPool,
}

impl PoolExecutor {
    pub fn new(threads: usize) -> Self {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("failed to build thread pool");
        Self { pool }
    }
}

impl SampleExecutor for PoolExecutor {
    fn for_each(&mut self, slots: &mut [SampleSlot], f: &(dyn Fn(&mut SampleSlot) + Sync)) {
        self.pool.install(|| slots.par_iter_mut().for_each(f));
    }
}

/// `threads == 1` avoids pool overhead entirely.
pub fn executor(threads: usize) -> Box<dyn SampleExecutor> {
    if threads <= 1 {
        Box::new(SequentialExecutor)
    } else {
        Box::new(PoolExecutor::new(threads))
    }
}
