//! Thread-pool executor for the core kernels.

use polymean_core::Executor;
use rayon::prelude::*;

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "POLYMEAN_THREADS";

pub struct Threads {
    pool: rayon::ThreadPool,
}

impl Threads {
    pub fn new(n: usize) -> Self {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool");
        Threads { pool }
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for Threads {
    fn run_rows(&self, out: &mut [f64], row_len: usize, job: &(dyn Fn(usize, &mut [f64]) + Sync)) {
        if row_len == 0 {
            return;
        }
        self.pool.install(|| {
            out.par_chunks_mut(row_len)
                .enumerate()
                .for_each(|(i, row)| job(i, row))
        });
    }
}

/// Flag value, else `POLYMEAN_THREADS`, else the available parallelism.
pub fn thread_count(flag: Option<usize>) -> usize {
    if let Some(n) = flag {
        return n.max(1);
    }
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
    {
        return n.max(1);
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}
