//! Row-parallel execution hook.
//!
//! Kernels write disjoint rows of an output buffer. The std companion crate
//! supplies a thread-pool implementation; [`Serial`] runs rows in order.
//! Each row is computed by the same code regardless of the executor, so
//! results do not depend on the thread count.

pub trait Executor: Sync {
    /// Calls `job(row_index, row)` for every `row_len`-sized chunk of `out`.
    fn run_rows(&self, out: &mut [f64], row_len: usize, job: &(dyn Fn(usize, &mut [f64]) + Sync));
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Serial;

impl Executor for Serial {
    fn run_rows(&self, out: &mut [f64], row_len: usize, job: &(dyn Fn(usize, &mut [f64]) + Sync)) {
        if row_len == 0 {
            return;
        }
        for (i, row) in out.chunks_mut(row_len).enumerate() {
            job(i, row);
        }
    }
}
