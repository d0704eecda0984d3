//! Index-partitioned worker pool.
//!
//! Worker `w` of `k` handles the indices `i` with `i ≡ w (mod k)`. Each index
//! derives its own seed, so the merged output is the same for any `k`.

use std::ops::Range;

/// Evaluates `f` on every index in `range` and returns results in index order.
pub fn run_indexed<T, F>(range: Range<u64>, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    let workers = workers.max(1);
    let len = (range.end.saturating_sub(range.start)) as usize;
    if workers == 1 || len <= 1 {
        return range.map(f).collect();
    }
    // nested BLAS-style parallelism only oversubscribes the cores
    faer::set_global_parallelism(faer::Par::Seq);
    let start = range.start;
    let mut shards: Vec<Vec<(u64, T)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                scope.spawn(move || {
                    let mut out = Vec::new();
                    let mut i = start + w as u64;
                    while i < range.end {
                        out.push((i, f(i)));
                        i += workers as u64;
                    }
                    out
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut merged: Vec<(u64, T)> = shards.iter_mut().flat_map(std::mem::take).collect();
    merged.sort_by_key(|(i, _)| *i);
    merged.into_iter().map(|(_, t)| t).collect()
}
