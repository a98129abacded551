//! Deterministic data-parallel sums over scenario rows.
//!
//! Rows are split into fixed-size chunks independent of the thread count.
//! Each chunk is accumulated sequentially and the chunk partials are added
//! in chunk order, so results are bit-identical for any pool size.

use rayon::prelude::*;

/// Rows per reduction chunk.
pub const CHUNK_ROWS: usize = 8192;

/// Sums `width` accumulators over the rows of a row-major `data` matrix with
/// `k` columns. `f(row_index, row, acc)` adds row `row_index`'s contribution
/// into `acc`; the first error (lowest row index) aborts the sum.
pub fn sum_rows<E, F>(data: &[f64], k: usize, width: usize, f: F) -> Result<Vec<f64>, E>
where
    E: Send,
    F: Fn(usize, &[f64], &mut [f64]) -> Result<(), E> + Sync,
{
    let partials: Vec<Result<Vec<f64>, E>> = data
        .par_chunks(CHUNK_ROWS * k)
        .enumerate()
        .map(|(chunk, rows)| {
            let mut acc = vec![0.0; width];
            let base = chunk * CHUNK_ROWS;
            for (i, row) in rows.chunks_exact(k).enumerate() {
                f(base + i, row, &mut acc)?;
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![0.0; width];
    for partial in partials {
        for (t, p) in total.iter_mut().zip(partial?) {
            *t += p;
        }
    }
    Ok(total)
}
