//! Deterministic summation.
//!
//! Every quadrature sum goes through a fixed pairwise tree, so a result
//! depends only on the term order and the block size, never on how many
//! threads evaluated the blocks.

use rayon::prelude::*;

const LEAF: usize = 8;

/// Pairwise (cascade) sum with a fixed split at the midpoint.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        acc
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

/// Sums the terms emitted by `row` for rows `0..n_rows`.
///
/// Rows are grouped in blocks of `block_rows`; each block's terms are summed
/// with [`pairwise_sum`] and the block partials are combined the same way.
pub fn reduce_rows<F>(n_rows: usize, block_rows: usize, row: F) -> f64
where
    F: Fn(usize, &mut Vec<f64>) + Sync,
{
    let block_rows = block_rows.max(1);
    let n_blocks = n_rows.div_ceil(block_rows);
    let partials: Vec<f64> = (0..n_blocks)
        .into_par_iter()
        .map_init(Vec::new, |buf, b| {
            buf.clear();
            let lo = b * block_rows;
            let hi = (lo + block_rows).min(n_rows);
            for r in lo..hi {
                row(r, buf);
            }
            pairwise_sum(buf)
        })
        .collect();
    pairwise_sum(&partials)
}

/// Evaluates `row` for every row in parallel, keeping row order.
pub fn map_rows<F>(n_rows: usize, row: F) -> Vec<f64>
where
    F: Fn(usize, &mut Vec<f64>) -> f64 + Sync,
{
    (0..n_rows)
        .into_par_iter()
        .map_init(Vec::new, |buf, r| {
            buf.clear();
            row(r, buf)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_exact_integers() {
        let xs: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let row = |r: usize, buf: &mut Vec<f64>| {
            for j in 0..97 {
                buf.push(((r * 31 + j) as f64).sin() * 1e-3);
            }
        };
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| reduce_rows(301, 1, row));
        let wide = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| reduce_rows(301, 1, row));
        assert_eq!(serial.to_bits(), wide.to_bits());
        let blocked = reduce_rows(301, 7, row);
        assert!(((blocked - serial) / serial).abs() < 1e-13);
    }
}
