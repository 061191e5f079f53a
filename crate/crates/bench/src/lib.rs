//! Criterion benches for the simulator; see `benches/`.

use otable_core::protocols::OneTimeTable;
use otable_core::seed::stream_rng;

/// `n` correct tables drawn from `seed`.
pub fn correct_tables(n: usize, seed: u64) -> Vec<OneTimeTable> {
    let mut rng = stream_rng(seed, 0);
    (0..n as u64).map(|i| OneTimeTable::random_correct(i, &mut rng)).collect()
}
