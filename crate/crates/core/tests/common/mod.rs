//! Shared helpers for integration tests: seeded random pattern sets.

use moment_cruncher::gj::{PatternSet, Word};
use rand::Rng;

/// Draws a reduced pattern set over a `d`-letter alphabet: 1..=max_patterns
/// patterns of length 2..=4, each marked `t1` (or `t2` when `bivariate`).
/// Retries until the reducedness check passes.
pub fn random_pattern_set(
    rng: &mut impl Rng,
    d: usize,
    max_patterns: usize,
    bivariate: bool,
) -> PatternSet {
    loop {
        let count = rng.gen_range(1..=max_patterns);
        let entries: Vec<(Word, usize)> = (0..count)
            .map(|i| {
                let len = rng.gen_range(2..=4);
                let symbols = (0..len).map(|_| rng.gen_range(0..d) as u8).collect();
                // alternate markers so a bivariate set always carries t2
                let axis = if bivariate { (i + 1) % 2 } else { 0 };
                (Word::new(symbols).expect("nonempty by construction"), axis)
            })
            .collect();
        if let Ok(set) = PatternSet::new(d, entries) {
            return set;
        }
    }
}
