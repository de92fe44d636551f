//! Positive-time statistic of the fair +-1 walk.
//!
//! `X_n` counts the time units `i in {1..n}` at which the walk is on the
//! positive side under the lead convention: a unit counts when the position
//! is strictly positive at time `i`, or is zero at time `i` having been
//! positive at time `i-1`. Since steps are +-1, the second case is exactly
//! "position 0 at time i after position 1", so a step from position `p`
//! counts iff it goes up from `p >= 0` or down from `p >= 1`.
//!
//! `X_n / n` converges to the arcsine law, not the normal law, which makes
//! this family the built-in negative control for normality verdicts. Both
//! providers below are exact dynamic programs over walk prefixes with big
//! integer path counts; probabilities are counts over `2^n`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::expand::Distribution;
use crate::rational::Rational;
use crate::tables::CombinatoricsTables;

/// Exact distribution of the positive-time count after `n` steps.
///
/// State: path counts per (position, count so far). O(n^3) big-int
/// additions; fine for plotting-scale `n`.
pub fn distribution(n: usize) -> Distribution<1> {
    // counts[pos_index][count] with pos = index - n (positions -n..=n)
    let width = 2 * n + 1;
    let mut counts = vec![vec![BigInt::zero(); n + 1]; width];
    counts[n][0] = BigInt::one(); // start at position 0, count 0
    for step in 0..n {
        let mut next = vec![vec![BigInt::zero(); n + 1]; width];
        for pos_idx in 0..width {
            let pos = pos_idx as i64 - n as i64;
            for c in 0..=step {
                if counts[pos_idx][c].is_zero() {
                    continue;
                }
                let val = counts[pos_idx][c].clone();
                // step up from p: counts iff p >= 0
                let up = usize::from(pos >= 0);
                next[pos_idx + 1][c + up] += &val;
                // step down from p: counts iff p >= 1
                let down = usize::from(pos >= 1);
                next[pos_idx - 1][c + down] += &val;
            }
        }
        counts = next;
    }
    let denom = BigInt::from(2).pow(n as u32);
    let mut by_count = vec![BigInt::zero(); n + 1];
    for row in &counts {
        for (c, v) in row.iter().enumerate() {
            by_count[c] += v;
        }
    }
    let support = by_count
        .into_iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(c, v)| {
            (
                [c as i64],
                Rational::new(v, denom.clone()).expect("2^n is nonzero"),
            )
        })
        .collect();
    Distribution { n, support }
}

/// Raw moments `E[X_n^j]` for `j <= order` without materializing the full
/// distribution: per position the DP carries the power sums
/// `M_j(p) = sum_paths count^j`, updated through the binomial expansion of
/// `(count+1)^j` when a step is counted. Cost is O(n^2 * order^2), which
/// reaches `n` in the hundreds quickly.
pub fn raw_moments(n: usize, order: usize, tables: &CombinatoricsTables) -> Vec<Rational> {
    assert!(tables.max_r() >= order);
    let width = 2 * n + 1;
    // sums[pos][j]
    let mut sums = vec![vec![BigInt::zero(); order + 1]; width];
    sums[n][0] = BigInt::one();
    let mut touched_lo = n;
    let mut touched_hi = n;
    for _ in 0..n {
        let mut next = vec![vec![BigInt::zero(); order + 1]; width];
        for pos_idx in touched_lo..=touched_hi {
            let pos = pos_idx as i64 - n as i64;
            if sums[pos_idx].iter().all(Zero::is_zero) {
                continue;
            }
            for (counted, target) in [(pos >= 0, pos_idx + 1), (pos >= 1, pos_idx - 1)] {
                if counted {
                    // (c+1)^j = sum_l C(j,l) c^l
                    for j in 0..=order {
                        let mut acc = BigInt::zero();
                        for (l, s) in sums[pos_idx].iter().enumerate().take(j + 1) {
                            acc += tables.binomial(j, l) * s;
                        }
                        next[target][j] += acc;
                    }
                } else {
                    for j in 0..=order {
                        next[target][j] += &sums[pos_idx][j];
                    }
                }
            }
        }
        sums = next;
        touched_lo -= 1;
        touched_hi += 1;
    }
    let denom = BigInt::from(2).pow(n as u32);
    let mut raw = Vec::with_capacity(order + 1);
    for j in 0..=order {
        let mut total = BigInt::zero();
        for row in &sums {
            total += &row[j];
        }
        raw.push(Rational::new(total, denom.clone()).expect("2^n is nonzero"));
    }
    raw
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn one_step_walks() {
        let d = distribution(1);
        assert_eq!(d.probability(&[0]), rat(1, 2));
        assert_eq!(d.probability(&[1]), rat(1, 2));
    }

    #[test]
    fn four_step_never_positive_probability() {
        let d = distribution(4);
        assert_eq!(d.probability(&[0]), rat(6, 16));
        assert_eq!(d.total_mass(), Rational::one());
    }

    #[test]
    fn moments_match_distribution() {
        let tables = CombinatoricsTables::new(6);
        for n in 1..=12usize {
            let d = distribution(n);
            let direct = d.raw_moments([6]);
            let fast = raw_moments(n, 6, &tables);
            for (j, r) in fast.iter().enumerate() {
                assert_eq!(&direct.get([j]), r, "n={n} j={j}");
            }
        }
    }

    #[test]
    fn mean_is_half_n() {
        let tables = CombinatoricsTables::new(2);
        for n in 1..=20usize {
            let raw = raw_moments(n, 1, &tables);
            assert_eq!(raw[1], Rational::new(n as i64, 2).unwrap(), "n={n}");
        }
    }
}
