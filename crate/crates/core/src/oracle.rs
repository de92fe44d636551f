//! Ground-truth engines for validation.
//!
//! Everything here counts directly: words are enumerated one by one, walks
//! are enumerated step sequence by step sequence, and iid sums are exact
//! convolution powers. The only type shared with the analytic pipeline is
//! `Rational` (plus the inert `Distribution` record), so agreement between
//! the oracle and the generating-function machinery is meaningful evidence,
//! not a tautology.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expand::Distribution;
use crate::gj::PatternSet;
use crate::rational::Rational;

/// Hard cap on the number of enumerated items.
pub const ENUMERATION_BUDGET: u64 = 10_000_000;

/// What to enumerate.
#[derive(Clone)]
pub enum EnumerationSpec {
    /// All words of length `n` over the pattern set's alphabet, counting
    /// marked pattern occurrences per marker axis.
    Words(PatternSet),
    /// All `2^n` fair +-1 walks, counting positive time units under the lead
    /// convention (strictly positive, or zero coming down from one).
    WalkPositiveTime,
    /// Sum of `n` iid copies of a base distribution; exact convolution power.
    IidSum(Vec<(i64, Rational)>),
}

fn budget_check(items: u64) -> Result<()> {
    if items > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            items,
            budget: ENUMERATION_BUDGET,
        });
    }
    Ok(())
}

fn checked_pow(base: u64, exp: usize) -> u64 {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

/// Exact distribution by direct counting. Bivariate support points use the
/// second coordinate only for `Words` sets that mark `t2`; all other specs
/// leave it zero.
pub fn enumerate(spec: &EnumerationSpec, n: usize) -> Result<Distribution<2>> {
    match spec {
        EnumerationSpec::Words(patterns) => enumerate_words(patterns, n),
        EnumerationSpec::WalkPositiveTime => enumerate_walks(n),
        EnumerationSpec::IidSum(base) => convolution_power(base, n),
    }
}

/// Univariate view of [`enumerate`] (second coordinate dropped; it must be
/// identically zero).
pub fn enumerate_univariate(spec: &EnumerationSpec, n: usize) -> Result<Distribution<1>> {
    let d = enumerate(spec, n)?;
    let support = d
        .support
        .into_iter()
        .map(|(k, p)| {
            debug_assert_eq!(k[1], 0);
            ([k[0]], p)
        })
        .collect();
    Ok(Distribution { n, support })
}

fn enumerate_words(patterns: &PatternSet, n: usize) -> Result<Distribution<2>> {
    let d = patterns.alphabet_size() as u64;
    let total = checked_pow(d, n);
    budget_check(total)?;
    let entries: Vec<(Vec<u8>, usize)> = patterns
        .entries()
        .iter()
        .map(|(w, axis)| (w.symbols().to_vec(), *axis))
        .collect();
    let chunk = 1u64 << 14;
    let counts: BTreeMap<[i64; 2], u64> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|block| {
            let mut local: BTreeMap<[i64; 2], u64> = BTreeMap::new();
            let mut word = vec![0u8; n];
            let lo = block * chunk;
            let hi = (lo + chunk).min(total);
            for code in lo..hi {
                let mut c = code;
                for slot in word.iter_mut() {
                    *slot = (c % d) as u8;
                    c /= d;
                }
                let mut occ = [0i64; 2];
                for (pat, axis) in &entries {
                    occ[*axis] += count_occurrences(&word, pat) as i64;
                }
                *local.entry(occ).or_insert(0) += 1;
            }
            local
        })
        .reduce(BTreeMap::new, merge_counts);
    counts_to_distribution(n, counts, total)
}

fn count_occurrences(text: &[u8], pat: &[u8]) -> usize {
    if text.len() < pat.len() {
        return 0;
    }
    text.windows(pat.len()).filter(|w| *w == pat).count()
}

fn merge_counts(
    mut a: BTreeMap<[i64; 2], u64>,
    b: BTreeMap<[i64; 2], u64>,
) -> BTreeMap<[i64; 2], u64> {
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

fn enumerate_walks(n: usize) -> Result<Distribution<2>> {
    let total = checked_pow(2, n);
    budget_check(total)?;
    let mut counts: BTreeMap<[i64; 2], u64> = BTreeMap::new();
    for code in 0..total {
        let mut pos: i64 = 0;
        let mut count: i64 = 0;
        for step in 0..n {
            let up = (code >> step) & 1 == 1;
            // up from p >= 0 lands positive-or-lead; down counts iff p >= 1
            if up {
                if pos >= 0 {
                    count += 1;
                }
                pos += 1;
            } else {
                if pos >= 1 {
                    count += 1;
                }
                pos -= 1;
            }
        }
        *counts.entry([count, 0]).or_insert(0) += 1;
    }
    counts_to_distribution(n, counts, total)
}

fn counts_to_distribution(
    n: usize,
    counts: BTreeMap<[i64; 2], u64>,
    total: u64,
) -> Result<Distribution<2>> {
    let denom = BigInt::from(total);
    let support = counts
        .into_iter()
        .map(|(k, c)| Ok((k, Rational::new(BigInt::from(c), denom.clone())?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Distribution { n, support })
}

fn convolution_power(base: &[(i64, Rational)], n: usize) -> Result<Distribution<2>> {
    if base.is_empty() {
        return Err(Error::Invalid("base distribution is empty".into()));
    }
    budget_check((base.len() as u64).saturating_mul(n as u64).max(1))?;
    let mut acc: BTreeMap<i64, Rational> = BTreeMap::new();
    acc.insert(0, Rational::one());
    for _ in 0..n {
        let mut next: BTreeMap<i64, Rational> = BTreeMap::new();
        for (k, p) in &acc {
            for (dk, dp) in base {
                let entry = next.entry(k + dk).or_insert_with(Rational::zero);
                *entry += p * dp;
            }
        }
        acc = next;
    }
    let support = acc
        .into_iter()
        .filter(|(_, p)| !p.is_zero())
        .map(|(k, p)| ([k, 0], p))
        .collect();
    Ok(Distribution { n, support })
}

/// Exact moments summed directly over the enumerated distribution. Central
/// moments are computed as plain sums `E[(X-mu)^j]` with no conversion
/// tables, keeping the oracle free of the pipeline's moment code.
pub struct OracleMoments {
    pub raw: Vec<Rational>,
    pub central: Vec<Rational>,
    /// `mixed[i][j] = E[(X-muX)^i (Y-muY)^j]`.
    pub mixed_central: Vec<Vec<Rational>>,
}

pub fn moments_by_enumeration(
    spec: &EnumerationSpec,
    n: usize,
    order: usize,
) -> Result<OracleMoments> {
    let dist = enumerate(spec, n)?;
    Ok(moments_of_distribution(&dist, order))
}

pub fn moments_of_distribution(dist: &Distribution<2>, order: usize) -> OracleMoments {
    let mean = |axis: usize| -> Rational {
        dist.support
            .iter()
            .fold(Rational::zero(), |acc, (k, p)| acc + Rational::from(k[axis]) * p)
    };
    let mu = [mean(0), mean(1)];
    let mut raw = Vec::with_capacity(order + 1);
    let mut central = Vec::with_capacity(order + 1);
    for j in 0..=order {
        let mut raw_acc = Rational::zero();
        let mut cen_acc = Rational::zero();
        for (k, p) in &dist.support {
            raw_acc += Rational::from(k[0]).pow(j as u32) * p;
            cen_acc += (Rational::from(k[0]) - &mu[0]).pow(j as u32) * p;
        }
        raw.push(raw_acc);
        central.push(cen_acc);
    }
    let mut mixed_central = vec![vec![Rational::zero(); order + 1]; order + 1];
    for (i, row) in mixed_central.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let mut acc = Rational::zero();
            for (k, p) in &dist.support {
                acc += (Rational::from(k[0]) - &mu[0]).pow(i as u32)
                    * (Rational::from(k[1]) - &mu[1]).pow(j as u32)
                    * p;
            }
            *cell = acc;
        }
    }
    OracleMoments {
        raw,
        central,
        mixed_central,
    }
}

/// Second, structurally different avoid-count oracle: a transfer-matrix walk
/// over prefix states (the longest suffix of the text that is a prefix of
/// some pattern), rejecting any transition that completes a pattern. Linear
/// in `n`, so it checks the markers = 0 specialization far beyond the reach
/// of word-by-word enumeration.
pub fn avoid_count_automaton(patterns: &PatternSet, n: usize) -> BigInt {
    // states: all proper prefixes of patterns (including the empty prefix)
    let words: Vec<&[u8]> = patterns.words().map(|w| w.symbols()).collect();
    let mut states: Vec<Vec<u8>> = vec![Vec::new()];
    for w in &words {
        for len in 1..w.len() {
            let p = w[..len].to_vec();
            if !states.contains(&p) {
                states.push(p);
            }
        }
    }
    let d = patterns.alphabet_size() as u8;
    let find_state = |text: &[u8]| -> usize {
        // longest suffix of `text` that is a state
        for len in (0..=text.len()).rev() {
            let suffix = &text[text.len() - len..];
            if let Some(idx) = states.iter().position(|s| s == suffix) {
                return idx;
            }
        }
        unreachable!("empty prefix is always a state")
    };
    let mut transitions: Vec<Vec<Option<usize>>> = Vec::with_capacity(states.len());
    for st in &states {
        let mut row = Vec::with_capacity(d as usize);
        for c in 0..d {
            let mut text = st.clone();
            text.push(c);
            // reject when any pattern is a suffix of the extended text
            let completes = words
                .iter()
                .any(|w| text.len() >= w.len() && text[text.len() - w.len()..] == **w);
            row.push(if completes { None } else { Some(find_state(&text)) });
        }
        transitions.push(row);
    }
    let mut counts = vec![BigInt::zero(); states.len()];
    counts[0] = BigInt::one();
    for _ in 0..n {
        let mut next = vec![BigInt::zero(); states.len()];
        for (st, cnt) in counts.iter().enumerate() {
            if cnt.is_zero() {
                continue;
            }
            for target in transitions[st].iter().flatten() {
                next[*target] += cnt;
            }
        }
        counts = next;
    }
    counts.into_iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn words_with_double_heads_at_three() {
        let set = PatternSet::parse("HH", 2).unwrap();
        let d = enumerate_univariate(&EnumerationSpec::Words(set), 3).unwrap();
        assert_eq!(d.probability(&[0]), rat(5, 8));
        assert_eq!(d.probability(&[1]), rat(2, 8));
        assert_eq!(d.probability(&[2]), rat(1, 8));
    }

    #[test]
    fn walk_positive_time_single_step() {
        let d = enumerate_univariate(&EnumerationSpec::WalkPositiveTime, 1).unwrap();
        assert_eq!(d.probability(&[0]), rat(1, 2));
        assert_eq!(d.probability(&[1]), rat(1, 2));
    }

    #[test]
    fn iid_sum_of_fair_steps() {
        let base = vec![(1, rat(1, 2)), (-1, rat(1, 2))];
        let d = enumerate_univariate(&EnumerationSpec::IidSum(base), 2).unwrap();
        assert_eq!(d.probability(&[-2]), rat(1, 4));
        assert_eq!(d.probability(&[0]), rat(1, 2));
        assert_eq!(d.probability(&[2]), rat(1, 4));
    }

    #[test]
    fn moments_examples() {
        let set = PatternSet::parse("HH", 2).unwrap();
        let m = moments_by_enumeration(&EnumerationSpec::Words(set), 3, 2).unwrap();
        assert_eq!(m.raw[1], rat(1, 2));
        assert_eq!(m.raw[0], Rational::one());

        let base = vec![(1, rat(1, 2)), (-1, rat(1, 2))];
        let m = moments_by_enumeration(&EnumerationSpec::IidSum(base), 4, 4).unwrap();
        assert_eq!(m.raw[4], rat(40, 1));
        assert_eq!(m.central[4], rat(40, 1));
    }

    #[test]
    fn budget_is_enforced()
    {
        let set = PatternSet::parse("HH", 2).unwrap();
        assert!(matches!(
            enumerate(&EnumerationSpec::Words(set), 40),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn automaton_matches_enumeration() {
        for spec_text in ["HH", "HH,TT", "HTH"] {
            let set = PatternSet::parse(spec_text, 2).unwrap();
            for n in 0..=12usize {
                let by_enum = enumerate(&EnumerationSpec::Words(set.clone()), n).unwrap();
                let avoid = by_enum.probability(&[0, 0]) * Rational::from(2i64.pow(n as u32));
                let by_auto = Rational::from(avoid_count_automaton(&set, n));
                assert_eq!(avoid, by_auto, "patterns={spec_text} n={n}");
            }
        }
    }

    #[test]
    fn walks_match_lead_convention_dp() {
        for n in 1..=12usize {
            let brute = enumerate_univariate(&EnumerationSpec::WalkPositiveTime, n).unwrap();
            let dp = crate::arcsine::distribution(n);
            assert_eq!(brute.support, dp.support, "n={n}");
        }
    }
}
