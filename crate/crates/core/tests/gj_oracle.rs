//! Goulden-Jackson outputs against exhaustive enumeration.
//!
//! The cluster method's sign conventions are only trusted because of these
//! checks: every occurrence distribution it produces must equal the one
//! obtained by scanning every word.

mod common;

use moment_cruncher::expand::{expand_exact, ExpandOptions};
use moment_cruncher::gj::{self, PatternSet};
use moment_cruncher::moments::MomentTable2;
use moment_cruncher::oracle::{self, EnumerationSpec};
use moment_cruncher::rational::Rational;
use moment_cruncher::tables::CombinatoricsTables;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn check_set_against_oracle(set: &PatternSet, n_max: usize) {
    let d = set.alphabet_size();
    let prob = gj::probability_gf(&gj::weight_enumerator::<2>(set).unwrap(), d).unwrap();
    let dists = expand_exact(&prob, n_max, ExpandOptions::default()).unwrap();
    let spec = EnumerationSpec::Words(set.clone());
    for (n, dist) in dists.iter().enumerate() {
        let brute = oracle::enumerate(&spec, n).unwrap();
        assert_eq!(
            brute.support, dist.support,
            "patterns over alphabet {d} disagree with enumeration at n={n}"
        );
    }
}

#[test]
fn randomized_univariate_sets_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a5f);
    for case in 0..12 {
        let d = if case % 2 == 0 { 2 } else { 3 };
        let set = common::random_pattern_set(&mut rng, d, 3, false);
        let n_max = if d == 2 { 12 } else { 10 };
        check_set_against_oracle(&set, n_max);
    }
}

#[test]
fn randomized_bivariate_sets_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1b2e);
    for case in 0..8 {
        let d = if case % 2 == 0 { 2 } else { 3 };
        let set = common::random_pattern_set(&mut rng, d, 4, true);
        let n_max = if d == 2 { 12 } else { 9 };
        check_set_against_oracle(&set, n_max);
    }
}

#[test]
fn avoid_specialization_matches_automaton() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9c1d);
    for case in 0..10 {
        let d = if case % 2 == 0 { 2 } else { 3 };
        let set = common::random_pattern_set(&mut rng, d, 3, false);
        let counts = gj::avoid_counts(&set, 30).unwrap();
        for (n, c) in counts.iter().enumerate() {
            let auto = Rational::from(oracle::avoid_count_automaton(&set, n));
            assert_eq!(c, &auto, "avoid count mismatch at n={n}");
        }
    }
}

#[test]
fn hh_tt_pair_mixed_moments_and_correlation_match_oracle() {
    let tables = CombinatoricsTables::new(6);
    let set = PatternSet::parse("HH:t1,TT:t2", 2).unwrap();
    let prob = gj::probability_gf(&gj::weight_enumerator::<2>(&set).unwrap(), 2).unwrap();
    let spec = EnumerationSpec::Words(set);
    let fms = moment_cruncher::expand::expand_truncated(&prob, 1..=12, [3, 3]).unwrap();
    for fm in &fms {
        let table = MomentTable2::from_factorial(fm, 3, &tables).unwrap();
        let brute = oracle::moments_by_enumeration(&spec, fm.n, 3).unwrap();
        for i in 0..=3 {
            for j in 0..=3 {
                assert_eq!(
                    table.central(i, j),
                    brute.mixed_central[i][j],
                    "m_({i},{j}) at n={}",
                    fm.n
                );
            }
        }
    }
    // exact correlation at n=8 equals the oracle's value over the 256 words
    let fm8 = &fms[7];
    let table = MomentTable2::from_factorial(fm8, 3, &tables).unwrap();
    let corr = moment_cruncher::moments::correlation_at(&table).unwrap();
    let brute = oracle::moments_by_enumeration(&spec, 8, 2).unwrap();
    let cov = brute.mixed_central[1][1].clone();
    let expected_sq = (&cov * &cov)
        .checked_div(&(&brute.mixed_central[2][0] * &brute.mixed_central[0][2]))
        .unwrap();
    let expected_signed = if cov.is_negative() {
        -&expected_sq
    } else {
        expected_sq.clone()
    };
    assert_eq!(corr.covariance, cov);
    assert_eq!(corr.correlation_squared_signed, expected_signed);
}
