//! Combinatorial number tables: Stirling numbers of both kinds, binomial
//! coefficients, and odd double factorials `(2r-1)!! = 1*3*5*...*(2r-1)`,
//! the even moments of the standard normal distribution.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rational::Rational;

#[derive(Clone, Debug)]
pub struct CombinatoricsTables {
    max_r: usize,
    stirling2: Vec<Vec<BigInt>>,
    stirling1_signed: Vec<Vec<BigInt>>,
    binomial: Vec<Vec<BigInt>>,
    double_factorial: Vec<BigInt>,
}

impl CombinatoricsTables {
    /// Fills every table through index `max_r`.
    pub fn new(max_r: usize) -> Self {
        let m = max_r + 1;
        // S(r,j) = j*S(r-1,j) + S(r-1,j-1), S(0,0) = 1.
        let mut stirling2 = vec![vec![BigInt::zero(); m]; m];
        stirling2[0][0] = BigInt::one();
        for r in 1..m {
            for j in 1..=r {
                let carry = &stirling2[r - 1][j] * BigInt::from(j);
                stirling2[r][j] = carry + &stirling2[r - 1][j - 1];
            }
        }
        // Signed first kind: s(r,j) with x^(r) = sum_j s(r,j) x^j,
        // s(r,j) = s(r-1,j-1) - (r-1)*s(r-1,j).
        let mut stirling1_signed = vec![vec![BigInt::zero(); m]; m];
        stirling1_signed[0][0] = BigInt::one();
        for r in 1..m {
            for j in 1..=r {
                let down = &stirling1_signed[r - 1][j] * BigInt::from(r - 1);
                stirling1_signed[r][j] = &stirling1_signed[r - 1][j - 1] - down;
            }
        }
        let mut binomial = vec![vec![BigInt::zero(); m]; m];
        for r in 0..m {
            binomial[r][0] = BigInt::one();
            for i in 1..=r {
                binomial[r][i] = &binomial[r - 1][i - 1]
                    + if i < r {
                        binomial[r - 1][i].clone()
                    } else {
                        BigInt::zero()
                    };
            }
        }
        let mut double_factorial = Vec::with_capacity(m);
        let mut acc = BigInt::one();
        double_factorial.push(BigInt::one()); // (2*0-1)!! = empty product
        for r in 1..m {
            acc *= BigInt::from(2 * r - 1);
            double_factorial.push(acc.clone());
        }
        CombinatoricsTables {
            max_r,
            stirling2,
            stirling1_signed,
            binomial,
            double_factorial,
        }
    }

    pub fn max_r(&self) -> usize {
        self.max_r
    }

    /// Stirling number of the second kind S(r,j): partitions of an r-set into
    /// j nonempty blocks. Converts factorial moments to raw moments.
    pub fn stirling2(&self, r: usize, j: usize) -> &BigInt {
        &self.stirling2[r][j]
    }

    /// Signed Stirling number of the first kind s(r,j): coefficients of the
    /// falling factorial x^(r) in powers of x. Converts raw moments back to
    /// factorial moments.
    pub fn stirling1_signed(&self, r: usize, j: usize) -> &BigInt {
        &self.stirling1_signed[r][j]
    }

    pub fn binomial(&self, r: usize, i: usize) -> &BigInt {
        &self.binomial[r][i]
    }

    /// (2r-1)!!, the 2r-th moment of the standard normal distribution.
    pub fn double_factorial(&self, r: usize) -> &BigInt {
        &self.double_factorial[r]
    }

    pub fn double_factorial_rational(&self, r: usize) -> Rational {
        Rational::from(&self.double_factorial[r])
    }
}

/// Generalized binomial coefficient C(e, j) for any integer e (negative
/// allowed): e*(e-1)*...*(e-j+1)/j!. Always an integer.
pub fn binomial_int(e: i64, j: usize) -> BigInt {
    let mut num = BigInt::one();
    for i in 0..j as i64 {
        num *= BigInt::from(e - i);
    }
    let mut den = BigInt::one();
    for i in 1..=j as i64 {
        den *= BigInt::from(i);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: count partitions of {0..r-1} into exactly j
    /// nonempty blocks by direct enumeration of block assignments.
    fn set_partitions_into_blocks(r: usize, j: usize) -> u64 {
        fn go(item: usize, r: usize, blocks_used: usize, j: usize) -> u64 {
            if item == r {
                return u64::from(blocks_used == j);
            }
            let mut total = 0;
            // restrict first occurrences to canonical order so each set
            // partition is counted once
            for b in 0..=blocks_used.min(j - 1) {
                total += go(item + 1, r, blocks_used.max(b + 1), j);
            }
            total
        }
        if j == 0 {
            return u64::from(r == 0);
        }
        go(0, r, 0, j)
    }

    #[test]
    fn double_factorial_small_values() {
        let t = CombinatoricsTables::new(5);
        assert_eq!(t.double_factorial(1), &BigInt::from(1));
        assert_eq!(t.double_factorial(2), &BigInt::from(3));
        assert_eq!(t.double_factorial(3), &BigInt::from(15));
        assert_eq!(t.double_factorial(4), &BigInt::from(105));
    }

    #[test]
    fn stirling2_matches_partition_enumeration() {
        let t = CombinatoricsTables::new(6);
        assert_eq!(set_partitions_into_blocks(4, 2), 7);
        assert_eq!(t.stirling2(4, 2), &BigInt::from(7));
        for r in 0..=6usize {
            for j in 0..=r {
                let brute = set_partitions_into_blocks(r, j);
                assert_eq!(t.stirling2(r, j), &BigInt::from(brute), "S({r},{j})");
            }
        }
    }

    #[test]
    fn binomial_pascal() {
        let t = CombinatoricsTables::new(6);
        assert_eq!(t.binomial(5, 2), &BigInt::from(10));
        assert_eq!(t.binomial(6, 3), &BigInt::from(20));
        assert_eq!(t.binomial(4, 0), &BigInt::from(1));
    }

    #[test]
    fn double_factorial_equals_factorial_quotient() {
        // (2r-1)!! = (2r)! / (2^r r!)
        let t = CombinatoricsTables::new(20);
        for r in 0..=20usize {
            let mut fact2r = BigInt::one();
            for i in 1..=2 * r {
                fact2r *= BigInt::from(i);
            }
            let mut factr = BigInt::one();
            for i in 1..=r {
                factr *= BigInt::from(i);
            }
            let two_r = BigInt::from(2).pow(r as u32);
            assert_eq!(t.double_factorial(r), &(fact2r / (two_r * factr)));
        }
    }

    #[test]
    fn stirling1_inverts_stirling2() {
        // sum_j S(r,j) s(j,i) = [r == i]
        let t = CombinatoricsTables::new(8);
        for r in 0..=8usize {
            for i in 0..=8usize {
                let mut total = BigInt::zero();
                for j in 0..=8usize {
                    total += t.stirling2(r, j) * t.stirling1_signed(j, i);
                }
                let expect = if r == i { BigInt::one() } else { BigInt::zero() };
                assert_eq!(total, expect, "r={r} i={i}");
            }
        }
    }

    #[test]
    fn generalized_binomial_negative_upper_index() {
        // C(-2, j) = (-1)^j (j+1)
        for j in 0..6usize {
            let expect = BigInt::from(if j % 2 == 0 { 1 } else { -1 } * (j as i64 + 1));
            assert_eq!(binomial_int(-2, j), expect);
        }
        assert_eq!(binomial_int(5, 2), BigInt::from(10));
        assert_eq!(binomial_int(3, 5), BigInt::zero());
    }
}
