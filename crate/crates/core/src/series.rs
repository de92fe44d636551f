//! Dense truncated power series.
//!
//! `TruncatedSeries<V>` holds a power series in `V` variables with every
//! exponent capped: arithmetic silently discards terms above the caps, so the
//! type models the quotient ring `Q[u]/(u^(J+1))` (resp. its bivariate
//! analogue). The caps travel with the value; binary operations on mismatched
//! caps are a programming error and panic rather than re-truncate, which
//! would silently lose precision.

use std::fmt;

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries<const V: usize> {
    caps: [usize; V],
    data: Vec<Rational>,
}

pub type TruncatedSeries1 = TruncatedSeries<1>;
pub type TruncatedSeries2 = TruncatedSeries<2>;

fn len_of<const V: usize>(caps: &[usize; V]) -> usize {
    caps.iter().map(|&c| c + 1).product()
}

impl<const V: usize> TruncatedSeries<V> {
    pub fn zero(caps: [usize; V]) -> Self {
        TruncatedSeries {
            caps,
            data: vec![Rational::zero(); len_of(&caps)],
        }
    }

    pub fn constant(caps: [usize; V], c: Rational) -> Self {
        let mut s = Self::zero(caps);
        s.data[0] = c;
        s
    }

    pub fn one(caps: [usize; V]) -> Self {
        Self::constant(caps, Rational::one())
    }

    pub fn caps(&self) -> [usize; V] {
        self.caps
    }

    fn offset(&self, idx: [usize; V]) -> usize {
        let mut off = 0;
        for i in 0..V {
            debug_assert!(idx[i] <= self.caps[i]);
            off = off * (self.caps[i] + 1) + idx[i];
        }
        off
    }

    fn decode(&self, mut off: usize) -> [usize; V] {
        let mut idx = [0usize; V];
        for i in (0..V).rev() {
            let w = self.caps[i] + 1;
            idx[i] = off % w;
            off /= w;
        }
        idx
    }

    pub fn get(&self, idx: [usize; V]) -> Rational {
        self.data[self.offset(idx)].clone()
    }

    pub fn get_ref(&self, idx: [usize; V]) -> &Rational {
        &self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: [usize; V], value: Rational) {
        let off = self.offset(idx);
        self.data[off] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rational::is_zero)
    }

    pub fn constant_term(&self) -> &Rational {
        &self.data[0]
    }

    fn assert_caps(&self, rhs: &Self) {
        assert_eq!(
            self.caps, rhs.caps,
            "truncated series caps mismatch: {:?} vs {:?}",
            self.caps, rhs.caps
        );
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.assert_caps(rhs);
        TruncatedSeries {
            caps: self.caps,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.assert_caps(rhs);
        TruncatedSeries {
            caps: self.caps,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            caps: self.caps,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        TruncatedSeries {
            caps: self.caps,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.assert_caps(rhs);
        let mut out = Self::zero(self.caps);
        for (ia, a) in self.data.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let idx_a = self.decode(ia);
            'terms: for (ib, b) in rhs.data.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let idx_b = rhs.decode(ib);
                let mut idx = [0usize; V];
                for i in 0..V {
                    idx[i] = idx_a[i] + idx_b[i];
                    if idx[i] > self.caps[i] {
                        continue 'terms;
                    }
                }
                let off = out.offset(idx);
                out.data[off] += a * b;
            }
        }
        out
    }

    /// Multiplicative inverse in the truncated ring. The constant term must
    /// be nonzero; `f * f.reciprocal() = 1` modulo the caps.
    pub fn reciprocal(&self) -> Result<Self> {
        if self.data[0].is_zero() {
            return Err(Error::NotAUnit);
        }
        let inv0 = self.data[0].recip()?;
        let mut out = Self::zero(self.caps);
        out.data[0] = inv0.clone();
        // Row-major order visits every index after all its componentwise
        // predecessors, so g[k] = -1/f[0] * sum_{0<j<=k} f[j] g[k-j] is
        // well-defined at each step.
        for off in 1..self.data.len() {
            let k = self.decode(off);
            let mut acc = Rational::zero();
            for joff in 1..self.data.len() {
                let j = self.decode(joff);
                let mut within = true;
                let mut rest = [0usize; V];
                for i in 0..V {
                    if j[i] > k[i] {
                        within = false;
                        break;
                    }
                    rest[i] = k[i] - j[i];
                }
                if !within || self.data[joff].is_zero() {
                    continue;
                }
                acc += &self.data[joff] * &out.data[out.offset(rest)];
            }
            out.data[off] = -(acc * &inv0);
        }
        Ok(out)
    }
}

impl TruncatedSeries<1> {
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty());
        TruncatedSeries {
            caps: [coeffs.len() - 1],
            data: coeffs,
        }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.data
    }
}

impl<const V: usize> fmt::Debug for TruncatedSeries<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series{:?}{:?}", self.caps, self.data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn reciprocal_of_one_is_one() {
        let one = TruncatedSeries::one([5]);
        assert_eq!(one.reciprocal().unwrap(), one);
    }

    #[test]
    fn reciprocal_geometric_series() {
        // 1/(1-u) = 1 + u + u^2
        let f = TruncatedSeries::from_coeffs(vec![rat(1, 1), rat(-1, 1), rat(0, 1)]);
        let g = f.reciprocal().unwrap();
        assert_eq!(g.coeffs(), &[rat(1, 1), rat(1, 1), rat(1, 1)]);
    }

    #[test]
    fn reciprocal_of_two_plus_u() {
        let f = TruncatedSeries::from_coeffs(vec![rat(2, 1), rat(1, 1)]);
        let g = f.reciprocal().unwrap();
        assert_eq!(g.coeffs(), &[rat(1, 2), rat(-1, 4)]);
        let prod = f.mul(&g);
        assert_eq!(prod, TruncatedSeries::one([1]));
    }

    #[test]
    fn zero_constant_term_is_not_a_unit() {
        let f = TruncatedSeries::from_coeffs(vec![rat(0, 1), rat(1, 1)]);
        assert_eq!(f.reciprocal(), Err(Error::NotAUnit));
    }

    #[test]
    #[should_panic(expected = "caps mismatch")]
    fn mixing_caps_panics() {
        let a = TruncatedSeries::one([2]);
        let b = TruncatedSeries::one([3]);
        let _ = a.add(&b);
    }

    #[test]
    fn bivariate_multiplication_truncates_each_axis() {
        // (1 + u)(1 + w) with caps (1,1) keeps the uw term
        let mut a = TruncatedSeries::zero([1, 1]);
        a.set([0, 0], rat(1, 1));
        a.set([1, 0], rat(1, 1));
        let mut b = TruncatedSeries::zero([1, 1]);
        b.set([0, 0], rat(1, 1));
        b.set([0, 1], rat(1, 1));
        let p = a.mul(&b);
        assert_eq!(p.get([0, 0]), rat(1, 1));
        assert_eq!(p.get([1, 0]), rat(1, 1));
        assert_eq!(p.get([0, 1]), rat(1, 1));
        assert_eq!(p.get([1, 1]), rat(1, 1));
    }

    fn arb_series() -> impl Strategy<Value = TruncatedSeries<1>> {
        proptest::collection::vec(((-9i64..9), (1i64..5)), 5)
            .prop_map(|v| TruncatedSeries::from_coeffs(v.into_iter().map(|(n, d)| rat(n, d)).collect()))
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_series(), b in arb_series(), c in arb_series()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.sub(&a), TruncatedSeries::zero([4]));
        }

        #[test]
        fn reciprocal_is_inverse(a in arb_series()) {
            prop_assume!(!a.constant_term().is_zero());
            let inv = a.reciprocal().unwrap();
            prop_assert_eq!(a.mul(&inv), TruncatedSeries::one([4]));
        }
    }
}
