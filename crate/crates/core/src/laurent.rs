//! Laurent polynomials in the marker variables.
//!
//! `LaurentPoly<V>` is a sparse polynomial in `V` formal markers with integer
//! (possibly negative) exponents and exact rational coefficients. `V = 1`
//! covers a single marker `t`; `V = 2` covers a marker pair `(t1, t2)` for
//! bivariate statistics. Negative exponents let a single value track signed
//! statistics such as heads minus tails, where steps contribute `t` or `1/t`.
//!
//! Values are immutable: every operation returns a fresh polynomial. Zero is
//! the empty term map and no zero coefficient is ever stored.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::series::TruncatedSeries;
use crate::tables::binomial_int;

#[derive(Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly<const V: usize> {
    terms: BTreeMap<[i64; V], Rational>,
}

pub type LaurentPoly1 = LaurentPoly<1>;
pub type LaurentPoly2 = LaurentPoly<2>;

impl<const V: usize> LaurentPoly<V> {
    pub fn zero() -> Self {
        LaurentPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert([0; V], c);
        }
        LaurentPoly { terms }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn monomial(exponents: [i64; V], coeff: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exponents, coeff);
        }
        LaurentPoly { terms }
    }

    pub fn from_terms(pairs: &[([i64; V], Rational)]) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in pairs {
            Self::insert_add(&mut terms, *e, c.clone());
        }
        LaurentPoly { terms }
    }

    /// The marker `t_axis` itself (exponent +1 on one coordinate).
    pub fn marker(axis: usize) -> Self {
        assert!(axis < V, "marker axis {axis} out of range for {V} markers");
        let mut exps = [0; V];
        exps[axis] = 1;
        Self::monomial(exps, Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` when the polynomial is a constant (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            return Some(Rational::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&[0; V]) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64; V], &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exponents: &[i64; V]) -> Rational {
        self.terms.get(exponents).cloned().unwrap_or_default()
    }

    fn insert_add(terms: &mut BTreeMap<[i64; V], Rational>, key: [i64; V], val: Rational) {
        if val.is_zero() {
            return;
        }
        match terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(val);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &val;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, v) in &rhs.terms {
            Self::insert_add(&mut terms, *k, v.clone());
        }
        LaurentPoly { terms }
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for (ka, va) in &self.terms {
            for (kb, vb) in &rhs.terms {
                let mut key = [0i64; V];
                for i in 0..V {
                    key[i] = ka[i] + kb[i];
                }
                Self::insert_add(&mut terms, key, va * vb);
            }
        }
        LaurentPoly { terms }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// Evaluates at all markers = 1, i.e. sums the coefficients. For a
    /// probability generating polynomial this is the total weight.
    pub fn eval_all_ones(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |a, c| a + c)
    }

    /// Evaluates at the given marker values. Negative exponents require the
    /// corresponding value to be nonzero.
    pub fn eval(&self, values: &[Rational; V]) -> Result<Rational> {
        let mut total = Rational::zero();
        for (k, c) in &self.terms {
            let mut term = c.clone();
            for i in 0..V {
                let e = k[i];
                if e == 0 {
                    continue;
                }
                let base = if e < 0 {
                    values[i].recip()?
                } else {
                    values[i].clone()
                };
                term *= base.pow(e.unsigned_abs() as u32);
            }
            total += term;
        }
        Ok(total)
    }

    /// Taylor-expands `p(1+u_1, ..., 1+u_V)` about the origin, truncating each
    /// `u_i` at `caps[i]`. The `u^j` coefficient of an expanded probability
    /// generating polynomial is the j-th factorial moment over j!. Negative
    /// marker exponents expand through the generalized binomial series for
    /// `(1+u)^e`, which the truncated ring represents exactly.
    pub fn expand_at_one(&self, caps: [usize; V]) -> TruncatedSeries<V> {
        let mut out = TruncatedSeries::zero(caps);
        for (k, c) in &self.terms {
            let mut term = TruncatedSeries::constant(caps, c.clone());
            for axis in 0..V {
                term = term.mul(&binomial_axis_series(k[axis], caps, axis));
            }
            out = out.add(&term);
        }
        out
    }

    /// Exact division: returns `q` with `self = q * d`, or an error when no
    /// such Laurent polynomial exists. Works coordinate-shifted over ordinary
    /// polynomials where lexicographic term order is a well-order.
    pub fn div_exact(&self, d: &Self) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::DivByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        if let Some(c) = d.as_constant() {
            return Ok(self.scale(&c.recip()?));
        }
        // Shift both operands so all exponents are nonnegative.
        let shift_of = |p: &Self| -> [i64; V] {
            let mut s = [i64::MAX; V];
            for k in p.terms.keys() {
                for i in 0..V {
                    s[i] = s[i].min(k[i]);
                }
            }
            s
        };
        let rs = shift_of(self);
        let ds = shift_of(d);
        let shift = |p: &Self, by: &[i64; V]| -> BTreeMap<[i64; V], Rational> {
            p.terms
                .iter()
                .map(|(k, v)| {
                    let mut nk = [0i64; V];
                    for i in 0..V {
                        nk[i] = k[i] - by[i];
                    }
                    (nk, v.clone())
                })
                .collect()
        };
        let mut rem = shift(self, &rs);
        let den = shift(d, &ds);
        let (dlt, dlc) = den.iter().next_back().map(|(k, v)| (*k, v.clone())).unwrap();
        let mut quot: BTreeMap<[i64; V], Rational> = BTreeMap::new();
        while let Some((rlt, rlc)) = rem.iter().next_back().map(|(k, v)| (*k, v.clone())) {
            let mut qk = [0i64; V];
            for i in 0..V {
                qk[i] = rlt[i] - dlt[i];
                if qk[i] < 0 {
                    return Err(Error::Invalid("not divisible".into()));
                }
            }
            let qc = rlc.checked_div(&dlc)?;
            for (k, v) in &den {
                let mut nk = [0i64; V];
                for i in 0..V {
                    nk[i] = k[i] + qk[i];
                }
                Self::insert_add(&mut rem, nk, -(v * &qc));
            }
            Self::insert_add(&mut quot, qk, qc);
        }
        // Undo the shifts: q = q' * t^(rs - ds).
        let mut unshift = [0i64; V];
        for i in 0..V {
            unshift[i] = ds[i] - rs[i];
        }
        Ok(LaurentPoly {
            terms: quot
                .into_iter()
                .map(|(k, v)| {
                    let mut nk = [0i64; V];
                    for i in 0..V {
                        nk[i] = k[i] - unshift[i];
                    }
                    (nk, v)
                })
                .collect(),
        })
    }
}

impl LaurentPoly<1> {
    pub fn from_pairs(pairs: &[(i64, Rational)]) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in pairs {
            Self::insert_add(&mut terms, [*e], c.clone());
        }
        LaurentPoly { terms }
    }

    /// Embeds a univariate Laurent polynomial as a bivariate one on `axis`.
    pub fn widen(&self, axis: usize) -> LaurentPoly<2> {
        assert!(axis < 2);
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            let mut nk = [0i64; 2];
            nk[axis] = k[0];
            terms.insert(nk, v.clone());
        }
        LaurentPoly { terms }
    }
}

impl LaurentPoly<2> {
    /// Projects to a univariate Laurent polynomial when the second marker is
    /// absent from every term.
    pub fn narrow(&self) -> Option<LaurentPoly<1>> {
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            if k[1] != 0 {
                return None;
            }
            terms.insert([k[0]], v.clone());
        }
        Some(LaurentPoly { terms })
    }
}

/// Series for `(1+u_axis)^e` truncated at the caps: coefficient of `u_axis^j`
/// is the generalized binomial C(e, j).
fn binomial_axis_series<const V: usize>(
    e: i64,
    caps: [usize; V],
    axis: usize,
) -> TruncatedSeries<V> {
    let mut s = TruncatedSeries::zero(caps);
    for j in 0..=caps[axis] {
        let mut idx = [0usize; V];
        idx[axis] = j;
        s.set(idx, Rational::from(binomial_int(e, j)));
    }
    s
}

impl<const V: usize> fmt::Display for LaurentPoly<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names: [&str; 2] = if V == 1 { ["t", ""] } else { ["t1", "t2"] };
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let all_zero = k.iter().all(|&e| e == 0);
            if all_zero {
                write!(f, "{c}")?;
                continue;
            }
            if c.is_one() {
                // bare monomial
            } else {
                write!(f, "{c}*")?;
            }
            let mut first_var = true;
            for i in 0..V {
                if k[i] == 0 {
                    continue;
                }
                if !first_var {
                    write!(f, "*")?;
                }
                first_var = false;
                if k[i] == 1 {
                    write!(f, "{}", names[i])?;
                } else {
                    write!(f, "{}^{}", names[i], k[i])?;
                }
            }
        }
        Ok(())
    }
}

impl<const V: usize> fmt::Debug for LaurentPoly<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn coin_step() -> LaurentPoly<1> {
        // t + 1/t
        LaurentPoly::from_pairs(&[(1, Rational::one()), (-1, Rational::one())])
    }

    #[test]
    fn expand_symmetric_step_at_one() {
        // (1+u) + 1/(1+u) = 2 + u^2 - u^3 + ... ; truncated at J=2 gives [2,0,1]
        let s = coin_step().expand_at_one([2]);
        assert_eq!(s.get([0]), rat(2, 1));
        assert_eq!(s.get([1]), Rational::zero());
        assert_eq!(s.get([2]), Rational::one());
    }

    #[test]
    fn expand_plain_marker() {
        let s = LaurentPoly::<1>::marker(0).expand_at_one([3]);
        assert_eq!(s.get([0]), Rational::one());
        assert_eq!(s.get([1]), Rational::one());
        assert_eq!(s.get([2]), Rational::zero());
        assert_eq!(s.get([3]), Rational::zero());
    }

    #[test]
    fn expand_negative_square() {
        // (1+u)^-2 = 1 - 2u + 3u^2 - ...
        let p = LaurentPoly::<1>::monomial([-2], Rational::one());
        let s = p.expand_at_one([2]);
        assert_eq!(s.get([0]), rat(1, 1));
        assert_eq!(s.get([1]), rat(-2, 1));
        assert_eq!(s.get([2]), rat(3, 1));
        // cross-check: multiplying back by (1+u)^2 gives 1 within the caps
        let sq = LaurentPoly::<1>::monomial([2], Rational::one()).expand_at_one([2]);
        let prod = s.mul(&sq);
        assert_eq!(prod.get([0]), Rational::one());
        assert_eq!(prod.get([1]), Rational::zero());
        assert_eq!(prod.get([2]), Rational::zero());
    }

    #[test]
    fn eval_all_ones_sums_coefficients() {
        let p = LaurentPoly::from_pairs(&[(2, rat(1, 4)), (0, rat(1, 2)), (-2, rat(1, 4))]);
        assert_eq!(p.eval_all_ones(), Rational::one());
        assert_eq!(
            p.eval(&[Rational::zero()]),
            Err(crate::error::Error::DivByZero)
        );
    }

    #[test]
    fn exact_division_round_trip() {
        let a = LaurentPoly::from_pairs(&[(-1, rat(1, 2)), (0, rat(3, 1)), (2, rat(-1, 1))]);
        let b = LaurentPoly::from_pairs(&[(-2, rat(2, 1)), (1, rat(5, 7))]);
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&b).unwrap(), a);
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        // a is not divisible by (a*b + 1)
        let c = prod.add(&LaurentPoly::one());
        assert!(a.div_exact(&c).is_err());
    }

    #[test]
    fn bivariate_expand_and_divide() {
        // (t1/t2) expanded: (1+u)(1+w)^-1
        let p = LaurentPoly::<2>::monomial([1, -1], Rational::one());
        let s = p.expand_at_one([1, 1]);
        assert_eq!(s.get([0, 0]), rat(1, 1));
        assert_eq!(s.get([1, 0]), rat(1, 1));
        assert_eq!(s.get([0, 1]), rat(-1, 1));
        assert_eq!(s.get([1, 1]), rat(-1, 1));

        let a = LaurentPoly::<2>::from_terms(&[([0, 0], rat(1, 1)), ([1, -2], rat(3, 1))]);
        let b = LaurentPoly::<2>::from_terms(&[([-1, 1], rat(2, 1)), ([2, 0], rat(1, 3))]);
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&a).unwrap(), b);
    }

    fn arb_laurent() -> impl Strategy<Value = LaurentPoly<1>> {
        proptest::collection::vec(((-6i64..6), (-9i64..9), (1i64..5)), 0..6).prop_map(|v| {
            LaurentPoly::from_pairs(
                &v.into_iter()
                    .map(|(e, n, d)| (e, rat(n, d)))
                    .collect::<Vec<_>>(),
            )
        })
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_laurent(), b in arb_laurent(), c in arb_laurent()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.sub(&a), LaurentPoly::zero());
        }

        #[test]
        fn expansion_is_a_ring_homomorphism(a in arb_laurent(), b in arb_laurent()) {
            let caps = [4usize];
            let lhs = a.mul(&b).expand_at_one(caps);
            let rhs = a.expand_at_one(caps).mul(&b.expand_at_one(caps));
            prop_assert_eq!(lhs, rhs);
            let lhs_add = a.add(&b).expand_at_one(caps);
            let rhs_add = a.expand_at_one(caps).add(&b.expand_at_one(caps));
            prop_assert_eq!(lhs_add, rhs_add);
        }

        #[test]
        fn division_inverts_multiplication(a in arb_laurent(), b in arb_laurent()) {
            prop_assume!(!b.is_zero());
            let prod = a.mul(&b);
            prop_assert_eq!(prod.div_exact(&b).unwrap(), a);
        }
    }
}
