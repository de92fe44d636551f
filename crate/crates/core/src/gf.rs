//! Rational generating functions `R(t, s)`.
//!
//! A `RationalGF` is a fraction of polynomials in the expansion variable `s`
//! whose coefficients are Laurent polynomials in the markers. The coefficient
//! of `s^n` in the power-series expansion of `R` is the (unnormalized) weight
//! polynomial `Q_n(t)` whose normalization is the n-th probability
//! distribution of the family. The fraction is kept as given: no
//! rational-function GCD is ever attempted.

use std::fmt;

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::rational::Rational;

/// Dense polynomial in `s` with marker-polynomial coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SPoly<const V: usize> {
    coeffs: Vec<LaurentPoly<V>>,
}

impl<const V: usize> SPoly<V> {
    pub fn new(mut coeffs: Vec<LaurentPoly<V>>) -> Self {
        while coeffs.last().is_some_and(LaurentPoly::is_zero) {
            coeffs.pop();
        }
        SPoly { coeffs }
    }

    pub fn zero() -> Self {
        SPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: LaurentPoly<V>) -> Self {
        SPoly::new(vec![c])
    }

    pub fn one() -> Self {
        SPoly::constant(LaurentPoly::one())
    }

    /// The polynomial `s`.
    pub fn s() -> Self {
        SPoly::new(vec![LaurentPoly::zero(), LaurentPoly::one()])
    }

    pub fn monomial_s(power: usize, coeff: LaurentPoly<V>) -> Self {
        let mut coeffs = vec![LaurentPoly::zero(); power];
        coeffs.push(coeff);
        SPoly::new(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, power: usize) -> LaurentPoly<V> {
        self.coeffs.get(power).cloned().unwrap_or_default()
    }

    pub fn coeff_ref(&self, power: usize) -> Option<&LaurentPoly<V>> {
        self.coeffs.get(power)
    }

    pub fn coeffs(&self) -> &[LaurentPoly<V>] {
        &self.coeffs
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).add(&rhs.coeff(i)));
        }
        SPoly::new(out)
    }

    pub fn neg(&self) -> Self {
        SPoly {
            coeffs: self.coeffs.iter().map(LaurentPoly::neg).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return SPoly::zero();
        }
        let mut out = vec![LaurentPoly::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        SPoly::new(out)
    }

    pub fn mul_laurent(&self, c: &LaurentPoly<V>) -> Self {
        SPoly::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitutes fixed rational values for every marker, leaving a plain
    /// polynomial in `s`.
    pub fn specialize(&self, values: &[Rational; V]) -> Result<Vec<Rational>> {
        self.coeffs.iter().map(|c| c.eval(values)).collect()
    }

    /// Rescales `s -> s/d`, dividing the `s^k` coefficient by `d^k`.
    pub fn rescale_s(&self, d: &Rational) -> Result<Self> {
        let inv = d.recip()?;
        let mut factor = Rational::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c.scale(&factor));
            factor *= &inv;
        }
        Ok(SPoly::new(out))
    }
}

impl SPoly<1> {
    pub fn widen(&self, axis: usize) -> SPoly<2> {
        SPoly::new(self.coeffs.iter().map(|c| c.widen(axis)).collect())
    }
}

impl SPoly<2> {
    pub fn narrow(&self) -> Option<SPoly<1>> {
        let coeffs: Option<Vec<_>> = self.coeffs.iter().map(LaurentPoly::narrow).collect();
        coeffs.map(SPoly::new)
    }
}

impl<const V: usize> fmt::Display for SPoly<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (p, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let needs_parens = c.num_terms() > 1;
            let body = if needs_parens {
                format!("({c})")
            } else {
                format!("{c}")
            };
            match p {
                0 => write!(f, "{body}")?,
                1 => write!(f, "{body}*s")?,
                _ => write!(f, "{body}*s^{p}")?,
            }
        }
        Ok(())
    }
}

impl<const V: usize> fmt::Debug for SPoly<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A rational generating function: numerator over denominator, both
/// polynomials in `s` with Laurent coefficients in `V` markers.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalGF<const V: usize> {
    num: SPoly<V>,
    den: SPoly<V>,
}

impl<const V: usize> RationalGF<V> {
    /// Validates the admissibility invariants: the denominator is nonzero and
    /// its `s^0` coefficient does not vanish at all markers = 1, so the
    /// expansion exists and weights can be normalized.
    pub fn new(num: SPoly<V>, den: SPoly<V>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InadmissibleDenominator(
                "denominator is identically zero".into(),
            ));
        }
        let d0 = den.coeff(0);
        if d0.is_zero() {
            return Err(Error::InadmissibleDenominator(
                "s^0 coefficient of the denominator is zero".into(),
            ));
        }
        if d0.eval_all_ones().is_zero() {
            return Err(Error::InadmissibleDenominator(
                "s^0 coefficient of the denominator vanishes at markers = 1".into(),
            ));
        }
        Ok(RationalGF { num, den })
    }

    /// Skips the admissibility checks. Only for callers that have already
    /// established them (or tests probing the downstream error paths).
    #[doc(hidden)]
    pub fn from_parts_unchecked(num: SPoly<V>, den: SPoly<V>) -> Self {
        RationalGF { num, den }
    }

    pub fn num(&self) -> &SPoly<V> {
        &self.num
    }

    pub fn den(&self) -> &SPoly<V> {
        &self.den
    }

    pub fn marker_count(&self) -> usize {
        V
    }

    /// Substitutes fixed values for the markers, leaving scalar numerator and
    /// denominator coefficient vectors in `s`.
    pub fn specialize(&self, values: &[Rational; V]) -> Result<(Vec<Rational>, Vec<Rational>)> {
        Ok((self.num.specialize(values)?, self.den.specialize(values)?))
    }
}

impl<const V: usize> fmt::Display for RationalGF<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

impl<const V: usize> fmt::Debug for RationalGF<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Expands a scalar rational function of `s` to the requested number of
/// coefficients via the linear recurrence induced by the denominator.
pub fn expand_scalar(num: &[Rational], den: &[Rational], n_max: usize) -> Result<Vec<Rational>> {
    let d0 = den.first().cloned().unwrap_or_default();
    if d0.is_zero() {
        return Err(Error::InadmissibleDenominator(
            "s^0 coefficient of the denominator is zero".into(),
        ));
    }
    let mut out: Vec<Rational> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut acc = num.get(n).cloned().unwrap_or_default();
        for k in 1..=n.min(den.len().saturating_sub(1)) {
            acc = acc - &den[k] * &out[n - k];
        }
        out.push(acc.checked_div(&d0)?);
    }
    Ok(out)
}

/// Built-in generating functions for the curated example families.
pub mod builtin {
    use super::*;

    fn check_probability(p: &Rational) -> Result<()> {
        if p.signum() <= 0 || (Rational::one() - p).signum() <= 0 {
            return Err(Error::Invalid(format!(
                "step probability must lie strictly between 0 and 1, got {p}"
            )));
        }
        Ok(())
    }

    /// Heads-minus-tails difference of a coin with heads probability `p`:
    /// `R(t,s) = 1/(1 - s*(p*t + (1-p)/t))`.
    pub fn coin_difference(p: &Rational) -> Result<RationalGF<1>> {
        check_probability(p)?;
        let q = Rational::one() - p;
        let step = LaurentPoly::from_pairs(&[(1, p.clone()), (-1, q)]);
        RationalGF::new(
            SPoly::one(),
            SPoly::one().sub(&SPoly::monomial_s(1, step)),
        )
    }

    /// Number of heads among `n` tosses: `R(t,s) = 1/(1 - s*(p*t + (1-p)))`.
    pub fn heads_count(p: &Rational) -> Result<RationalGF<1>> {
        check_probability(p)?;
        let q = Rational::one() - p;
        let step = LaurentPoly::from_pairs(&[(1, p.clone()), (0, q)]);
        RationalGF::new(
            SPoly::one(),
            SPoly::one().sub(&SPoly::monomial_s(1, step)),
        )
    }

    /// The perfectly anticorrelated pair (heads, tails):
    /// `R(t1,t2,s) = 1/(1 - s*(p*t1 + (1-p)*t2))`.
    pub fn heads_tails_pair(p: &Rational) -> Result<RationalGF<2>> {
        check_probability(p)?;
        let q = Rational::one() - p;
        let step = LaurentPoly::from_terms(&[([1, 0], p.clone()), ([0, 1], q)]);
        RationalGF::new(
            SPoly::one(),
            SPoly::one().sub(&SPoly::monomial_s(1, step)),
        )
    }

    /// Two independent fair +-1 walks driven by independent coins, markers on
    /// disjoint coordinates of each step:
    /// `R(t1,t2,s) = 1/(1 - s*((t1+1/t1)/2)*((t2+1/t2)/2))`.
    pub fn independent_coins_pair() -> Result<RationalGF<2>> {
        let half = Rational::new(1, 2).unwrap();
        let x = LaurentPoly::<1>::from_pairs(&[(1, half.clone()), (-1, half.clone())]);
        let step = x.widen(0).mul(&x.widen(1));
        RationalGF::new(
            SPoly::one(),
            SPoly::one().sub(&SPoly::monomial_s(1, step)),
        )
    }
}
