//! Expansion of rational generating functions in `s`.
//!
//! Two redundant pathways extract per-`n` information from `R(t, s)`:
//!
//! * [`expand_exact`] works with whole Laurent polynomials. It runs the
//!   linear recurrence induced by the denominator over the ring of Laurent
//!   polynomials, clearing denominators when the `s^0` denominator
//!   coefficient is nonconstant, and finishes with an exact division check.
//!   The result is the full weight polynomial `Q_n`, normalized to a
//!   probability distribution.
//!
//! * [`expand_truncated`] substitutes `t = 1+u` (and `t2 = 1+w`) first and
//!   runs the same recurrence over the truncated series ring, keeping only
//!   the handful of coefficients that encode factorial moments. Cost is
//!   linear in `n` for fixed order, so it reaches large `n` cheaply.
//!
//! The truncated pathway is fast but opaque; the exact pathway is slow but
//! transparent. Their agreement at small `n` is the correctness anchor for
//! everything downstream.

use crate::error::{Error, Result};
use crate::gf::RationalGF;
use crate::laurent::LaurentPoly;
use crate::rational::Rational;
use crate::series::TruncatedSeries;
use crate::tables::CombinatoricsTables;

/// A finite exact distribution for one family index `n`. Support points are
/// integer vectors (one entry per marker); probabilities are exact and sum
/// to 1. With the signed-weights flag, "probabilities" may be negative and
/// the value is a normalized weight enumerator instead.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Distribution<const V: usize> {
    pub n: usize,
    pub support: Vec<([i64; V], Rational)>,
}

impl<const V: usize> Distribution<V> {
    pub fn total_mass(&self) -> Rational {
        self.support
            .iter()
            .fold(Rational::zero(), |acc, (_, p)| acc + p)
    }

    pub fn probability(&self, point: &[i64; V]) -> Rational {
        self.support
            .iter()
            .find(|(k, _)| k == point)
            .map(|(_, p)| p.clone())
            .unwrap_or_default()
    }

    /// Falling-factorial moments `E[X1^(j1) ... XV^(jV)]` read directly off
    /// the support, one entry per multi-order within `caps`.
    pub fn factorial_moments(&self, caps: [usize; V]) -> FactorialMomentVector<V> {
        let mut data = TruncatedSeries::zero(caps);
        let mut idx = [0usize; V];
        loop {
            let mut total = Rational::zero();
            for (k, p) in &self.support {
                let mut term = p.clone();
                for axis in 0..V {
                    term *= falling_factorial(k[axis], idx[axis]);
                }
                total += term;
            }
            data.set(idx, total);
            if !increment(&mut idx, &caps) {
                break;
            }
        }
        FactorialMomentVector {
            n: self.n,
            total_weight: Rational::one(),
            moments: data,
        }
    }

    /// Raw power moments `E[X1^j1 ... XV^jV]` by direct summation.
    pub fn raw_moments(&self, caps: [usize; V]) -> TruncatedSeries<V> {
        let mut data = TruncatedSeries::zero(caps);
        let mut idx = [0usize; V];
        loop {
            let mut total = Rational::zero();
            for (k, p) in &self.support {
                let mut term = p.clone();
                for axis in 0..V {
                    term *= Rational::from(k[axis]).pow(idx[axis] as u32);
                }
                total += term;
            }
            data.set(idx, total);
            if !increment(&mut idx, &caps) {
                break;
            }
        }
        data
    }
}

impl Distribution<1> {
    pub fn support_pairs(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.support.iter().map(|(k, p)| (k[0], p))
    }
}

fn falling_factorial(k: i64, j: usize) -> Rational {
    let mut acc = Rational::one();
    for i in 0..j as i64 {
        acc *= Rational::from(k - i);
    }
    acc
}

/// Advances a multi-index in row-major order; returns false after the last.
pub(crate) fn increment<const V: usize>(idx: &mut [usize; V], caps: &[usize; V]) -> bool {
    for i in (0..V).rev() {
        if idx[i] < caps[i] {
            idx[i] += 1;
            return true;
        }
        idx[i] = 0;
    }
    false
}

/// Normalized factorial moments for one `n`: `moments[j] = E[X^(j)]` (and the
/// mixed `E[X^(i) Y^(j)]` in bivariate mode), after dividing by the total
/// weight `Q_n(1)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FactorialMomentVector<const V: usize> {
    pub n: usize,
    pub total_weight: Rational,
    moments: TruncatedSeries<V>,
}

impl<const V: usize> FactorialMomentVector<V> {
    pub fn caps(&self) -> [usize; V] {
        self.moments.caps()
    }

    pub fn moment(&self, order: [usize; V]) -> Rational {
        self.moments.get(order)
    }
}

/// Expansion options for the exact pathway.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExpandOptions {
    /// Permit negative weights: the input is then a signed weight enumerator
    /// rather than a probability family.
    pub signed_weights: bool,
}

/// Expands `R` exactly, returning the normalized distributions `Q_0..Q_nMax`.
///
/// The recurrence `d_0 Q_n = num_n - sum_k d_k Q_{n-k}` is solved over
/// Laurent polynomials. When `d_0` is nonconstant the iterates are cleared of
/// fractions by tracking `P_n = d_0^(n+1) Q_n`, and the final exact division
/// checks that each `Q_n` really is a Laurent polynomial.
pub fn expand_exact<const V: usize>(
    gf: &RationalGF<V>,
    n_max: usize,
    options: ExpandOptions,
) -> Result<Vec<Distribution<V>>> {
    let den = gf.den();
    let d0 = den.coeff(0);
    let weights = if let Some(c) = d0.as_constant() {
        // Constant leading coefficient: divide through at every step.
        let inv = c.recip().map_err(|_| {
            Error::InadmissibleDenominator("s^0 coefficient of the denominator is zero".into())
        })?;
        let mut iters: Vec<LaurentPoly<V>> = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let mut acc = gf.num().coeff(n);
            for k in 1..=n.min(den.degree().unwrap_or(0)) {
                acc = acc.sub(&den.coeff(k).mul(&iters[n - k]));
            }
            iters.push(acc.scale(&inv));
        }
        iters
    } else {
        // Fraction-free form: P_n = d_0^n num_n - sum_k d_k d_0^(k-1) P_{n-k},
        // with Q_n = P_n / d_0^(n+1) recovered by exact division.
        let deg = den.degree().unwrap_or(0);
        let mut d0_pows = vec![LaurentPoly::one()];
        for _ in 0..n_max.max(deg) + 1 {
            d0_pows.push(d0.mul(d0_pows.last().unwrap()));
        }
        let mut cleared: Vec<LaurentPoly<V>> = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let mut acc = gf.num().coeff(n).mul(&d0_pows[n]);
            for k in 1..=n.min(deg) {
                acc = acc.sub(&den.coeff(k).mul(&d0_pows[k - 1]).mul(&cleared[n - k]));
            }
            cleared.push(acc);
        }
        let mut out = Vec::with_capacity(n_max + 1);
        for (n, p) in cleared.into_iter().enumerate() {
            let q = p.div_exact(&d0_pows[n + 1]).map_err(|_| Error::ExpansionError {
                n,
                detail: format!("s^{n} coefficient has denominator {d0}^{}", n + 1),
            })?;
            out.push(q);
        }
        out
    };

    weights
        .into_iter()
        .enumerate()
        .map(|(n, q)| normalize_weight(n, &q, options))
        .collect()
}

fn normalize_weight<const V: usize>(
    n: usize,
    q: &LaurentPoly<V>,
    options: ExpandOptions,
) -> Result<Distribution<V>> {
    let total = q.eval_all_ones();
    if total.is_zero() {
        return Err(Error::DegenerateWeight { n });
    }
    let mut support = Vec::with_capacity(q.num_terms());
    for (k, c) in q.terms() {
        let p = c.checked_div(&total)?;
        if p.is_negative() && !options.signed_weights {
            return Err(Error::NotADistribution {
                n,
                point: format!("{k:?}"),
                value: p.to_string(),
            });
        }
        support.push((*k, p));
    }
    if support.is_empty() {
        return Err(Error::DegenerateWeight { n });
    }
    Ok(Distribution { n, support })
}

/// Expands `R` through the truncated ring after the substitution
/// `t_i = 1 + u_i`, producing per-`n` factorial moment vectors for
/// `n` in `n_range` with component orders bounded by `caps`.
///
/// `F[j] = j! * [u^j] Q_n(1+u) / Q_n(1)` (componentwise factorials in the
/// bivariate case).
pub fn expand_truncated<const V: usize>(
    gf: &RationalGF<V>,
    n_range: std::ops::RangeInclusive<usize>,
    caps: [usize; V],
) -> Result<Vec<FactorialMomentVector<V>>> {
    let n_max = *n_range.end();
    let den: Vec<TruncatedSeries<V>> = gf
        .den()
        .coeffs()
        .iter()
        .map(|c| c.expand_at_one(caps))
        .collect();
    let num: Vec<TruncatedSeries<V>> = gf
        .num()
        .coeffs()
        .iter()
        .map(|c| c.expand_at_one(caps))
        .collect();
    let inv_d0 = den
        .first()
        .ok_or(Error::NotAUnit)?
        .reciprocal()
        .map_err(|_| Error::NotAUnit)?;

    let mut iterates: Vec<TruncatedSeries<V>> = Vec::with_capacity(n_max + 1);
    let mut out = Vec::new();
    let factorials = factorial_table(caps.iter().copied().max().unwrap_or(0));
    for n in 0..=n_max {
        let mut acc = num
            .get(n)
            .cloned()
            .unwrap_or_else(|| TruncatedSeries::zero(caps));
        for k in 1..=n.min(den.len() - 1) {
            acc = acc.sub(&den[k].mul(&iterates[n - k]));
        }
        let q = acc.mul(&inv_d0);
        if n_range.contains(&n) {
            out.push(moments_from_series(n, &q, &factorials)?);
        }
        iterates.push(q);
    }
    Ok(out)
}

fn factorial_table(max: usize) -> Vec<Rational> {
    let mut f = vec![Rational::one()];
    for j in 1..=max {
        let prev = f[j - 1].clone();
        f.push(prev * Rational::from(j as i64));
    }
    f
}

fn moments_from_series<const V: usize>(
    n: usize,
    q: &TruncatedSeries<V>,
    factorials: &[Rational],
) -> Result<FactorialMomentVector<V>> {
    let caps = q.caps();
    let total = q.constant_term().clone();
    if total.is_zero() {
        return Err(Error::DegenerateWeight { n });
    }
    let mut moments = TruncatedSeries::zero(caps);
    let mut idx = [0usize; V];
    loop {
        let mut scale = Rational::one();
        for axis in 0..V {
            scale *= &factorials[idx[axis]];
        }
        let value = q.get(idx) * scale;
        moments.set(idx, value.checked_div(&total)?);
        if !increment(&mut idx, &caps) {
            break;
        }
    }
    Ok(FactorialMomentVector {
        n,
        total_weight: total,
        moments,
    })
}

/// Builds a factorial moment vector directly from known data (used by
/// dynamic-programming families that bypass generating functions).
pub fn factorial_vector_from_raw(
    n: usize,
    raw: &[Rational],
    tables: &CombinatoricsTables,
) -> FactorialMomentVector<1> {
    let order = raw.len() - 1;
    assert!(tables.max_r() >= order);
    let mut data = TruncatedSeries::zero([order]);
    for j in 0..=order {
        // x^(j) = sum_i s(j,i) x^i
        let mut total = Rational::zero();
        for (i, r) in raw.iter().enumerate().take(j + 1) {
            total += Rational::from(tables.stirling1_signed(j, i)) * r;
        }
        data.set([j], total);
    }
    FactorialMomentVector {
        n,
        total_weight: Rational::one(),
        moments: data,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{builtin, SPoly};

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn fair_coin() -> RationalGF<1> {
        builtin::coin_difference(&rat(1, 2)).unwrap()
    }

    #[test]
    fn fair_coin_two_steps_exact() {
        let dists = expand_exact(&fair_coin(), 2, ExpandOptions::default()).unwrap();
        let d2 = &dists[2];
        assert_eq!(d2.probability(&[-2]), rat(1, 4));
        assert_eq!(d2.probability(&[0]), rat(1, 2));
        assert_eq!(d2.probability(&[2]), rat(1, 4));
        assert_eq!(d2.total_mass(), Rational::one());
    }

    #[test]
    fn marker_free_gf_is_point_mass() {
        // 1/(1-s)
        let den = SPoly::<1>::new(vec![
            LaurentPoly::one(),
            LaurentPoly::constant(rat(-1, 1)),
        ]);
        let gf = RationalGF::new(SPoly::one(), den).unwrap();
        let dists = expand_exact(&gf, 5, ExpandOptions::default()).unwrap();
        for d in &dists {
            assert_eq!(d.support, vec![([0], Rational::one())]);
        }
    }

    #[test]
    fn heads_count_three_tosses_is_binomial() {
        let gf = builtin::heads_count(&rat(1, 2)).unwrap();
        let dists = expand_exact(&gf, 3, ExpandOptions::default()).unwrap();
        let d3 = &dists[3];
        assert_eq!(d3.probability(&[0]), rat(1, 8));
        assert_eq!(d3.probability(&[1]), rat(3, 8));
        assert_eq!(d3.probability(&[2]), rat(3, 8));
        assert_eq!(d3.probability(&[3]), rat(1, 8));
    }

    #[test]
    fn fair_coin_truncated_factorial_moments() {
        let got = expand_truncated(&fair_coin(), 2..=2, [2]).unwrap();
        let fm = &got[0];
        assert_eq!(fm.total_weight, Rational::one());
        assert_eq!(fm.moment([0]), rat(1, 1));
        assert_eq!(fm.moment([1]), rat(0, 1));
        assert_eq!(fm.moment([2]), rat(2, 1));
    }

    #[test]
    fn order_zero_vector_is_normalization() {
        let got = expand_truncated(&fair_coin(), 0..=7, [0]).unwrap();
        for fm in &got {
            assert_eq!(fm.moment([0]), Rational::one());
        }
    }

    #[test]
    fn heads_count_mean_of_four_tosses() {
        let gf = builtin::heads_count(&rat(1, 2)).unwrap();
        let got = expand_truncated(&gf, 4..=4, [1]).unwrap();
        assert_eq!(got[0].moment([1]), rat(2, 1));
    }

    #[test]
    fn pathways_agree_on_builtins() {
        for gf in [fair_coin(), builtin::heads_count(&rat(1, 3)).unwrap()] {
            let exact = expand_exact(&gf, 12, ExpandOptions::default()).unwrap();
            let fast = expand_truncated(&gf, 0..=12, [4]).unwrap();
            for (d, fm) in exact.iter().zip(&fast) {
                assert_eq!(d.factorial_moments([4]).moments, fm.moments);
            }
        }
    }

    #[test]
    fn degenerate_weight_is_reported() {
        // num = 1 + (t-1)s: Q_1 = t - 1 has Q_1(1) = 0
        let num = SPoly::new(vec![
            LaurentPoly::one(),
            LaurentPoly::from_pairs(&[(1, rat(1, 1)), (0, rat(-1, 1))]),
        ]);
        let gf = RationalGF::new(num, SPoly::one()).unwrap();
        assert_eq!(
            expand_exact(&gf, 1, ExpandOptions::default()),
            Err(Error::DegenerateWeight { n: 1 })
        );
    }

    #[test]
    fn negative_probability_requires_signed_flag() {
        // num = 1 + (2t-1)s: Q_1 = 2t - 1 normalizes to {1: 2, 0: -1}
        let num = SPoly::new(vec![
            LaurentPoly::one(),
            LaurentPoly::from_pairs(&[(1, rat(2, 1)), (0, rat(-1, 1))]),
        ]);
        let gf = RationalGF::new(num, SPoly::one()).unwrap();
        assert!(matches!(
            expand_exact(&gf, 1, ExpandOptions::default()),
            Err(Error::NotADistribution { n: 1, .. })
        ));
        let signed = expand_exact(
            &gf,
            1,
            ExpandOptions {
                signed_weights: true,
            },
        )
        .unwrap();
        assert_eq!(signed[1].probability(&[0]), rat(-1, 1));
        assert_eq!(signed[1].total_mass(), Rational::one());
    }

    #[test]
    fn nonconstant_leading_denominator_divides_exactly() {
        // R = 1/((1+t) - (1+t)s) = (1/(1+t)) * 1/(1-s): Q_n = 1/(1+t) is not
        // a Laurent polynomial -> expansion error.
        let one_plus_t = LaurentPoly::from_pairs(&[(0, rat(1, 1)), (1, rat(1, 1))]);
        let den = SPoly::new(vec![one_plus_t.clone(), LaurentPoly::constant(rat(-1, 1))]);
        let gf = RationalGF::new(SPoly::one(), den).unwrap();
        assert!(matches!(
            expand_exact(&gf, 2, ExpandOptions::default()),
            Err(Error::ExpansionError { .. })
        ));

        // R = (1+t)/((1+t) - 2s): Q_n = (2/(1+t))^n (1+t) ... here Q_n does
        // divide for n <= 1 only; instead use R = (1+t)/((1+t)*(1 - s)):
        // Q_n = 1 for every n.
        let den = SPoly::new(vec![one_plus_t.clone(), one_plus_t.clone().neg()]);
        let gf = RationalGF::new(SPoly::constant(one_plus_t), den).unwrap();
        let dists = expand_exact(&gf, 4, ExpandOptions::default()).unwrap();
        for d in &dists {
            assert_eq!(d.support, vec![([0], Rational::one())]);
        }
    }

    #[test]
    fn truncated_not_a_unit() {
        // denominator t - 1 - s: s^0 coefficient expands with zero constant term
        let den = SPoly::new(vec![
            LaurentPoly::from_pairs(&[(1, rat(1, 1)), (0, rat(-1, 1))]),
            LaurentPoly::constant(rat(-1, 1)),
        ]);
        // bypass RationalGF validation to hit the truncated-path error
        let gf_err = expand_truncated(
            &RationalGF::from_parts_unchecked(SPoly::one(), den),
            0..=2,
            [2],
        );
        assert_eq!(gf_err.unwrap_err(), Error::NotAUnit);
    }

    #[test]
    fn bivariate_heads_tails_pair() {
        let gf = builtin::heads_tails_pair(&rat(1, 2)).unwrap();
        let dists = expand_exact(&gf, 2, ExpandOptions::default()).unwrap();
        let d2 = &dists[2];
        assert_eq!(d2.probability(&[2, 0]), rat(1, 4));
        assert_eq!(d2.probability(&[1, 1]), rat(1, 2));
        assert_eq!(d2.probability(&[0, 2]), rat(1, 4));
        let fm = expand_truncated(&gf, 2..=2, [2, 2]).unwrap();
        assert_eq!(fm[0].moment([1, 0]), rat(1, 1));
        assert_eq!(fm[0].moment([0, 1]), rat(1, 1));
        assert_eq!(fm[0].moment([1, 1]), rat(1, 2));
        assert_eq!(d2.factorial_moments([2, 2]).moments, fm[0].moments);
    }
}
