//! The polynomial ansatz: discover exact closed forms by interpolation, then
//! certify them by checking more values than the degree.
//!
//! [`guess_poly`] finds the least-degree polynomial through a prefix of the
//! data that reproduces every remaining point exactly. Two polynomials of
//! degree at most `d` that agree at `d+1` points are identical, so a fit
//! verified at held-out points is a theorem modulo the degree bound; without
//! a caller-supplied bound the certificate stays "verified-semi-rigorous",
//! with one it upgrades to a proved polynomial identity.
//!
//! [`expand_at_infinity`] turns exact rational functions of `n` into Laurent
//! expansions in `1/n`, and [`guess_in_n_and_r`] composes the two stages:
//! expand each normalized moment at `n = infinity`, then fit each expansion
//! coefficient as a polynomial in the moment order `r`.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::poly::{BiPoly, Poly};
use crate::rational::Rational;
use crate::series::TruncatedSeries;
use crate::tables::CombinatoricsTables;

/// Evidence attached to a fitted polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuessCertificate {
    pub fitted_degree: usize,
    /// Abscissas the interpolant was built from.
    pub points_used: Vec<i64>,
    /// Number of remaining data points the interpolant reproduced exactly.
    pub held_out_matches: usize,
    pub status: CertificateStatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateStatus {
    /// Fit plus a caller-supplied degree bound with at least bound+1 total
    /// coincidences: a rigorous polynomial identity.
    ProvedPolynomialIdentity,
    /// Fit verified on held-out points, no a-priori degree bound.
    VerifiedSemiRigorous,
    /// No polynomial of permitted degree matched.
    Failed,
}

impl CertificateStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CertificateStatus::ProvedPolynomialIdentity => "proved-polynomial-identity",
            CertificateStatus::VerifiedSemiRigorous => "verified-semi-rigorous",
            CertificateStatus::Failed => "failed",
        }
    }
}

impl GuessCertificate {
    pub fn failed() -> Self {
        GuessCertificate {
            fitted_degree: 0,
            points_used: Vec::new(),
            held_out_matches: 0,
            status: CertificateStatus::Failed,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "fittedDegree": self.fitted_degree,
            "pointsUsed": self.points_used,
            "heldOutMatches": self.held_out_matches,
            "status": self.status.as_str(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct PolyFit {
    pub poly: Poly,
    pub certificate: GuessCertificate,
}

/// Knobs for [`guess_poly`].
#[derive(Clone, Debug)]
pub struct GuessOptions {
    /// Largest degree the search will try.
    pub max_deg: usize,
    /// Minimum number of data points that must remain beyond the largest fit
    /// window; the precondition is `data >= max_deg + 1 + hold_out`.
    pub hold_out: usize,
    /// Data points with abscissa below this are dropped before fitting
    /// (word statistics are only eventually polynomial).
    pub n0: i64,
    /// A degree bound the caller can vouch for; enables proved certificates.
    pub proven_degree_bound: Option<usize>,
}

impl Default for GuessOptions {
    fn default() -> Self {
        GuessOptions {
            max_deg: 6,
            hold_out: 5,
            n0: 1,
            proven_degree_bound: None,
        }
    }
}

/// Least-degree exact polynomial fit.
///
/// Sorts the admissible points, interpolates through the first `d+1` for
/// ascending `d`, and accepts the first interpolant that reproduces every
/// remaining point exactly. Interpolation is exact Newton form over the
/// rationals; interpolants are unique, so there is nothing to tie-break.
pub fn guess_poly(data: &[(i64, Rational)], opts: &GuessOptions) -> Result<PolyFit> {
    let mut points: Vec<(i64, Rational)> = data
        .iter()
        .filter(|(n, _)| *n >= opts.n0)
        .cloned()
        .collect();
    points.sort_by_key(|(n, _)| *n);
    for pair in points.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(Error::Invalid(format!(
                "duplicate abscissa {} in fit data",
                pair[0].0
            )));
        }
    }
    // Even a constant fit must leave hold_out points to verify; larger
    // degrees need correspondingly more, so the searched degree is capped by
    // the data: max_deg is only reachable with max_deg + 1 + hold_out points.
    let need = 1 + opts.hold_out;
    if points.len() < need {
        return Err(Error::NotEnoughPoints {
            need,
            have: points.len(),
        });
    }
    let effective_max_deg = opts.max_deg.min(points.len() - need);

    // Newton divided differences over the first max_deg+1 points, built
    // incrementally: candidate_d = candidate_{d-1} + dd_d * prod(x - x_i).
    let window = effective_max_deg + 1;
    let mut dd: Vec<Rational> = points[..window].iter().map(|(_, y)| y.clone()).collect();
    let mut candidate = Poly::zero();
    let mut basis = Poly::one();
    for d in 0..window {
        if d > 0 {
            // one more divided-difference column
            for i in (d..window).rev() {
                let dx = Rational::from(points[i].0 - points[i - d].0);
                dd[i] = (&dd[i] - &dd[i - 1]).checked_div(&dx)?;
            }
            basis = basis.mul(&Poly::new(vec![
                Rational::from(-points[d - 1].0),
                Rational::one(),
            ]));
        }
        candidate = candidate.add(&basis.scale(&dd[d]));
        let rest = &points[d + 1..];
        if rest
            .iter()
            .all(|(x, y)| &candidate.eval_int(*x) == y)
        {
            let held_out_matches = rest.len();
            let fit_points: Vec<i64> = points[..d + 1].iter().map(|(x, _)| *x).collect();
            let status = match opts.proven_degree_bound {
                Some(bound)
                    if d <= bound
                        && held_out_matches >= 1
                        && fit_points.len() + held_out_matches > bound =>
                {
                    CertificateStatus::ProvedPolynomialIdentity
                }
                _ => CertificateStatus::VerifiedSemiRigorous,
            };
            return Ok(PolyFit {
                poly: candidate,
                certificate: GuessCertificate {
                    fitted_degree: d,
                    points_used: fit_points,
                    held_out_matches,
                    status,
                },
            });
        }
    }
    Err(Error::NoFit {
        max_deg: effective_max_deg,
    })
}

/// Exact Laurent expansion of `num(n)/den(n)` at `n = infinity`:
/// `sum_{i >= leading} coeffs[i - leading] * n^(-i)`, carried to `depth`
/// terms past the leading one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfinityExpansion {
    /// Exponent `i0` of the leading term `a * n^(-i0)`; negative when the
    /// function grows.
    pub leading_exponent: i64,
    /// `coeffs[j]` multiplies `n^(-(leading_exponent + j))`.
    pub coeffs: Vec<Rational>,
}

impl InfinityExpansion {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    /// Coefficient of `n^(-i)`; `None` beyond the expansion window.
    pub fn coeff_at(&self, i: i64) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if i < self.leading_exponent {
            return Some(Rational::zero());
        }
        let j = usize::try_from(i - self.leading_exponent).ok()?;
        self.coeffs.get(j).cloned()
    }

    /// Value of the truncated expansion at a concrete `n`.
    pub fn eval_at(&self, n: i64) -> Result<Rational> {
        let nr = Rational::from(n);
        let inv = nr.recip()?;
        let mut acc = Rational::zero();
        for (j, c) in self.coeffs.iter().enumerate() {
            let e = self.leading_exponent + j as i64;
            let p = if e >= 0 {
                inv.pow(e as u32)
            } else {
                nr.pow((-e) as u32)
            };
            acc += c * &p;
        }
        Ok(acc)
    }

    /// Limit as `n -> infinity`.
    pub fn limit(&self) -> ExpansionLimit {
        if self.is_zero() || self.leading_exponent > 0 {
            return ExpansionLimit::Zero;
        }
        if self.leading_exponent == 0 {
            return ExpansionLimit::Finite(self.coeffs[0].clone());
        }
        ExpansionLimit::Divergent {
            sign: self.coeffs[0].signum(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExpansionLimit {
    Zero,
    Finite(Rational),
    Divergent { sign: i32 },
}

/// Expands `num/den` at infinity to `depth` terms past the leading one by
/// reversing both polynomials and dividing in the truncated ring.
pub fn expand_at_infinity(num: &Poly, den: &Poly, depth: usize) -> Result<InfinityExpansion> {
    if den.is_zero() {
        return Err(Error::DivByZero);
    }
    if num.is_zero() {
        return Ok(InfinityExpansion {
            leading_exponent: 0,
            coeffs: vec![Rational::zero(); depth + 1],
        });
    }
    let a = num.degree().unwrap();
    let b = den.degree().unwrap();
    let reversed = |p: &Poly, deg: usize| -> TruncatedSeries<1> {
        let coeffs = (0..=depth)
            .map(|j| {
                if j <= deg {
                    p.coeff(deg - j)
                } else {
                    Rational::zero()
                }
            })
            .collect();
        TruncatedSeries::from_coeffs(coeffs)
    };
    let nr = reversed(num, a);
    let dr = reversed(den, b);
    let quotient = nr.mul(&dr.reciprocal()?);
    Ok(InfinityExpansion {
        leading_exponent: b as i64 - a as i64,
        coeffs: quotient.coeffs().to_vec(),
    })
}

/// One expansion coefficient `c_i` fitted as a polynomial in the order
/// variable; `poly = None` with a failed certificate when no fit was found.
#[derive(Clone, Debug)]
pub struct CoeffFit {
    pub inv_n_power: usize,
    pub poly: Option<Poly>,
    pub certificate: GuessCertificate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityClass {
    Even,
    Odd,
}

impl ParityClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            ParityClass::Even => "even",
            ParityClass::Odd => "odd",
        }
    }
}

/// Asymptotic formula for one parity class: the normalized moment equals
/// `prefactor * (c_0(r) + c_1(r)/n + ... + c_K(r)/n^K + O(n^-(K+1)))`.
///
/// Even class: `alpha[2r](n)` with prefactor `(2r-1)!!`. Odd class: the
/// rational surrogate `beta[2r+1](n) = m_{2r+1}/m_2^r`, normalized by
/// `(2r-1)!!` as well so the coefficients stay polynomial in `r`; the full
/// normalized moment reattaches `m_2(n)^(-1/2)` symbolically.
#[derive(Clone, Debug)]
pub struct AsymptoticFormula {
    pub class: ParityClass,
    pub depth: usize,
    pub orders_fitted: Vec<usize>,
    pub coefficients: Vec<CoeffFit>,
}

impl AsymptoticFormula {
    pub fn coefficient(&self, inv_n_power: usize) -> Option<&CoeffFit> {
        self.coefficients.get(inv_n_power)
    }

    pub fn render(&self) -> String {
        let lhs = match self.class {
            ParityClass::Even => "alpha[2r](n) = (2r-1)!! * (",
            ParityClass::Odd => "alpha[2r+1](n) = (2r-1)!! * m2(n)^(-1/2) * (",
        };
        let mut parts = Vec::new();
        for cf in &self.coefficients {
            let body = match &cf.poly {
                Some(p) if p.is_zero() => continue,
                Some(p) => {
                    let rendered = p.render("r");
                    if p.degree().unwrap_or(0) == 0 {
                        rendered
                    } else {
                        format!("({rendered})")
                    }
                }
                None => "<no-fit>".to_string(),
            };
            let term = match cf.inv_n_power {
                0 => body,
                1 => format!("{body}/n"),
                k => format!("{body}/n^{k}"),
            };
            parts.push(term);
        }
        if parts.is_empty() {
            parts.push("0".to_string());
        }
        format!(
            "{lhs}{} + O(1/n^{}))",
            parts.join(" + "),
            self.depth + 1
        )
    }

    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .coefficients
            .iter()
            .map(|cf| {
                let poly_json: Value = match &cf.poly {
                    Some(p) => json!(p
                        .coeffs()
                        .iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()),
                    None => Value::Null,
                };
                json!({
                    "power": cf.inv_n_power,
                    "poly": poly_json,
                    "certificate": cf.certificate.to_json(),
                })
            })
            .collect();
        json!({
            "parityClass": self.class.as_str(),
            "prefactor": match self.class {
                ParityClass::Even => "(2r-1)!!",
                ParityClass::Odd => "(2r-1)!! * m2(n)^(-1/2)",
            },
            "depth": self.depth,
            "ordersFitted": self.orders_fitted,
            "coefficients": coeffs,
            "rendered": self.render(),
        })
    }
}

/// Central moment polynomials in `n`, indexed by order.
#[derive(Clone, Debug, Default)]
pub struct MomentPolynomials {
    /// `by_order[j] = m_j(n)` for the orders that were fitted.
    pub by_order: BTreeMap<usize, Poly>,
}

impl MomentPolynomials {
    pub fn variance(&self) -> Option<&Poly> {
        self.by_order.get(&2)
    }
}

/// Stage configuration shared by the `n`-and-`r` guessers.
#[derive(Clone, Debug)]
pub struct FormulaOptions {
    /// Number of `1/n` correction terms past the leading one.
    pub depth: usize,
    /// Orders `r = 1..=r_max` enter the stage-2 fits.
    pub r_max: usize,
    /// Degree cap for `c_i(r)`, by power `i`; the true bound is unknown, so
    /// this defaults to `2i + 2` clamped to the available points.
    pub coeff_max_deg: Option<usize>,
}

impl Default for FormulaOptions {
    fn default() -> Self {
        FormulaOptions {
            depth: 3,
            r_max: 4,
            coeff_max_deg: None,
        }
    }
}

/// Two-stage guess: expand each normalized even (and reduced odd) moment at
/// `n = infinity`, then fit every expansion coefficient as a polynomial in
/// `r`. Stage-2 failures are recorded per coefficient rather than aborting.
pub fn guess_in_n_and_r(
    moments: &MomentPolynomials,
    opts: &FormulaOptions,
    tables: &CombinatoricsTables,
) -> Result<(AsymptoticFormula, AsymptoticFormula)> {
    let variance = moments
        .variance()
        .ok_or(Error::DegenerateVariance)?
        .clone();
    if variance.is_zero() {
        return Err(Error::DegenerateVariance);
    }
    let mut even_rows: Vec<(usize, InfinityExpansion)> = Vec::new();
    let mut odd_rows: Vec<(usize, InfinityExpansion)> = Vec::new();
    for r in 1..=opts.r_max {
        let var_pow = variance.pow(r as u32);
        if let Some(m_even) = moments.by_order.get(&(2 * r)) {
            let norm = var_pow.scale(&tables.double_factorial_rational(r));
            even_rows.push((r, expand_at_infinity(m_even, &norm, opts.depth)?));
        }
        if let Some(m_odd) = moments.by_order.get(&(2 * r + 1)) {
            // the odd surrogate beta_{2r+1} = m_{2r+1}/m_2^r also needs the
            // (2r-1)!! division: without it the r = infinity coefficients
            // grow like double factorials and are never polynomial in r
            let norm = var_pow.scale(&tables.double_factorial_rational(r));
            odd_rows.push((r, expand_at_infinity(m_odd, &norm, opts.depth)?));
        }
    }
    let even = fit_class(ParityClass::Even, &even_rows, opts)?;
    let odd = fit_class(ParityClass::Odd, &odd_rows, opts)?;
    Ok((even, odd))
}

fn fit_class(
    class: ParityClass,
    rows: &[(usize, InfinityExpansion)],
    opts: &FormulaOptions,
) -> Result<AsymptoticFormula> {
    let orders: Vec<usize> = rows.iter().map(|(r, _)| *r).collect();
    let mut coefficients = Vec::with_capacity(opts.depth + 1);
    for i in 0..=opts.depth {
        // data: (r, c_i(r)); a bounded normalized moment has no n^+ terms,
        // so a divergent row poisons every coefficient of the class.
        let mut data = Vec::with_capacity(rows.len());
        let mut bounded = true;
        for (r, exp) in rows {
            if exp.leading_exponent < 0 && !exp.is_zero() {
                bounded = false;
                break;
            }
            match exp.coeff_at(i as i64) {
                Some(c) => data.push((*r as i64, c)),
                None => {
                    bounded = false;
                    break;
                }
            }
        }
        if !bounded {
            coefficients.push(CoeffFit {
                inv_n_power: i,
                poly: None,
                certificate: GuessCertificate::failed(),
            });
            continue;
        }
        // the true degree bound for c_i(r) is unknown; 2i+2 is a default cap,
        // clamped inside guess_poly so at least one point is held out
        let fit = guess_poly(
            &data,
            &GuessOptions {
                max_deg: opts.coeff_max_deg.unwrap_or(2 * i + 2),
                hold_out: 1,
                n0: 1,
                proven_degree_bound: None,
            },
        );
        match fit {
            Ok(f) => coefficients.push(CoeffFit {
                inv_n_power: i,
                poly: Some(f.poly),
                certificate: f.certificate,
            }),
            Err(Error::NoFit { .. }) | Err(Error::NotEnoughPoints { .. }) => {
                coefficients.push(CoeffFit {
                    inv_n_power: i,
                    poly: None,
                    certificate: GuessCertificate::failed(),
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(AsymptoticFormula {
        class,
        depth: opts.depth,
        orders_fitted: orders,
        coefficients,
    })
}

/// Bivariate certificate: a grid fit in two order variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridCertificate {
    pub fitted_degrees: (usize, usize),
    pub points_used: Vec<(i64, i64)>,
    pub held_out_matches: usize,
    pub status: CertificateStatus,
}

impl GridCertificate {
    pub fn failed() -> Self {
        GridCertificate {
            fitted_degrees: (0, 0),
            points_used: Vec::new(),
            held_out_matches: 0,
            status: CertificateStatus::Failed,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "fittedDegrees": [self.fitted_degrees.0, self.fitted_degrees.1],
            "pointsUsed": self.points_used.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
            "heldOutMatches": self.held_out_matches,
            "status": self.status.as_str(),
        })
    }
}

/// Least-total-degree exact fit of a polynomial in two variables over a full
/// rectangular grid of data, verified on every point outside the fit
/// subgrid.
pub fn guess_bipoly(
    data: &BTreeMap<(i64, i64), Rational>,
    max_deg: (usize, usize),
) -> Result<(BiPoly, GridCertificate)> {
    let mut xs: Vec<i64> = data.keys().map(|(a, _)| *a).collect();
    xs.sort_unstable();
    xs.dedup();
    let mut ys: Vec<i64> = data.keys().map(|(_, b)| *b).collect();
    ys.sort_unstable();
    ys.dedup();
    if xs.len() * ys.len() != data.len() {
        return Err(Error::Invalid("grid data is not rectangular".into()));
    }
    let d1_cap = max_deg.0.min(xs.len().saturating_sub(1));
    let d2_cap = max_deg.1.min(ys.len().saturating_sub(1));
    let mut shapes: Vec<(usize, usize)> = (0..=d1_cap)
        .flat_map(|d1| (0..=d2_cap).map(move |d2| (d1, d2)))
        .filter(|(d1, d2)| (d1 + 1) * (d2 + 1) < data.len())
        .collect();
    shapes.sort_by_key(|&(d1, d2)| (d1 + d2, d1));
    for (d1, d2) in shapes {
        let sub_x = &xs[..=d1];
        let sub_y = &ys[..=d2];
        let candidate = interpolate_grid(data, sub_x, sub_y)?;
        let mut held_out = 0usize;
        let mut ok = true;
        for ((a, b), v) in data {
            if sub_x.contains(a) && sub_y.contains(b) {
                continue;
            }
            if &candidate.eval_int(*a, *b) != v {
                ok = false;
                break;
            }
            held_out += 1;
        }
        if ok && held_out >= 1 {
            let points_used = sub_x
                .iter()
                .flat_map(|a| sub_y.iter().map(move |b| (*a, *b)))
                .collect();
            return Ok((
                candidate,
                GridCertificate {
                    fitted_degrees: (d1, d2),
                    points_used,
                    held_out_matches: held_out,
                    status: CertificateStatus::VerifiedSemiRigorous,
                },
            ));
        }
    }
    Err(Error::NoFit {
        max_deg: d1_cap.max(d2_cap),
    })
}

/// Tensor-product interpolation on a rectangular subgrid: interpolate each
/// row in the second variable, then each coefficient column in the first.
fn interpolate_grid(
    data: &BTreeMap<(i64, i64), Rational>,
    xs: &[i64],
    ys: &[i64],
) -> Result<BiPoly> {
    let mut row_polys: Vec<Poly> = Vec::with_capacity(xs.len());
    for &a in xs {
        let pts: Vec<(i64, Rational)> = ys
            .iter()
            .map(|&b| (b, data[&(a, b)].clone()))
            .collect();
        row_polys.push(interpolate_exact(&pts)?);
    }
    let max_j = row_polys
        .iter()
        .filter_map(|p| p.degree())
        .max()
        .unwrap_or(0);
    let mut coeff_polys: Vec<Poly> = Vec::with_capacity(max_j + 1);
    for j in 0..=max_j {
        let pts: Vec<(i64, Rational)> = xs
            .iter()
            .zip(&row_polys)
            .map(|(&a, p)| (a, p.coeff(j)))
            .collect();
        coeff_polys.push(interpolate_exact(&pts)?);
    }
    let max_i = coeff_polys
        .iter()
        .filter_map(|p| p.degree())
        .max()
        .unwrap_or(0);
    let mut rows = vec![vec![Rational::zero(); max_j + 1]; max_i + 1];
    for (j, p) in coeff_polys.iter().enumerate() {
        for i in 0..=max_i {
            rows[i][j] = p.coeff(i);
        }
    }
    Ok(BiPoly::new(rows))
}

/// Unique interpolant through all points (Newton form).
fn interpolate_exact(points: &[(i64, Rational)]) -> Result<Poly> {
    let mut dd: Vec<Rational> = points.iter().map(|(_, y)| y.clone()).collect();
    let mut poly = Poly::zero();
    let mut basis = Poly::one();
    for d in 0..points.len() {
        if d > 0 {
            for i in (d..points.len()).rev() {
                let dx = Rational::from(points[i].0 - points[i - d].0);
                dd[i] = (&dd[i] - &dd[i - 1]).checked_div(&dx)?;
            }
            basis = basis.mul(&Poly::new(vec![
                Rational::from(-points[d - 1].0),
                Rational::one(),
            ]));
        }
        poly = poly.add(&basis.scale(&dd[d]));
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn sample(f: impl Fn(i64) -> Rational, range: std::ops::RangeInclusive<i64>) -> Vec<(i64, Rational)> {
        range.map(|n| (n, f(n))).collect()
    }

    #[test]
    fn recovers_square() {
        let data = sample(|n| Rational::from(n * n), 1..=8);
        let fit = guess_poly(
            &data,
            &GuessOptions {
                max_deg: 3,
                hold_out: 5,
                n0: 1,
                proven_degree_bound: None,
            },
        )
        .unwrap();
        assert_eq!(fit.poly, Poly::new(vec![rat(0, 1), rat(0, 1), rat(1, 1)]));
        assert_eq!(fit.certificate.fitted_degree, 2);
        assert_eq!(fit.certificate.held_out_matches, 5);
        assert_eq!(
            fit.certificate.status,
            CertificateStatus::VerifiedSemiRigorous
        );
    }

    #[test]
    fn rejects_non_polynomial() {
        // 3 - 2/n is not a polynomial
        let data = sample(|n| rat(3, 1) - rat(2, 1).checked_div(&rat(n, 1)).unwrap(), 1..=8);
        let err = guess_poly(
            &data,
            &GuessOptions {
                max_deg: 2,
                hold_out: 5,
                n0: 1,
                proven_degree_bound: None,
            },
        );
        assert!(matches!(err, Err(Error::NoFit { .. })));
    }

    #[test]
    fn n0_drops_transients() {
        // polynomial from n = 3 onward, garbage before
        let mut data = sample(|n| Rational::from(2 * n + 1), 3..=14);
        data.push((1, rat(99, 1)));
        data.push((2, rat(-5, 1)));
        let fit = guess_poly(
            &data,
            &GuessOptions {
                max_deg: 3,
                hold_out: 5,
                n0: 3,
                proven_degree_bound: None,
            },
        )
        .unwrap();
        assert_eq!(fit.poly, Poly::new(vec![rat(1, 1), rat(2, 1)]));
    }

    #[test]
    fn proved_status_needs_bound_and_coincidences() {
        let data = sample(|n| Rational::from(3 * n * n - 2 * n), 1..=12);
        let with_bound = guess_poly(
            &data,
            &GuessOptions {
                max_deg: 4,
                hold_out: 5,
                n0: 1,
                proven_degree_bound: Some(2),
            },
        )
        .unwrap();
        assert_eq!(
            with_bound.certificate.status,
            CertificateStatus::ProvedPolynomialIdentity
        );
        let without = guess_poly(
            &data,
            &GuessOptions {
                max_deg: 4,
                hold_out: 5,
                n0: 1,
                proven_degree_bound: None,
            },
        )
        .unwrap();
        assert_eq!(
            without.certificate.status,
            CertificateStatus::VerifiedSemiRigorous
        );
    }

    #[test]
    fn not_enough_points_is_reported() {
        let data = sample(Rational::from, 1..=4);
        assert!(matches!(
            guess_poly(
                &data,
                &GuessOptions {
                    max_deg: 3,
                    hold_out: 5,
                    n0: 1,
                    proven_degree_bound: None,
                }
            ),
            Err(Error::NotEnoughPoints { need: 6, have: 4 })
        ));
    }

    #[test]
    fn determinism() {
        let data = sample(|n| Rational::from(n * n * n - 7), 1..=15);
        let opts = GuessOptions::default();
        let a = guess_poly(&data, &opts).unwrap();
        let b = guess_poly(&data, &opts).unwrap();
        assert_eq!(a.poly, b.poly);
        assert_eq!(a.certificate, b.certificate);
    }

    #[test]
    fn expansion_examples() {
        // (3n^2 - 2n)/n^2 = 3 - 2/n
        let num = Poly::new(vec![rat(0, 1), rat(-2, 1), rat(3, 1)]);
        let den = Poly::new(vec![rat(0, 1), rat(0, 1), rat(1, 1)]);
        let e = expand_at_infinity(&num, &den, 3).unwrap();
        assert_eq!(e.leading_exponent, 0);
        assert_eq!(e.coeffs[0], rat(3, 1));
        assert_eq!(e.coeffs[1], rat(-2, 1));
        assert_eq!(e.coeffs[2], rat(0, 1));

        // n/(n+1) = 1 - 1/n + 1/n^2 - ...
        let num = Poly::x();
        let den = Poly::new(vec![rat(1, 1), rat(1, 1)]);
        let e = expand_at_infinity(&num, &den, 2).unwrap();
        assert_eq!(e.leading_exponent, 0);
        assert_eq!(e.coeffs, vec![rat(1, 1), rat(-1, 1), rat(1, 1)]);

        // 1/n^2 has leading exponent 2
        let e = expand_at_infinity(
            &Poly::one(),
            &Poly::new(vec![rat(0, 1), rat(0, 1), rat(1, 1)]),
            1,
        )
        .unwrap();
        assert_eq!(e.leading_exponent, 2);
        assert_eq!(e.coeffs[0], rat(1, 1));
        assert_eq!(e.limit(), ExpansionLimit::Zero);
    }

    #[test]
    fn expansion_remainder_has_the_right_order() {
        // exact remainder check: f - E_K = O(n^-(K+1)) as a rational function
        let num = Poly::new(vec![rat(5, 1), rat(-2, 1), rat(3, 1)]); // 3n^2-2n+5
        let den = Poly::new(vec![rat(1, 1), rat(4, 1), rat(0, 1), rat(2, 1)]); // 2n^3+4n+1
        for depth in 0..5usize {
            let e = expand_at_infinity(&num, &den, depth).unwrap();
            // E = P(n)/n^m with m = leading + depth
            let m = (e.leading_exponent + depth as i64).max(0) as usize;
            let mut p = Poly::zero();
            for (j, c) in e.coeffs.iter().enumerate() {
                let power = m as i64 - e.leading_exponent - j as i64;
                assert!(power >= 0);
                let mut mono = vec![Rational::zero(); power as usize + 1];
                mono[power as usize] = c.clone();
                p = p.add(&Poly::new(mono));
            }
            let mut n_pow_m = vec![Rational::zero(); m + 1];
            n_pow_m[m] = Rational::one();
            let n_pow_m = Poly::new(n_pow_m);
            // rem = (num * n^m - p * den) / (den * n^m)
            let rem_num = num.mul(&n_pow_m).sub(&p.mul(&den));
            let rem_den = den.mul(&n_pow_m);
            if rem_num.is_zero() {
                continue;
            }
            let deg_diff = rem_num.degree().unwrap() as i64 - rem_den.degree().unwrap() as i64;
            assert!(
                deg_diff <= -(e.leading_exponent + depth as i64 + 1),
                "depth={depth}: remainder degree {deg_diff}"
            );
        }
    }

    #[test]
    fn eval_at_matches_partial_sum() {
        let e = InfinityExpansion {
            leading_exponent: -1,
            coeffs: vec![rat(2, 1), rat(3, 1), rat(-1, 2)],
        };
        // 2n + 3 - 1/(2n) at n = 4: 8 + 3 - 1/8
        assert_eq!(e.eval_at(4).unwrap(), rat(87, 8));
    }

    #[test]
    fn bipoly_grid_fit() {
        // hidden: 1 + r1*r2 - 2*r2^2
        let hidden = |a: i64, b: i64| Rational::from(1 + a * b - 2 * b * b);
        let mut data = BTreeMap::new();
        for a in 1..=5i64 {
            for b in 1..=5i64 {
                data.insert((a, b), hidden(a, b));
            }
        }
        let (fit, cert) = guess_bipoly(&data, (3, 3)).unwrap();
        assert_eq!(fit.coeff(0, 0), rat(1, 1));
        assert_eq!(fit.coeff(1, 1), rat(1, 1));
        assert_eq!(fit.coeff(0, 2), rat(-2, 1));
        assert_eq!(cert.status, CertificateStatus::VerifiedSemiRigorous);
        assert!(cert.held_out_matches >= 1);
    }

    #[test]
    fn fair_coin_moments_produce_unit_leading_constant() {
        // m_2 = n, m_4 = 3n^2 - 2n, m_6 = 15n^3 - 30n^2 + 16n,
        // m_8 = 105n^4 - 420n^3 + 588n^2 - 272n (iid +-1 sums)
        let mut moments = MomentPolynomials::default();
        moments.by_order.insert(2, Poly::x());
        moments
            .by_order
            .insert(4, Poly::new(vec![rat(0, 1), rat(-2, 1), rat(3, 1)]));
        moments.by_order.insert(
            6,
            Poly::new(vec![rat(0, 1), rat(16, 1), rat(-30, 1), rat(15, 1)]),
        );
        moments.by_order.insert(
            8,
            Poly::new(vec![
                rat(0, 1),
                rat(-272, 1),
                rat(588, 1),
                rat(-420, 1),
                rat(105, 1),
            ]),
        );
        for r in 1..=4usize {
            moments.by_order.insert(2 * r + 1, Poly::zero());
        }
        let tables = CombinatoricsTables::new(8);
        let (even, odd) = guess_in_n_and_r(
            &moments,
            &FormulaOptions {
                depth: 2,
                r_max: 4,
                coeff_max_deg: None,
            },
            &tables,
        )
        .unwrap();
        // c_0(r) = 1
        let c0 = even.coefficient(0).unwrap().poly.as_ref().unwrap();
        assert_eq!(c0, &Poly::one());
        // c_1(2) = -2/3 (alpha_4 = 3(1 - (2/3)/n))
        let c1 = even.coefficient(1).unwrap().poly.as_ref().unwrap();
        assert_eq!(c1.eval_int(2), rat(-2, 3));
        // symmetric family: odd class identically zero
        for cf in &odd.coefficients {
            assert_eq!(cf.poly.as_ref().unwrap(), &Poly::zero());
        }
        let rendered = even.render();
        assert!(rendered.starts_with("alpha[2r](n) = (2r-1)!!"));
    }
}
