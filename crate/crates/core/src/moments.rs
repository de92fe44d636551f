//! Moment conversions and per-`n` moment tables.
//!
//! The chain is factorial -> raw -> central -> normalized, all exact:
//!
//! * raw from factorial through Stirling numbers of the second kind,
//!   `E[X^r] = sum_j S(r,j) E[X^(j)]`;
//! * central from raw by binomial recentering,
//!   `m_r = sum_i C(r,i) raw_i (-mu)^(r-i)`;
//! * normalized even moments `alpha_{2r} = m_{2r}/m_2^r` stay rational; odd
//!   moments are stored through the rational surrogate
//!   `beta_{2r+1} = m_{2r+1}/m_2^r`, with `alpha_{2r+1} = beta_{2r+1}/sqrt(m_2)`
//!   reattached symbolically in rendered output so the guessing layer never
//!   leaves the rationals.
//!
//! Bivariate tables use the two-variable versions of the same conversions and
//! carry mixed central moments `m_{i,j}` plus exact covariance/correlation.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expand::FactorialMomentVector;
use crate::rational::Rational;
use crate::series::TruncatedSeries;
use crate::tables::CombinatoricsTables;

/// `E[X^r] = sum_j S(r,j) F[j]`; exact raw moments through the input order.
pub fn raw_from_factorial(f: &[Rational], tables: &CombinatoricsTables) -> Vec<Rational> {
    let order = f.len() - 1;
    assert!(tables.max_r() >= order, "tables too small");
    (0..=order)
        .map(|r| {
            let mut acc = Rational::zero();
            for (j, fj) in f.iter().enumerate().take(r + 1) {
                acc += Rational::from(tables.stirling2(r, j)) * fj;
            }
            acc
        })
        .collect()
}

/// `m_r = sum_i C(r,i) raw_i (-mu)^(r-i)` with `mu = raw[1]`.
pub fn central_from_raw(raw: &[Rational], tables: &CombinatoricsTables) -> Vec<Rational> {
    let order = raw.len() - 1;
    assert!(tables.max_r() >= order, "tables too small");
    let mu = raw.get(1).cloned().unwrap_or_default();
    (0..=order)
        .map(|r| {
            let mut acc = Rational::zero();
            for (i, rawi) in raw.iter().enumerate().take(r + 1) {
                let sign_pow = (-&mu).pow((r - i) as u32);
                acc += Rational::from(tables.binomial(r, i)) * rawi * sign_pow;
            }
            acc
        })
        .collect()
}

/// Exact normalized moments of a central vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedMoments {
    /// `alpha_{2r} = m_{2r}/m_2^r` for `2r` within the order, starting r = 1.
    pub alpha_even: Vec<Rational>,
    /// `beta_{2r+1} = m_{2r+1}/m_2^r`, starting r = 1 (so the first entry is
    /// the reduced third moment).
    pub beta_odd: Vec<Rational>,
}

impl NormalizedMoments {
    pub fn alpha(&self, two_r: usize) -> Option<&Rational> {
        if !two_r.is_multiple_of(2) || two_r < 2 {
            return None;
        }
        self.alpha_even.get(two_r / 2 - 1)
    }

    pub fn beta(&self, odd_order: usize) -> Option<&Rational> {
        if odd_order.is_multiple_of(2) || odd_order < 3 {
            return None;
        }
        self.beta_odd.get((odd_order - 3) / 2)
    }
}

/// Normalizes a central moment vector; errors when the variance vanishes.
pub fn normalize(central: &[Rational]) -> Result<NormalizedMoments> {
    let m2 = central.get(2).cloned().unwrap_or_default();
    if m2.is_zero() {
        return Err(Error::DegenerateVariance);
    }
    let order = central.len() - 1;
    let mut alpha_even = Vec::new();
    let mut beta_odd = Vec::new();
    let mut m2_pow = Rational::one();
    for r in 1..=order / 2 {
        m2_pow *= &m2;
        alpha_even.push(central[2 * r].checked_div(&m2_pow)?);
        if 2 * r < order {
            beta_odd.push(central[2 * r + 1].checked_div(&m2_pow)?);
        }
    }
    Ok(NormalizedMoments {
        alpha_even,
        beta_odd,
    })
}

/// Per-`n` exact univariate moment table.
#[derive(Clone, Debug)]
pub struct MomentTable {
    pub n: usize,
    pub mean: Rational,
    /// `central[r] = m_r`; `central[0] = 1`, `central[1] = 0`.
    pub central: Vec<Rational>,
    pub normalized: Option<NormalizedMoments>,
}

impl MomentTable {
    pub fn from_factorial(fm: &FactorialMomentVector<1>, tables: &CombinatoricsTables) -> Self {
        let order = fm.caps()[0];
        let f: Vec<Rational> = (0..=order).map(|j| fm.moment([j])).collect();
        let raw = raw_from_factorial(&f, tables);
        Self::from_raw(fm.n, &raw, tables)
    }

    pub fn from_raw(n: usize, raw: &[Rational], tables: &CombinatoricsTables) -> Self {
        let central = central_from_raw(raw, tables);
        let normalized = normalize(&central).ok();
        MomentTable {
            n,
            mean: raw.get(1).cloned().unwrap_or_default(),
            central,
            normalized,
        }
    }

    pub fn variance(&self) -> Rational {
        self.central.get(2).cloned().unwrap_or_default()
    }

    /// Numeric odd normalized moment `alpha_{2r+1} = beta_{2r+1}/sqrt(m_2)`.
    pub fn alpha_odd_numeric(&self, two_r_plus_1: usize) -> Option<f64> {
        let norm = self.normalized.as_ref()?;
        let beta = norm.beta(two_r_plus_1)?;
        Some(beta.to_f64() / self.variance().to_f64().sqrt())
    }

    pub fn to_json(&self) -> Value {
        let norm_even: Vec<String> = self
            .normalized
            .iter()
            .flat_map(|nm| nm.alpha_even.iter().map(|r| r.to_string()))
            .collect();
        let norm_odd: Vec<String> = self
            .normalized
            .iter()
            .flat_map(|nm| nm.beta_odd.iter().map(|r| r.to_string()))
            .collect();
        json!({
            "n": self.n,
            "mean": self.mean.to_string(),
            "central": self.central.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "alphaEven": norm_even,
            "betaOdd": norm_odd,
        })
    }
}

/// Per-`n` exact bivariate moment table with mixed central moments.
#[derive(Clone, Debug)]
pub struct MomentTable2 {
    pub n: usize,
    pub mean: (Rational, Rational),
    /// `mixed_central.get([i, j]) = m_{i,j} = E[(X-muX)^i (Y-muY)^j]`.
    pub mixed_central: TruncatedSeries<2>,
}

impl MomentTable2 {
    /// Converts a bivariate factorial grid to mixed raw and central moments
    /// for all orders `i, j <= cap`. The factorial grid must be at least that
    /// large in both coordinates.
    pub fn from_factorial(
        fm: &FactorialMomentVector<2>,
        cap: usize,
        tables: &CombinatoricsTables,
    ) -> Result<Self> {
        let caps = fm.caps();
        if caps[0] < cap || caps[1] < cap {
            return Err(Error::OrderTooLow {
                have: caps[0].min(caps[1]),
                need: cap,
            });
        }
        // two-variable Stirling conversion
        let mut raw = TruncatedSeries::zero([cap, cap]);
        for a in 0..=cap {
            for b in 0..=cap {
                let mut acc = Rational::zero();
                for i in 0..=a {
                    for j in 0..=b {
                        let s = Rational::from(tables.stirling2(a, i))
                            * Rational::from(tables.stirling2(b, j));
                        if s.is_zero() {
                            continue;
                        }
                        acc += s * fm.moment([i, j]);
                    }
                }
                raw.set([a, b], acc);
            }
        }
        let mu_x = raw.get([1, 0]);
        let mu_y = raw.get([0, 1]);
        // two-variable binomial recentering
        let mut central = TruncatedSeries::zero([cap, cap]);
        for a in 0..=cap {
            for b in 0..=cap {
                let mut acc = Rational::zero();
                for i in 0..=a {
                    for j in 0..=b {
                        let c = Rational::from(tables.binomial(a, i))
                            * Rational::from(tables.binomial(b, j))
                            * (-&mu_x).pow((a - i) as u32)
                            * (-&mu_y).pow((b - j) as u32);
                        acc += c * raw.get([i, j]);
                    }
                }
                central.set([a, b], acc);
            }
        }
        Ok(MomentTable2 {
            n: fm.n,
            mean: (mu_x, mu_y),
            mixed_central: central,
        })
    }

    pub fn cap(&self) -> usize {
        self.mixed_central.caps()[0]
    }

    pub fn central(&self, i: usize, j: usize) -> Rational {
        self.mixed_central.get([i, j])
    }

    pub fn covariance(&self) -> Rational {
        self.central(1, 1)
    }

    pub fn variance_x(&self) -> Rational {
        self.central(2, 0)
    }

    pub fn variance_y(&self) -> Rational {
        self.central(0, 2)
    }

    pub fn to_json(&self) -> Value {
        let cap = self.cap();
        let mut mixed = Vec::new();
        for i in 0..=cap {
            for j in 0..=cap {
                mixed.push(json!([i, j, self.central(i, j).to_string()]));
            }
        }
        json!({
            "n": self.n,
            "meanX": self.mean.0.to_string(),
            "meanY": self.mean.1.to_string(),
            "mixedCentral": mixed,
        })
    }
}

/// Exact correlation data for one `n`. The square root is never taken
/// exactly: the signed squared correlation `sign(cov) * cov^2/(varX varY)`
/// is exact and the plain correlation is reported as a float.
#[derive(Clone, Debug)]
pub struct CorrelationValue {
    pub n: usize,
    pub covariance: Rational,
    pub correlation_squared_signed: Rational,
    pub correlation_numeric: f64,
}

pub fn correlation_at(table: &MomentTable2) -> Result<CorrelationValue> {
    let var_x = table.variance_x();
    let var_y = table.variance_y();
    if var_x.is_zero() || var_y.is_zero() {
        return Err(Error::DegenerateVariance);
    }
    let cov = table.covariance();
    let squared = (&cov * &cov).checked_div(&(&var_x * &var_y))?;
    let signed = if cov.is_negative() { -&squared } else { squared.clone() };
    let numeric = (cov.signum() as f64) * squared.to_f64().sqrt();
    Ok(CorrelationValue {
        n: table.n,
        covariance: cov,
        correlation_squared_signed: signed,
        correlation_numeric: numeric.clamp(-1.0, 1.0),
    })
}
