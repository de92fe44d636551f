//! Orchestration: moment-polynomial fitting, normality verdicts, asymptotic
//! formulas in `n` and the moment order, bivariate gates, and histogram
//! export.
//!
//! Every "limit" here is the leading term of an exact Laurent expansion of
//! fitted rational functions; no floating-point limit is taken anywhere. A
//! verdict of `inconclusive` means some fit failed — absence of a polynomial
//! fit is not evidence of non-normality.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::ansatz::{
    self, AsymptoticFormula, CertificateStatus, ExpansionLimit, FormulaOptions, GridCertificate,
    GuessOptions, MomentPolynomials, ParityClass, PolyFit,
};
use crate::error::{Error, Result};
use crate::expand::Distribution;
use crate::family::{Family, FamilyPair};
use crate::moments::{MomentTable, MomentTable2};
use crate::poly::{BiPoly, Poly};
use crate::rational::Rational;
use crate::tables::CombinatoricsTables;

/// Shared knobs for the analysis entry points.
#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    /// Even moments are checked through order `2*r_max`.
    pub r_max: usize,
    /// Number of `1/n` correction terms in asymptotic formulas.
    pub depth: usize,
    /// Held-out points demanded by every polynomial fit.
    pub hold_out: usize,
    /// First `n` trusted to be past boundary transients; `None` asks the
    /// family for its default.
    pub n0: Option<usize>,
    /// Length of the fitting window beyond `n0` (held-out points add to it).
    pub probe_window: usize,
    /// Degree cap for stage-2 coefficient fits (default `2i+2` per power).
    pub coeff_max_deg: Option<usize>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            r_max: 4,
            depth: 3,
            hold_out: 5,
            n0: None,
            probe_window: 40,
            coeff_max_deg: None,
        }
    }
}

impl AnalysisOptions {
    fn probe_range(&self, default_n0: usize) -> std::ops::RangeInclusive<usize> {
        let n0 = self.n0.unwrap_or(default_n0).max(1);
        n0..=n0 + self.probe_window + self.hold_out
    }

    fn moment_order(&self) -> usize {
        2 * self.r_max + 1
    }
}

/// A fitted per-order moment polynomial. Word statistics are eventually
/// polynomial in `n`; some walk statistics are only quasi-polynomial with
/// period 2, in which case the even-`n` and odd-`n` subsequences get separate
/// polynomials.
#[derive(Clone, Debug)]
pub enum FittedMoment {
    Uniform(PolyFit),
    ParitySplit { even: PolyFit, odd: PolyFit },
    Failed,
}

impl FittedMoment {
    /// The even-n and odd-n branch polynomials; a uniform fit supplies the
    /// same polynomial for both.
    fn branch_pair(&self) -> Option<[&Poly; 2]> {
        match self {
            FittedMoment::Uniform(f) => Some([&f.poly, &f.poly]),
            FittedMoment::ParitySplit { even, odd } => Some([&even.poly, &odd.poly]),
            FittedMoment::Failed => None,
        }
    }

    /// The representative polynomial used for formula work (even branch when
    /// split; formulas are then flagged as parity-restricted).
    pub fn primary_poly(&self) -> Option<&Poly> {
        match self {
            FittedMoment::Uniform(f) => Some(&f.poly),
            FittedMoment::ParitySplit { even, .. } => Some(&even.poly),
            FittedMoment::Failed => None,
        }
    }

    pub fn is_split(&self) -> bool {
        matches!(self, FittedMoment::ParitySplit { .. })
    }

    pub fn certificates(&self) -> Vec<&ansatz::GuessCertificate> {
        match self {
            FittedMoment::Uniform(f) => vec![&f.certificate],
            FittedMoment::ParitySplit { even, odd } => {
                vec![&even.certificate, &odd.certificate]
            }
            FittedMoment::Failed => Vec::new(),
        }
    }

    fn to_json(&self, label: &str) -> Value {
        match self {
            FittedMoment::Uniform(f) => json!({
                "target": label,
                "poly": f.poly.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "rendered": f.poly.render("n"),
                "certificate": f.certificate.to_json(),
            }),
            FittedMoment::ParitySplit { even, odd } => json!({
                "target": label,
                "parityRestricted": true,
                "evenPoly": even.poly.render("n"),
                "oddPoly": odd.poly.render("n"),
                "certificates": [even.certificate.to_json(), odd.certificate.to_json()],
            }),
            FittedMoment::Failed => json!({ "target": label, "status": "failed" }),
        }
    }
}

/// Mean and central moment polynomials fitted from exact per-`n` data.
#[derive(Clone, Debug)]
pub struct FamilyMomentFits {
    pub family: String,
    pub mean: FittedMoment,
    /// `central[j] = m_j(n)` for `j = 2..=order`.
    pub central: BTreeMap<usize, FittedMoment>,
    pub n0: usize,
}

fn fit_sequence(data: &[(i64, Rational)], max_deg: usize, opts: &AnalysisOptions) -> FittedMoment {
    let guess = |points: &[(i64, Rational)]| -> Result<PolyFit> {
        ansatz::guess_poly(
            points,
            &GuessOptions {
                max_deg,
                hold_out: opts.hold_out,
                n0: i64::MIN,
                proven_degree_bound: None,
            },
        )
    };
    match guess(data) {
        Ok(fit) => FittedMoment::Uniform(fit),
        Err(Error::NoFit { .. }) => {
            let even: Vec<_> = data.iter().filter(|(n, _)| n % 2 == 0).cloned().collect();
            let odd: Vec<_> = data.iter().filter(|(n, _)| n % 2 == 1).cloned().collect();
            match (guess(&even), guess(&odd)) {
                (Ok(e), Ok(o)) => FittedMoment::ParitySplit { even: e, odd: o },
                _ => FittedMoment::Failed,
            }
        }
        Err(_) => FittedMoment::Failed,
    }
}

/// Tabulates exact moments over the probe window and fits polynomials in `n`
/// for the mean and every central moment up to `2*r_max + 1`.
pub fn fit_family_moments(
    family: &Family,
    opts: &AnalysisOptions,
    tables: &CombinatoricsTables,
) -> Result<FamilyMomentFits> {
    let order = opts.moment_order();
    let range = opts.probe_range(family.default_n0());
    let vectors = family.factorial_moments(range, order, tables)?;
    let mut mean_data = Vec::with_capacity(vectors.len());
    let mut central_data: BTreeMap<usize, Vec<(i64, Rational)>> = BTreeMap::new();
    for fm in &vectors {
        let table = MomentTable::from_factorial(fm, tables);
        mean_data.push((fm.n as i64, table.mean.clone()));
        for j in 2..=order {
            central_data
                .entry(j)
                .or_default()
                .push((fm.n as i64, table.central[j].clone()));
        }
    }
    let mean = fit_sequence(&mean_data, 3, opts);
    let central = central_data
        .iter()
        .map(|(j, data)| (*j, fit_sequence(data, j + 2, opts)))
        .collect();
    Ok(FamilyMomentFits {
        family: family.name(),
        mean,
        central,
        n0: *opts.probe_range(family.default_n0()).start(),
    })
}

/// Symbolic mean and variance with fit certificates; errors when either
/// sequence admits no polynomial (or parity-split polynomial) description.
pub fn mean_variance(
    family: &Family,
    opts: &AnalysisOptions,
    tables: &CombinatoricsTables,
) -> Result<(FittedMoment, FittedMoment)> {
    let fits = fit_family_moments(family, opts, tables)?;
    let variance = fits
        .central
        .get(&2)
        .cloned()
        .unwrap_or(FittedMoment::Failed);
    if matches!(fits.mean, FittedMoment::Failed) || matches!(variance, FittedMoment::Failed) {
        return Err(Error::NoFit {
            max_deg: opts.moment_order() + 2,
        });
    }
    Ok((fits.mean, variance))
}

/// Exact limit of one even normalized moment along one branch.
fn even_branch_limit(m2r: &Poly, m2: &Poly, r: usize) -> Result<ExpansionLimit> {
    let den = m2.pow(r as u32);
    Ok(ansatz::expand_at_infinity(m2r, &den, 0)?.limit())
}

/// Exact verdict on `alpha_{2r+1} -> 0`, decided through the square
/// `alpha^2 = m_{2r+1}^2 / m_2^(2r+1)` so everything stays rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OddLimit {
    Zero,
    /// Nonzero finite limit: sign and the exact limit of `alpha^2`.
    NonZero { sign: i32, squared: Rational },
    Divergent,
}

fn odd_branch_limit(m_odd: &Poly, m2: &Poly, r: usize) -> Result<OddLimit> {
    if m_odd.is_zero() {
        return Ok(OddLimit::Zero);
    }
    let num = m_odd.mul(m_odd);
    let den = m2.pow((2 * r + 1) as u32);
    match ansatz::expand_at_infinity(&num, &den, 0)?.limit() {
        ExpansionLimit::Zero => Ok(OddLimit::Zero),
        ExpansionLimit::Finite(sq) => Ok(OddLimit::NonZero {
            sign: m_odd.leading_coeff().map_or(0, Rational::signum),
            squared: sq,
        }),
        ExpansionLimit::Divergent { .. } => Ok(OddLimit::Divergent),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Normal,
    NotNormal,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Normal => "normal",
            Verdict::NotNormal => "not-normal",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Per-order evidence and the overall normality verdict.
#[derive(Clone, Debug)]
pub struct NormalityVerdict {
    pub family: String,
    /// `(r, limit of alpha_{2r})`; `None` when the fits failed, and branches
    /// of a parity split must agree to produce a limit.
    pub even_limits: Vec<(usize, Option<ExpansionLimit>)>,
    pub odd_limits: Vec<(usize, Option<OddLimit>)>,
    pub verdict: Verdict,
}

impl NormalityVerdict {
    pub fn even_limit(&self, r: usize) -> Option<&ExpansionLimit> {
        self.even_limits
            .iter()
            .find(|(rr, _)| *rr == r)
            .and_then(|(_, l)| l.as_ref())
    }
}

/// Compares the exact leading constants of every normalized moment against
/// the normal values `(2r-1)!!` and `0`.
pub fn normality_verdict(
    fits: &FamilyMomentFits,
    r_max: usize,
    tables: &CombinatoricsTables,
) -> Result<NormalityVerdict> {
    let variance = fits.central.get(&2).cloned().unwrap_or(FittedMoment::Failed);
    let var_branches = variance.branch_pair();
    let mut even_limits = Vec::new();
    let mut odd_limits = Vec::new();
    let mut any_failure = false;
    let mut any_contradiction = false;
    for r in 1..=r_max {
        // even side
        let even_limit = match (fits.central.get(&(2 * r)), &var_branches) {
            (Some(m), Some(vars)) => match m.branch_pair() {
                Some(branches) => {
                    let mut limits = Vec::new();
                    for (b, v) in branches.iter().zip(vars.iter()) {
                        limits.push(even_branch_limit(b, v, r)?);
                    }
                    if limits[0] == limits[1] {
                        Some(limits.remove(0))
                    } else {
                        // branch limits disagree: definitely not normal
                        any_contradiction = true;
                        None
                    }
                }
                None => None,
            },
            _ => None,
        };
        match &even_limit {
            Some(ExpansionLimit::Finite(c)) => {
                if c != &tables.double_factorial_rational(r) {
                    any_contradiction = true;
                }
            }
            Some(_) => any_contradiction = true,
            None => any_failure = true,
        }
        even_limits.push((r, even_limit));
        // odd side
        let odd_limit = match (fits.central.get(&(2 * r + 1)), &var_branches) {
            (Some(m), Some(vars)) => match m.branch_pair() {
                Some(branches) => {
                    let mut limits = Vec::new();
                    for (b, v) in branches.iter().zip(vars.iter()) {
                        limits.push(odd_branch_limit(b, v, r)?);
                    }
                    if limits[0] == limits[1] {
                        Some(limits.remove(0))
                    } else {
                        any_contradiction = true;
                        None
                    }
                }
                None => None,
            },
            _ => None,
        };
        match &odd_limit {
            Some(OddLimit::Zero) => {}
            Some(_) => any_contradiction = true,
            None => any_failure = true,
        }
        odd_limits.push((r, odd_limit));
    }
    let verdict = if any_contradiction {
        Verdict::NotNormal
    } else if any_failure {
        Verdict::Inconclusive
    } else {
        Verdict::Normal
    };
    Ok(NormalityVerdict {
        family: fits.family.clone(),
        even_limits,
        odd_limits,
        verdict,
    })
}

/// Full univariate analysis: fits, verdict, and the two-stage asymptotic
/// formulas in `n` and `r`.
#[derive(Debug)]
pub struct AnalysisReport {
    pub fits: FamilyMomentFits,
    pub verdict: NormalityVerdict,
    pub even_formula: AsymptoticFormula,
    pub odd_formula: AsymptoticFormula,
    /// True when formulas were computed from parity-restricted (even-`n`)
    /// moment polynomials.
    pub parity_restricted: bool,
}

pub fn analyse_moms(
    family: &Family,
    opts: &AnalysisOptions,
    tables: &CombinatoricsTables,
) -> Result<AnalysisReport> {
    let fits = fit_family_moments(family, opts, tables)?;
    let verdict = normality_verdict(&fits, opts.r_max, tables)?;
    let mut moment_polys = MomentPolynomials::default();
    let mut parity_restricted = false;
    for (j, fit) in &fits.central {
        if fit.is_split() {
            parity_restricted = true;
        }
        if let Some(p) = fit.primary_poly() {
            moment_polys.by_order.insert(*j, p.clone());
        }
    }
    let (even_formula, odd_formula) = ansatz::guess_in_n_and_r(
        &moment_polys,
        &FormulaOptions {
            depth: opts.depth,
            r_max: opts.r_max,
            coeff_max_deg: opts.coeff_max_deg,
        },
        tables,
    )?;
    Ok(AnalysisReport {
        fits,
        verdict,
        even_formula,
        odd_formula,
        parity_restricted,
    })
}

impl AnalysisReport {
    pub fn to_json(&self) -> Value {
        let even_limits: Vec<Value> = self
            .verdict
            .even_limits
            .iter()
            .map(|(r, l)| {
                json!({
                    "r": r,
                    "limit": limit_json(l),
                })
            })
            .collect();
        let odd_limits: Vec<Value> = self
            .verdict
            .odd_limits
            .iter()
            .map(|(r, l)| {
                json!({
                    "r": r,
                    "limit": odd_limit_json(l),
                })
            })
            .collect();
        let mut certificates = Vec::new();
        certificates.push(self.fits.mean.to_json("mean(n)"));
        for (j, fit) in &self.fits.central {
            certificates.push(fit.to_json(&format!("m_{j}(n)")));
        }
        json!({
            "family": self.fits.family,
            "verdict": self.verdict.verdict.as_str(),
            "evenLimits": even_limits,
            "oddLimits": odd_limits,
            "parityRestrictedFormulas": self.parity_restricted,
            "formulas": {
                "even": self.even_formula.to_json(),
                "odd": self.odd_formula.to_json(),
            },
            "certificates": certificates,
        })
    }
}

fn limit_json(l: &Option<ExpansionLimit>) -> Value {
    match l {
        None => json!("unfitted"),
        Some(ExpansionLimit::Zero) => json!("0"),
        Some(ExpansionLimit::Finite(c)) => json!(c.to_string()),
        Some(ExpansionLimit::Divergent { sign }) => {
            json!(if *sign < 0 { "-infinity" } else { "infinity" })
        }
    }
}

fn odd_limit_json(l: &Option<OddLimit>) -> Value {
    match l {
        None => json!("unfitted"),
        Some(OddLimit::Zero) => json!("0"),
        Some(OddLimit::NonZero { sign, squared }) => json!(format!(
            "{}sqrt({})",
            if *sign < 0 { "-" } else { "" },
            squared
        )),
        Some(OddLimit::Divergent) => json!("divergent"),
    }
}

// ---------------------------------------------------------------------------
// bivariate analysis
// ---------------------------------------------------------------------------

/// Mixed central moment polynomials `m_{i,j}(n)` fitted over the probe range.
#[derive(Debug)]
pub struct PairMomentFits {
    pub family: String,
    pub mixed: BTreeMap<(usize, usize), FittedMoment>,
    pub means: (FittedMoment, FittedMoment),
}

pub fn fit_pair_moments(
    pair: &FamilyPair,
    opts: &AnalysisOptions,
    tables: &CombinatoricsTables,
) -> Result<PairMomentFits> {
    let order = opts.moment_order();
    let range = opts.probe_range(pair.default_n0());
    let vectors = pair.factorial_moments(range, [order, order])?;
    let mut mean_x = Vec::new();
    let mut mean_y = Vec::new();
    let mut mixed_data: BTreeMap<(usize, usize), Vec<(i64, Rational)>> = BTreeMap::new();
    for fm in &vectors {
        let table = MomentTable2::from_factorial(fm, order, tables)?;
        mean_x.push((fm.n as i64, table.mean.0.clone()));
        mean_y.push((fm.n as i64, table.mean.1.clone()));
        for i in 0..=order {
            for j in 0..=order {
                mixed_data
                    .entry((i, j))
                    .or_default()
                    .push((fm.n as i64, table.central(i, j)));
            }
        }
    }
    let mixed = mixed_data
        .iter()
        .map(|(key, data)| (*key, fit_sequence(data, key.0 + key.1 + 2, opts)))
        .collect();
    Ok(PairMomentFits {
        family: pair.name.clone(),
        mixed,
        means: (
            fit_sequence(&mean_x, 3, opts),
            fit_sequence(&mean_y, 3, opts),
        ),
    })
}

impl PairMomentFits {
    fn poly(&self, i: usize, j: usize) -> Option<&Poly> {
        self.mixed.get(&(i, j)).and_then(FittedMoment::primary_poly)
    }

    /// Marginal central moments of one coordinate, as univariate fits.
    fn marginal(&self, axis: usize, order: usize) -> FamilyMomentFits {
        let central = (2..=order)
            .filter_map(|j| {
                let key = if axis == 0 { (j, 0) } else { (0, j) };
                self.mixed.get(&key).map(|f| (j, f.clone()))
            })
            .collect();
        FamilyMomentFits {
            family: format!("{} (marginal {})", self.family, axis + 1),
            mean: if axis == 0 {
                self.means.0.clone()
            } else {
                self.means.1.clone()
            },
            central,
            n0: 1,
        }
    }
}

/// Exact asymptotic correlation evidence: the limit of the signed squared
/// correlation `sign(cov) * cov^2/(varX varY)` as the leading term of its
/// Laurent expansion.
#[derive(Debug)]
pub struct CorrelationLimit {
    pub limit_squared: ExpansionLimit,
    pub sign: i32,
}

pub fn correlation_limit(fits: &PairMomentFits) -> Result<CorrelationLimit> {
    let cov = fits
        .poly(1, 1)
        .ok_or(Error::NoFit { max_deg: 4 })?
        .clone();
    let var_x = fits.poly(2, 0).ok_or(Error::NoFit { max_deg: 4 })?;
    let var_y = fits.poly(0, 2).ok_or(Error::NoFit { max_deg: 4 })?;
    if var_x.is_zero() || var_y.is_zero() {
        return Err(Error::DegenerateVariance);
    }
    let num = cov.mul(&cov);
    let den = var_x.mul(var_y);
    Ok(CorrelationLimit {
        limit_squared: ansatz::expand_at_infinity(&num, &den, 0)?.limit(),
        sign: cov.leading_coeff().map_or(0, Rational::signum),
    })
}

/// One mixed parity-class formula: coefficients are polynomials in both
/// order variables.
#[derive(Debug)]
pub struct AsymptoticFormula2 {
    pub class: (ParityClass, ParityClass),
    pub depth: usize,
    pub coefficients: Vec<(usize, Option<BiPoly>, GridCertificate)>,
}

impl AsymptoticFormula2 {
    pub fn class_label(&self) -> String {
        format!("{}-{}", self.class.0.as_str(), self.class.1.as_str())
    }

    pub fn leading(&self) -> Option<&BiPoly> {
        self.coefficients
            .first()
            .and_then(|(_, p, _)| p.as_ref())
    }

    pub fn render(&self) -> String {
        let pre = "(2r1-1)!!*(2r2-1)!!";
        let lhs = match self.class {
            (ParityClass::Even, ParityClass::Even) => {
                format!("alpha[2r1,2r2](n) = {pre} * (")
            }
            (ParityClass::Odd, ParityClass::Even) => {
                format!("alpha[2r1+1,2r2](n) = {pre} * m20(n)^(-1/2) * (")
            }
            (ParityClass::Even, ParityClass::Odd) => {
                format!("alpha[2r1,2r2+1](n) = {pre} * m02(n)^(-1/2) * (")
            }
            (ParityClass::Odd, ParityClass::Odd) => {
                format!("alpha[2r1+1,2r2+1](n) = {pre} * (m20(n)*m02(n))^(-1/2) * (")
            }
        };
        let mut parts = Vec::new();
        for (i, poly, _) in &self.coefficients {
            let body = match poly {
                Some(p) if p.is_zero() => continue,
                Some(p) => format!("({})", p.render("r1", "r2")),
                None => "<no-fit>".to_string(),
            };
            parts.push(match i {
                0 => body,
                1 => format!("{body}/n"),
                k => format!("{body}/n^{k}"),
            });
        }
        if parts.is_empty() {
            parts.push("0".to_string());
        }
        format!("{lhs}{} + O(1/n^{}))", parts.join(" + "), self.depth + 1)
    }

    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .coefficients
            .iter()
            .map(|(i, poly, cert)| {
                json!({
                    "power": i,
                    "poly": poly.as_ref().map(|p| {
                        p.rows()
                            .iter()
                            .map(|row| row.iter().map(|c| c.to_string()).collect::<Vec<_>>())
                            .collect::<Vec<_>>()
                    }),
                    "certificate": cert.to_json(),
                })
            })
            .collect();
        json!({
            "parityClass": self.class_label(),
            "depth": self.depth,
            "coefficients": coeffs,
            "rendered": self.render(),
        })
    }
}

/// Bivariate analysis report: gate evidence plus the four parity-class
/// formulas.
#[derive(Debug)]
pub struct PairReport {
    pub fits: PairMomentFits,
    pub marginal_verdicts: (NormalityVerdict, NormalityVerdict),
    pub correlation: CorrelationLimit,
    pub formulas: Vec<AsymptoticFormula2>,
}

/// The `AnalyseMoms2` analogue. Requires the pair to be asymptotically
/// independently normal: exact correlation limit zero and both marginals
/// normal; otherwise fails with `NotIndependentlyNormal`.
pub fn analyse_moms2(
    pair: &FamilyPair,
    opts: &AnalysisOptions,
    tables: &CombinatoricsTables,
) -> Result<PairReport> {
    let fits = fit_pair_moments(pair, opts, tables)?;
    let correlation = correlation_limit(&fits)?;
    let order = opts.moment_order();
    let marginal_x = normality_verdict(&fits.marginal(0, order), opts.r_max, tables)?;
    let marginal_y = normality_verdict(&fits.marginal(1, order), opts.r_max, tables)?;
    if correlation.limit_squared != ExpansionLimit::Zero {
        let rendered = match &correlation.limit_squared {
            ExpansionLimit::Finite(sq) => format!(
                "asymptotic correlation is {}sqrt({sq}), not 0",
                if correlation.sign < 0 { "-" } else { "" }
            ),
            ExpansionLimit::Divergent { .. } => "correlation ratio diverges".to_string(),
            ExpansionLimit::Zero => unreachable!(),
        };
        return Err(Error::NotIndependentlyNormal { reason: rendered });
    }
    for (label, verdict) in [("first", &marginal_x), ("second", &marginal_y)] {
        if verdict.verdict != Verdict::Normal {
            return Err(Error::NotIndependentlyNormal {
                reason: format!(
                    "{label} marginal verdict is {}",
                    verdict.verdict.as_str()
                ),
            });
        }
    }

    let var_x = fits.poly(2, 0).ok_or(Error::NoFit { max_deg: 4 })?.clone();
    let var_y = fits.poly(0, 2).ok_or(Error::NoFit { max_deg: 4 })?.clone();
    let mut formulas = Vec::with_capacity(4);
    for (p1, p2) in [
        (ParityClass::Even, ParityClass::Even),
        (ParityClass::Odd, ParityClass::Even),
        (ParityClass::Even, ParityClass::Odd),
        (ParityClass::Odd, ParityClass::Odd),
    ] {
        let mut per_power: Vec<BTreeMap<(i64, i64), Rational>> =
            vec![BTreeMap::new(); opts.depth + 1];
        let mut complete = true;
        'grid: for r1 in 1..=opts.r_max {
            for r2 in 1..=opts.r_max {
                let a = 2 * r1 + usize::from(p1 == ParityClass::Odd);
                let b = 2 * r2 + usize::from(p2 == ParityClass::Odd);
                let Some(m) = fits.poly(a, b) else {
                    complete = false;
                    break 'grid;
                };
                // every class is normalized by the double factorials: they
                // carry the superpolynomial part of the moment growth, and
                // only the normalized coefficients are polynomial in the
                // order variables
                let norm = tables.double_factorial_rational(r1)
                    * tables.double_factorial_rational(r2);
                let den = var_x
                    .pow(r1 as u32)
                    .mul(&var_y.pow(r2 as u32))
                    .scale(&norm);
                let exp = ansatz::expand_at_infinity(m, &den, opts.depth)?;
                if exp.leading_exponent < 0 && !exp.is_zero() {
                    complete = false;
                    break 'grid;
                }
                for (i, grid) in per_power.iter_mut().enumerate() {
                    match exp.coeff_at(i as i64) {
                        Some(c) => {
                            grid.insert((r1 as i64, r2 as i64), c);
                        }
                        None => {
                            complete = false;
                            break 'grid;
                        }
                    }
                }
            }
        }
        let coefficients = per_power
            .into_iter()
            .enumerate()
            .map(|(i, grid)| {
                if !complete {
                    return (i, None, GridCertificate::failed());
                }
                let cap = opts.coeff_max_deg.unwrap_or(2 * i + 2);
                match ansatz::guess_bipoly(&grid, (cap, cap)) {
                    Ok((poly, cert)) => (i, Some(poly), cert),
                    Err(_) => (i, None, GridCertificate::failed()),
                }
            })
            .collect();
        formulas.push(AsymptoticFormula2 {
            class: (p1, p2),
            depth: opts.depth,
            coefficients,
        });
    }
    Ok(PairReport {
        fits,
        marginal_verdicts: (marginal_x, marginal_y),
        correlation,
        formulas,
    })
}

impl PairReport {
    pub fn to_json(&self) -> Value {
        let mut formula_map = serde_json::Map::new();
        for f in &self.formulas {
            formula_map.insert(f.class_label(), f.to_json());
        }
        json!({
            "family": self.fits.family,
            "verdict": "independently-normal",
            "correlationLimit": "0",
            "marginalVerdicts": [
                self.marginal_verdicts.0.verdict.as_str(),
                self.marginal_verdicts.1.verdict.as_str(),
            ],
            "formulas": Value::Object(formula_map),
        })
    }
}

// ---------------------------------------------------------------------------
// histogram export (plotDist analogue)
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotMode {
    /// `x = (k - mean)/sigma`, `y = sigma * Pr[X = k]`; a normal family's
    /// export approaches the standard normal density.
    Standardized,
    /// `x = k`, `y = Pr[X = k]`.
    Raw,
}

/// Float coordinates for plotting, with the exact backing distribution
/// retained.
#[derive(Debug)]
pub struct HistogramExport {
    pub n: usize,
    pub mode: PlotMode,
    pub points: Vec<(f64, f64)>,
    pub backing: Distribution<1>,
}

pub fn plot_dist(family: &Family, n: usize, mode: PlotMode) -> Result<HistogramExport> {
    let dist = family.distribution(n)?;
    let tables = CombinatoricsTables::new(2);
    let raw: Vec<Rational> = {
        let fm = dist.factorial_moments([2]);
        let f: Vec<Rational> = (0..=2).map(|j| fm.moment([j])).collect();
        crate::moments::raw_from_factorial(&f, &tables)
    };
    let central = crate::moments::central_from_raw(&raw, &tables);
    let points = match mode {
        PlotMode::Raw => dist
            .support_pairs()
            .map(|(k, p)| (k as f64, p.to_f64()))
            .collect(),
        PlotMode::Standardized => {
            let variance = &central[2];
            if variance.is_zero() {
                return Err(Error::DegenerateVariance);
            }
            let mu = raw[1].to_f64();
            let sigma = variance.to_f64().sqrt();
            dist.support_pairs()
                .map(|(k, p)| ((k as f64 - mu) / sigma, sigma * p.to_f64()))
                .collect()
        }
    };
    Ok(HistogramExport {
        n,
        mode,
        points,
        backing: dist,
    })
}

impl HistogramExport {
    pub fn peak(&self) -> f64 {
        self.points.iter().fold(f64::MIN, |acc, (_, y)| acc.max(*y))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for (x, y) in &self.points {
            out.push_str(&format!("{x},{y}\n"));
        }
        out
    }

    /// Minimal static vector graphic: one polyline over the points plus the
    /// two axes.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 400.0;
        const M: f64 = 40.0;
        let (mut x_min, mut x_max) = (f64::MAX, f64::MIN);
        let mut y_max = f64::MIN;
        for (x, y) in &self.points {
            x_min = x_min.min(*x);
            x_max = x_max.max(*x);
            y_max = y_max.max(*y);
        }
        if !x_min.is_finite() || x_max - x_min < 1e-12 {
            x_min = -1.0;
            x_max = 1.0;
        }
        if !y_max.is_finite() || y_max <= 0.0 {
            y_max = 1.0;
        }
        let map_x = |x: f64| M + (x - x_min) / (x_max - x_min) * (W - 2.0 * M);
        let map_y = |y: f64| H - M - y / y_max * (H - 2.0 * M);
        let pts: Vec<String> = self
            .points
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2}", map_x(*x), map_y(*y)))
            .collect();
        format!(
            concat!(
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
                "viewBox=\"0 0 {w} {h}\">\n",
                "  <line x1=\"{m}\" y1=\"{base}\" x2=\"{xend}\" y2=\"{base}\" stroke=\"#888\"/>\n",
                "  <line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{base}\" stroke=\"#888\"/>\n",
                "  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"{pts}\"/>\n",
                "</svg>\n"
            ),
            w = W,
            h = H,
            m = M,
            base = H - M,
            xend = W - M,
            pts = pts.join(" ")
        )
    }
}

/// Certificate sanity shared by reports: a proved identity never appears
/// without a caller-supplied degree bound, which analysis-layer fits never
/// supply.
pub fn assert_no_unsupported_proofs(report: &AnalysisReport) -> bool {
    report
        .fits
        .central
        .values()
        .flat_map(FittedMoment::certificates)
        .chain(report.fits.mean.certificates())
        .all(|c| c.status != CertificateStatus::ProvedPolynomialIdentity)
}
