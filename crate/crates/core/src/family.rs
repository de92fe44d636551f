//! Built-in example families and the provider interface the analysis layer
//! consumes: a family maps `n` to an exact distribution (exact pathway) and
//! to factorial-moment vectors (fast pathway).
//!
//! The curated built-in set:
//!
//! * `coin-difference(p)` — heads minus tails of a p-coin; symmetric for
//!   p = 1/2, asymptotically normal.
//! * `heads-count(p)` — number of heads; asymptotically normal, skewed for
//!   p != 1/2.
//! * `arcsine-positive-time` — time on the positive side of a fair walk; the
//!   non-normal negative control.

use crate::arcsine;
use crate::error::{Error, Result};
use crate::expand::{self, Distribution, ExpandOptions, FactorialMomentVector};
use crate::gf::{builtin, RationalGF};
use crate::rational::Rational;
use crate::tables::CombinatoricsTables;

#[derive(Clone)]
pub enum Family {
    /// Any univariate rational generating function, with a display name.
    Gf {
        name: String,
        gf: RationalGF<1>,
        /// First `n` past boundary transients (word statistics fitted from
        /// a pattern set use twice the longest pattern length).
        n0_hint: Option<usize>,
    },
    /// Arcsine positive-time walk statistic (dynamic programming; no GF).
    ArcsinePositiveTime,
}

impl Family {
    pub fn coin_difference(p: &Rational) -> Result<Family> {
        Ok(Family::Gf {
            name: format!("coin-difference({p})"),
            gf: builtin::coin_difference(p)?,
            n0_hint: None,
        })
    }

    pub fn heads_count(p: &Rational) -> Result<Family> {
        Ok(Family::Gf {
            name: format!("heads-count({p})"),
            gf: builtin::heads_count(p)?,
            n0_hint: None,
        })
    }

    pub fn from_gf(name: impl Into<String>, gf: RationalGF<1>) -> Family {
        Family::Gf {
            name: name.into(),
            gf,
            n0_hint: None,
        }
    }

    /// Resolves a built-in family by name: bare (`heads-count`, probability
    /// defaults to 1/2) or parameterized (`heads-count(1/3)`).
    pub fn by_name(name: &str) -> Result<Family> {
        let name = name.trim();
        let (base, arg) = match name.split_once('(') {
            Some((base, rest)) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::UnknownFamily(name.to_string()))?;
                (base.trim(), Some(inner.trim()))
            }
            None => (name, None),
        };
        let p = match arg {
            Some(txt) => txt
                .parse::<Rational>()
                .map_err(|_| Error::UnknownFamily(name.to_string()))?,
            None => Rational::new(1, 2).unwrap(),
        };
        match base {
            "coin-difference" => Family::coin_difference(&p),
            "heads-count" => Family::heads_count(&p),
            "arcsine-positive-time" => {
                if arg.is_some() {
                    return Err(Error::UnknownFamily(name.to_string()));
                }
                Ok(Family::ArcsinePositiveTime)
            }
            _ => Err(Error::UnknownFamily(name.to_string())),
        }
    }

    /// Names and one-line descriptions of every built-in, for `examples`.
    pub fn builtin_catalog() -> Vec<(&'static str, &'static str)> {
        vec![
            (
                "coin-difference(p)",
                "heads minus tails after n tosses of a p-coin (default p = 1/2)",
            ),
            (
                "heads-count(p)",
                "number of heads after n tosses of a p-coin (default p = 1/2)",
            ),
            (
                "arcsine-positive-time",
                "time units spent on the positive side by a fair +-1 walk (non-normal)",
            ),
            (
                "heads-tails-pair(p)",
                "bivariate pair (heads, tails); perfectly anticorrelated",
            ),
            (
                "independent-coins-pair",
                "bivariate pair of independent fair +-1 walk differences",
            ),
        ]
    }

    pub fn name(&self) -> String {
        match self {
            Family::Gf { name, .. } => name.clone(),
            Family::ArcsinePositiveTime => "arcsine-positive-time".to_string(),
        }
    }

    pub fn gf(&self) -> Option<&RationalGF<1>> {
        match self {
            Family::Gf { gf, .. } => Some(gf),
            Family::ArcsinePositiveTime => None,
        }
    }

    /// Smallest `n` from which fitted formulas are expected to be polynomial.
    pub fn default_n0(&self) -> usize {
        match self {
            Family::Gf { n0_hint, .. } => n0_hint.unwrap_or(1).max(1),
            Family::ArcsinePositiveTime => 2,
        }
    }

    /// Exact distribution at one `n`.
    pub fn distribution(&self, n: usize) -> Result<Distribution<1>> {
        match self {
            Family::Gf { gf, .. } => {
                let mut dists = expand::expand_exact(gf, n, ExpandOptions::default())?;
                Ok(dists.remove(n))
            }
            Family::ArcsinePositiveTime => Ok(arcsine::distribution(n)),
        }
    }

    /// Fast-pathway factorial moments for every `n` in the range.
    pub fn factorial_moments(
        &self,
        n_range: std::ops::RangeInclusive<usize>,
        order: usize,
        tables: &CombinatoricsTables,
    ) -> Result<Vec<FactorialMomentVector<1>>> {
        match self {
            Family::Gf { gf, .. } => expand::expand_truncated(gf, n_range, [order]),
            Family::ArcsinePositiveTime => n_range
                .map(|n| {
                    let raw = arcsine::raw_moments(n, order, tables);
                    Ok(expand::factorial_vector_from_raw(n, &raw, tables))
                })
                .collect(),
        }
    }
}

/// Bivariate families: a marker pair plus a display name.
#[derive(Clone)]
pub struct FamilyPair {
    pub name: String,
    pub gf: RationalGF<2>,
    pub n0_hint: Option<usize>,
}

impl FamilyPair {
    pub fn by_name(name: &str) -> Result<FamilyPair> {
        let trimmed = name.trim();
        let (base, arg) = match trimmed.split_once('(') {
            Some((base, rest)) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::UnknownFamily(trimmed.to_string()))?;
                (base.trim(), Some(inner.trim()))
            }
            None => (trimmed, None),
        };
        let p = match arg {
            Some(txt) => txt
                .parse::<Rational>()
                .map_err(|_| Error::UnknownFamily(trimmed.to_string()))?,
            None => Rational::new(1, 2).unwrap(),
        };
        match base {
            "heads-tails-pair" => Ok(FamilyPair {
                name: format!("heads-tails-pair({p})"),
                gf: builtin::heads_tails_pair(&p)?,
                n0_hint: None,
            }),
            "independent-coins-pair" => {
                if arg.is_some() {
                    return Err(Error::UnknownFamily(trimmed.to_string()));
                }
                Ok(FamilyPair {
                    name: "independent-coins-pair".to_string(),
                    gf: builtin::independent_coins_pair()?,
                    n0_hint: None,
                })
            }
            _ => Err(Error::UnknownFamily(trimmed.to_string())),
        }
    }

    pub fn from_gf(name: impl Into<String>, gf: RationalGF<2>) -> FamilyPair {
        FamilyPair {
            name: name.into(),
            gf,
            n0_hint: None,
        }
    }

    pub fn default_n0(&self) -> usize {
        self.n0_hint.unwrap_or(1).max(1)
    }

    pub fn distribution(&self, n: usize) -> Result<Distribution<2>> {
        let mut dists = expand::expand_exact(&self.gf, n, ExpandOptions::default())?;
        Ok(dists.remove(n))
    }

    pub fn factorial_moments(
        &self,
        n_range: std::ops::RangeInclusive<usize>,
        orders: [usize; 2],
    ) -> Result<Vec<FactorialMomentVector<2>>> {
        expand::expand_truncated(&self.gf, n_range, orders)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn name_resolution() {
        assert!(Family::by_name("coin-difference").is_ok());
        assert!(Family::by_name("coin-difference(1/3)").is_ok());
        assert!(Family::by_name("arcsine-positive-time").is_ok());
        assert!(matches!(
            Family::by_name("gamblers-ruin"),
            Err(Error::UnknownFamily(_))
        ));
        assert!(Family::by_name("heads-count(0)").is_err());
    }

    #[test]
    fn coin_difference_distribution() {
        let fam = Family::by_name("coin-difference(1/2)").unwrap();
        let d = fam.distribution(2).unwrap();
        assert_eq!(d.probability(&[-2]), rat(1, 4));
        assert_eq!(d.probability(&[0]), rat(1, 2));
        assert_eq!(d.probability(&[2]), rat(1, 4));
    }

    #[test]
    fn arcsine_two_pathways_agree() {
        let fam = Family::ArcsinePositiveTime;
        let tables = CombinatoricsTables::new(4);
        let fast = fam.factorial_moments(1..=10, 4, &tables).unwrap();
        for fm in &fast {
            let exact = fam.distribution(fm.n).unwrap().factorial_moments([4]);
            for j in 0..=4 {
                assert_eq!(exact.moment([j]), fm.moment([j]), "n={} j={j}", fm.n);
            }
        }
    }
}
