//! Lowers a parsed expression to a rational generating function.
//!
//! The expression is evaluated bottom-up as an unreduced fraction of
//! polynomials in `s` whose coefficients are Laurent polynomials in the
//! markers; no rational-function GCD is attempted. The marker style decides
//! the result: `t` produces a univariate function, `t1`/`t2` a bivariate
//! one, and mixing the two styles is rejected.

use moment_cruncher::error::{Error, Result};
use moment_cruncher::gf::{RationalGF, SPoly};
use moment_cruncher::laurent::LaurentPoly;
use moment_cruncher::rational::Rational;

use crate::expr::{Expr, Var};

/// A generating function in either marker arity.
#[derive(Debug)]
pub enum GfInput {
    Uni(RationalGF<1>),
    Bi(RationalGF<2>),
}

impl GfInput {
    pub fn marker_count(&self) -> usize {
        match self {
            GfInput::Uni(_) => 1,
            GfInput::Bi(_) => 2,
        }
    }
}

#[derive(Clone)]
struct Frac {
    num: SPoly<2>,
    den: SPoly<2>,
}

impl Frac {
    fn from_spoly(p: SPoly<2>) -> Self {
        Frac {
            num: p,
            den: SPoly::one(),
        }
    }

    fn add(&self, rhs: &Frac) -> Frac {
        Frac {
            num: self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            den: self.den.mul(&rhs.den),
        }
    }

    fn neg(&self) -> Frac {
        Frac {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    fn mul(&self, rhs: &Frac) -> Frac {
        Frac {
            num: self.num.mul(&rhs.num),
            den: self.den.mul(&rhs.den),
        }
    }

    fn div(&self, rhs: &Frac) -> Result<Frac> {
        if rhs.num.is_zero() {
            return Err(Error::DivByZero);
        }
        Ok(Frac {
            num: self.num.mul(&rhs.den),
            den: self.den.mul(&rhs.num),
        }
        .fold_monomial_den())
    }

    fn pow(&self, exp: i64) -> Result<Frac> {
        let positive = Frac {
            num: self.num.pow(exp.unsigned_abs() as u32),
            den: self.den.pow(exp.unsigned_abs() as u32),
        };
        if exp >= 0 {
            Ok(positive)
        } else {
            if self.num.is_zero() {
                return Err(Error::DivByZero);
            }
            Ok(Frac {
                num: positive.den,
                den: positive.num,
            }
            .fold_monomial_den())
        }
    }

    /// A denominator that is a single marker monomial (no `s`) is absorbed
    /// into the numerator through negative Laurent exponents, so `t^-2`
    /// really is stored as the Laurent term rather than as `1/t^2`.
    fn fold_monomial_den(self) -> Frac {
        if self.den.degree() != Some(0) {
            return self;
        }
        let d0 = self.den.coeff(0);
        if d0.num_terms() != 1 {
            return self;
        }
        let (exps, coeff) = d0.terms().next().map(|(e, c)| (*e, c.clone())).unwrap();
        let inv_coeff = match coeff.recip() {
            Ok(c) => c,
            Err(_) => return self,
        };
        let inverse = LaurentPoly::monomial([-exps[0], -exps[1]], inv_coeff);
        Frac {
            num: self.num.mul_laurent(&inverse),
            den: SPoly::one(),
        }
    }
}

fn eval(e: &Expr) -> Result<Frac> {
    match e {
        Expr::Int(k) => {
            let c = LaurentPoly::constant(Rational::from(*k as i64));
            Ok(Frac::from_spoly(SPoly::constant(c)))
        }
        Expr::Var(Var::S) => Ok(Frac::from_spoly(SPoly::s())),
        Expr::Var(Var::T) | Expr::Var(Var::T1) => Ok(Frac::from_spoly(SPoly::constant(
            LaurentPoly::marker(0),
        ))),
        Expr::Var(Var::T2) => Ok(Frac::from_spoly(SPoly::constant(LaurentPoly::marker(1)))),
        Expr::Neg(inner) => Ok(eval(inner)?.neg()),
        Expr::Add(a, b) => Ok(eval(a)?.add(&eval(b)?)),
        Expr::Sub(a, b) => Ok(eval(a)?.add(&eval(b)?.neg())),
        Expr::Mul(a, b) => Ok(eval(a)?.mul(&eval(b)?)),
        Expr::Div(a, b) => eval(a)?.div(&eval(b)?),
        Expr::Pow(base, exp) => eval(base)?.pow(*exp),
    }
}

fn collect_vars(e: &Expr, seen: &mut [bool; 4]) {
    match e {
        Expr::Int(_) => {}
        Expr::Var(v) => {
            seen[match v {
                Var::T => 0,
                Var::T1 => 1,
                Var::T2 => 2,
                Var::S => 3,
            }] = true
        }
        Expr::Neg(a) => collect_vars(a, seen),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            collect_vars(a, seen);
            collect_vars(b, seen);
        }
        Expr::Pow(a, _) => collect_vars(a, seen),
    }
}

/// Converts an expression to a validated generating function.
pub fn to_rational_gf(e: &Expr) -> Result<GfInput> {
    let mut seen = [false; 4];
    collect_vars(e, &mut seen);
    let (uses_t, uses_t1, uses_t2) = (seen[0], seen[1], seen[2]);
    if uses_t && (uses_t1 || uses_t2) {
        return Err(Error::NonRationalStructure(
            "cannot mix the univariate marker t with t1/t2".into(),
        ));
    }
    let frac = eval(e)?;
    if uses_t1 || uses_t2 {
        Ok(GfInput::Bi(RationalGF::new(frac.num, frac.den)?))
    } else {
        // no marker beyond t: narrow to the univariate representation
        let num = frac.num.narrow().ok_or_else(|| {
            Error::NonRationalStructure("unexpected second marker in numerator".into())
        })?;
        let den = frac.den.narrow().ok_or_else(|| {
            Error::NonRationalStructure("unexpected second marker in denominator".into())
        })?;
        Ok(GfInput::Uni(RationalGF::new(num, den)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use moment_cruncher::expand::{expand_exact, ExpandOptions};

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn uni(text: &str) -> RationalGF<1> {
        match to_rational_gf(&parse(text).unwrap()).unwrap() {
            GfInput::Uni(gf) => gf,
            GfInput::Bi(_) => panic!("expected univariate"),
        }
    }

    #[test]
    fn fair_coin_expression_reproduces_the_distribution() {
        let gf = uni("1/(1-s*(t+1/t)/2)");
        let dists = expand_exact(&gf, 2, ExpandOptions::default()).unwrap();
        assert_eq!(dists[2].probability(&[-2]), rat(1, 4));
        assert_eq!(dists[2].probability(&[0]), rat(1, 2));
        assert_eq!(dists[2].probability(&[2]), rat(1, 4));
    }

    #[test]
    fn marker_free_gf_converts() {
        let gf = uni("1/(1-2*s)");
        let dists = expand_exact(&gf, 3, ExpandOptions::default()).unwrap();
        // weights 2^n normalize to a point mass at 0
        assert_eq!(dists[3].probability(&[0]), rat(1, 1));
    }

    #[test]
    fn laurent_term_plus_constant() {
        // monomial denominators fold away: the numerator is t^-2 + 3/4 itself
        let gf = uni("t^-2 + 3/4");
        assert_eq!(gf.num().coeff(0).coeff(&[-2]), rat(1, 1));
        assert_eq!(gf.num().coeff(0).coeff(&[0]), rat(3, 4));
        assert_eq!(gf.den().coeff(0).coeff(&[0]), rat(1, 1));
    }

    #[test]
    fn inverse_s_is_inadmissible() {
        let err = to_rational_gf(&parse("1/s").unwrap()).unwrap_err();
        assert!(matches!(err, Error::InadmissibleDenominator(_)));
    }

    #[test]
    fn division_by_zero_expression() {
        let err = to_rational_gf(&parse("1/(t-t)").unwrap()).unwrap_err();
        assert_eq!(err, Error::DivByZero);
    }

    #[test]
    fn mixed_marker_styles_are_rejected() {
        let err = to_rational_gf(&parse("1/(1-s*t*t1)").unwrap()).unwrap_err();
        assert!(matches!(err, Error::NonRationalStructure(_)));
    }

    #[test]
    fn bivariate_markers_produce_pair_gf() {
        let gf = to_rational_gf(&parse("1/(1-s*(t1+t2)/2)").unwrap()).unwrap();
        assert_eq!(gf.marker_count(), 2);
    }
}
