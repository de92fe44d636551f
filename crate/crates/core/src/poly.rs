//! Dense polynomials over the rationals in one formal integer variable
//! (typically `n`, the family index, or `r`, the moment order), plus a
//! two-variable version for mixed-moment formulas.

use std::fmt;

use crate::rational::Rational;

/// Coefficients ascending by power; trailing zeros are never stored, so the
/// zero polynomial is the empty vector.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Poly::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the zero polynomial is reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, power: usize) -> Rational {
        self.coeffs.get(power).cloned().unwrap_or_default()
    }

    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + rhs.coeff(i));
        }
        Poly::new(out)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Poly::one();
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_int(&self, x: i64) -> Rational {
        self.eval(&Rational::from(x))
    }

    /// Renders with the given variable name, highest power first.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (p, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let body = match p {
                0 => format!("{c}"),
                1 if c.is_one() => var.to_string(),
                1 => format!("{c}*{var}"),
                _ if c.is_one() => format!("{var}^{p}"),
                _ => format!("{c}*{var}^{p}"),
            };
            parts.push(body);
        }
        let mut out = String::new();
        for (i, part) in parts.iter().enumerate() {
            if i == 0 {
                out.push_str(part);
            } else if let Some(rest) = part.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(part);
            }
        }
        out
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("x"))
    }
}

/// Polynomial in two order variables `r1, r2`; `coeffs[i][j]` multiplies
/// `r1^i * r2^j`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BiPoly {
    coeffs: Vec<Vec<Rational>>,
}

impl BiPoly {
    pub fn new(mut coeffs: Vec<Vec<Rational>>) -> Self {
        for row in &mut coeffs {
            while row.last().is_some_and(Rational::is_zero) {
                row.pop();
            }
        }
        while coeffs.last().is_some_and(Vec::is_empty) {
            coeffs.pop();
        }
        BiPoly { coeffs }
    }

    pub fn zero() -> Self {
        BiPoly { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize, j: usize) -> Rational {
        self.coeffs
            .get(i)
            .and_then(|row| row.get(j))
            .cloned()
            .unwrap_or_default()
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.coeffs
    }

    pub fn eval(&self, r1: &Rational, r2: &Rational) -> Rational {
        let mut acc = Rational::zero();
        let mut p1 = Rational::one();
        for row in &self.coeffs {
            let mut p2 = Rational::one();
            for c in row {
                acc += c * &p1 * &p2;
                p2 *= r2;
            }
            p1 *= r1;
        }
        acc
    }

    pub fn eval_int(&self, r1: i64, r2: i64) -> Rational {
        self.eval(&Rational::from(r1), &Rational::from(r2))
    }

    pub fn render(&self, v1: &str, v2: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut body = String::new();
                if !c.is_one() || (i == 0 && j == 0) {
                    body.push_str(&format!("{c}"));
                }
                for (var, p) in [(v1, i), (v2, j)] {
                    if p == 0 {
                        continue;
                    }
                    if !body.is_empty() {
                        body.push('*');
                    }
                    if p == 1 {
                        body.push_str(var);
                    } else {
                        body.push_str(&format!("{var}^{p}"));
                    }
                }
                parts.push(body);
            }
        }
        parts.join(" + ")
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("r1", "r2"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn arithmetic_and_eval() {
        // (x+1)(x-1) = x^2 - 1
        let a = Poly::new(vec![rat(1, 1), rat(1, 1)]);
        let b = Poly::new(vec![rat(-1, 1), rat(1, 1)]);
        let p = a.mul(&b);
        assert_eq!(p.coeffs(), &[rat(-1, 1), rat(0, 1), rat(1, 1)]);
        assert_eq!(p.eval_int(3), rat(8, 1));
        assert_eq!(p.degree(), Some(2));
        assert_eq!(a.sub(&a), Poly::zero());
    }

    #[test]
    fn render_orders_highest_power_first() {
        let p = Poly::new(vec![rat(-2, 3), rat(0, 1), rat(3, 1)]);
        assert_eq!(p.render("n"), "3*n^2 - 2/3");
    }

    #[test]
    fn bipoly_eval_and_trim() {
        // 1 + r1*r2
        let p = BiPoly::new(vec![
            vec![rat(1, 1), rat(0, 1)],
            vec![rat(0, 1), rat(1, 1), rat(0, 1)],
        ]);
        assert_eq!(p.eval_int(2, 3), rat(7, 1));
        assert_eq!(p.coeff(1, 1), rat(1, 1));
        assert_eq!(p.coeff(5, 5), rat(0, 1));
    }
}
