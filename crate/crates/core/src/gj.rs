//! Goulden-Jackson cluster method.
//!
//! Builds the rational weight enumerator for words over a `d`-letter alphabet
//! in which every occurrence of a pattern is marked by its marker variable:
//! the coefficient of `s^n` is `sum_words prod_v t_{mark(v)}^{#occurrences}`.
//! With one or two distinct markers this feeds the uni- and bivariate moment
//! pipelines the statistic "number of occurrences of a consecutive subword".
//!
//! The construction is the classic cluster inclusion-exclusion. Writing
//! `x_v = t_{mark(v)} - 1`, clusters of overlapping marked occurrences
//! satisfy the linear system
//!
//! ```text
//! C_v = x_v * (s^|v| + sum_u C_u * (u:v)(s))
//! ```
//!
//! over the correlation (overlap) polynomials `(u:v)(s)`, and the enumerator
//! is `F = 1/(1 - d*s - sum_v C_v)`. The system is tiny (one row per
//! pattern), so it is solved by Cramer's rule with cofactor determinants over
//! the polynomial ring itself: no division, no GCD, no fractions until the
//! final numerator/denominator pair is assembled. The sign conventions are
//! validated against exhaustive enumeration in the test suite.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gf::{RationalGF, SPoly};
use crate::laurent::LaurentPoly;
use crate::poly::Poly;
use crate::rational::Rational;

/// A nonempty word over a finite alphabet, stored as symbol indices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Word {
    symbols: Vec<u8>,
}

impl Word {
    pub fn new(symbols: Vec<u8>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Invalid("patterns must be nonempty".into()));
        }
        Ok(Word { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    /// True when `self` occurs in `other` as a consecutive subword.
    pub fn is_factor_of(&self, other: &Word) -> bool {
        other
            .symbols
            .windows(self.symbols.len())
            .any(|w| w == self.symbols)
    }

    pub fn occurrences_in(&self, text: &[u8]) -> usize {
        if text.len() < self.symbols.len() {
            return 0;
        }
        text.windows(self.symbols.len())
            .filter(|w| *w == self.symbols.as_slice())
            .count()
    }
}

/// Patterns with marker assignments. Marker axes are 0-based (`t1` is axis 0,
/// `t2` is axis 1); a univariate set uses axis 0 throughout.
#[derive(Clone, Debug)]
pub struct PatternSet {
    alphabet_size: usize,
    entries: Vec<(Word, usize)>,
    alphabet_chars: Vec<char>,
}

impl PatternSet {
    /// Builds and validates a pattern set: alphabet size at least 2, marker
    /// axes in range, patterns distinct, and reduced (no pattern a factor of
    /// another).
    pub fn new(alphabet_size: usize, entries: Vec<(Word, usize)>) -> Result<Self> {
        Self::with_alphabet(
            alphabet_size,
            entries,
            (0..alphabet_size)
                .map(|i| char::from(b'a' + (i as u8 % 26)))
                .collect(),
        )
    }

    pub fn with_alphabet(
        alphabet_size: usize,
        entries: Vec<(Word, usize)>,
        alphabet_chars: Vec<char>,
    ) -> Result<Self> {
        if alphabet_size < 2 {
            return Err(Error::Invalid("alphabet size must be at least 2".into()));
        }
        if entries.is_empty() {
            return Err(Error::Invalid("pattern set must be nonempty".into()));
        }
        for (w, axis) in &entries {
            if *axis > 1 {
                return Err(Error::Invalid(format!(
                    "marker index {} out of range (only t1, t2 supported)",
                    axis + 1
                )));
            }
            if w.symbols().iter().any(|&c| c as usize >= alphabet_size) {
                return Err(Error::Invalid(
                    "pattern uses a symbol outside the alphabet".into(),
                ));
            }
        }
        let render = |w: &Word| -> String {
            w.symbols()
                .iter()
                .map(|&c| alphabet_chars.get(c as usize).copied().unwrap_or('?'))
                .collect()
        };
        for (i, (u, _)) in entries.iter().enumerate() {
            for (j, (v, _)) in entries.iter().enumerate() {
                if i != j && u.is_factor_of(v) {
                    return Err(Error::NotReduced {
                        contained: render(u),
                        container: render(v),
                    });
                }
                if i < j && u == v {
                    return Err(Error::NotReduced {
                        contained: render(u),
                        container: render(v),
                    });
                }
            }
        }
        Ok(PatternSet {
            alphabet_size,
            entries,
            alphabet_chars,
        })
    }

    /// Parses the CLI syntax: comma-separated words of single-character
    /// symbols, each with an optional `:t1` / `:t2` marker suffix, e.g.
    /// `"HH,TT"` or `"HH:t1,TT:t2"`.
    pub fn parse(text: &str, alphabet_size: usize) -> Result<Self> {
        let mut raw: Vec<(String, usize)> = Vec::new();
        for part in text.split(',') {
            let part = part.trim();
            if part.is_empty() {
                return Err(Error::Invalid("empty pattern in list".into()));
            }
            let (word, axis) = match part.split_once(':') {
                Some((w, m)) => {
                    let axis = match m.trim() {
                        "t" | "t1" => 0,
                        "t2" => 1,
                        other => {
                            return Err(Error::Invalid(format!(
                                "unknown marker `{other}` (use t, t1 or t2)"
                            )))
                        }
                    };
                    (w.trim().to_string(), axis)
                }
                None => (part.to_string(), 0),
            };
            raw.push((word, axis));
        }
        let mut chars: Vec<char> = Vec::new();
        for (w, _) in &raw {
            for c in w.chars() {
                if !chars.contains(&c) {
                    chars.push(c);
                }
            }
        }
        chars.sort_unstable();
        if chars.len() > alphabet_size {
            return Err(Error::Invalid(format!(
                "patterns use {} distinct symbols but the alphabet has size {}",
                chars.len(),
                alphabet_size
            )));
        }
        // pad the alphabet with unused filler letters
        let mut filler = ('a'..='z').chain('A'..='Z').chain('0'..='9');
        while chars.len() < alphabet_size {
            let c = filler
                .next()
                .ok_or_else(|| Error::Invalid("alphabet too large to render".into()))?;
            if !chars.contains(&c) {
                chars.push(c);
            }
        }
        let index: BTreeMap<char, u8> = chars
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i as u8))
            .collect();
        let entries = raw
            .into_iter()
            .map(|(w, axis)| {
                let symbols = w.chars().map(|c| index[&c]).collect();
                Word::new(symbols).map(|word| (word, axis))
            })
            .collect::<Result<Vec<_>>>()?;
        PatternSet::with_alphabet(alphabet_size, entries, chars)
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn entries(&self) -> &[(Word, usize)] {
        &self.entries
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.entries.iter().map(|(w, _)| w)
    }

    /// 1 for a univariate set, 2 when any pattern is marked `t2`.
    pub fn marker_count(&self) -> usize {
        if self.entries.iter().any(|(_, axis)| *axis == 1) {
            2
        } else {
            1
        }
    }

    pub fn max_pattern_len(&self) -> usize {
        self.entries.iter().map(|(w, _)| w.len()).max().unwrap_or(0)
    }

    pub fn render_word(&self, w: &Word) -> String {
        w.symbols()
            .iter()
            .map(|&c| self.alphabet_chars.get(c as usize).copied().unwrap_or('?'))
            .collect()
    }
}

/// Correlation (overlap) polynomial `(u:v)(s) = sum s^(|v|-k)` over the
/// proper overlaps `k` where the length-`k` suffix of `u` equals the
/// length-`k` prefix of `v`; containment overlaps are excluded, which is
/// harmless exactly because pattern sets are reduced.
pub fn correlation_poly(u: &Word, v: &Word) -> Poly {
    let mut coeffs = vec![Rational::zero(); v.len() + 1];
    let max_k = u.len().min(v.len()) - 1;
    for k in 1..=max_k {
        let suffix = &u.symbols()[u.len() - k..];
        let prefix = &v.symbols()[..k];
        if suffix == prefix {
            coeffs[v.len() - k] += Rational::one();
        }
    }
    Poly::new(coeffs)
}

fn lift_poly<const V: usize>(p: &Poly) -> SPoly<V> {
    SPoly::new(
        p.coeffs()
            .iter()
            .map(|c| LaurentPoly::constant(c.clone()))
            .collect(),
    )
}

/// `x_v = t_mark - 1` as a Laurent polynomial.
fn mark_weight<const V: usize>(axis: usize) -> LaurentPoly<V> {
    LaurentPoly::marker(axis).sub(&LaurentPoly::one())
}

fn determinant<const V: usize>(m: &[Vec<SPoly<V>>]) -> SPoly<V> {
    match m.len() {
        0 => SPoly::one(),
        1 => m[0][0].clone(),
        n => {
            let mut det = SPoly::zero();
            for col in 0..n {
                if m[0][col].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<SPoly<V>>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != col)
                            .map(|(_, e)| e.clone())
                            .collect()
                    })
                    .collect();
                let term = m[0][col].mul(&determinant(&minor));
                det = if col % 2 == 0 {
                    det.add(&term)
                } else {
                    det.sub(&term)
                };
            }
            det
        }
    }
}

/// Builds the unnormalized weight enumerator `F(s, markers)`: the coefficient
/// of `s^n` at all markers = 1 is `d^n`, and in general it is the polynomial
/// `sum_words prod t^(occurrence counts)`.
pub fn weight_enumerator<const V: usize>(patterns: &PatternSet) -> Result<RationalGF<V>> {
    if patterns.marker_count() > V {
        return Err(Error::Invalid(format!(
            "pattern set uses {} markers but the caller requested {}",
            patterns.marker_count(),
            V
        )));
    }
    let entries = patterns.entries();
    let m = entries.len();
    // A[v][u] = delta - x_v * (u:v), b[v] = x_v * s^|v|
    let mut matrix = vec![vec![SPoly::<V>::zero(); m]; m];
    let mut rhs = vec![SPoly::<V>::zero(); m];
    for (vi, (v, v_axis)) in entries.iter().enumerate() {
        let xv = mark_weight::<V>(*v_axis);
        for (ui, (u, _)) in entries.iter().enumerate() {
            let corr = lift_poly::<V>(&correlation_poly(u, v)).mul_laurent(&xv);
            let delta = if ui == vi {
                SPoly::one()
            } else {
                SPoly::zero()
            };
            matrix[vi][ui] = delta.sub(&corr);
        }
        rhs[vi] = SPoly::monomial_s(v.len(), xv);
    }
    let det_a = determinant(&matrix);
    if det_a.is_zero() {
        return Err(Error::SingularSystem);
    }
    // Cramer: C_u = det(A_u)/det(A) with column u replaced by b.
    let mut cluster_sum = SPoly::<V>::zero();
    for u in 0..m {
        let mut replaced = matrix.clone();
        for (v, row) in replaced.iter_mut().enumerate() {
            row[u] = rhs[v].clone();
        }
        cluster_sum = cluster_sum.add(&determinant(&replaced));
    }
    // F = det(A) / (det(A)*(1 - d*s) - sum_u det(A_u))
    let d = Rational::from(patterns.alphabet_size() as i64);
    let one_minus_ds = SPoly::one().sub(&SPoly::monomial_s(1, LaurentPoly::constant(d)));
    let den = det_a.mul(&one_minus_ds).sub(&cluster_sum);
    RationalGF::new(det_a, den)
}

/// Converts a counting enumerator over a `d`-letter alphabet into the
/// probability convention by `s -> s/d`; the `s^n` coefficient then has total
/// weight 1 at markers = 1.
pub fn probability_gf<const V: usize>(
    counting: &RationalGF<V>,
    alphabet_size: usize,
) -> Result<RationalGF<V>> {
    let d = Rational::from(alphabet_size as i64);
    RationalGF::new(
        counting.num().rescale_s(&d)?,
        counting.den().rescale_s(&d)?,
    )
}

/// Number of length-`n` words avoiding every pattern, for `n = 0..=n_max`:
/// the markers = 0 specialization of the weight enumerator.
pub fn avoid_counts(patterns: &PatternSet, n_max: usize) -> Result<Vec<Rational>> {
    let gf = weight_enumerator::<2>(patterns)?;
    let zero = [Rational::zero(), Rational::zero()];
    let (num, den) = gf.specialize(&zero)?;
    crate::gf::expand_scalar(&num, &den, n_max)
}
