//! Exact moment analysis for sequences of discrete probability distributions.
//!
//! The crate takes a sequence of distributions — given either directly, by a
//! rational generating function `R(t, s)` whose `s^n` coefficient is the n-th
//! probability generating polynomial in the marker `t`, or by a pattern set
//! fed through the Goulden-Jackson cluster method — and computes exact
//! moments for each `n`, guesses closed-form polynomial formulas in `n` for
//! them, expands normalized moments at `n = infinity`, and decides asymptotic
//! normality by comparing the limits against the normal moments `(2r-1)!!`
//! and `0`. Bivariate statistics get mixed-moment tables, exact correlation,
//! and (when the pair is asymptotically independently normal) four
//! parity-class asymptotic formulas.
//!
//! Everything up to the final verdicts is exact rational arithmetic; floats
//! appear only in explicitly numeric report fields (histogram coordinates,
//! numeric correlation).

pub mod error;
pub mod rational;
pub mod tables;

pub mod analyze;
pub mod ansatz;
pub mod arcsine;
pub mod expand;
pub mod family;
pub mod gf;
pub mod gj;
pub mod laurent;
pub mod moments;
pub mod oracle;
pub mod poly;
pub mod series;

pub use error::{Error, Result};
pub use rational::Rational;
pub use tables::CombinatoricsTables;
