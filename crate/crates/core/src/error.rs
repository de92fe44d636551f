use thiserror::Error;

/// Errors surfaced by the pipeline. Every fallible operation returns one of
/// these; panics are reserved for violated internal invariants (e.g. mixing
/// truncated series with different caps).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivByZero,
    #[error("series has zero constant term and is not invertible in the truncated ring")]
    NotAUnit,
    #[error("total weight Q_{n}(1) is zero")]
    DegenerateWeight { n: usize },
    #[error("negative probability {value} at support point {point} of Q_{n}")]
    NotADistribution {
        n: usize,
        point: String,
        value: String,
    },
    #[error("series expansion of s^{n} coefficient is not a Laurent polynomial: {detail}")]
    ExpansionError { n: usize, detail: String },
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("moment data truncated at order {have}, need order {need}")]
    OrderTooLow { have: usize, need: usize },
    #[error("variance is zero; normalized moments undefined")]
    DegenerateVariance,
    #[error("pattern set is not reduced: `{contained}` is a factor of `{container}`")]
    NotReduced {
        contained: String,
        container: String,
    },
    #[error("cluster system is singular")]
    SingularSystem,
    #[error("need at least {need} data points (have {have})")]
    NotEnoughPoints { need: usize, have: usize },
    #[error("no polynomial of degree <= {max_deg} fits the data")]
    NoFit { max_deg: usize },
    #[error("bivariate family is not asymptotically independently normal: {reason}")]
    NotIndependentlyNormal { reason: String },
    #[error("enumeration budget exceeded: {items} items > {budget}")]
    BudgetExceeded { items: u64, budget: u64 },
    #[error("denominator is inadmissible: {0}")]
    InadmissibleDenominator(String),
    #[error("expression is not rational in the expected variables: {0}")]
    NonRationalStructure(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
