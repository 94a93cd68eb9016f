use crate::ring::RingTag;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("ring mismatch: {left} vs {right}")]
    RingMismatch { left: RingTag, right: RingTag },

    #[error("constant term {0} is not a unit")]
    NonUnitConstantTerm(String),

    #[error("cyclotomic value {0} is not rational")]
    NonRationalValue(String),

    #[error("coefficient {value} at q^{index} is not integral")]
    NonIntegralCoefficient { index: usize, value: String },

    #[error("negative coefficient {value} at q^{index}")]
    NegativeCoefficient { index: usize, value: String },

    #[error("product side is degenerate for r = {r}, s = {s} (r + s ≡ 0 mod 5)")]
    DegenerateProduct { r: usize, s: usize },

    #[error("series would need a negative power of q ({0})")]
    NegativeExponent(String),

    #[error("{what} = {requested} exceeds the budget {cap}")]
    BudgetExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("operand built to order {got}, comparison requires order {want}")]
    OrderMismatch { want: usize, got: usize },

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
