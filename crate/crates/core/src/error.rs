use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("exponent {0} must be at least 1")]
    BadExponent(u32),
    #[error("modulus {p}^{e} does not fit below 2^62")]
    ModulusTooLarge { p: u64, e: u32 },
    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: i128, modulus: u64 },
    #[error("Jacobi denominator {0} must be odd and positive")]
    BadDenominator(i128),
    #[error("zero has no p-adic unit part")]
    ZeroInput,
    #[error("division would produce negative valuation ({numerator} - {denominator})")]
    NegativeValuation { numerator: u32, denominator: u32 },
    #[error("operands live in different moduli")]
    ModulusMismatch,
    #[error("{0} is not divisible by p")]
    NotDivisible(u64),
    #[error("parameters outside the domain of {id}: {reason}")]
    Domain { id: String, reason: String },
    #[error("weight precondition violated: {0}")]
    WeightDomain(String),
    #[error("sum of {terms} terms exceeds the budget of {budget}")]
    BudgetExceeded { terms: u64, budget: u64 },
    #[error("unknown check id {0:?}")]
    UnknownCheckId(String),
    #[error("{id} requires parameter {param}")]
    MissingParameter { id: String, param: &'static str },
    #[error("equivalent closed forms of {id} disagree at p = {p}")]
    InconsistentForms { id: String, p: u64 },
    #[error("checkpoint is corrupt: {0}")]
    CheckpointCorrupt(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(id: &str, reason: impl Into<String>) -> Error {
    Error::Domain {
        id: id.to_string(),
        reason: reason.into(),
    }
}
