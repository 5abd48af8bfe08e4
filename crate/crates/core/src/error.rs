use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("zero polynomial has no factorization")]
    ZeroPolynomial,
    #[error("coset enumeration exceeded budget of {0} cosets")]
    BudgetExceeded(usize),
    #[error("subgroup generator does not lie in the parent subgroup: {0}")]
    Membership(String),
    #[error("module action invalid: {0}")]
    ActionInvalid(String),
    #[error("modules are over different groups")]
    GroupMismatch,
    #[error("invalid subgroup: {0}")]
    SubgroupInvalid(String),
    #[error("group is not a finite p-group: {0}")]
    NonPGroup(String),
    #[error("lattice not classifiable: {0}")]
    NotClassifiable(String),
    #[error("index of subgroup is infinite or not reachable within budget")]
    IndexInfinite,
    #[error("syntax error at {start}..{end}: {msg}")]
    Syntax { msg: String, start: usize, end: usize },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
