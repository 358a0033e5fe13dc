use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("generator index {index} is outside a basis of rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("cannot parse word: {0}")]
    Parse(String),

    #[error("operands are defined over different bases")]
    BasisMismatch,

    #[error("endomorphism is not an automorphism")]
    NotAutomorphism,

    #[error("endomorphism is not an isometry of the word metric: |{word}| changes to {image_len}")]
    NotIsometry { word: String, image_len: usize },

    #[error("generating set is invalid: {0}")]
    InvalidGeneratingSet(String),

    #[error("generating set does not generate the free group")]
    DoesNotGenerate,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("search budget of {budget} node expansions exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("invalid input file: {0}")]
    Format(String),
}

impl Error {
    /// True for errors caused by an exhausted resource budget rather than
    /// by the input itself.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
