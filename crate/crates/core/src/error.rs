use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("citation {citing} -> {cited} references an unknown paper id")]
    UnknownEndpoint { citing: String, cited: String },

    #[error("duplicate paper id {0}")]
    DuplicatePaper(String),

    #[error("empty network: no citations survive filtering")]
    EmptyNetwork,

    #[error("paper {paper} makes {citations} citation(s) but has no eligible papers to cite")]
    EmptyEligibleSet { paper: String, citations: usize },

    #[error("expected citations do not match the network: {0}")]
    ModelMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("oracle refuses networks with {papers} papers (limit {limit})")]
    OracleTooLarge { papers: usize, limit: usize },

    #[error("network has no citations; the teleport distribution is undefined")]
    NoCitations,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
