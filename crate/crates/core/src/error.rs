use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("tolerance must be positive")]
    NonpositiveTolerance,

    #[error("level {level} is not strictly inside the range ({low}, {high}) of the cumulative on [0, 1]")]
    LevelOutOfRange {
        level: String,
        low: String,
        high: String,
    },

    #[error("density has zero mass on [0, 1]")]
    ZeroMass,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("node `{0}` has already been split")]
    AlreadySplit(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("generation {generation} is beyond the built schedule (last direction-change generation {max})")]
    GenerationOutOfRange { generation: u32, max: u32 },

    #[error("level r = {r} is outside the built schedule 1..={levels}")]
    LevelIndexOutOfRange { r: u32, levels: u32 },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },

    #[error("inconsistent model document: {0}")]
    Consistency(String),

    #[error("invalid omega specification: {0}")]
    Omega(String),
}

impl Error {
    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
