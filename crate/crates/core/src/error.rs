use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: expected at least 2 columns, got {content:?}")]
    MalformedLine { line: usize, content: String },
    #[error("corpus contains no tokens")]
    EmptyCorpus,
    #[error("corpus is already in the {0} scheme")]
    WrongScheme(&'static str),
    #[error("requested {requested} tokens but only {available} are available")]
    NotEnoughTokens { requested: usize, available: usize },
    #[error("line {line}: vector has dimension {found}, expected {expected}")]
    InconsistentDim {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("cannot read {path}: {source}")]
    UnreadableFile {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("alpha {alpha} outside [{min}, 1] for {classes} labels")]
    AlphaOutOfRange { alpha: f64, min: f64, classes: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown task {0}")]
    UnknownTask(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("variable x{} is not bound (row has {available} values)", .index + 1)]
    UnboundVariable { index: usize, available: usize },
    #[error("cannot parse expression: {0}")]
    ExprParse(String),
    #[error("need at least {required} records, got {found}")]
    TooFewRecords { required: usize, found: usize },
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad user input or configuration, as opposed
    /// to failures while doing the work.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) | Error::UnreadableFile { .. }
        )
    }
}
