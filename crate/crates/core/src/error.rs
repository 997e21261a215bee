use thiserror::Error;

pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Debug, Error)]
pub enum SimError {
    /// A parameter violated its documented range. `field` is a dotted path
    /// such as `serverfi.lambda`.
    #[error("{field} {reason}")]
    InvalidParam { field: String, reason: String },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("repeat {repeat_index} has {found} records, expected {expected}")]
    LengthMismatch {
        repeat_index: usize,
        found: usize,
        expected: usize,
    },

    #[error("no repeats to aggregate")]
    NoRepeats,

    #[error("series has {len} iterations, at least {min} required")]
    SeriesTooShort { len: usize, min: usize },

    #[error("malformed series csv: {0}")]
    MalformedCsv(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl SimError {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        SimError::InvalidParam {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Prefix the field path of an [`SimError::InvalidParam`] with a section name.
    pub(crate) fn in_section(self, section: &str) -> Self {
        match self {
            SimError::InvalidParam { field, reason } => SimError::InvalidParam {
                field: format!("{section}.{field}"),
                reason,
            },
            other => other,
        }
    }

    /// True for failures caused by the filesystem rather than by input content.
    pub fn is_io(&self) -> bool {
        matches!(self, SimError::Io(_))
    }
}

impl From<csv::Error> for SimError {
    fn from(err: csv::Error) -> Self {
        if err.is_io_error() {
            match err.into_kind() {
                csv::ErrorKind::Io(io) => SimError::Io(io),
                other => SimError::MalformedCsv(format!("{other:?}")),
            }
        } else {
            SimError::MalformedCsv(err.to_string())
        }
    }
}
