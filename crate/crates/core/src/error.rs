use thiserror::Error;

/// Every failure the library reports.
///
/// Variants fall into two families: malformed input (bad files, unknown
/// identifiers, foreign letters) and hypothesis violations, where the input is
/// well formed but a construction's preconditions or certificates do not hold.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty word")]
    EmptyWord,
    #[error("not an interior position: {pos} (word length {len})")]
    NotInteriorPosition { pos: usize, len: usize },
    #[error("word too short: length {len}, need at least 2")]
    WordTooShort { len: usize },

    #[error("empty alphabet")]
    EmptyAlphabet,
    #[error("duplicate letter `{0}`")]
    DuplicateLetter(String),
    #[error("invalid letter token `{0}`")]
    InvalidLetter(String),
    #[error("foreign letter `{0}`")]
    ForeignLetter(String),
    #[error("letter `{0}` has no image")]
    MissingImage(String),
    #[error("letter `{0}` has an empty image")]
    EmptyImage(String),
    #[error("alphabet mismatch: expected [{expected}], found [{found}]")]
    AlphabetMismatch { expected: String, found: String },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io error: {0}")]
    Io(String),
    #[error("unknown corpus entry `{0}`")]
    UnknownCorpus(String),

    #[error("hypothesis failed in {operation}: {detail}")]
    Hypothesis { operation: &'static str, detail: String },
    #[error("insufficient materialized levels: requested depth {requested}, available {available}")]
    InsufficientLevels { requested: usize, available: usize },
    #[error("language table too shallow: need words of length {needed}, table has {have}")]
    LanguageTooShallow { needed: usize, have: usize },
    #[error("language table not stabilized at level {level}, length {max_len}, depth {depth}")]
    NotStabilized { level: usize, max_len: usize, depth: usize },
    #[error("marker not syndetic at horizon {horizon}")]
    MarkerNotSyndetic { horizon: usize },
    #[error("separation failure: generator words have period {period}, not exceeding the return gap {gap}")]
    Separation { period: usize, gap: usize },
    #[error("certificate `{name}` failed: {detail}")]
    Certificate { name: &'static str, detail: String },
    #[error("cut containment violated at letter `{letter}`: {detail}")]
    CutContainment { letter: String, detail: String },
    #[error("insufficient depth for properization: {detail}")]
    InsufficientDepthProperize { detail: String },
    #[error("contraction budget exhausted: {detail}")]
    ContractionBudget { detail: String },
    #[error("not in generated language at this depth")]
    NotInGeneratedLanguage,
    #[error("local code has no entry for window `{0}`")]
    MissingCodeEntry(String),
    #[error("commutation failure at level {level}: {identity}")]
    Commutation { level: usize, identity: String },
    #[error("internal consistency error: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors signalling that well-formed input violates a hypothesis
    /// of the requested construction.
    pub fn is_hypothesis_violation(&self) -> bool {
        !matches!(
            self,
            Error::Parse { .. }
                | Error::Io(_)
                | Error::UnknownCorpus(_)
                | Error::InvalidLetter(_)
                | Error::DuplicateLetter(_)
                | Error::EmptyAlphabet
                | Error::ForeignLetter(_)
                | Error::MissingImage(_)
                | Error::EmptyImage(_)
        )
    }

    pub(crate) fn hypothesis(operation: &'static str, detail: impl Into<String>) -> Self {
        Error::Hypothesis {
            operation,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
