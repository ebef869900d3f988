use thiserror::Error;

/// Failure modes shared by every stage of the pipeline.
///
/// The CLI maps these onto exit codes through [`Error::exit_class`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed morphism: {0}")]
    MalformedSpec(String),
    #[error("morphism is not marked: {0}")]
    NotMarked(String),
    #[error("image of 0 must start with 0 for the fixed point to exist")]
    NoFixedPoint,
    #[error("morphism is outside class Q: {0}")]
    NotInQ(String),
    #[error("prefix of length {requested} exceeds the cap of {cap} symbols")]
    LengthCapExceeded { requested: usize, cap: usize },
    #[error("suffixes at {i} and {j} agree on {cap} symbols")]
    LookaheadCapExceeded { i: usize, j: usize, cap: usize },
    #[error("no synchronization length found up to {bound}")]
    NotCircular { bound: usize },
    #[error("{what} did not stabilize before the prefix cap of {cap} symbols")]
    StabilizationCapExceeded { what: String, cap: usize },
    #[error("word of length {len} is shorter than the synchronization length {sync_length}")]
    TooShort { len: usize, sync_length: usize },
    #[error("{0} is not a factor of the fixed point")]
    NotAFactor(String),
    #[error("{0} is not a special factor")]
    NotSpecial(String),
    #[error("{word} sits on the narrow/wide boundary below its first bad ancestor")]
    DegenerateBoundary { word: String },
    #[error("patterns have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("count overflow while evaluating {context}")]
    ArithmeticOverflow { context: String },
    #[error("unknown seed {seed} for kind {kind}")]
    UnknownSeed { seed: String, kind: String },
    #[error("lambda({n}) would be negative: sum_f = {sum_f}, sum_g = {sum_g}")]
    NegativeResult { n: u64, sum_f: String, sum_g: String },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Coarse outcome classes, one per CLI exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    Malformed,
    NotInQ,
    Cap,
    Invariant,
}

impl Error {
    pub fn exit_class(&self) -> ExitClass {
        match self {
            Error::MalformedSpec(_)
            | Error::NotMarked(_)
            | Error::NoFixedPoint
            | Error::InvalidArgument(_)
            | Error::LengthMismatch { .. } => ExitClass::Malformed,
            Error::NotInQ(_) => ExitClass::NotInQ,
            Error::LengthCapExceeded { .. }
            | Error::LookaheadCapExceeded { .. }
            | Error::NotCircular { .. }
            | Error::StabilizationCapExceeded { .. }
            | Error::ArithmeticOverflow { .. } => ExitClass::Cap,
            Error::TooShort { .. }
            | Error::NotAFactor(_)
            | Error::NotSpecial(_)
            | Error::DegenerateBoundary { .. }
            | Error::UnknownSeed { .. }
            | Error::NegativeResult { .. }
            | Error::InvariantViolation(_) => ExitClass::Invariant,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
