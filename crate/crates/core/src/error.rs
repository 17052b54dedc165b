use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the workbench can report.
///
/// Each variant carries a stable machine-readable code (see [`Error::code`]) so
/// front ends can map failures onto exit codes without matching on messages.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("predicted {predicted} tuples exceeds the size cap of {cap}")]
    SizeCapExceeded { predicted: u128, cap: u64 },

    #[error("cannot combine an exact set with a float set")]
    ModeMismatch,

    #[error("need at least {required} elements, got {actual}")]
    TooSmall { required: usize, actual: usize },

    #[error("bad interval: lower end {lo} is not below upper end {hi}")]
    BadInterval { lo: String, hi: String },

    #[error("invalid signed-sum shape ({plus},{minus}): at least one summand is required")]
    InvalidSpec { plus: u32, minus: u32 },

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },

    #[error("domain error in {node}: argument {argument}")]
    Domain { node: String, argument: String },

    #[error("{found} sign changes exceed the limit of {max_pieces} pieces")]
    TooManyPieces { found: usize, max_pieces: usize },

    #[error("polynomial degree {degree} is below the required {required}")]
    DegreeTooLow { degree: usize, required: usize },

    #[error("empty working domain: {0}")]
    EmptyDomain(String),

    #[error("set is {order}-convex but order {required} is required")]
    NotConvex { order: usize, required: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("map is not injective: indices {first} and {second} give the same pair")]
    InjectivityViolation { first: usize, second: usize },

    #[error("need at least {required} elements for the tuple, got {actual}")]
    TooFewElements { required: usize, actual: usize },

    #[error("only {found} disjoint translates found, expected at least {expected}")]
    DisjointTranslateShortfall { found: usize, expected: usize },

    #[error("degenerate fit: {0}")]
    Degenerate(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("numeric verdict inconclusive: max |W| = {max_wronskian}, best residual = {best_residual}")]
    Inconclusive { max_wronskian: String, best_residual: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::SizeCapExceeded { .. } => "size_cap_exceeded",
            Error::ModeMismatch => "mode_mismatch",
            Error::TooSmall { .. } => "too_small",
            Error::BadInterval { .. } => "bad_interval",
            Error::InvalidSpec { .. } => "invalid_spec",
            Error::Syntax { .. } => "syntax_error",
            Error::UnknownFunction { .. } => "unknown_function",
            Error::Domain { .. } => "domain_error",
            Error::TooManyPieces { .. } => "too_many_pieces",
            Error::DegreeTooLow { .. } => "degree_too_low",
            Error::EmptyDomain(_) => "empty_domain",
            Error::NotConvex { .. } => "not_convex",
            Error::PreconditionViolated(_) => "precondition_violated",
            Error::InjectivityViolation { .. } => "injectivity_violation",
            Error::TooFewElements { .. } => "too_few_elements",
            Error::DisjointTranslateShortfall { .. } => "disjoint_translate_shortfall",
            Error::Degenerate(_) => "degenerate",
            Error::HypothesisViolated(_) => "hypothesis_violated",
            Error::Inconclusive { .. } => "inconclusive",
            Error::InvalidInput(_) => "invalid_input",
            Error::Io(_) => "io_error",
        }
    }

    /// Whether the failure is a resource limit rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::SizeCapExceeded { .. } | Error::Io(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
