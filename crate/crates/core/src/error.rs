use thiserror::Error;

pub type Result<T> = std::result::Result<T, CasqError>;

#[derive(Debug, Error)]
pub enum CasqError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("missing FCIDUMP header (NORB not found)")]
    MissingHeader,

    #[error("line {line}: orbital index {index} outside [0, {norb}]")]
    IndexOutOfRange {
        line: usize,
        index: i64,
        norb: usize,
    },

    #[error("section {section}: expected {expected} values, found {found}")]
    ElementCount {
        section: String,
        expected: usize,
        found: usize,
    },

    #[error("{what}: symmetry violation {residual:.3e} exceeds {threshold:.1e}")]
    Symmetry {
        what: String,
        residual: f64,
        threshold: f64,
    },

    #[error("invalid active space: {0}")]
    InvalidSpace(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error(
        "Davidson did not converge after {iterations} iterations (max residual {max_residual:.3e})"
    )]
    NotConverged {
        iterations: usize,
        residuals: Vec<f64>,
        max_residual: f64,
    },

    #[error("space of {size} determinants exceeds dense cap {cap}")]
    TooLarge { size: usize, cap: usize },

    #[error("state annihilated by S-: norm {0:.3e}")]
    Annihilated(f64),

    #[error("multiplet consistency: {0}")]
    Multiplet(String),

    #[error("Kramers pairing failed: {0}")]
    Kramers(String),

    #[error("sum-over-states invalid: excitation energy {0:.3e} Hartree below threshold")]
    DegenerateGround(f64),

    #[error("numerical invariant violated: {0}")]
    Invariant(String),
}

impl CasqError {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        CasqError::Parse {
            line,
            msg: msg.into(),
        }
    }
}
