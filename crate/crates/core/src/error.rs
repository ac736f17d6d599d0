use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("graph is not a tree: {0}")]
    NotATree(String),
    #[error("adjacency matrix is not negative definite: leading minor of order {order} is {value}")]
    NotNegativeDefinite { order: usize, value: i128 },
    #[error("singular adjacency matrix")]
    Singular,
    #[error("omega is integral at vertex {vertex}")]
    OmegaIntegral { vertex: String },
    #[error("B*omega is not in 2Z^V: entry at vertex {vertex} is {value}")]
    OmegaNotAdmissible { vertex: String, value: String },
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("level r = {0} is not allowed (need r >= 2 and r mod 4 != 0)")]
    BadLevel(i64),
    #[error("integer argument {0} rejected by d(alpha)")]
    IntegerAlpha(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("jet truncation order {cap} too small, need {need}")]
    CapTooSmall { cap: u32, need: u32 },
    #[error("tolerance {tol:e} unreachable: {reason}")]
    ToleranceUnreachable { tol: f64, reason: String },
    #[error("rank {rank} exceeds the quadrature cap {cap}")]
    RankCap { rank: usize, cap: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    /// Validation errors map to CLI exit code 2, numerical failures to 3.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::InvalidGraph(_)
                | Error::NotATree(_)
                | Error::NotNegativeDefinite { .. }
                | Error::Singular
                | Error::OmegaIntegral { .. }
                | Error::OmegaNotAdmissible { .. }
                | Error::Parity(_)
                | Error::BadLevel(_)
                | Error::IntegerAlpha(_)
                | Error::RankCap { .. }
                | Error::Precondition(_)
                | Error::Hypothesis(_)
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::InvalidGraph(_) => "invalid_graph",
            Error::NotATree(_) => "not_a_tree",
            Error::NotNegativeDefinite { .. } => "not_negative_definite",
            Error::Singular => "singular",
            Error::OmegaIntegral { .. } => "omega_integral",
            Error::OmegaNotAdmissible { .. } => "omega_not_admissible",
            Error::Parity(_) => "parity",
            Error::BadLevel(_) => "bad_level",
            Error::IntegerAlpha(_) => "integer_alpha",
            Error::Pole(_) => "pole",
            Error::CapTooSmall { .. } => "cap_too_small",
            Error::ToleranceUnreachable { .. } => "tolerance_unreachable",
            Error::RankCap { .. } => "rank_cap",
            Error::Precondition(_) => "precondition",
            Error::Hypothesis(_) => "hypothesis",
            Error::Internal(_) => "internal",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
