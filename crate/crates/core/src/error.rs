use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid candidate set: {0}")]
    InvalidCandidates(String),

    #[error("invalid ranking: {0}")]
    InvalidRanking(String),

    #[error("rankings do not rank the same set of candidates")]
    MismatchedRankings,

    #[error("prefix length {k} out of range 1..={len}")]
    PrefixOutOfRange { k: usize, len: usize },

    #[error("invalid group assignment: {0}")]
    InvalidGroups(String),

    #[error("invalid fairness spec: {0}")]
    InvalidSpec(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ideal DCG is zero, NDCG is undefined")]
    ZeroIdealDcg,

    /// No ranking satisfies the prefix constraints. `prefix` is the first
    /// prefix length at which the constraint system cannot be met.
    #[error("no fair ranking exists: constraints cannot be met at prefix {prefix} ({detail})")]
    Infeasible { prefix: usize, detail: String },

    #[error(
        "minimum counts unsatisfiable: group {group} needs {required} members by prefix {prefix} but has {available}"
    )]
    Unsatisfiable {
        group: usize,
        prefix: usize,
        required: usize,
        available: usize,
    },

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
}

impl Error {
    /// True for the errors that mean "no ranking meets the constraints".
    pub fn is_infeasibility(&self) -> bool {
        matches!(self, Error::Infeasible { .. } | Error::Unsatisfiable { .. })
    }
}
