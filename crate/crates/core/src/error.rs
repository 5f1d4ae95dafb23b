use thiserror::Error;

/// Which of the section conditions on a pair of Goursat quintuples failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Condition {
    S3,
    S4,
    S5,
    S6,
    S7,
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("multiplication table is not associative at ({0}, {1}, {2})")]
    NonAssociative(usize, usize, usize),
    #[error("index 0 is not a two-sided identity")]
    NoIdentity,
    #[error("table or generator set is not closed: {0}")]
    NotClosed(String),
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("group order {order} exceeds the configured cap {cap}")]
    OrderLimitExceeded { order: usize, cap: usize },
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("subgroups belong to different parent groups")]
    MixedParents,
    #[error("element set is not a subgroup")]
    NotSubgroup,
    #[error("map is not an isomorphism")]
    NotIso,
    #[error("ambient group is not a direct product")]
    NotAProduct,
    #[error("middle groups do not agree")]
    MiddleMismatch,
    #[error("elements live in different spaces")]
    SpaceMismatch,
    #[error("section condition {0} violated")]
    ConditionViolated(Condition),
    #[error("pair is not in the poset of commuting normal subgroups")]
    NotInPoset,
    #[error("crossed module axiom failed: {0}")]
    AxiomFailed(String),
    #[error("pair of maps is not an automorphism of the crossed module")]
    NotAutomorphism,
    #[error("supplied partition does not match the poset")]
    PartitionMismatch,
    #[error("matrix decomposition mismatch: {0}")]
    DecompositionMismatch(String),
    #[error("identity check failed: {0}")]
    IdentityFailed(String),
    #[error("catalog is incomplete for order {order}")]
    IncompleteCatalog { order: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonAssociative(..) => "non_associative",
            Error::NoIdentity => "no_identity",
            Error::NotClosed(_) => "not_closed",
            Error::NoInverse(_) => "no_inverse",
            Error::OrderLimitExceeded { .. } => "order_limit_exceeded",
            Error::NotNormal => "not_normal",
            Error::MixedParents => "mixed_parents",
            Error::NotSubgroup => "not_subgroup",
            Error::NotIso => "not_iso",
            Error::NotAProduct => "not_a_product",
            Error::MiddleMismatch => "middle_mismatch",
            Error::SpaceMismatch => "space_mismatch",
            Error::ConditionViolated(_) => "condition_violated",
            Error::NotInPoset => "not_in_poset",
            Error::AxiomFailed(_) => "axiom_failed",
            Error::NotAutomorphism => "not_automorphism",
            Error::PartitionMismatch => "partition_mismatch",
            Error::DecompositionMismatch(_) => "decomposition_mismatch",
            Error::IdentityFailed(_) => "identity_failed",
            Error::IncompleteCatalog { .. } => "incomplete_catalog",
            Error::Invalid(_) => "invalid",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
