use thiserror::Error;

/// Errors shared across all modules.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zero is not allowed here: {0}")]
    ZeroInput(&'static str),

    #[error("{0} must be prime, got {1}")]
    NotPrime(&'static str, u64),

    #[error("{0} must be a prime power >= 2, got {1}")]
    NotPrimePower(&'static str, u64),

    #[error("element {elem} is not representable in {field}: {reason}")]
    NotInField {
        elem: String,
        field: String,
        reason: String,
    },

    #[error("fields of characteristic 2 are not supported here")]
    CharacteristicTwo,

    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),

    #[error("invalid Brauer invariant vector: {0}")]
    InvalidInvariants(String),

    #[error("degenerate quadratic form: {0}")]
    Degenerate(String),

    #[error("rank constraint violated: {0}")]
    BadRank(String),

    #[error("place {0} is incompatible with field {1}")]
    BadPlace(String, String),

    #[error("enumeration over the rationals requires an explicit window (torsion bound and place support)")]
    MissingWindow,

    #[error("unsupported geometry/field combination: {0}")]
    Unsupported(String),

    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error(
        "curves of genus {0} are not supported: their twist stabilizers depend on \
         relative Brauer groups of higher-genus function fields, which is open arithmetic"
    )]
    HigherGenus(u32),

    #[error("invalid quiver or species: {0}")]
    BadQuiver(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
