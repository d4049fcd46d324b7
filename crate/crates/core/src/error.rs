use thiserror::Error;

/// Errors raised by the kernels, models, samplers and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix of size {size} exceeds the {kernel} limit of {limit}")]
    SizeLimit {
        kernel: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not unitary: max |U^dag U - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not symmetric: max |B - B^T| = {deviation:e}")]
    NotSymmetric { deviation: f64 },

    #[error("index {index} out of range for {len} modes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("outcome {outcome} is not in the sector: {reason}")]
    OutsideSector { outcome: String, reason: String },

    #[error("photon cap exceeded: {total} > {cap}")]
    PhotonCap { total: usize, cap: usize },

    #[error("sector cardinality {cardinality} exceeds the enumeration cap {cap}")]
    EnumerationCap { cardinality: u128, cap: u128 },

    #[error("outcome {0} has zero ideal probability")]
    ZeroProbability(String),

    #[error("support violation at outcome {0}")]
    Support(String),

    #[error("all scores are zero")]
    AllZeroScores,

    #[error("{indicator} is not defined for the {family} family")]
    FamilyMismatch { indicator: String, family: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical breakdown: {0}")]
    Numerical(String),

    #[error("variant mismatch: {0}")]
    VariantMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
