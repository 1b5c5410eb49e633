use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown template `{0}`")]
    NotFound(String),

    #[error("invalid template: {0}")]
    InvalidTemplate(String),

    #[error(
        "ambiguous contact geometry: points at distance {distance:e} (tolerance {tolerance:e})"
    )]
    GeometryAmbiguity { distance: f64, tolerance: f64 },

    #[error("vertex {vertex} has no child cell (interior vertex)")]
    NoChildAtVertex { vertex: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate exponent in equation {0}")]
    DegenerateExponent(String),

    #[error("symmetry {0} does not permute the cell layout")]
    InvalidGlobalSymmetry(String),

    #[error("free-parameter oracles disagree for {representative}: ift={ift}, rank={rank}")]
    OracleDisagreement {
        representative: String,
        ift: usize,
        rank: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
