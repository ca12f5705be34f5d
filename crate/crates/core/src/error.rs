use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid atlas: {0}")]
    InvalidAtlas(String),

    /// The chart presentations of a would-be diffeomorphism disagree on the
    /// overlap. `residual` renders `b⁻¹ ∘ expected` when it could be formed.
    #[error("incompatible presentations (max deviation {deviation:e}): {residual}")]
    IncompatiblePresentations { residual: String, deviation: f64 },

    #[error("glue infeasible at eps = {eps}: A = {area} is not positive")]
    GlueInfeasible { eps: f64, area: f64 },

    #[error("charts are not joinable: {0}")]
    NotJoinable(String),

    #[error("join at chain index {index} failed: {source}")]
    Chain {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    /// An internal cross-check between two independent routes disagreed.
    #[error("verification failed: {0}")]
    Verification(String),

    #[error("numeric certificate inconclusive: {0}")]
    Indeterminate(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
