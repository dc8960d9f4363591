//! Error type shared across the simulation primitives.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration field failed validation. `field` names the offending
    /// parameter so callers can surface it verbatim.
    #[error("invalid {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    /// Link distances must be strictly positive.
    #[error("distance must be positive, got {0} m")]
    NonPositiveDistance(f64),

    /// More spatial streams were requested than the channel can support.
    #[error("requested {requested} streams but the channel has numerical rank {rank}")]
    RankDeficient { requested: usize, rank: usize },

    /// Steering-based beamforming needs at least as many propagation paths as
    /// beams.
    #[error("requested {requested} beams but only {available} paths are available")]
    InsufficientPaths { requested: usize, available: usize },

    /// The combiner Gram matrix W^H W is singular, e.g. because two combiner
    /// columns coincide; the noise-whitening step is then undefined.
    #[error("combiner Gram matrix is singular: combiner columns are linearly dependent")]
    SingularCombiner,

    /// The pilot block does not have orthogonal rows, so the least-squares
    /// de-spreading step would mix estimates across transmit antennas.
    #[error("pilot rows are not orthogonal (max off-diagonal energy {max_off_diagonal:.3e} of the diagonal)")]
    NonOrthogonalPilots { max_off_diagonal: f64 },

    /// Orthogonal pilots need a training length of at least one symbol per
    /// transmit antenna.
    #[error("training length {tau_p} is shorter than the {n_tx} transmit antennas, orthogonal pilots do not exist")]
    PilotsTooShort { n_tx: usize, tau_p: usize },

    /// An operation that divides by the matrix energy received an all-zero
    /// matrix.
    #[error("matrix is identically zero")]
    ZeroMatrix,

    /// Steering beams are built from path angles; an entry-wise channel
    /// estimate carries no angle information.
    #[error("steering beamformers require path angle estimates, but only an entry-wise channel estimate is available")]
    SteeringNeedsPaths,

    /// Catch-all for numerical failures that indicate a bug or severe
    /// ill-conditioning rather than a caller error.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Shorthand for [`Error::InvalidConfig`].
    pub fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field,
            reason: reason.into(),
        }
    }
}
