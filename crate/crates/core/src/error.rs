use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("wrong source mode: {0}")]
    WrongMode(String),

    #[error("transverse projection undefined at k = 0")]
    ZeroWaveVector,

    #[error("quadrature did not converge: {0}")]
    NonConverged(String),

    #[error("singular overlap: {0}")]
    SingularOverlap(String),

    #[error("principal value extrapolation unstable: spread {spread:.3e} vs value {value:.3e}")]
    PvUnstable { spread: f64, value: f64 },

    #[error("momentum cutoff too low: damping sensitivity {sensitivity:.3e}")]
    CutoffTooLow { sensitivity: f64 },

    #[error("grid too coarse: stencil estimates at h and 2h differ by {disagreement:.1}%")]
    GridTooCoarse { disagreement: f64 },

    #[error("sampled current format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
