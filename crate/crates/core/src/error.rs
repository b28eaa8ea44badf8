use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// The flux through the torus is not an integer number of flux quanta.
    #[error("flux is not quantized: L1*L2/pi = {ratio} (fractional part {fractional:.6})")]
    NonIntegralFlux { ratio: f64, fractional: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coefficient index {n} is not congruent to nu = {nu} modulo N = {flux}")]
    IndexMismatch { n: i64, nu: usize, flux: u32 },

    #[error("sections live on different geometries")]
    GeometryMismatch,

    #[error("section has zero norm")]
    ZeroNorm,

    #[error("cocycle sum is not constant on triangle {triangle} (spread {spread:e})")]
    NotConstant { triangle: usize, spread: f64 },

    #[error("{re} + {im}i is not a period of the torus")]
    NotAPeriod { re: f64, im: f64 },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
