use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not a rotation: {0}")]
    NotARotation(String),
    #[error("triangle rule violated: |{l} - {lp}| <= {big_l} <= {l} + {lp} fails")]
    TriangleViolation { l: usize, lp: usize, big_l: usize },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("imaginary residue {residue:e} exceeds tolerance {tolerance:e}")]
    ImaginaryResidue { residue: f64, tolerance: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("invalid Zernike index: n={n}, l={l} (need n >= l and 2 | n - l)")]
    BadZernikeIndex { n: usize, l: usize },
    #[error("band limit mismatch: {0}")]
    BandLimitMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
