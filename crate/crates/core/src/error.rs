use thiserror::Error;

/// Errors raised by the spectral toolkit.
///
/// Variants map one-to-one onto the failure modes of the individual
/// operations; the CLI turns all of them into exit code 3.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coefficient lists must be nonempty")]
    EmptyCoefficients,

    #[error("hopping coefficient a_{index} = {value} is not strictly positive")]
    NonPositiveHopping { index: usize, value: f64 },

    #[error("coefficient lists differ in length (a has {a}, b has {b})")]
    LengthMismatch { a: usize, b: usize },

    #[error("x = {x} is not in the open band interior (|Δ(x)| = {abs_delta} ≥ 2)")]
    OutsideBandInterior { x: f64, abs_delta: f64 },

    #[error("found {found} band edges, expected {expected}")]
    RootCountMismatch { found: usize, expected: usize },

    #[error("eigenvalue candidate {value} lies inside band {band}")]
    EigenvalueInBand { value: f64, band: usize },

    #[error("x = {x} is outside the continuous spectrum")]
    OutsideSpectrum { x: f64 },

    #[error("derivative of order {order} is singular at φ = {phi} in band {band}")]
    DerivativeSingularity { band: usize, phi: f64, order: usize },

    #[error("band index {index} out of range 1..={bands}")]
    BandIndex { index: usize, bands: usize },

    #[error("norm sum diverges at E = {value}: not an eigenvalue")]
    DivergentNormSum { value: f64 },

    #[error("quadrature needs {needed} nodes, budget is {budget}")]
    QuadratureBudgetExceeded { needed: usize, budget: usize },

    #[error("truncation size {size} exceeds cap {cap}")]
    TruncationTooLarge { size: usize, cap: usize },

    #[error("stored range of {stored} sites does not cover the wavefront at site {required}")]
    RangeTooSmall { stored: usize, required: usize },

    #[error("need at least {required} points with t ≥ t_min, got {found}")]
    InsufficientPoints { found: usize, required: usize },

    #[error("norm at t = {t} is not positive ({value})")]
    NonPositiveNorm { t: f64, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
