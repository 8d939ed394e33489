use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the spectral toolkit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("lattice basis is singular (|det| = {det:e})")]
    SingularBasis { det: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("eigensolver did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("plane-wave window not converged: eigenvalue {value} moved by {shift:e}")]
    WindowNotConverged { value: f64, shift: f64 },

    #[error("lattice vector {index:?} is outside the plane-wave window")]
    IndexOutsideWindow { index: Vec<i64> },

    #[error("parameter inequality violated: {name} ({detail})")]
    CascadeInequalityViolated { name: &'static str, detail: String },

    #[error("point with |x| = {norm} lies outside the shell ({inner}, {outer})")]
    ShellViolation { norm: f64, inner: f64, outer: f64 },

    #[error("point is not in the non-resonance domain (level {level})")]
    NotNonResonant { level: usize },

    #[error("point is not resonant")]
    NotResonant,

    #[error("point lies in {level} independent resonance zones at once")]
    FullRankResonance { level: usize },

    #[error("small denominator {value:e} for partial sums {tuple:?}")]
    SmallDenominator { tuple: Vec<Vec<i64>>, value: f64 },

    #[error("series value has a non-negligible imaginary part {imag:e} (real part {real:e})")]
    ComplexSeries { real: f64, imag: f64 },

    #[error("series order {requested} exceeds the cap {cap}")]
    OrderCapExceeded { requested: usize, cap: usize },

    #[error("no eigenpair within {halfwidth} of prediction {prediction}")]
    NoCandidate { prediction: f64, halfwidth: f64 },

    #[error("resonance directions are empty")]
    EmptyDirections,

    #[error("resonance directions are linearly dependent")]
    DependentDirections,

    #[error("dominant coefficient weight {weight} is below 1/2")]
    PhaseDegenerate { weight: f64 },

    #[error("no sign change of F - target on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("band table does not cover energy {needed} (top band minimum {top_min})")]
    InsufficientBands { needed: f64, top_min: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
