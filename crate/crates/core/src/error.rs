use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series coefficient {index} is not finite")]
    NonFiniteCoefficient { index: usize },

    #[error("division by a series whose constant term {constant} is not a unit")]
    DivisionByNonUnit { constant: Complex64 },

    #[error("logarithm of a series with vanishing constant term {constant}")]
    LogOfZeroConstantTerm { constant: Complex64 },

    #[error("cannot divide by z: constant term {constant} does not vanish")]
    NonVanishingConstantTerm { constant: Complex64 },

    #[error("radius {radius} outside the open interval (0, 1)")]
    RadiusOutOfRange { radius: f64 },

    #[error("Cauchy transform requested at |w| = {modulus} <= 1")]
    EvaluationOutsideDomain { modulus: f64 },

    #[error(
        "real part {max_real} > 0 found at sampled point; not the logarithm of a bounded function"
    )]
    NotAHerglotzLogarithm { max_real: f64 },

    #[error("word is not alternating at position {position}")]
    WordNotAlternating { position: usize },

    #[error("combinatorial oracle limited to n <= 10, got {n}")]
    OrderTooLargeForOracle { n: usize },

    #[error("operator model dimension {dim} exceeds 4096")]
    DimensionTooLarge { dim: usize },

    #[error("operator model requires atomic measures")]
    NotAtomic,

    #[error("F vanishes identically")]
    ZeroFunction,

    #[error("F vanishes at the origin")]
    ZeroAtOrigin,

    #[error("F has a zero on the contour |z| = {radius} (min modulus {min_modulus})")]
    ZeroOnContour { radius: f64, min_modulus: f64 },

    #[error("measure is not infinitely divisible: {reason}")]
    NotDivisible { reason: String },

    #[error("parameter {name} = {value} out of range")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error("failed to bracket a root on branch {branch}")]
    RootBracketingFailure { branch: i64 },

    #[error("Blaschke zero at |alpha| = {modulus} > 0.95 is too close to the circle")]
    ConditioningWarning { modulus: f64 },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("composition check failed: deviation {deviation} exceeds {tolerance}")]
    VerificationFailed { deviation: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
