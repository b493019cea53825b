//! Multiplicative boolean convolution of probability measures on the unit circle.
//!
//! A probability measure `μ` on the circle is encoded by
//!
//! ```text
//! ψ_μ(z) = ∫ xz/(1−xz) dμ(x) = Σ_{k≥1} m_k z^k,      F_μ(z) = ψ_μ(z) / (z (1 + ψ_μ(z))),
//! ```
//!
//! and the boolean convolution is the measure whose `F` is the pointwise product
//! `F_μ · F_ν`. The crate provides
//!
//! * [`series`]: truncated power-series arithmetic carrying ψ, F and their logarithms,
//! * [`measure`]: measure representations, moment validation, Poisson smoothing,
//! * [`transform`]: ψ/F transforms, Cauchy transform, Herglotz analysis and synthesis,
//! * [`convolution`]: the convolution and two brute-force oracles (moment combinatorics
//!   and an explicit operator model),
//! * [`levy`]: infinite divisibility, characteristic pairs, roots and semigroups,
//! * [`gallery`]: closed-form example measures and the B·S·O composition,
//! * [`json`]: the JSON wire formats shared with the command-line tool.

pub mod convolution;
pub mod error;
pub mod gallery;
pub mod json;
pub mod levy;
pub mod measure;
pub mod random;
pub mod series;
pub mod transform;

pub use num_complex::Complex64;

pub use convolution::{
    boolean_word_moment, convolve, convolve_power, product_moments_combinatorial, Letter,
    OperatorPairModel,
};
pub use error::{Error, Result};
pub use levy::{CharacteristicPair, DivisibilityVerdict, ZeroWitness};
pub use measure::{AtomicMeasure, CircleMeasure, FiniteCircleMeasure};
pub use series::TruncatedSeries;
pub use transform::{BlaschkeFactor, HerglotzData, StructuredF};

/// Default number of moments carried through every computation.
pub const DEFAULT_ORDER: usize = 32;

/// Reduce an angle into `[0, 2π)`.
pub fn canonical_angle(theta: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let r = theta.rem_euclid(two_pi);
    // rem_euclid can round up to exactly 2π for tiny negative inputs, and keeps −0
    if r >= two_pi || r == 0.0 {
        0.0
    } else {
        r
    }
}
