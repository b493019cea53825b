//! Measures on the unit circle: probability measures in three representations,
//! the finite measures appearing in characteristic pairs, moment validation,
//! Poisson smoothing and radial atom-mass limits.

use std::f64::consts::TAU;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::canonical_angle;
use crate::error::{Error, Result};
use crate::transform::StructuredF;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;
const ANGLE_SEPARATION: f64 = 1e-12;
const MOMENT_BOUND_SLACK: f64 = 1e-12;
const TOEPLITZ_EIGEN_TOLERANCE: f64 = -1e-9;
const FINITE_ATOM_TOLERANCE: f64 = 1e-10;

/// Finitely many weighted points `e^{iθ_j}` on the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    pub angles: Vec<f64>,
    pub weights: Vec<f64>,
}

impl AtomicMeasure {
    /// Angles are reduced into `[0, 2π)`. No normalization is applied to the weights.
    pub fn new(angles: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if angles.len() != weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} angles but {} weights",
                angles.len(),
                weights.len()
            )));
        }
        if angles.iter().chain(&weights).any(|x| !x.is_finite()) {
            return Err(Error::InvalidMeasure("non-finite atom data".into()));
        }
        Ok(Self {
            angles: angles.into_iter().map(canonical_angle).collect(),
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ_j w_j e^{ikθ_j}` for any integer `k`.
    pub fn moment(&self, k: i64) -> Complex64 {
        self.angles
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| Complex64::from_polar(w, k as f64 * t))
            .sum()
    }

    pub fn points(&self) -> impl Iterator<Item = (Complex64, f64)> + '_ {
        self.angles
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| (Complex64::from_polar(1.0, t), w))
    }

    fn scaled(&self, t: f64) -> Self {
        Self {
            angles: self.angles.clone(),
            weights: self.weights.iter().map(|w| w * t).collect(),
        }
    }

    /// Smallest circular distance between two atoms, `None` for fewer than two atoms.
    fn min_separation(&self) -> Option<f64> {
        let mut sorted = self.angles.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.len() < 2 {
            return None;
        }
        let wrap = sorted[0] + TAU - sorted[sorted.len() - 1];
        Some(sorted.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::min))
    }
}

/// A finite positive measure `ρ`, stored through its total mass and the
/// conjugate moments `r_k = ∫ x^{−k} dρ(x)`, optionally with explicit atoms.
///
/// Without atoms, `ρ` is known only up to order `r.len()`; a zero-mass measure
/// is known to every order.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteCircleMeasure {
    pub mass: f64,
    pub r: Vec<Complex64>,
    pub atoms: Option<AtomicMeasure>,
}

impl FiniteCircleMeasure {
    pub fn zero() -> Self {
        Self {
            mass: 0.0,
            r: Vec::new(),
            atoms: None,
        }
    }

    /// `mass · λ`: every conjugate moment vanishes.
    pub fn haar_multiple(mass: f64, order: usize) -> Self {
        Self {
            mass,
            r: vec![Complex64::new(0.0, 0.0); order],
            atoms: None,
        }
    }

    pub fn from_atoms(atoms: AtomicMeasure, order: usize) -> Self {
        let r = (1..=order as i64).map(|k| atoms.moment(-k)).collect();
        Self {
            mass: atoms.total(),
            r,
            atoms: Some(atoms),
        }
    }

    /// Number of conjugate moments known, `None` when known to every order.
    pub fn known_order(&self) -> Option<usize> {
        if self.atoms.is_some() || self.mass == 0.0 {
            None
        } else {
            Some(self.r.len())
        }
    }

    /// `r_k` for `k ≥ 1`, or `None` past the known order.
    pub fn conj_moment(&self, k: usize) -> Option<Complex64> {
        if let Some(atoms) = &self.atoms {
            return Some(atoms.moment(-(k as i64)));
        }
        if k >= 1 && k <= self.r.len() {
            Some(self.r[k - 1])
        } else if self.mass == 0.0 {
            Some(Complex64::new(0.0, 0.0))
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mass == 0.0
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            mass: self.mass * t,
            r: self.r.iter().map(|x| x * t).collect(),
            atoms: self.atoms.as_ref().map(|a| a.scaled(t)),
        }
    }

    /// `ρ + σ`. Atoms are merged when both sides carry them.
    pub fn sum(&self, other: &Self) -> Self {
        if let (Some(a), Some(b)) = (&self.atoms, &other.atoms) {
            let mut angles = a.angles.clone();
            let mut weights = a.weights.clone();
            angles.extend_from_slice(&b.angles);
            weights.extend_from_slice(&b.weights);
            let n = self.r.len().max(other.r.len());
            return Self::from_atoms(AtomicMeasure { angles, weights }, n);
        }
        let n = match (self.known_order(), other.known_order()) {
            (None, None) => self.r.len().max(other.r.len()),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (Some(a), Some(b)) => a.min(b),
        };
        let r = (1..=n)
            .map(|k| {
                self.conj_moment(k).unwrap_or_default() + other.conj_moment(k).unwrap_or_default()
            })
            .collect();
        Self {
            mass: self.mass + other.mass,
            r,
            atoms: None,
        }
    }

    /// `∫ (x+z)/(x−z) dρ(x)`, exact for atoms and zero mass, otherwise the
    /// truncated expansion `mass + 2 Σ r_k z^k`.
    pub fn herglotz_eval(&self, z: Complex64) -> Complex64 {
        if let Some(atoms) = &self.atoms {
            return atoms.points().map(|(x, w)| w * (x + z) / (x - z)).sum();
        }
        let tail = self
            .r
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
            * z;
        Complex64::new(self.mass, 0.0) + tail * 2.0
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !self.mass.is_finite() || self.mass < 0.0 {
            out.push(Violation::NegativeMass { mass: self.mass });
            return out;
        }
        for (i, rk) in self.r.iter().enumerate() {
            if !rk.is_finite() {
                out.push(Violation::NonFinite);
                return out;
            }
            if rk.norm() > self.mass + MOMENT_BOUND_SLACK {
                out.push(Violation::MomentExceedsBound {
                    k: i + 1,
                    modulus: rk.norm(),
                    bound: self.mass,
                });
            }
        }
        if let Some(atoms) = &self.atoms {
            if atoms.angles.len() != atoms.weights.len() {
                out.push(Violation::LengthMismatch);
                return out;
            }
            if let Some(w) = atoms.weights.iter().find(|w| **w < 0.0) {
                out.push(Violation::NegativeWeight { weight: *w });
            }
            let total = atoms.total();
            if (total - self.mass).abs() > FINITE_ATOM_TOLERANCE {
                out.push(Violation::WeightSum {
                    sum: total,
                    expected: self.mass,
                });
            }
            for (i, rk) in self.r.iter().enumerate() {
                let exact = atoms.moment(-(i as i64 + 1));
                if (exact - rk).norm() > FINITE_ATOM_TOLERANCE {
                    out.push(Violation::AtomMomentMismatch { k: i + 1 });
                    break;
                }
            }
        }
        out
    }
}

/// A probability measure on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub enum CircleMeasure {
    Atomic(AtomicMeasure),
    /// `m_1..m_K`, `m_k = ∫ x^k dμ`.
    Moments(Vec<Complex64>),
    Structured(StructuredF),
}

/// A failed invariant reported by [`CircleMeasure::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    LengthMismatch,
    NonFinite,
    Empty,
    NegativeWeight { weight: f64 },
    NegativeMass { mass: f64 },
    WeightSum { sum: f64, expected: f64 },
    DuplicateAngle { separation: f64 },
    MomentExceedsBound { k: usize, modulus: f64, bound: f64 },
    ToeplitzNotPsd { min_eigenvalue: f64 },
    AtomMomentMismatch { k: usize },
    ConstantOutsideDisk { modulus: f64 },
    BlaschkeZeroOutsideDisk { modulus: f64 },
    PhaseNotUnimodular { modulus: f64 },
    DriftOutOfRange { b: f64 },
    ModulusExceedsOne { max_modulus: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LengthMismatch => write!(f, "angle and weight counts differ"),
            Self::NonFinite => write!(f, "non-finite value"),
            Self::Empty => write!(f, "no atoms"),
            Self::NegativeWeight { weight } => write!(f, "negative weight {weight}"),
            Self::NegativeMass { mass } => write!(f, "invalid total mass {mass}"),
            Self::WeightSum { sum, expected } => {
                write!(f, "weights sum to {sum}, expected {expected}")
            }
            Self::DuplicateAngle { separation } => {
                write!(f, "atoms only {separation:e} apart")
            }
            Self::MomentExceedsBound { k, modulus, bound } => {
                write!(f, "|m_{k}| = {modulus} exceeds {bound}")
            }
            Self::ToeplitzNotPsd { min_eigenvalue } => {
                write!(f, "Toeplitz matrix has eigenvalue {min_eigenvalue:e}")
            }
            Self::AtomMomentMismatch { k } => {
                write!(f, "stored moment r_{k} disagrees with the atoms")
            }
            Self::ConstantOutsideDisk { modulus } => write!(f, "|c| = {modulus} > 1"),
            Self::BlaschkeZeroOutsideDisk { modulus } => {
                write!(f, "Blaschke zero with |alpha| = {modulus} not in (0,1)")
            }
            Self::PhaseNotUnimodular { modulus } => write!(f, "|phase| = {modulus} != 1"),
            Self::DriftOutOfRange { b } => write!(f, "b = {b} not in [0, 2pi)"),
            Self::ModulusExceedsOne { max_modulus } => {
                write!(f, "|F| reaches {max_modulus} on the sampling grid")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Smallest eigenvalue of the moment Toeplitz matrix, for moment input.
    pub min_toeplitz_eigenvalue: Option<f64>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Smallest eigenvalue of `T[j][l] = m_{j−l}` with `m_0 = 1`, `m_{−k} = conj(m_k)`.
pub fn toeplitz_min_eigenvalue(m: &[Complex64]) -> f64 {
    let n = m.len() + 1;
    let entry = |d: i64| -> Complex64 {
        match d {
            0 => Complex64::new(1.0, 0.0),
            d if d > 0 => m[d as usize - 1],
            d => m[(-d) as usize - 1].conj(),
        }
    };
    let t = DMatrix::from_fn(n, n, |j, l| entry(j as i64 - l as i64));
    t.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

impl CircleMeasure {
    pub fn atomic(angles: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Ok(Self::Atomic(AtomicMeasure::new(angles, weights)?))
    }

    /// The first `k` moments. Structured input goes through the F transform.
    pub fn moments(&self, k: usize) -> Result<Vec<Complex64>> {
        match self {
            Self::Atomic(a) => Ok((1..=k as i64).map(|j| a.moment(j)).collect()),
            Self::Moments(m) => Ok(m.iter().take(k).copied().collect()),
            Self::Structured(f) => crate::transform::moments_from_f(f, k),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        match self {
            Self::Atomic(a) => {
                if a.angles.len() != a.weights.len() {
                    report.violations.push(Violation::LengthMismatch);
                    return report;
                }
                if a.is_empty() {
                    report.violations.push(Violation::Empty);
                    return report;
                }
                if a.angles.iter().chain(&a.weights).any(|x| !x.is_finite()) {
                    report.violations.push(Violation::NonFinite);
                    return report;
                }
                if let Some(w) = a.weights.iter().find(|w| **w < 0.0) {
                    report
                        .violations
                        .push(Violation::NegativeWeight { weight: *w });
                }
                let sum = a.total();
                if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
                    report
                        .violations
                        .push(Violation::WeightSum { sum, expected: 1.0 });
                }
                let canonical = AtomicMeasure {
                    angles: a.angles.iter().map(|t| canonical_angle(*t)).collect(),
                    weights: a.weights.clone(),
                };
                if let Some(sep) = canonical.min_separation() {
                    if sep <= ANGLE_SEPARATION {
                        report
                            .violations
                            .push(Violation::DuplicateAngle { separation: sep });
                    }
                }
            }
            Self::Moments(m) => {
                if m.iter().any(|x| !x.is_finite()) {
                    report.violations.push(Violation::NonFinite);
                    return report;
                }
                for (i, mk) in m.iter().enumerate() {
                    if mk.norm() > 1.0 + MOMENT_BOUND_SLACK {
                        report.violations.push(Violation::MomentExceedsBound {
                            k: i + 1,
                            modulus: mk.norm(),
                            bound: 1.0,
                        });
                    }
                }
                let min_eig = toeplitz_min_eigenvalue(m);
                report.min_toeplitz_eigenvalue = Some(min_eig);
                if min_eig < TOEPLITZ_EIGEN_TOLERANCE {
                    report.violations.push(Violation::ToeplitzNotPsd {
                        min_eigenvalue: min_eig,
                    });
                }
            }
            Self::Structured(f) => report.violations.extend(f.violations()),
        }
        report
    }

    /// `ψ_μ(z)`, in closed form for atomic and structured input and as a
    /// truncated polynomial for moment input.
    pub fn psi_at(&self, z: Complex64) -> Complex64 {
        match self {
            Self::Atomic(a) => a.points().map(|(x, w)| w * x * z / (1.0 - x * z)).sum(),
            Self::Moments(m) => {
                m.iter()
                    .rev()
                    .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
                    * z
            }
            Self::Structured(f) => {
                let zf = z * f.eval(z);
                zf / (1.0 - zf)
            }
        }
    }

    /// Poisson smoothing `(1/2π) Re[1 + 2ψ(r e^{−iθ})]` on `grid` equally spaced angles.
    pub fn density_approx(&self, radius: f64, grid: usize) -> Result<Vec<(f64, f64)>> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::RadiusOutOfRange { radius });
        }
        if grid == 0 {
            return Err(Error::ParameterOutOfRange {
                name: "grid",
                value: 0.0,
            });
        }
        Ok((0..grid)
            .into_par_iter()
            .map(|j| {
                let theta = TAU * j as f64 / grid as f64;
                let z = Complex64::from_polar(radius, -theta);
                let value = (1.0 + 2.0 * self.psi_at(z)).re / TAU;
                (theta, value)
            })
            .collect())
    }

    /// Mass of the atom at `e^{iθ}` from the radial limit of
    /// `(1−r)/2 · Re[1 + 2ψ(r e^{−iθ})]`, extrapolated to `r = 1` through the
    /// interpolating polynomial in `1 − r`.
    pub fn atom_mass_estimate(&self, angle: f64, radii: &[f64]) -> f64 {
        let samples: Vec<(f64, f64)> = radii
            .iter()
            .map(|&r| {
                let z = Complex64::from_polar(r, -angle);
                let h = 1.0 - r;
                (h, 0.5 * h * (1.0 + 2.0 * self.psi_at(z)).re)
            })
            .collect();
        extrapolate_to_zero(&samples)
    }
}

/// Neville's scheme: value at `h = 0` of the polynomial through `(h_i, f_i)`.
fn extrapolate_to_zero(samples: &[(f64, f64)]) -> f64 {
    let h: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let mut p: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (hi, hj) = (h[i], h[i + level]);
            p[i] = (hj * p[i] - hi * p[i + 1]) / (hj - hi);
        }
    }
    p.first().copied().unwrap_or(0.0)
}
