//! Infinite divisibility for the boolean convolution.
//!
//! A measure `μ ≠ λ` is infinitely divisible exactly when `F_μ` has no zero in
//! the disk, in which case `F_μ = exp(u)` with
//! `u(z) = ib − ∫ (x+z)/(x−z) dρ(x)`, `b = Im u(0) ∈ [0, 2π)`. The pair `(b, ρ)`
//! is unique. Roots and semigroups act on it linearly: `μ^{⊍1/n} ↔ (b/n, ρ/n)`
//! and `μ_t ↔ (tb, tρ)`.
//!
//! From finitely many moments, zero-freeness can only be certified up to a
//! radius below one; [`DivisibilityVerdict::DivisibleUpToRadius`] records that.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::canonical_angle;
use crate::error::{Error, Result};
use crate::measure::{CircleMeasure, FiniteCircleMeasure};
use crate::series::TruncatedSeries;
use crate::transform::{
    f_from_measure, herglotz_analyze, herglotz_synthesize, HerglotzData, StructuredF,
};

/// `(b, ρ)` of the Lévy–Khintchine representation.
pub type CharacteristicPair = HerglotzData;

const ORIGIN_TOLERANCE: f64 = 1e-12;
const CONTOUR_TOLERANCE: f64 = 1e-10;
const WITNESS_TOLERANCE: f64 = 1e-6;
const IDEMPOTENT_TOLERANCE: f64 = 1e-10;
const INITIAL_CONTOUR_POINTS: usize = 256;
const MAX_CONTOUR_POINTS: usize = 1 << 22;
const STANDARD_RADII: [f64; 3] = [0.5, 0.9, 0.99];

#[derive(Debug, Clone, PartialEq)]
pub enum ZeroWitness {
    ZeroAtOrigin,
    /// A located zero of `F`, and the radius of a circle enclosing it.
    InteriorZero {
        location: Complex64,
        radius: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum DivisibilityVerdict {
    Divisible {
        pair: CharacteristicPair,
    },
    HaarDivisible,
    NotDivisible {
        witness: ZeroWitness,
    },
    /// `F` has no zero in `|z| ≤ radius`; the pair is read off the truncated logarithm.
    DivisibleUpToRadius {
        radius: f64,
        pair: CharacteristicPair,
    },
}

impl DivisibilityVerdict {
    pub fn pair(&self) -> Option<&CharacteristicPair> {
        match self {
            Self::Divisible { pair } | Self::DivisibleUpToRadius { pair, .. } => Some(pair),
            _ => None,
        }
    }

    pub fn is_divisible(&self) -> bool {
        !matches!(self, Self::NotDivisible { .. })
    }
}

fn is_negligible(s: &TruncatedSeries, tol: f64) -> bool {
    s.coeffs().iter().all(|c| c.norm() <= tol)
}

fn pair_from_constant(c: Complex64, order: usize) -> CharacteristicPair {
    let mass = (-c.norm().ln()).max(0.0);
    let rho = if mass == 0.0 {
        FiniteCircleMeasure::zero()
    } else {
        FiniteCircleMeasure::haar_multiple(mass, order)
    };
    HerglotzData::new(c.arg(), rho)
}

/// The logarithm `u` of `F` with `Im u(0) ∈ [0, 2π)`, to `degree`.
pub fn log_f(f: &StructuredF, degree: usize) -> Result<TruncatedSeries> {
    match f {
        StructuredF::Zero => return Err(Error::ZeroFunction),
        StructuredF::Series(s) if is_negligible(s, ORIGIN_TOLERANCE) => {
            return Err(Error::ZeroFunction)
        }
        _ => {}
    }
    if f.at_origin().norm() <= ORIGIN_TOLERANCE {
        return Err(Error::ZeroAtOrigin);
    }
    let u = match f {
        StructuredF::ExpHerglotz(h) => return Ok(herglotz_synthesize(h, degree)),
        StructuredF::Constant(c) => TruncatedSeries::constant(c.ln(), degree),
        _ => f.to_series(degree)?.log_series()?,
    };
    let mut coeffs = u.into_coeffs();
    coeffs[0].im = canonical_angle(coeffs[0].im);
    TruncatedSeries::new(coeffs)
}

/// Winding number of `θ ↦ eval(r e^{iθ})` about the origin.
///
/// The contour is sampled on a grid refined until consecutive phase steps stay
/// below `π/2`.
pub fn winding_of<F>(eval: F, r: f64) -> Result<i64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::RadiusOutOfRange { radius: r });
    }
    let mut n = INITIAL_CONTOUR_POINTS;
    loop {
        let values: Vec<Complex64> = (0..n)
            .into_par_iter()
            .map(|j| eval(Complex64::from_polar(r, TAU * j as f64 / n as f64)))
            .collect();
        let min_modulus = values
            .iter()
            .map(|v| v.norm())
            .fold(f64::INFINITY, f64::min);
        if min_modulus <= CONTOUR_TOLERANCE {
            return Err(Error::ZeroOnContour {
                radius: r,
                min_modulus,
            });
        }
        let steps: Vec<f64> = (0..n)
            .map(|j| (values[(j + 1) % n] / values[j]).arg())
            .collect();
        let max_step = steps.iter().map(|s| s.abs()).fold(0.0, f64::max);
        if max_step < PI / 2.0 || n >= MAX_CONTOUR_POINTS {
            let total: f64 = steps.iter().sum();
            return Ok((total / TAU).round() as i64);
        }
        n *= 2;
    }
}

/// Number of zeros of `F` in `|z| < r`, counted with multiplicity.
pub fn winding_number(f: &StructuredF, r: f64) -> Result<i64> {
    winding_of(|z| f.eval(z), r)
}

/// Locate a zero of `eval` in `|z| < radius`: coarse scan of `|F|` on
/// concentric circles, then Newton steps from the best grid points.
pub fn locate_zero<F>(eval: F, radius: f64) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    const RINGS: usize = 24;
    const ANGLES: usize = 256;
    let mut candidates: Vec<(f64, Complex64)> = vec![(
        eval(Complex64::new(0.0, 0.0)).norm(),
        Complex64::new(0.0, 0.0),
    )];
    for ring in 1..=RINGS {
        let r = radius * ring as f64 / RINGS as f64;
        for j in 0..ANGLES {
            let z = Complex64::from_polar(r, TAU * j as f64 / ANGLES as f64);
            candidates.push((eval(z).norm(), z));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = candidates[0];
    for &(_, start) in candidates.iter().take(32) {
        if let Some((value, z)) = newton(&eval, start) {
            if value < best.0 {
                best = (value, z);
            }
            if value < WITNESS_TOLERANCE * 1e-6 {
                break;
            }
        }
    }
    best.1
}

fn newton<F>(eval: &F, start: Complex64) -> Option<(f64, Complex64)>
where
    F: Fn(Complex64) -> Complex64,
{
    let h = 1e-7;
    let mut z = start;
    let mut fz = eval(z);
    for _ in 0..100 {
        let d = (eval(z + h) - eval(z - h)) / (2.0 * h);
        if d.norm() == 0.0 || !d.is_finite() {
            break;
        }
        let step = fz / d;
        let next = z - step;
        if next.norm() >= 1.0 || !next.is_finite() {
            return None;
        }
        z = next;
        fz = eval(z);
        if step.norm() < 1e-15 || fz.norm() < 1e-15 {
            break;
        }
    }
    Some((fz.norm(), z))
}

/// Decide infinite divisibility of `μ`, certifying zero-freeness of series-backed
/// `F` on `|z| ≤ r_max` only.
pub fn is_infinitely_divisible(
    mu: &CircleMeasure,
    r_max: f64,
    order: usize,
) -> Result<DivisibilityVerdict> {
    if !(r_max > 0.0 && r_max < 1.0) {
        return Err(Error::RadiusOutOfRange { radius: r_max });
    }
    let f = f_from_measure(mu, order)?;
    match &f {
        StructuredF::Zero => return Ok(DivisibilityVerdict::HaarDivisible),
        StructuredF::Series(s) if is_negligible(s, ORIGIN_TOLERANCE) => {
            return Ok(DivisibilityVerdict::HaarDivisible)
        }
        StructuredF::Constant(c) if c.norm() <= ORIGIN_TOLERANCE => {
            return Ok(DivisibilityVerdict::HaarDivisible)
        }
        _ => {}
    }
    if f.at_origin().norm() <= ORIGIN_TOLERANCE {
        return Ok(DivisibilityVerdict::NotDivisible {
            witness: ZeroWitness::ZeroAtOrigin,
        });
    }
    match &f {
        StructuredF::Constant(c) => Ok(DivisibilityVerdict::Divisible {
            pair: pair_from_constant(*c, order),
        }),
        StructuredF::ExpHerglotz(h) => Ok(DivisibilityVerdict::Divisible { pair: h.clone() }),
        StructuredF::Blaschke { factors, phase, .. } => match factors.first() {
            Some(factor) => Ok(DivisibilityVerdict::NotDivisible {
                witness: ZeroWitness::InteriorZero {
                    location: factor.alpha,
                    radius: 0.5 * (1.0 + factor.alpha.norm()),
                },
            }),
            None => Ok(DivisibilityVerdict::Divisible {
                pair: pair_from_constant(*phase, order),
            }),
        },
        StructuredF::Series(s) => {
            let eval = |z: Complex64| -> Complex64 {
                match mu {
                    CircleMeasure::Atomic(_) => mu.f_at(z).unwrap_or_else(|_| s.eval(z)),
                    _ => s.eval(z),
                }
            };
            let mut radii: Vec<f64> = STANDARD_RADII.into_iter().filter(|r| *r < r_max).collect();
            radii.push(r_max);
            for r in radii {
                let enclosed = match winding_of(eval, r) {
                    Ok(w) => w > 0,
                    Err(Error::ZeroOnContour { .. }) => true,
                    Err(e) => return Err(e),
                };
                if enclosed {
                    let search = (r + 1e-3).min(0.5 * (1.0 + r));
                    return Ok(DivisibilityVerdict::NotDivisible {
                        witness: ZeroWitness::InteriorZero {
                            location: locate_zero(eval, search),
                            radius: r,
                        },
                    });
                }
            }
            let u = log_f(&f, s.order())?;
            Ok(DivisibilityVerdict::DivisibleUpToRadius {
                radius: r_max,
                pair: herglotz_analyze(&u)?,
            })
        }
        StructuredF::Zero => unreachable!("handled above"),
    }
}

/// The characteristic pair of an infinitely divisible `μ ≠ λ`.
pub fn char_pair(mu: &CircleMeasure, r_max: f64, order: usize) -> Result<CharacteristicPair> {
    match is_infinitely_divisible(mu, r_max, order)? {
        DivisibilityVerdict::Divisible { pair }
        | DivisibilityVerdict::DivisibleUpToRadius { pair, .. } => Ok(pair),
        DivisibilityVerdict::HaarDivisible => Err(Error::NotDivisible {
            reason: "the Haar measure has no characteristic pair".into(),
        }),
        DivisibilityVerdict::NotDivisible { witness } => Err(Error::NotDivisible {
            reason: format!("{witness:?}"),
        }),
    }
}

/// The measure with `F = exp(ib − ∫ (x+z)/(x−z) dρ)`.
pub fn measure_from_char_pair(pair: &CharacteristicPair) -> CircleMeasure {
    CircleMeasure::Structured(StructuredF::ExpHerglotz(pair.clone()))
}

/// `μ_n` with `μ_n^{⊍n} = μ`, on the canonical branch `b/n`.
pub fn nth_root(mu: &CircleMeasure, n: u32, r_max: f64, order: usize) -> Result<CircleMeasure> {
    if n == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "n",
            value: 0.0,
        });
    }
    match is_infinitely_divisible(mu, r_max, order)? {
        DivisibilityVerdict::HaarDivisible => Ok(CircleMeasure::Structured(StructuredF::Zero)),
        DivisibilityVerdict::Divisible { pair }
        | DivisibilityVerdict::DivisibleUpToRadius { pair, .. } => {
            let inv = 1.0 / n as f64;
            Ok(measure_from_char_pair(&HerglotzData::new(
                pair.b * inv,
                pair.rho.scaled(inv),
            )))
        }
        DivisibilityVerdict::NotDivisible { witness } => Err(Error::NotDivisible {
            reason: format!("{witness:?}"),
        }),
    }
}

/// `μ_t` with `F_{μ_t} = exp(itb − t ∫ (x+z)/(x−z) dρ)`; the drift is stored mod 2π.
pub fn semigroup_measure(pair: &CharacteristicPair, t: f64) -> Result<CircleMeasure> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::ParameterOutOfRange {
            name: "t",
            value: t,
        });
    }
    Ok(measure_from_char_pair(&HerglotzData::new(
        t * pair.b,
        pair.rho.scaled(t),
    )))
}

/// `μ ⊍ μ = μ`, i.e. `F ≡ 0` or `F ≡ 1`.
pub fn is_idempotent(mu: &CircleMeasure, order: usize) -> Result<bool> {
    let f = f_from_measure(mu, order)?;
    let s = match f {
        StructuredF::Zero => return Ok(true),
        other => other.to_series(order.saturating_sub(1))?,
    };
    let tail_vanishes = s.coeffs()[1..]
        .iter()
        .all(|c| c.norm() <= IDEMPOTENT_TOLERANCE);
    let c0 = s.coeff(0);
    Ok(tail_vanishes
        && (c0.norm() <= IDEMPOTENT_TOLERANCE || (c0 - 1.0).norm() <= IDEMPOTENT_TOLERANCE))
}
