//! Closed-form example measures.
//!
//! | constructor     | measure                                  | `F`                                   |
//! |-----------------|------------------------------------------|---------------------------------------|
//! | [`dirac`]       | `δ_{e^{ib}}`                             | `e^{ib}`                              |
//! | [`two_point`]   | `p δ_{e^{ib₁}} + (1−p) δ_{e^{ib₂}}`       | `e^{i(b₁+b₂)} (α − z)/(1 − ᾱz)`       |
//! | [`haar`]        | `λ`                                      | `0`                                   |
//! | [`cyclic_haar`] | uniform on the `n`-th roots of unity     | `z^{n−1}`                             |
//! | [`poisson`]     | density `P_r(θ − b)`                     | `r e^{ib}`                            |
//!
//! with `α = p e^{−ib₂} + (1−p) e^{−ib₁}`.
//!
//! # The singular example
//!
//! For `ρ = δ_x`, `x = e^{iβ}`, the measure with `F(z) = exp((z+x)/(z−x))` is
//! purely atomic on the zeros of `exp((x+z)/(x−z)) − z` on the circle, reflected
//! to `z̄_n`. Writing `z = e^{i(β+s)}`, `0 < s < 2π`,
//!
//! ```text
//! (x+z)/(x−z) = (1 + e^{is})/(1 − e^{is}) = i·cot(s/2),
//! ```
//!
//! so the zeros solve the real equation `cot(s/2) = β + s + 2πk`. For each
//! integer `k` the left side falls from `+∞` to `−∞` on `(0, 2π)` while the right
//! side rises, giving exactly one root `s_k`, found by bisection. Large `k`
//! push `s_k → 0⁺`, large negative `k` push `s_k → 2π⁻`: the zeros accumulate
//! at `x` from both sides. The atom at `z̄_n` has mass
//! `(1 − cos s_n)/(2 − cos s_n)`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::canonical_angle;
use crate::convolution::convolve;
use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure, CircleMeasure, FiniteCircleMeasure};
use crate::series::TruncatedSeries;
use crate::transform::{herglotz_synthesize, BlaschkeFactor, HerglotzData, StructuredF};

pub const MAX_SINGULAR_COUNT: usize = 200;
pub const MIN_OUTER_GRID: usize = 256;
const MAX_BLASCHKE_MODULUS: f64 = 0.95;
const COMPOSITION_TOLERANCE: f64 = 1e-8;

pub fn dirac(b: f64) -> CircleMeasure {
    CircleMeasure::Structured(StructuredF::Constant(Complex64::from_polar(1.0, b)))
}

pub fn dirac_atoms(b: f64) -> AtomicMeasure {
    AtomicMeasure {
        angles: vec![canonical_angle(b)],
        weights: vec![1.0],
    }
}

fn check_weight(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name: "p",
            value: p,
        })
    }
}

/// `p δ_{e^{ib₁}} + (1−p) δ_{e^{ib₂}}` with `F` expanded from its closed form to degree `order − 1`.
pub fn two_point(p: f64, b1: f64, b2: f64, order: usize) -> Result<CircleMeasure> {
    check_weight(p)?;
    let degree = order.saturating_sub(1);
    let alpha = p * Complex64::from_polar(1.0, -b2) + (1.0 - p) * Complex64::from_polar(1.0, -b1);
    let mut numer = TruncatedSeries::constant(alpha, degree);
    if degree >= 1 {
        numer = numer.add(&TruncatedSeries::monomial(
            Complex64::new(-1.0, 0.0),
            1,
            degree,
        ));
    }
    let f = numer
        .mul(&TruncatedSeries::geometric(alpha.conj(), degree))
        .scale(Complex64::from_polar(1.0, b1 + b2));
    Ok(CircleMeasure::Structured(StructuredF::Series(f)))
}

pub fn two_point_atoms(p: f64, b1: f64, b2: f64) -> Result<AtomicMeasure> {
    check_weight(p)?;
    AtomicMeasure::new(vec![b1, b2], vec![p, 1.0 - p])
}

pub fn haar() -> CircleMeasure {
    CircleMeasure::Structured(StructuredF::Zero)
}

/// Uniform measure on the `n`-th roots of unity, `F = z^{n−1}`.
pub fn cyclic_haar(n: u32, order: usize) -> Result<CircleMeasure> {
    if n == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "n",
            value: 0.0,
        });
    }
    let f = TruncatedSeries::monomial(
        Complex64::new(1.0, 0.0),
        n as usize - 1,
        order.saturating_sub(1),
    );
    Ok(CircleMeasure::Structured(StructuredF::Series(f)))
}

pub fn cyclic_haar_atoms(n: u32) -> Result<AtomicMeasure> {
    if n == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "n",
            value: 0.0,
        });
    }
    let n = n as usize;
    Ok(AtomicMeasure {
        angles: (0..n).map(|k| TAU * k as f64 / n as f64).collect(),
        weights: vec![1.0 / n as f64; n],
    })
}

/// Absolutely continuous measure with Poisson-kernel density, `F ≡ r e^{ib}`.
pub fn poisson(r: f64, b: f64) -> Result<CircleMeasure> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::ParameterOutOfRange {
            name: "r",
            value: r,
        });
    }
    if r == 0.0 {
        return Ok(haar());
    }
    Ok(CircleMeasure::Structured(StructuredF::Constant(
        Complex64::from_polar(r, b),
    )))
}

/// The infinitely divisible measure with pair `(0, δ_{e^{iβ}})`.
pub fn singular_measure(beta: f64, order: usize) -> CircleMeasure {
    let rho = FiniteCircleMeasure::from_atoms(dirac_atoms(beta), order);
    CircleMeasure::Structured(StructuredF::ExpHerglotz(HerglotzData::new(0.0, rho)))
}

/// Zeros of `exp((x+z)/(x−z)) − z` on the circle and the atoms they induce.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularExampleResult {
    pub beta: f64,
    /// Angles `β_n` of the zeros `z_n`.
    pub zeros: Vec<f64>,
    /// `β_n − β` in `(−π, π]`, kept at full precision.
    pub offsets: Vec<f64>,
    /// Angles of `z̄_n`.
    pub atom_angles: Vec<f64>,
    pub atom_masses: Vec<f64>,
}

impl SingularExampleResult {
    /// `|cot(s/2) − β − s mod 2π|` at each zero.
    pub fn phase_residuals(&self) -> Vec<f64> {
        self.offsets
            .iter()
            .map(|&s| {
                let lhs = 1.0 / (0.5 * s).tan();
                let d = (lhs - self.beta - s).rem_euclid(TAU);
                d.min(TAU - d)
            })
            .collect()
    }

    /// `|exp((x+z)/(x−z)) − z|` at each zero, with `x − z` formed from the offset
    /// to avoid cancellation near `x`.
    pub fn defining_residuals(&self) -> Vec<f64> {
        let x = Complex64::from_polar(1.0, self.beta);
        self.offsets
            .iter()
            .map(|&s| {
                let z = x * Complex64::from_polar(1.0, s);
                let half = Complex64::from_polar(1.0, 0.5 * s);
                let diff = x * half * Complex64::new(0.0, -2.0 * (0.5 * s).sin());
                (((x + z) / diff).exp() - z).norm()
            })
            .collect()
    }

    pub fn atoms(&self) -> Vec<(f64, f64)> {
        self.atom_angles
            .iter()
            .copied()
            .zip(self.atom_masses.iter().copied())
            .collect()
    }
}

/// Root of `cot(s/2) − β − s − 2πk` on `(start, start + 2π)`.
///
/// `start` is `0` or `−2π`; the latter yields negative offsets directly, which
/// keeps full relative precision for zeros just below `x`.
fn branch_root(beta: f64, k: i64, start: f64) -> Result<f64> {
    let shift = beta + TAU * k as f64;
    let g = |s: f64| 1.0 / (0.5 * s).tan() - s - shift;
    let bracket = |from: f64, dir: f64, sign: f64| -> Result<f64> {
        let mut gap = 1.0;
        for _ in 0..1100 {
            let s = from + dir * gap;
            if sign * g(s) > 0.0 {
                return Ok(s);
            }
            gap *= 0.5;
        }
        Err(Error::RootBracketingFailure { branch: k })
    };
    let mut lo = bracket(start, 1.0, 1.0)?;
    let mut hi = bracket(start + TAU, -1.0, -1.0)?;
    if lo >= hi {
        return Err(Error::RootBracketingFailure { branch: k });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if g(lo).abs() < g(hi).abs() { lo } else { hi })
}

/// The `count` zeros on each side of `x = e^{iβ}`, starting from the ones
/// farthest from `x` and moving toward it.
pub fn singular_example(beta: f64, count: usize) -> Result<SingularExampleResult> {
    if count == 0 || count > MAX_SINGULAR_COUNT {
        return Err(Error::ParameterOutOfRange {
            name: "count",
            value: count as f64,
        });
    }
    let beta = canonical_angle(beta);
    // s_k ≤ π exactly when k ≥ −(β + π)/(2π)
    let k_up = (-(beta + PI) / TAU).ceil() as i64;
    let mut offsets = Vec::with_capacity(2 * count);
    for i in 0..count as i64 {
        offsets.push(branch_root(beta, k_up + i, 0.0)?);
        // s − 2π solves the same equation with k raised by one
        offsets.push(branch_root(beta, k_up - i, -TAU)?);
    }
    offsets.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    let zeros: Vec<f64> = offsets.iter().map(|s| canonical_angle(beta + s)).collect();
    let atom_angles = zeros.iter().map(|t| canonical_angle(-t)).collect();
    let atom_masses = offsets
        .iter()
        .map(|s| {
            let c = s.cos();
            (1.0 - c) / (2.0 - c)
        })
        .collect();
    Ok(SingularExampleResult {
        beta,
        zeros,
        offsets,
        atom_angles,
        atom_masses,
    })
}

/// Data of `B(z) = phase · z^p · Π ((ᾱ/|α|)(α − z)/(1 − ᾱz))^{mult}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeData {
    pub p: u32,
    pub factors: Vec<BlaschkeFactor>,
    pub phase: Complex64,
}

impl BlaschkeData {
    pub fn identity() -> Self {
        Self {
            p: 0,
            factors: Vec::new(),
            phase: Complex64::new(1.0, 0.0),
        }
    }

    pub fn to_f(&self) -> StructuredF {
        StructuredF::Blaschke {
            p: self.p,
            factors: self.factors.clone(),
            phase: self.phase,
        }
    }
}

/// `μ` with `F = B·S·O` together with `μ_B`, `μ_S`, `μ_O`.
#[derive(Debug, Clone)]
pub struct BsoComposition {
    pub mu: CircleMeasure,
    pub mu_b: CircleMeasure,
    pub mu_s: CircleMeasure,
    pub mu_o: CircleMeasure,
    /// Moment-wise distance between `μ` and `μ_B ⊍ μ_S ⊍ μ_O`.
    pub max_deviation: f64,
}

/// Compose `F = B·S·O` with `S = exp(−∫ (w+z)/(w−z) dτ)` and
/// `O = c·exp(−∫ (w+z)/(w−z) q dλ)`, `q` sampled on the equally spaced grid
/// `w_j = e^{2πij/M}` and integrated by the trapezoid rule.
///
/// `μ` is built from a single exponential of the combined Herglotz data and
/// checked against the convolution of the three factor measures.
pub fn bso_compose(
    blaschke: &BlaschkeData,
    tau: &FiniteCircleMeasure,
    q_grid: &[f64],
    c: Complex64,
    order: usize,
) -> Result<BsoComposition> {
    if order == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "order",
            value: 0.0,
        });
    }
    for f in &blaschke.factors {
        let m = f.alpha.norm();
        if m > MAX_BLASCHKE_MODULUS {
            return Err(Error::ConditioningWarning { modulus: m });
        }
        if m == 0.0 {
            return Err(Error::ParameterOutOfRange {
                name: "alpha",
                value: 0.0,
            });
        }
    }
    if (blaschke.phase.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::ParameterOutOfRange {
            name: "phase",
            value: blaschke.phase.norm(),
        });
    }
    if (c.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::ParameterOutOfRange {
            name: "c",
            value: c.norm(),
        });
    }
    if q_grid.len() < MIN_OUTER_GRID {
        return Err(Error::ParameterOutOfRange {
            name: "q grid size",
            value: q_grid.len() as f64,
        });
    }
    if let Some(q) = q_grid.iter().find(|q| !(q.is_finite() && **q >= 0.0)) {
        return Err(Error::ParameterOutOfRange {
            name: "q",
            value: *q,
        });
    }
    if tau.atoms.is_none() && !tau.is_zero() {
        return Err(Error::InvalidMeasure(
            "singular part must be given by atoms".into(),
        ));
    }

    let m = q_grid.len();
    let grid_atoms = AtomicMeasure {
        angles: (0..m).map(|j| TAU * j as f64 / m as f64).collect(),
        weights: q_grid.iter().map(|q| q / m as f64).collect(),
    };
    let outer_rho = FiniteCircleMeasure::from_atoms(grid_atoms, order);
    let singular = HerglotzData::new(0.0, tau.clone());
    let outer = HerglotzData::new(c.arg(), outer_rho.clone());

    let mu_b = CircleMeasure::Structured(blaschke.to_f());
    let mu_s = CircleMeasure::Structured(StructuredF::ExpHerglotz(singular));
    let mu_o = CircleMeasure::Structured(StructuredF::ExpHerglotz(outer));

    let degree = order - 1;
    let combined = HerglotzData::new(c.arg(), tau.sum(&outer_rho));
    let f = blaschke
        .to_f()
        .to_series(degree)?
        .mul(&herglotz_synthesize(&combined, degree).exp_series());
    let mu = CircleMeasure::Structured(StructuredF::Series(f));

    let product = convolve(&convolve(&mu_b, &mu_s, order)?, &mu_o, order)?;
    let lhs = product.moments(order)?;
    let rhs = mu.moments(order)?;
    let max_deviation = lhs
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if max_deviation > COMPOSITION_TOLERANCE {
        return Err(Error::VerificationFailed {
            deviation: max_deviation,
            tolerance: COMPOSITION_TOLERANCE,
        });
    }
    Ok(BsoComposition {
        mu,
        mu_b,
        mu_s,
        mu_o,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::f_from_measure;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const ORDER: usize = 24;

    #[test]
    fn two_point_half_is_monomial() {
        let m = two_point(0.5, 0.0, PI, ORDER).unwrap();
        let CircleMeasure::Structured(StructuredF::Series(s)) = &m else {
            panic!("expected a series")
        };
        for k in 0..ORDER {
            let e = if k == 1 { 1.0 } else { 0.0 };
            assert!((s.coeff(k) - c(e, 0.0)).norm() < 1e-15, "k = {k}");
        }
    }

    #[test]
    fn cyclic_three_moments() {
        let m = cyclic_haar(3, ORDER).unwrap().moments(9).unwrap();
        for (k, mk) in m.iter().enumerate() {
            let e = if (k + 1) % 3 == 0 { 1.0 } else { 0.0 };
            assert!((mk - c(e, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn poisson_half_moments() {
        let m = poisson(0.5, 0.0).unwrap().moments(10).unwrap();
        for (k, mk) in m.iter().enumerate() {
            assert!((mk - c(0.5f64.powi(k as i32 + 1), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn parameter_checks() {
        assert!(matches!(
            two_point(1.0, 0.0, 1.0, 8),
            Err(Error::ParameterOutOfRange { .. })
        ));
        assert!(cyclic_haar(0, 8).is_err());
        assert!(poisson(1.0, 0.0).is_err());
        assert!(poisson(-0.1, 0.0).is_err());
        assert!(singular_example(0.0, 0).is_err());
        assert!(singular_example(0.0, 201).is_err());
    }

    #[test]
    fn atomic_twins_share_transforms() {
        let (p, b1, b2) = (0.3, 0.4, 2.9);
        let closed = two_point(p, b1, b2, ORDER).unwrap().moments(ORDER).unwrap();
        let atoms = CircleMeasure::Atomic(two_point_atoms(p, b1, b2).unwrap())
            .moments(ORDER)
            .unwrap();
        for (a, b) in closed.iter().zip(&atoms) {
            assert!((a - b).norm() < 1e-13);
        }
        let f =
            f_from_measure(&CircleMeasure::Atomic(cyclic_haar_atoms(4).unwrap()), ORDER).unwrap();
        let StructuredF::Series(s) = f else { panic!() };
        assert!((s.coeff(3) - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn singular_example_at_pi() {
        let res = singular_example(PI, 10).unwrap();
        let i = res
            .zeros
            .iter()
            .position(|t| t.min(TAU - t) < 1e-12)
            .expect("θ = 0 is a zero");
        assert!((res.atom_masses[i] - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(i, 0);
        for r in res
            .phase_residuals()
            .iter()
            .chain(&res.defining_residuals())
        {
            assert!(*r < 1e-10, "residual {r}");
        }
    }

    #[test]
    fn singular_zeros_accumulate() {
        for beta in [0.0, 1.0, 4.0] {
            let res = singular_example(beta, 60).unwrap();
            assert_eq!(res.zeros.len(), 120);
            for w in res.offsets.windows(2) {
                assert!(w[0].abs() >= w[1].abs());
            }
            assert!(res.offsets.last().unwrap().abs() < 0.01);
            let total: f64 = res.atom_masses.iter().sum();
            assert!(total <= 1.0 + 1e-9);
            assert!(res
                .atom_masses
                .iter()
                .all(|a| *a > 0.0 && *a <= 2.0 / 3.0 + 1e-15));
            assert!(res.offsets.iter().any(|s| *s > 0.0) && res.offsets.iter().any(|s| *s < 0.0));
        }
    }

    #[test]
    fn singular_residuals_at_full_count() {
        let res = singular_example(2.5, MAX_SINGULAR_COUNT).unwrap();
        let worst = res
            .phase_residuals()
            .into_iter()
            .chain(res.defining_residuals())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "worst residual {worst}");
    }

    #[test]
    fn bso_trivial_is_dirac_one() {
        let out = bso_compose(
            &BlaschkeData::identity(),
            &FiniteCircleMeasure::zero(),
            &[0.0; 256],
            c(1.0, 0.0),
            ORDER,
        )
        .unwrap();
        for m in out.mu.moments(ORDER).unwrap() {
            assert!((m - c(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn bso_singular_part_is_singular_example() {
        let tau = FiniteCircleMeasure::from_atoms(dirac_atoms(0.0), ORDER);
        let out = bso_compose(
            &BlaschkeData::identity(),
            &tau,
            &[0.0; 256],
            c(1.0, 0.0),
            ORDER,
        )
        .unwrap();
        let a = out.mu.moments(ORDER).unwrap();
        let b = singular_measure(0.0, ORDER).moments(ORDER).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn bso_monomial_is_cyclic_two() {
        let b = BlaschkeData {
            p: 1,
            factors: vec![],
            phase: c(1.0, 0.0),
        };
        let out = bso_compose(
            &b,
            &FiniteCircleMeasure::zero(),
            &[0.0; 256],
            c(1.0, 0.0),
            ORDER,
        )
        .unwrap();
        let m = out.mu.moments(ORDER).unwrap();
        let expected = cyclic_haar(2, ORDER).unwrap().moments(ORDER).unwrap();
        for (x, y) in m.iter().zip(&expected) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn bso_general_composition() {
        let b = BlaschkeData {
            p: 1,
            factors: vec![BlaschkeFactor {
                alpha: c(0.4, 0.3),
                multiplicity: 2,
            }],
            phase: Complex64::from_polar(1.0, 0.3),
        };
        let tau_atoms = AtomicMeasure::new(vec![1.0, 4.0], vec![0.3, 0.2]).unwrap();
        let tau = FiniteCircleMeasure::from_atoms(tau_atoms, ORDER);
        let q: Vec<f64> = (0..512)
            .map(|j| 0.5 + 0.4 * (TAU * j as f64 / 512.0).cos())
            .collect();
        let out = bso_compose(&b, &tau, &q, Complex64::from_polar(1.0, 2.0), ORDER).unwrap();
        assert!(out.max_deviation < 1e-8);
        assert!(out.mu.validate().is_ok());
    }

    #[test]
    fn bso_rejects_ill_conditioned_input() {
        let b = BlaschkeData {
            p: 0,
            factors: vec![BlaschkeFactor {
                alpha: c(0.97, 0.0),
                multiplicity: 1,
            }],
            phase: c(1.0, 0.0),
        };
        assert!(matches!(
            bso_compose(
                &b,
                &FiniteCircleMeasure::zero(),
                &[0.0; 256],
                c(1.0, 0.0),
                ORDER
            ),
            Err(Error::ConditioningWarning { .. })
        ));
        assert!(bso_compose(
            &BlaschkeData::identity(),
            &FiniteCircleMeasure::zero(),
            &[0.0; 100],
            c(1.0, 0.0),
            ORDER
        )
        .is_err());
    }
}
