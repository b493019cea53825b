//! The ψ and F transforms and the Herglotz representation of their logarithms.
//!
//! For a probability measure `μ` on the circle,
//!
//! ```text
//! ψ(z) = Σ_{k≥1} m_k z^k,    F(z) = ψ(z) / (z (1 + ψ(z))),    ψ(z) = z F(z) / (1 − z F(z)).
//! ```
//!
//! `F` maps the disk into its closure, `F(0) = m_1`, and `μ ↦ F_μ` is a bijection onto
//! such functions. Logarithms of zero-free `F` are written
//! `u(z) = ib − ∫ (x+z)/(x−z) dρ(x)`; expanding `(x+z)/(x−z) = 1 + 2 Σ (z/x)^k`
//! gives the coefficient map `u_0 = ib − ρ(S¹)`, `u_k = −2 r_k`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::canonical_angle;
use crate::error::{Error, Result};
use crate::measure::{CircleMeasure, FiniteCircleMeasure, Violation};
use crate::series::TruncatedSeries;

/// Radii of the sampling grid used for modulus and sign checks.
pub const SAMPLE_RADII: [f64; 3] = [0.3, 0.6, 0.9];
/// Angles per sampling radius.
pub const SAMPLE_ANGLES: usize = 256;

const HERGLOTZ_SIGN_TOLERANCE: f64 = 1e-9;
const MODULUS_SLACK: f64 = 1e-10;
const CONSTANT_SLACK: f64 = 1e-12;
const ZERO_MOMENT_TOLERANCE: f64 = 1e-12;
const MAX_BLASCHKE_MODULUS: f64 = 0.95;

/// The 3 × 256 grid `r e^{2πij/256}`, `r ∈ {0.3, 0.6, 0.9}`.
pub fn sample_points() -> impl Iterator<Item = Complex64> {
    SAMPLE_RADII.into_iter().flat_map(|r| {
        (0..SAMPLE_ANGLES)
            .map(move |j| Complex64::from_polar(r, TAU * j as f64 / SAMPLE_ANGLES as f64))
    })
}

/// One factor `(ᾱ/|α|)·(α − z)/(1 − ᾱz)` of a Blaschke product, repeated `multiplicity` times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlaschkeFactor {
    pub alpha: Complex64,
    pub multiplicity: u32,
}

impl BlaschkeFactor {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let a = self.alpha;
        let single = a.conj() / a.norm() * (a - z) / (1.0 - a.conj() * z);
        single.powu(self.multiplicity)
    }

    fn series(&self, order: usize) -> Result<TruncatedSeries> {
        let a = self.alpha;
        if a.norm() > MAX_BLASCHKE_MODULUS {
            return Err(Error::ConditioningWarning { modulus: a.norm() });
        }
        let mut numer = TruncatedSeries::constant(a, order);
        if order >= 1 {
            numer = numer.add(&TruncatedSeries::monomial(
                Complex64::new(-1.0, 0.0),
                1,
                order,
            ));
        }
        let single = numer
            .mul(&TruncatedSeries::geometric(a.conj(), order))
            .scale(a.conj() / a.norm());
        Ok(single.pow(self.multiplicity))
    }
}

/// The drift angle `b` and finite measure `ρ` of `u(z) = ib − ∫ (x+z)/(x−z) dρ(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HerglotzData {
    pub b: f64,
    pub rho: FiniteCircleMeasure,
}

impl HerglotzData {
    pub fn new(b: f64, rho: FiniteCircleMeasure) -> Self {
        Self {
            b: canonical_angle(b),
            rho,
        }
    }

    /// `u(z)`, exact when `ρ` carries atoms.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        Complex64::new(0.0, self.b) - self.rho.herglotz_eval(z)
    }
}

/// A function `F: 𝔻 → 𝔻̄` in a closed form, or a truncated series when no
/// closed form is available.
#[derive(Debug, Clone, PartialEq)]
pub enum StructuredF {
    Zero,
    Constant(Complex64),
    /// `phase · z^p · Π factors`.
    Blaschke {
        p: u32,
        factors: Vec<BlaschkeFactor>,
        phase: Complex64,
    },
    /// `exp(ib − ∫ (x+z)/(x−z) dρ(x))`.
    ExpHerglotz(HerglotzData),
    Series(TruncatedSeries),
}

impl StructuredF {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Self::Zero => Complex64::new(0.0, 0.0),
            Self::Constant(c) => *c,
            Self::Blaschke { p, factors, phase } => factors
                .iter()
                .fold(phase * z.powu(*p), |acc, f| acc * f.eval(z)),
            Self::ExpHerglotz(h) => h.eval(z).exp(),
            Self::Series(s) => s.eval(z),
        }
    }

    /// Taylor coefficients `F_0..F_degree`.
    ///
    /// An `ExpHerglotz` whose `ρ` is only known to a lower order yields a shorter series.
    pub fn to_series(&self, degree: usize) -> Result<TruncatedSeries> {
        match self {
            Self::Zero => Ok(TruncatedSeries::zero(degree)),
            Self::Constant(c) => Ok(TruncatedSeries::constant(*c, degree)),
            Self::Blaschke { p, factors, phase } => {
                let mut s = TruncatedSeries::monomial(*phase, *p as usize, degree);
                for f in factors {
                    s = s.mul(&f.series(degree)?);
                }
                Ok(s)
            }
            Self::ExpHerglotz(h) => Ok(herglotz_synthesize(h, degree).exp_series()),
            Self::Series(s) => Ok(if s.order() > degree {
                s.truncate(degree)
            } else {
                s.clone()
            }),
        }
    }

    /// `F(0)`, which equals the first moment.
    pub fn at_origin(&self) -> Complex64 {
        self.eval(Complex64::new(0.0, 0.0))
    }

    /// Largest `|F|` over [`sample_points`].
    pub fn max_modulus_on_grid(&self) -> f64 {
        sample_points()
            .map(|z| self.eval(z).norm())
            .fold(0.0, f64::max)
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        match self {
            Self::Zero => {}
            Self::Constant(c) => {
                if !c.is_finite() {
                    out.push(Violation::NonFinite);
                } else if c.norm() > 1.0 + CONSTANT_SLACK {
                    out.push(Violation::ConstantOutsideDisk { modulus: c.norm() });
                }
            }
            Self::Blaschke { factors, phase, .. } => {
                for f in factors {
                    let m = f.alpha.norm();
                    if !(m > 0.0 && m < 1.0) {
                        out.push(Violation::BlaschkeZeroOutsideDisk { modulus: m });
                    }
                }
                if (phase.norm() - 1.0).abs() > CONSTANT_SLACK {
                    out.push(Violation::PhaseNotUnimodular {
                        modulus: phase.norm(),
                    });
                }
            }
            Self::ExpHerglotz(h) => {
                if !(h.b >= 0.0 && h.b < TAU) {
                    out.push(Violation::DriftOutOfRange { b: h.b });
                }
                out.extend(h.rho.violations());
            }
            Self::Series(s) => {
                if s.coeffs().iter().any(|c| !c.is_finite()) {
                    out.push(Violation::NonFinite);
                }
            }
        }
        if out.is_empty() {
            let max = self.max_modulus_on_grid();
            if max > 1.0 + MODULUS_SLACK {
                out.push(Violation::ModulusExceedsOne { max_modulus: max });
            }
        }
        out
    }
}

/// `ψ = Σ m_k z^k` with `ψ(0) = 0`.
pub fn psi_from_moments(m: &[Complex64]) -> TruncatedSeries {
    let mut coeffs = Vec::with_capacity(m.len() + 1);
    coeffs.push(Complex64::new(0.0, 0.0));
    coeffs.extend_from_slice(m);
    TruncatedSeries::from_vec_unchecked(coeffs)
}

/// `F = ψ / (z(1 + ψ))`. The order drops by one.
pub fn f_from_psi(psi: &TruncatedSeries) -> Result<TruncatedSeries> {
    let one_plus = psi.add(&TruncatedSeries::one(psi.order()));
    psi.div(&one_plus)?.shift_down()
}

/// `ψ = zF / (1 − zF)`. The order grows by one.
pub fn psi_from_f(f: &TruncatedSeries) -> TruncatedSeries {
    let zf = f.shift_up();
    let denom = TruncatedSeries::one(zf.order()).sub(&zf);
    zf.div(&denom).expect("1 − zF has constant term 1")
}

/// `F_μ` with exact forms for a single atom (`Constant`) and for vanishing
/// moments (`Zero`); otherwise a series of degree `order − 1`, which carries
/// the moments `m_1..m_order`.
pub fn f_from_measure(mu: &CircleMeasure, order: usize) -> Result<StructuredF> {
    if let CircleMeasure::Structured(f) = mu {
        return Ok(f.clone());
    }
    if order == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "order",
            value: 0.0,
        });
    }
    if let CircleMeasure::Atomic(a) = mu {
        if a.len() == 1 && (a.weights[0] - 1.0).abs() <= CONSTANT_SLACK {
            return Ok(StructuredF::Constant(Complex64::from_polar(
                1.0,
                a.angles[0],
            )));
        }
    }
    let m = mu.moments(order)?;
    if m.is_empty() {
        return Err(Error::InvalidMeasure("no moments supplied".into()));
    }
    if m.iter().all(|x| x.norm() <= ZERO_MOMENT_TOLERANCE) {
        return Ok(StructuredF::Zero);
    }
    Ok(StructuredF::Series(f_from_psi(&psi_from_moments(&m))?))
}

/// `m_1..m_K` of the measure with transform `f`.
pub fn moments_from_f(f: &StructuredF, k: usize) -> Result<Vec<Complex64>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    match f {
        StructuredF::Zero => Ok(vec![Complex64::new(0.0, 0.0); k]),
        StructuredF::Constant(c) => Ok((1..=k as i32).map(|j| c.powi(j)).collect()),
        _ => {
            let s = f.to_series(k - 1)?;
            let psi = psi_from_f(&s);
            Ok(psi.coeffs()[1..].to_vec())
        }
    }
}

/// `G(w) = 1/(w − F(1/w))` for `|w| > 1`.
pub fn cauchy_eval(f: &StructuredF, w: Complex64) -> Result<Complex64> {
    if w.norm() <= 1.0 {
        return Err(Error::EvaluationOutsideDomain { modulus: w.norm() });
    }
    Ok(1.0 / (w - f.eval(1.0 / w)))
}

/// Read `(b, ρ)` off a logarithm `u` with non-positive real part.
///
/// The sign is tested on the Fejér mean of `u`. A plain truncation of a genuine
/// Herglotz series can have positive real part, while the Fejér mean convolves
/// `ρ` against a positive kernel and stays non-positive.
pub fn herglotz_analyze(u: &TruncatedSeries) -> Result<HerglotzData> {
    let n = u.order() as f64;
    let fejer = TruncatedSeries::from_vec_unchecked(
        u.coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c * (1.0 - k as f64 / (n + 1.0)))
            .collect(),
    );
    let max_real = sample_points()
        .map(|z| fejer.eval(z).re)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_real > HERGLOTZ_SIGN_TOLERANCE {
        return Err(Error::NotAHerglotzLogarithm { max_real });
    }
    let u0 = u.coeff(0);
    let mass = (-u0.re).max(0.0);
    let r = u.coeffs()[1..].iter().map(|c| -c * 0.5).collect();
    Ok(HerglotzData::new(
        u0.im,
        FiniteCircleMeasure {
            mass,
            r,
            atoms: None,
        },
    ))
}

/// Coefficients of `u(z) = ib − ∫ (x+z)/(x−z) dρ(x)` up to `degree`, or up to the
/// order to which `ρ` is known if that is lower.
pub fn herglotz_synthesize(h: &HerglotzData, degree: usize) -> TruncatedSeries {
    let n = h.rho.known_order().map_or(degree, |k| k.min(degree));
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(Complex64::new(-h.rho.mass, h.b));
    for k in 1..=n {
        coeffs.push(-2.0 * h.rho.conj_moment(k).unwrap_or_default());
    }
    TruncatedSeries::from_vec_unchecked(coeffs)
}

impl CircleMeasure {
    /// `F_μ(z)`. Atomic and structured measures are evaluated in closed form;
    /// moment input uses the truncated series.
    pub fn f_at(&self, z: Complex64) -> Result<Complex64> {
        match self {
            Self::Atomic(a) => {
                // ψ(z)/z = Σ w x/(1 − xz), free of cancellation at the origin
                let mut psi_over_z = Complex64::new(0.0, 0.0);
                for (x, w) in a.points() {
                    psi_over_z += w * x / (1.0 - x * z);
                }
                Ok(psi_over_z / (1.0 + z * psi_over_z))
            }
            Self::Moments(m) => {
                let f = f_from_psi(&psi_from_moments(m))?;
                Ok(f.eval(z))
            }
            Self::Structured(f) => Ok(f.eval(z)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::AtomicMeasure;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real_series(v: &[f64]) -> TruncatedSeries {
        TruncatedSeries::new(v.iter().map(|&x| c(x, 0.0)).collect()).unwrap()
    }

    fn assert_series(s: &TruncatedSeries, expected: &[Complex64], tol: f64) {
        for (k, e) in expected.iter().enumerate() {
            assert!(
                (s.coeff(k) - e).norm() <= tol,
                "coefficient {k}: {} vs {e}",
                s.coeff(k)
            );
        }
    }

    const N: usize = 12;

    fn ones() -> Vec<Complex64> {
        vec![c(1.0, 0.0); N]
    }

    fn alternating() -> Vec<Complex64> {
        (1..=N)
            .map(|k| c(if k % 2 == 0 { 1.0 } else { 0.0 }, 0.0))
            .collect()
    }

    #[test]
    fn psi_from_moments_examples() {
        let psi = psi_from_moments(&ones());
        let mut expected = vec![c(0.0, 0.0)];
        expected.extend(ones());
        assert_series(&psi, &expected, 0.0);
        assert_series(
            &psi_from_moments(&[c(0.0, 0.0); N]),
            &[c(0.0, 0.0); N + 1],
            0.0,
        );
        // z²/(1−z²)
        let psi2 = psi_from_moments(&alternating());
        assert_eq!(psi2.coeff(1), c(0.0, 0.0));
        assert_eq!(psi2.coeff(2), c(1.0, 0.0));
        assert_eq!(psi2.coeff(12), c(1.0, 0.0));
    }

    #[test]
    fn f_from_psi_examples() {
        let f = f_from_psi(&psi_from_moments(&ones())).unwrap();
        let mut expected = vec![c(0.0, 0.0); N];
        expected[0] = c(1.0, 0.0);
        assert_series(&f, &expected, 1e-14);
        assert_eq!(f.order(), N - 1);

        let f = f_from_psi(&psi_from_moments(&[c(0.0, 0.0); N])).unwrap();
        assert_series(&f, &[c(0.0, 0.0); N], 0.0);

        let f = f_from_psi(&psi_from_moments(&alternating())).unwrap();
        let mut expected = vec![c(0.0, 0.0); N];
        expected[1] = c(1.0, 0.0);
        assert_series(&f, &expected, 1e-14);
    }

    #[test]
    fn psi_from_f_examples() {
        let psi = psi_from_f(&TruncatedSeries::one(N - 1));
        let mut expected = vec![c(0.0, 0.0)];
        expected.extend(ones());
        assert_series(&psi, &expected, 1e-14);

        let z = TruncatedSeries::monomial(c(1.0, 0.0), 1, N - 1);
        let mut expected = vec![c(0.0, 0.0)];
        expected.extend(alternating());
        assert_series(&psi_from_f(&z), &expected, 1e-14);

        assert_series(
            &psi_from_f(&TruncatedSeries::zero(4)),
            &[c(0.0, 0.0); 6],
            0.0,
        );
    }

    #[test]
    fn f_from_measure_examples() {
        let b = 1.234;
        let dirac = CircleMeasure::atomic(vec![b], vec![1.0]).unwrap();
        match f_from_measure(&dirac, N).unwrap() {
            StructuredF::Constant(v) => assert!((v - Complex64::from_polar(1.0, b)).norm() < 1e-15),
            other => panic!("expected a constant, got {other:?}"),
        }

        let two = CircleMeasure::atomic(vec![0.0, PI], vec![0.5, 0.5]).unwrap();
        match f_from_measure(&two, N).unwrap() {
            StructuredF::Series(s) => {
                let mut expected = vec![c(0.0, 0.0); N];
                expected[1] = c(1.0, 0.0);
                assert_series(&s, &expected, 1e-14);
            }
            other => panic!("expected a series, got {other:?}"),
        }

        let haar = CircleMeasure::Moments(vec![c(0.0, 0.0); N]);
        assert_eq!(f_from_measure(&haar, N).unwrap(), StructuredF::Zero);
    }

    #[test]
    fn moments_from_f_examples() {
        assert_eq!(
            moments_from_f(&StructuredF::Zero, 5).unwrap(),
            vec![c(0.0, 0.0); 5]
        );

        let cst = c(0.3, 0.4);
        let m = moments_from_f(&StructuredF::Constant(cst), 6).unwrap();
        // same moments through the series route ψ = zc/(1 − zc)
        let via_series =
            moments_from_f(&StructuredF::Series(TruncatedSeries::constant(cst, 5)), 6).unwrap();
        for k in 0..6 {
            assert!((m[k] - cst.powi(k as i32 + 1)).norm() < 1e-15);
            assert!((via_series[k] - m[k]).norm() < 1e-15);
        }

        let z = StructuredF::Series(TruncatedSeries::monomial(c(1.0, 0.0), 1, N - 1));
        let m = moments_from_f(&z, N).unwrap();
        for (a, b) in m.iter().zip(alternating()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn cauchy_examples() {
        let w = c(2.0, 0.0);
        let delta = StructuredF::Constant(c(1.0, 0.0));
        assert!((cauchy_eval(&delta, w).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((cauchy_eval(&StructuredF::Zero, w).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        let lambda2 = StructuredF::Series(TruncatedSeries::monomial(c(1.0, 0.0), 1, 8));
        let direct = 0.5 / (w - 1.0) + 0.5 / (w + 1.0);
        let g = cauchy_eval(&lambda2, w).unwrap();
        assert!((g - c(2.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!((g - direct).norm() < 1e-15);
        assert!(matches!(
            cauchy_eval(&delta, c(0.5, 0.5)),
            Err(Error::EvaluationOutsideDomain { .. })
        ));
    }

    #[test]
    fn herglotz_analyze_examples() {
        let h = herglotz_analyze(&real_series(&[-1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(h.b, 0.0);
        assert_eq!(h.rho.mass, 1.0);
        assert!(h.rho.r.iter().all(|r| r.norm() == 0.0));

        let b = 2.5;
        let h = herglotz_analyze(&TruncatedSeries::constant(c(0.0, b), 4)).unwrap();
        assert_eq!(h.b, b);
        assert_eq!(h.rho.mass, 0.0);

        // −(1+z)/(1−z) = −1 − 2z − 2z² − …
        let mut v = vec![-2.0; 10];
        v[0] = -1.0;
        let h = herglotz_analyze(&real_series(&v)).unwrap();
        assert_eq!(h.rho.mass, 1.0);
        assert!(h.rho.r.iter().all(|r| (r - c(1.0, 0.0)).norm() == 0.0));
    }

    #[test]
    fn herglotz_analyze_rejects_positive_real_part() {
        let err = herglotz_analyze(&real_series(&[0.0, 1.0])).unwrap_err();
        assert!(matches!(err, Error::NotAHerglotzLogarithm { .. }));
    }

    #[test]
    fn herglotz_synthesize_examples() {
        let zero = HerglotzData::new(0.0, FiniteCircleMeasure::zero());
        assert_series(&herglotz_synthesize(&zero, 6), &[c(0.0, 0.0); 7], 0.0);

        let delta =
            FiniteCircleMeasure::from_atoms(AtomicMeasure::new(vec![0.0], vec![1.0]).unwrap(), 6);
        let u = herglotz_synthesize(&HerglotzData::new(0.0, delta), 6);
        let mut expected = vec![c(-2.0, 0.0); 7];
        expected[0] = c(-1.0, 0.0);
        assert_series(&u, &expected, 1e-15);
    }

    #[test]
    fn herglotz_round_trip_is_exact() {
        let atoms = AtomicMeasure::new(vec![0.3, 2.2, 5.0], vec![0.2, 0.5, 0.7]).unwrap();
        let h = HerglotzData::new(4.0, FiniteCircleMeasure::from_atoms(atoms, 10));
        let u = herglotz_synthesize(&h, 10);
        let back = herglotz_analyze(&u).unwrap();
        assert!((back.b - h.b).abs() < 1e-12);
        assert!((back.rho.mass - h.rho.mass).abs() < 1e-12);
        for (a, b) in back.rho.r.iter().zip(&h.rho.r) {
            assert!((a - b).norm() < 1e-12);
        }
        assert_eq!(herglotz_synthesize(&back, 10), u);
    }

    #[test]
    fn blaschke_series_matches_closed_form() {
        let f = StructuredF::Blaschke {
            p: 1,
            factors: vec![BlaschkeFactor {
                alpha: c(0.3, -0.4),
                multiplicity: 2,
            }],
            phase: Complex64::from_polar(1.0, 0.7),
        };
        let s = f.to_series(60).unwrap();
        for z in [c(0.1, 0.2), c(-0.4, 0.1), c(0.0, -0.5)] {
            assert!((s.eval(z) - f.eval(z)).norm() < 1e-13);
        }
        assert!(f.violations().is_empty());
    }

    #[test]
    fn blaschke_near_boundary_is_rejected() {
        let f = StructuredF::Blaschke {
            p: 0,
            factors: vec![BlaschkeFactor {
                alpha: c(0.96, 0.0),
                multiplicity: 1,
            }],
            phase: c(1.0, 0.0),
        };
        assert!(matches!(
            f.to_series(8),
            Err(Error::ConditioningWarning { .. })
        ));
    }

    #[test]
    fn atomic_f_at_agrees_with_series() {
        let mu = CircleMeasure::atomic(vec![0.4, 1.9, 4.1], vec![0.2, 0.3, 0.5]).unwrap();
        let f = f_from_measure(&mu, 200).unwrap();
        for z in [c(0.0, 0.0), c(0.3, 0.1), c(-0.2, 0.5)] {
            assert!((mu.f_at(z).unwrap() - f.eval(z)).norm() < 1e-12);
        }
        assert!((mu.f_at(c(0.0, 0.0)).unwrap() - mu.moments(1).unwrap()[0]).norm() < 1e-15);
    }

    #[test]
    fn violations_flag_constant_outside_disk() {
        let v = StructuredF::Constant(c(1.1, 0.0)).violations();
        assert!(matches!(v[0], Violation::ConstantOutsideDisk { .. }));
        let v = StructuredF::Series(real_series(&[0.0, 2.0])).violations();
        assert!(matches!(v[0], Violation::ModulusExceedsOne { .. }));
    }
}
