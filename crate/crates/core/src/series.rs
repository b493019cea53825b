//! Truncated complex power series at the origin.
//!
//! A [`TruncatedSeries`] of order `N` stores `c_0..c_N`. Binary operations
//! truncate to the smaller of the two orders.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Constant terms at or below this modulus are treated as zero by `div` and `log_series`.
pub const UNIT_TOLERANCE: f64 = 1e-14;

/// Constant terms at or below this modulus may be removed by [`TruncatedSeries::shift_down`].
pub const REMOVABLE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<Complex64>,
}

impl TruncatedSeries {
    /// Build a series from `c_0..c_N`. An empty slice gives the order-0 zero series.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCoefficient { index });
        }
        if coeffs.is_empty() {
            return Ok(Self::zero(0));
        }
        Ok(Self { coeffs })
    }

    pub(crate) fn from_vec_unchecked(coeffs: Vec<Complex64>) -> Self {
        debug_assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); order + 1],
        }
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Complex64::new(1.0, 0.0), order)
    }

    /// `c · z^k`, truncated at `order`.
    pub fn monomial(c: Complex64, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// `1/(1 − q z) = Σ q^k z^k`.
    pub fn geometric(q: Complex64, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut p = Complex64::new(1.0, 0.0);
        for _ in 0..=order {
            coeffs.push(p);
            p *= q;
        }
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Complex64::new(0.0, 0.0));
        Self { coeffs }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Self {
            coeffs: (0..=n).map(|k| self.coeffs[k] + other.coeffs[k]).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Self {
            coeffs: (0..=n).map(|k| self.coeffs[k] - other.coeffs[k]).collect(),
        }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let a = &self.coeffs;
        let b = &other.coeffs;
        let coeffs = (0..=n)
            .map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum())
            .collect();
        Self { coeffs }
    }

    /// `self^n` by repeated squaring.
    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one(self.order());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Quotient `q` with `q · divisor = self` up to the common order.
    pub fn div(&self, divisor: &Self) -> Result<Self> {
        let b0 = divisor.coeffs[0];
        if b0.norm() <= UNIT_TOLERANCE {
            return Err(Error::DivisionByNonUnit { constant: b0 });
        }
        let n = self.order().min(divisor.order());
        let b = &divisor.coeffs;
        let mut q: Vec<Complex64> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let acc: Complex64 = (0..k).map(|j| q[j] * b[k - j]).sum();
            q.push((self.coeffs[k] - acc) / b0);
        }
        Ok(Self { coeffs: q })
    }

    /// `exp ∘ self`, from `(exp a)' = a' · exp a`.
    pub fn exp_series(&self) -> Self {
        let a = &self.coeffs;
        let n = self.order();
        let mut e: Vec<Complex64> = Vec::with_capacity(n + 1);
        e.push(a[0].exp());
        for k in 1..=n {
            let acc: Complex64 = (1..=k).map(|j| a[j] * e[k - j] * j as f64).sum();
            e.push(acc / k as f64);
        }
        Self { coeffs: e }
    }

    /// Principal logarithm. The constant term is `Log(c_0)` with imaginary part in `(−π, π]`.
    pub fn log_series(&self) -> Result<Self> {
        let a = &self.coeffs;
        let a0 = a[0];
        if a0.norm() <= UNIT_TOLERANCE {
            return Err(Error::LogOfZeroConstantTerm { constant: a0 });
        }
        let n = self.order();
        let mut l: Vec<Complex64> = Vec::with_capacity(n + 1);
        l.push(a0.ln());
        // k a_0 l_k = k a_k − Σ_{j=1}^{k−1} j l_j a_{k−j}
        for k in 1..=n {
            let acc: Complex64 = (1..k).map(|j| l[j] * a[k - j] * j as f64).sum();
            l.push((a[k] * k as f64 - acc) / (a0 * k as f64));
        }
        Ok(Self { coeffs: l })
    }

    /// `n`-th root `exp(log(self)/n)` on the principal branch.
    pub fn nth_root(&self, n: u32) -> Result<Self> {
        let l = self.log_series()?;
        Ok(l.scale(Complex64::new(1.0 / n as f64, 0.0)).exp_series())
    }

    /// Divide by `z`. The order drops by one.
    pub fn shift_down(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        if c0.norm() > REMOVABLE_TOLERANCE {
            return Err(Error::NonVanishingConstantTerm { constant: c0 });
        }
        if self.coeffs.len() == 1 {
            return Ok(Self::zero(0));
        }
        Ok(Self {
            coeffs: self.coeffs[1..].to_vec(),
        })
    }

    /// Multiply by `z`. The order grows by one.
    pub fn shift_up(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero(0);
        }
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        }
    }

    /// Horner evaluation of the polynomial `Σ c_k z^k`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Largest coefficient-wise modulus of `self − other` over the common order.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        TruncatedSeries::add(self, rhs)
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        TruncatedSeries::sub(self, rhs)
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: Self) -> TruncatedSeries {
        TruncatedSeries::mul(self, rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(v: &[f64]) -> TruncatedSeries {
        TruncatedSeries::new(v.iter().map(|&x| c(x, 0.0)).collect()).unwrap()
    }

    fn assert_coeffs(s: &TruncatedSeries, expected: &[f64], tol: f64) {
        for (k, &e) in expected.iter().enumerate() {
            assert!(
                (s.coeff(k) - c(e, 0.0)).norm() <= tol,
                "coefficient {k}: {} vs {e}",
                s.coeff(k)
            );
        }
    }

    #[test]
    fn add_examples() {
        assert_coeffs(
            &real(&[1.0, 1.0]).add(&real(&[1.0, -1.0])),
            &[2.0, 0.0],
            0.0,
        );
        let s = real(&[0.3, -0.2, 0.7]);
        assert_eq!(TruncatedSeries::zero(2).add(&s), s);
        assert_coeffs(
            &real(&[0.0, 1.0, 0.0]).add(&real(&[0.0, 0.0, 1.0])),
            &[0.0, 1.0, 1.0],
            0.0,
        );
    }

    #[test]
    fn add_truncates_to_min_order() {
        let s = real(&[1.0, 2.0, 3.0]).add(&real(&[1.0]));
        assert_eq!(s.order(), 0);
    }

    #[test]
    fn mul_examples() {
        assert_coeffs(
            &real(&[1.0, 1.0, 0.0]).mul(&real(&[1.0, -1.0, 0.0])),
            &[1.0, 0.0, -1.0],
            0.0,
        );
        let z = TruncatedSeries::monomial(c(1.0, 0.0), 1, 4);
        assert_coeffs(&z.mul(&z), &[0.0, 0.0, 1.0, 0.0, 0.0], 0.0);
        let s = real(&[0.3, -0.2, 0.7]);
        assert_eq!(TruncatedSeries::one(2).mul(&s), s);
    }

    #[test]
    fn div_examples() {
        let one = TruncatedSeries::one(8);
        let g = one
            .div(&real(&[1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]))
            .unwrap();
        assert_coeffs(&g, &[1.0; 9], 1e-15);

        let s = real(&[0.5, 0.1, -0.3, 0.2]);
        assert_coeffs(&s.div(&s).unwrap(), &[1.0, 0.0, 0.0, 0.0], 1e-15);

        // z/(1−z²), long division: 0, 1, 0, 1, 0, 1
        let num = TruncatedSeries::monomial(c(1.0, 0.0), 1, 5);
        let den = real(&[1.0, 0.0, -1.0, 0.0, 0.0, 0.0]);
        assert_coeffs(
            &num.div(&den).unwrap(),
            &[0.0, 1.0, 0.0, 1.0, 0.0, 1.0],
            1e-15,
        );
    }

    #[test]
    fn div_by_non_unit_fails() {
        let err = real(&[1.0, 1.0]).div(&real(&[1e-15, 1.0])).unwrap_err();
        assert!(matches!(err, Error::DivisionByNonUnit { .. }));
    }

    #[test]
    fn exp_examples() {
        assert_coeffs(
            &TruncatedSeries::zero(5).exp_series(),
            &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            0.0,
        );
        let e = TruncatedSeries::monomial(c(1.0, 0.0), 1, 6).exp_series();
        let mut fact = 1.0;
        for k in 0..=6 {
            if k > 0 {
                fact *= k as f64;
            }
            assert!((e.coeff(k) - c(1.0 / fact, 0.0)).norm() < 1e-15);
        }
        let s = real(&[1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_coeffs(
            &s.log_series().unwrap().exp_series(),
            &[1.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            1e-14,
        );
    }

    #[test]
    fn log_examples() {
        assert_coeffs(
            &TruncatedSeries::one(4).log_series().unwrap(),
            &[0.0; 5],
            0.0,
        );
        let z = TruncatedSeries::monomial(c(1.0, 0.0), 1, 6);
        assert_coeffs(
            &z.exp_series().log_series().unwrap(),
            &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            1e-15,
        );
        let l = real(&[1.0, -1.0, 0.0, 0.0, 0.0, 0.0]).log_series().unwrap();
        assert_coeffs(&l, &[0.0, -1.0, -0.5, -1.0 / 3.0, -0.25, -0.2], 1e-15);
    }

    #[test]
    fn log_of_zero_constant_fails() {
        let err = real(&[0.0, 1.0]).log_series().unwrap_err();
        assert!(matches!(err, Error::LogOfZeroConstantTerm { .. }));
    }

    #[test]
    fn shift_examples() {
        assert_coeffs(
            &real(&[0.0, 1.0, 1.0]).shift_down().unwrap(),
            &[1.0, 1.0],
            0.0,
        );
        assert_coeffs(&TruncatedSeries::one(0).shift_up(), &[0.0, 1.0], 0.0);
        let s = real(&[0.2, 0.4, -0.1]);
        assert_eq!(s.shift_up().shift_down().unwrap(), s);
        assert!(matches!(
            real(&[0.1, 1.0]).shift_down(),
            Err(Error::NonVanishingConstantTerm { .. })
        ));
    }

    #[test]
    fn eval_examples() {
        let ones = real(&[1.0; 9]);
        assert_eq!(ones.eval(c(0.0, 0.0)), c(1.0, 0.0));
        let z = TruncatedSeries::monomial(c(1.0, 0.0), 1, 3);
        assert!((z.eval(c(0.0, 0.5)) - c(0.0, 0.5)).norm() < 1e-16);
        let g = TruncatedSeries::geometric(c(1.0, 0.0), 64);
        assert!((g.eval(c(0.5, 0.0)) - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn nth_root_squares_back() {
        let s = real(&[2.0, 0.3, -0.1, 0.05, 0.0, 0.0]);
        let r = s.nth_root(2).unwrap();
        assert!(r.mul(&r).max_abs_diff(&s) < 1e-14);
        assert!(s.pow(3).max_abs_diff(&s.mul(&s).mul(&s)) < 1e-14);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(
            TruncatedSeries::new(vec![c(1.0, 0.0), c(f64::NAN, 0.0)]),
            Err(Error::NonFiniteCoefficient { index: 1 })
        ));
    }

    fn series_strategy(bound: f64, order: usize) -> impl Strategy<Value = TruncatedSeries> {
        prop::collection::vec((-bound..bound, -bound..bound), order + 1).prop_map(|v| {
            TruncatedSeries::new(v.into_iter().map(|(re, im)| c(re, im)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn mul_commutes_and_associates(
            a in series_strategy(1.0, 16),
            b in series_strategy(1.0, 16),
            d in series_strategy(1.0, 16),
        ) {
            prop_assert!(a.mul(&b).max_abs_diff(&b.mul(&a)) < 1e-13);
            prop_assert!(a.mul(&b).mul(&d).max_abs_diff(&a.mul(&b.mul(&d))) < 1e-13);
        }

        #[test]
        fn div_inverts_mul(
            a in series_strategy(1.0, 16),
            b0 in (0.1f64..1.0, 0.0f64..std::f64::consts::TAU),
            rest in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
        ) {
            // tail scaled so that Σ_{k≥1} |b_k| ≤ |b_0|/2 keeps 1/b bounded on the disk
            let tail: f64 = rest.iter().map(|(re, im)| c(*re, *im).norm()).sum();
            let s = 0.5 * b0.0 / tail.max(1e-300);
            let mut coeffs = vec![Complex64::from_polar(b0.0, b0.1)];
            coeffs.extend(rest.into_iter().map(|(re, im)| c(re, im) * s.min(1.0)));
            let b = TruncatedSeries::new(coeffs).unwrap();
            let q = a.mul(&b).div(&b).unwrap();
            prop_assert!(q.max_abs_diff(&a) < 1e-12, "deviation {}", q.max_abs_diff(&a));
        }

        #[test]
        fn exp_is_additive(a in series_strategy(0.5, 16), b in series_strategy(0.5, 16)) {
            let lhs = a.add(&b).exp_series();
            let rhs = a.exp_series().mul(&b.exp_series());
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-11);
        }

        #[test]
        fn log_inverts_exp(a in series_strategy(0.5, 16), im in -3.0f64..3.0) {
            let mut coeffs = a.coeffs().to_vec();
            coeffs[0].im = im;
            let a = TruncatedSeries::new(coeffs).unwrap();
            let back = a.exp_series().log_series().unwrap();
            prop_assert!(back.max_abs_diff(&a) < 1e-11);
        }
    }
}
