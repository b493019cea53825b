//! The multiplicative boolean convolution `μ ⊍ ν`, computed through the
//! product `F_{μ⊍ν} = F_μ · F_ν`, and two independent ways of computing the
//! moments of `UV` directly:
//!
//! * [`product_moments_combinatorial`] expands `φ((UV)^n)` with `U = X + 1`,
//!   `V = Y + 1` into words in `X, Y` and factorizes each alternating word as
//!   `φ(X^{n₁}Y^{m₁}⋯) = Π φ(X^{n_ℓ}) φ(Y^{m_ℓ})`;
//! * [`OperatorPairModel`] realizes `U`, `V` as unitaries on `ℂ^{d_u} ⊗ ℂ^{d_v}`
//!   whose differences from the identity are boolean independent in a product state.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure, CircleMeasure};
use crate::random;
use crate::transform::{f_from_measure, psi_from_f, StructuredF};

/// Largest `n` accepted by the combinatorial oracle (cost `4^n`).
pub const MAX_ORACLE_ORDER: usize = 10;
/// Largest tensor dimension accepted by the operator model.
pub const MAX_MODEL_DIM: usize = 4096;

/// `μ ⊍ ν` to `order` moments.
///
/// Products involving `Zero` and products of two constants stay in closed form;
/// everything else comes back as moments.
pub fn convolve(mu: &CircleMeasure, nu: &CircleMeasure, order: usize) -> Result<CircleMeasure> {
    let f = f_from_measure(mu, order)?;
    let g = f_from_measure(nu, order)?;
    match (&f, &g) {
        (StructuredF::Zero, _) | (_, StructuredF::Zero) => {
            return Ok(CircleMeasure::Structured(StructuredF::Zero))
        }
        (StructuredF::Constant(a), StructuredF::Constant(b)) => {
            return Ok(CircleMeasure::Structured(StructuredF::Constant(a * b)))
        }
        _ => {}
    }
    let degree = order.saturating_sub(1);
    let product = f.to_series(degree)?.mul(&g.to_series(degree)?);
    Ok(CircleMeasure::Moments(
        psi_from_f(&product).coeffs()[1..].to_vec(),
    ))
}

/// `μ^{⊍n}` through `F^n`.
pub fn convolve_power(mu: &CircleMeasure, n: u32, order: usize) -> Result<CircleMeasure> {
    if n == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "n",
            value: 0.0,
        });
    }
    let f = f_from_measure(mu, order)?;
    match &f {
        StructuredF::Zero => return Ok(CircleMeasure::Structured(StructuredF::Zero)),
        StructuredF::Constant(c) => {
            return Ok(CircleMeasure::Structured(StructuredF::Constant(c.powu(n))))
        }
        _ => {}
    }
    let power = f.to_series(order.saturating_sub(1))?.pow(n);
    Ok(CircleMeasure::Moments(
        psi_from_f(&power).coeffs()[1..].to_vec(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    X,
    Y,
}

/// `φ(X^{n₁} Y^{m₁} X^{n₂} ⋯)` for boolean independent `X`, `Y`: the product of
/// the single-letter moments. `x_moms[k] = φ(X^k)`, `x_moms[0] = 1`.
///
/// The word must already be merged into blocks: consecutive blocks use
/// different letters and every exponent is at least one.
pub fn boolean_word_moment(
    x_moms: &[Complex64],
    y_moms: &[Complex64],
    word: &[(Letter, usize)],
) -> Result<Complex64> {
    let mut product = Complex64::new(1.0, 0.0);
    for (i, &(letter, exp)) in word.iter().enumerate() {
        if exp == 0 || (i > 0 && word[i - 1].0 == letter) {
            return Err(Error::WordNotAlternating { position: i });
        }
        let moms = match letter {
            Letter::X => x_moms,
            Letter::Y => y_moms,
        };
        let m = moms.get(exp).ok_or(Error::ParameterOutOfRange {
            name: "word exponent",
            value: exp as f64,
        })?;
        product *= m;
    }
    Ok(product)
}

/// `φ((U−1)^k) = Σ_j C(k,j) (−1)^{k−j} m_j` for `k = 0..=n`.
fn centered_moments(m: &[Complex64], n: usize) -> Vec<Complex64> {
    let moment = |j: usize| {
        if j == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            m[j - 1]
        }
    };
    (0..=n)
        .map(|k| {
            let mut binom = 1.0;
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..=k {
                if j > 0 {
                    binom = binom * (k + 1 - j) as f64 / j as f64;
                }
                let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
                acc += moment(j) * binom * sign;
            }
            acc
        })
        .collect()
}

/// The `n`-th moment of `μ ⊍ ν` by brute-force expansion of `φ((UV)^n)`.
pub fn product_moments_combinatorial(
    mu: &CircleMeasure,
    nu: &CircleMeasure,
    n: usize,
) -> Result<Complex64> {
    if n > MAX_ORACLE_ORDER {
        return Err(Error::OrderTooLargeForOracle { n });
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let x_moms = centered_moments(&mu.moments(n)?, n);
    let y_moms = centered_moments(&nu.moments(n)?, n);
    if x_moms.len() <= n || y_moms.len() <= n {
        return Err(Error::InvalidMeasure(format!(
            "fewer than {n} moments available"
        )));
    }
    let factors = 2 * n;
    let mut word: Vec<(Letter, usize)> = Vec::with_capacity(factors);
    let mut total = Complex64::new(0.0, 0.0);
    for mask in 0u32..(1u32 << factors) {
        word.clear();
        for i in 0..factors {
            if mask & (1 << i) == 0 {
                continue;
            }
            let letter = if i % 2 == 0 { Letter::X } else { Letter::Y };
            match word.last_mut() {
                Some((last, exp)) if *last == letter => *exp += 1,
                _ => word.push((letter, 1)),
            }
        }
        total += boolean_word_moment(&x_moms, &y_moms, &word)?;
    }
    Ok(total)
}

/// Unitaries `Ũ = U ⊗ P_{ξ_v} + I ⊗ (I − P_{ξ_v})` and
/// `Ṽ = P_{ξ_u} ⊗ V + (I − P_{ξ_u}) ⊗ I` on `ℂ^{d_u} ⊗ ℂ^{d_v}` with the state
/// `ξ_u ⊗ ξ_v`, where `U`, `V` are diagonal with the atoms of `μ`, `ν` and
/// `ξ` holds square roots of the weights.
///
/// Vectors are indexed `i · d_v + j`. Since `U`, `V` are diagonal the operators
/// are applied in `O(d_u d_v)` without forming the matrices.
#[derive(Debug, Clone)]
pub struct OperatorPairModel {
    u_diag: Vec<Complex64>,
    v_diag: Vec<Complex64>,
    xi_u: Vec<f64>,
    xi_v: Vec<f64>,
    mu: AtomicMeasure,
    nu: AtomicMeasure,
}

impl OperatorPairModel {
    pub fn build(mu: &CircleMeasure, nu: &CircleMeasure) -> Result<Self> {
        match (mu, nu) {
            (CircleMeasure::Atomic(a), CircleMeasure::Atomic(b)) => Self::from_atoms(a, b),
            _ => Err(Error::NotAtomic),
        }
    }

    pub fn from_atoms(mu: &AtomicMeasure, nu: &AtomicMeasure) -> Result<Self> {
        let dim = mu.len() * nu.len();
        if dim > MAX_MODEL_DIM {
            return Err(Error::DimensionTooLarge { dim });
        }
        if dim == 0 {
            return Err(Error::InvalidMeasure("empty atomic measure".into()));
        }
        if mu.weights.iter().chain(&nu.weights).any(|w| *w < 0.0) {
            return Err(Error::InvalidMeasure("negative weight".into()));
        }
        let unit = |t: &f64| Complex64::from_polar(1.0, *t);
        Ok(Self {
            u_diag: mu.angles.iter().map(unit).collect(),
            v_diag: nu.angles.iter().map(unit).collect(),
            xi_u: mu.weights.iter().map(|w| w.sqrt()).collect(),
            xi_v: nu.weights.iter().map(|w| w.sqrt()).collect(),
            mu: mu.clone(),
            nu: nu.clone(),
        })
    }

    pub fn dim_u(&self) -> usize {
        self.u_diag.len()
    }

    pub fn dim_v(&self) -> usize {
        self.v_diag.len()
    }

    pub fn dim(&self) -> usize {
        self.dim_u() * self.dim_v()
    }

    pub fn state(&self) -> Vec<Complex64> {
        self.xi_u
            .iter()
            .flat_map(|a| self.xi_v.iter().map(move |b| Complex64::new(a * b, 0.0)))
            .collect()
    }

    fn apply_u_with(&self, x: &[Complex64], diag: impl Fn(usize) -> Complex64) -> Vec<Complex64> {
        let dv = self.dim_v();
        let mut y = x.to_vec();
        for i in 0..self.dim_u() {
            let row = &x[i * dv..(i + 1) * dv];
            let s: Complex64 = row.iter().zip(&self.xi_v).map(|(a, w)| a * w).sum();
            let coef = (diag(i) - 1.0) * s;
            for j in 0..dv {
                y[i * dv + j] += coef * self.xi_v[j];
            }
        }
        y
    }

    fn apply_v_with(&self, x: &[Complex64], diag: impl Fn(usize) -> Complex64) -> Vec<Complex64> {
        let dv = self.dim_v();
        let mut y = x.to_vec();
        for j in 0..dv {
            let s: Complex64 = (0..self.dim_u())
                .map(|i| x[i * dv + j] * self.xi_u[i])
                .sum();
            let coef = (diag(j) - 1.0) * s;
            for i in 0..self.dim_u() {
                y[i * dv + j] += coef * self.xi_u[i];
            }
        }
        y
    }

    /// `Ũ x`.
    pub fn apply_u(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.apply_u_with(x, |i| self.u_diag[i])
    }

    /// `Ũ* x`.
    pub fn apply_u_adjoint(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.apply_u_with(x, |i| self.u_diag[i].conj())
    }

    /// `Ṽ x`.
    pub fn apply_v(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.apply_v_with(x, |j| self.v_diag[j])
    }

    /// `Ṽ* x`.
    pub fn apply_v_adjoint(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.apply_v_with(x, |j| self.v_diag[j].conj())
    }

    /// `⟨ξ, (ŨṼ)^k ξ⟩` for `k = 1..=k_max`, by repeated application to the state.
    pub fn moments(&self, k_max: usize) -> Vec<Complex64> {
        let state = self.state();
        let mut y = state.clone();
        (0..k_max)
            .map(|_| {
                y = self.apply_u(&self.apply_v(&y));
                inner(&state, &y)
            })
            .collect()
    }

    /// `max(‖Ũ*Ũ − I‖_max, ‖Ṽ*Ṽ − I‖_max)`, column by column.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim();
        (0..d)
            .into_par_iter()
            .map(|col| {
                let mut e = vec![Complex64::new(0.0, 0.0); d];
                e[col] = Complex64::new(1.0, 0.0);
                let uu = self.apply_u_adjoint(&self.apply_u(&e));
                let vv = self.apply_v_adjoint(&self.apply_v(&e));
                uu.iter()
                    .chain(&vv)
                    .enumerate()
                    .map(|(idx, z)| {
                        let target = if idx % d == col { 1.0 } else { 0.0 };
                        (z - target).norm()
                    })
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Largest deviation of `⟨ξ, Ũ^k ξ⟩`, `⟨ξ, Ṽ^k ξ⟩` from the moments of `μ`, `ν`, `k ≤ k_max`.
    pub fn marginal_defect(&self, k_max: usize) -> f64 {
        let state = self.state();
        let mut yu = state.clone();
        let mut yv = state.clone();
        let mut worst: f64 = 0.0;
        for k in 1..=k_max {
            yu = self.apply_u(&yu);
            yv = self.apply_v(&yv);
            worst = worst
                .max((inner(&state, &yu) - self.mu.moment(k as i64)).norm())
                .max((inner(&state, &yv) - self.nu.moment(k as i64)).norm());
        }
        worst
    }

    /// Dense `Ũ` (row-major), by applying it to the basis.
    pub fn dense_u(&self) -> Vec<Vec<Complex64>> {
        self.dense(|x| self.apply_u(x))
    }

    /// Dense `Ṽ` (row-major).
    pub fn dense_v(&self) -> Vec<Vec<Complex64>> {
        self.dense(|x| self.apply_v(x))
    }

    fn dense(&self, op: impl Fn(&[Complex64]) -> Vec<Complex64>) -> Vec<Vec<Complex64>> {
        let d = self.dim();
        let mut rows = vec![vec![Complex64::new(0.0, 0.0); d]; d];
        for col in 0..d {
            let mut e = vec![Complex64::new(0.0, 0.0); d];
            e[col] = Complex64::new(1.0, 0.0);
            for (row, v) in op(&e).into_iter().enumerate() {
                rows[row][col] = v;
            }
        }
        rows
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Outcome of a seeded multiplicativity sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub seed: u64,
    pub pairs: usize,
    pub moments: usize,
    pub max_deviation_combinatorial: f64,
    pub max_deviation_operator: f64,
}

impl SweepReport {
    pub fn max_deviation(&self) -> f64 {
        self.max_deviation_combinatorial
            .max(self.max_deviation_operator)
    }
}

/// Compare moments `1..=moments` of [`convolve`] with both oracles on `pairs`
/// seeded random atomic pairs with at most `max_atoms` atoms each.
pub fn verify_multiplicativity(
    seed: u64,
    pairs: usize,
    max_atoms: usize,
    moments: usize,
) -> Result<SweepReport> {
    let moments = moments.min(MAX_ORACLE_ORDER);
    let draws = random::random_pairs(seed, pairs, max_atoms);
    let deviations: Vec<(f64, f64)> = draws
        .par_iter()
        .map(|(a, b)| pair_deviation(a, b, moments))
        .collect::<Result<_>>()?;
    let (comb, op) = deviations
        .iter()
        .fold((0.0f64, 0.0f64), |(c, o), (x, y)| (c.max(*x), o.max(*y)));
    Ok(SweepReport {
        seed,
        pairs,
        moments,
        max_deviation_combinatorial: comb,
        max_deviation_operator: op,
    })
}

/// Largest deviation of `convolve` from the combinatorial and the operator oracle.
pub fn pair_deviation(a: &AtomicMeasure, b: &AtomicMeasure, moments: usize) -> Result<(f64, f64)> {
    let mu = CircleMeasure::Atomic(a.clone());
    let nu = CircleMeasure::Atomic(b.clone());
    let conv = convolve(&mu, &nu, moments)?.moments(moments)?;
    let model = OperatorPairModel::from_atoms(a, b)?.moments(moments);
    let mut comb_dev: f64 = 0.0;
    let mut op_dev: f64 = 0.0;
    for k in 1..=moments {
        let c = product_moments_combinatorial(&mu, &nu, k)?;
        comb_dev = comb_dev.max((conv[k - 1] - c).norm());
        op_dev = op_dev.max((conv[k - 1] - model[k - 1]).norm());
    }
    Ok((comb_dev, op_dev))
}
