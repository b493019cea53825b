//! Seeded random measures for verification sweeps.
//!
//! Angles are uniform on `[0, 2π)` and weights follow a symmetric Dirichlet(1)
//! draw, produced by normalizing independent unit exponentials.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::measure::AtomicMeasure;

pub type SweepRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SweepRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dirichlet_weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Atomic probability measure with `1..=max_atoms` atoms (count uniform).
pub fn random_atomic<R: Rng + ?Sized>(rng: &mut R, max_atoms: usize) -> AtomicMeasure {
    let n = rng.random_range(1..=max_atoms.max(1));
    let angles = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
    let weights = dirichlet_weights(rng, n);
    AtomicMeasure { angles, weights }
}

/// Atomic probability measure made of antipodal pairs, so that its first moment vanishes.
pub fn random_centered_atomic<R: Rng + ?Sized>(rng: &mut R, max_pairs: usize) -> AtomicMeasure {
    let n = rng.random_range(1..=max_pairs.max(1));
    let pair_weights = dirichlet_weights(rng, n);
    let mut angles = Vec::with_capacity(2 * n);
    let mut weights = Vec::with_capacity(2 * n);
    for w in pair_weights {
        let t = rng.random_range(0.0..std::f64::consts::PI);
        angles.push(t);
        angles.push(t + std::f64::consts::PI);
        weights.push(0.5 * w);
        weights.push(0.5 * w);
    }
    AtomicMeasure { angles, weights }
}

/// `count` independent pairs drawn from one stream.
pub fn random_pairs(
    seed: u64,
    count: usize,
    max_atoms: usize,
) -> Vec<(AtomicMeasure, AtomicMeasure)> {
    let mut rng = seeded(seed);
    (0..count)
        .map(|_| {
            let a = random_atomic(&mut rng, max_atoms);
            let b = random_atomic(&mut rng, max_atoms);
            (a, b)
        })
        .collect()
}
