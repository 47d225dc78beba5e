//! Seeded samplers for states and probability vectors.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::state::DensityMatrix;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// Normalized vector of i.i.d. complex Gaussians (unitarily invariant).
pub fn haar_amplitudes<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

pub fn haar_pure_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix {
    DensityMatrix::from_amplitudes(&haar_amplitudes(n, rng)).expect("normalized amplitudes")
}

/// `G G^dagger / tr` for an `n x k` complex Ginibre matrix with random rank `k`.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix {
    let k = rng.random_range(1..=n);
    let g = DMatrix::from_fn(n, k, |_, _| complex_gaussian(rng));
    let w = &g * g.adjoint();
    let tr: f64 = (0..n).map(|j| w[(j, j)].re).sum();
    DensityMatrix::from_upper(w / Complex64::new(tr, 0.0))
}

/// Random point of the probability simplex; about a third of the draws
/// have some entries forced to zero so that faces and kinks are visited.
pub fn random_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let sparse = rng.random_bool(1.0 / 3.0);
    let mut v: Vec<f64> = (0..n)
        .map(|_| {
            let x: f64 = Exp1.sample(rng);
            if sparse && rng.random_bool(0.4) {
                0.0
            } else {
                x
            }
        })
        .collect();
    if v.iter().all(|&x| x == 0.0) {
        v[rng.random_range(0..n)] = 1.0;
    }
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    // absorb rounding so the entries sum to 1 to the last bit we can manage
    let rest: f64 = v[1..].iter().sum();
    v[0] = (1.0 - rest).max(0.0);
    v
}

/// Random permutation of `0..n`.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
