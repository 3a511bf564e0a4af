#![allow(dead_code)]

use num_complex::Complex64;
use orthobound::{gram_schmidt, BallSampler, BoxBounds, Mode, OrthonormalFamily, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn mode_of(complex: bool) -> Mode {
    if complex {
        Mode::Complex
    } else {
        Mode::Real
    }
}

pub fn scalar(rng: &mut impl Rng, mode: Mode) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = if mode == Mode::Complex {
        StandardNormal.sample(rng)
    } else {
        0.0
    };
    Complex64::new(re, im)
}

pub fn scalars(rng: &mut impl Rng, n: usize, mode: Mode) -> Vec<Complex64> {
    (0..n).map(|_| scalar(rng, mode)).collect()
}

pub fn vector(rng: &mut impl Rng, dim: usize, mode: Mode) -> Vector<f64> {
    Vector::new(scalars(rng, dim, mode), mode).unwrap()
}

pub fn family(rng: &mut impl Rng, dim: usize, size: usize, mode: Mode) -> OrthonormalFamily<f64> {
    loop {
        let raw: Vec<_> = (0..size).map(|_| vector(rng, dim, mode)).collect();
        let gs = gram_schmidt(&raw, 1e-8).unwrap();
        if gs.family.len() == size {
            return gs.family;
        }
    }
}

/// Box with strictly positive spread in every coordinate.
pub fn boxed(rng: &mut impl Rng, size: usize, mode: Mode) -> BoxBounds<f64> {
    let lower = scalars(rng, size, mode);
    let upper = lower
        .iter()
        .map(|&l| {
            let g = scalar(rng, mode);
            l + g + g / g.norm().max(1e-3) * 0.1
        })
        .collect();
    BoxBounds::new(lower, upper).unwrap()
}

/// A point of the condition ball; a tenth of draws sit on its sphere.
pub fn feasible(
    rng: &mut impl Rng,
    family: &OrthonormalFamily<f64>,
    b: &BoxBounds<f64>,
) -> Vector<f64> {
    BallSampler::new(family, b, 0.1).unwrap().sample(rng)
}

/// Random (dim, size, mode) drawn from dims 1..=8.
pub fn shape(rng: &mut impl Rng) -> (usize, usize, Mode) {
    let dim = rng.random_range(1..=8);
    let size = rng.random_range(1..=dim);
    (dim, size, mode_of(rng.random_bool(0.5)))
}
