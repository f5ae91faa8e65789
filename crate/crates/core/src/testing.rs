//! Helpers shared by unit tests.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::ComplexMatrix;

pub use crate::sample::jordan_block as jordan;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_psd(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix<f64> {
    let b = crate::sample::random_contraction::<f64, _>(dim, 2.0, rng);
    b.adjoint() * b
}

use crate::clark::{Atom, CircleMeasure, Density, DEFAULT_GRID};

/// `½m + ½δ₁`
pub fn mixed() -> CircleMeasure<f64> {
    CircleMeasure::new(vec![Atom::at_fraction(0.0, 0.5)], Density::Constant(0.5), DEFAULT_GRID).unwrap()
}

/// `½δ₁ + ½δ₋₁`
pub fn two_point() -> CircleMeasure<f64> {
    CircleMeasure::atomic(vec![Atom::at_fraction(0.0, 0.5), Atom::at_fraction(0.5, 0.5)]).unwrap()
}

pub fn lebesgue() -> CircleMeasure<f64> {
    CircleMeasure::lebesgue(DEFAULT_GRID).unwrap()
}

pub fn dirac_one() -> CircleMeasure<f64> {
    CircleMeasure::dirac(nalgebra::Complex::new(1.0, 0.0)).unwrap()
}
