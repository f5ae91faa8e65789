//! Numerical toolkit for finite-rank unitary perturbations of completely
//! non-unitary contractions: defect data, characteristic functions, Clark
//! measures and their Cauchy transforms, and finite sections of the unitary
//! dilation.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the common double-precision case.

pub mod charfun;
pub mod clark;
pub mod dense;
pub mod dilation;
pub mod error;
pub mod linop;
pub mod sample;
pub mod scalar;

#[cfg(test)]
mod testing;

pub use charfun::{
    char_fn_rank_n, char_fn_rank_n_coupled, char_fn_rank_n_diagonal, diagonalize_perturbation, innerness_defect,
    livsic_transform, rank_n_alignment, BoundaryCache, CharFn, DiagonalizedPerturbation, Provenance,
};
pub use clark::{Atom, CircleMeasure, Density, WeightFn};
pub use dilation::{
    build_dilation, build_perturbed_dilation, verify_dilation, verify_splitting, BlockLayout, DilationBlocks,
    DilationMode, SplittingReport,
};
pub use error::{Error, Result};
pub use linop::{char_fn_definition, defect_data, hermitian_sqrt, perturb, unitary_part, ContractionRecord};
pub use scalar::{arg_0_2pi, unimodular, ComplexMatrix, ComplexVector, Real};

pub type C64 = nalgebra::Complex<f64>;
pub type Matrix64 = ComplexMatrix<f64>;
pub type ContractionRecord64 = ContractionRecord<f64>;
pub type CircleMeasure64 = CircleMeasure<f64>;
pub type CharFn64 = CharFn<f64>;
pub type DilationBlocks64 = DilationBlocks<f64>;

pub type C32 = nalgebra::Complex<f32>;
pub type Matrix32 = ComplexMatrix<f32>;
pub type ContractionRecord32 = ContractionRecord<f32>;
pub type CircleMeasure32 = CircleMeasure<f32>;
