//! Seeded generators for test instances.
//!
//! Every generator draws `f64` values from the supplied RNG and converts at
//! the end, so a given seed yields the same instance for `f32` and `f64`
//! (up to rounding).

use nalgebra::{Complex, QR};
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::clark::{Atom, CircleMeasure, Density};
use crate::dense::op_norm;
use crate::error::{Error, Result};
use crate::linop::{unitary_part, DEFAULT_UNITARY_TOL};
use crate::scalar::{ComplexMatrix, Real};

/// How the defect singular values of a random cnu contraction are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CnuKind {
    /// Defect singular values are exactly zero: `C` vanishes on its defect space.
    PartialIsometry,
    /// Defect singular values uniform in `[0, max_singular]`.
    General { max_singular: f64 },
}

/// The 2×2 Jordan block `[[0, 1], [0, 0]]`.
pub fn jordan_block<T: Real>() -> ComplexMatrix<T> {
    let mut j = ComplexMatrix::zeros(2, 2);
    j[(0, 1)] = Complex::new(T::one(), T::zero());
    j
}

fn convert<T: Real>(m: &ComplexMatrix<f64>) -> ComplexMatrix<T> {
    m.map(|z| Complex::new(T::lit(z.re), T::lit(z.im)))
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix<f64> {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix<f64> {
    let qr = QR::new(ginibre(dim, dim, rng));
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let m = d.norm();
        if m > 0.0 {
            let phase = d / m;
            q.column_mut(j).iter_mut().for_each(|x| *x *= phase);
        }
    }
    q
}

/// Haar-distributed random unitary.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    convert(&haar_unitary(dim, rng))
}

/// Random matrix with operator norm uniform in `[max_norm / 2, max_norm]`.
pub fn random_contraction<T: Real, R: Rng + ?Sized>(dim: usize, max_norm: f64, rng: &mut R) -> ComplexMatrix<T> {
    let g = ginibre(dim, dim, rng);
    let scale: f64 = rng.random_range(0.5..=1.0) * max_norm / op_norm(&g);
    convert(&(g * Complex::new(scale, 0.0)))
}

/// Random cnu contraction of size `dim` with deficiency indices `(defects, defects)`.
///
/// Built as `U diag(1, …, 1, s_1, …, s_k) V*` with Haar `U`, `V`; draws are
/// repeated until [`unitary_part`] confirms the result is cnu.
pub fn random_cnu<T: Real, R: Rng + ?Sized>(
    dim: usize,
    defects: usize,
    kind: CnuKind,
    rng: &mut R,
) -> Result<ComplexMatrix<T>> {
    if defects == 0 || defects > dim {
        return Err(Error::InvalidArgument(format!("need 1 <= defects <= dim, got defects = {defects}, dim = {dim}")));
    }
    for _ in 0..64 {
        let u = haar_unitary(dim, rng);
        let v = haar_unitary(dim, rng);
        let mut sigma = vec![1.0; dim];
        for s in sigma.iter_mut().skip(dim - defects) {
            *s = match kind {
                CnuKind::PartialIsometry => 0.0,
                CnuKind::General { max_singular } => rng.random_range(0.0..max_singular),
            };
        }
        let mut us = u.clone();
        for (j, s) in sigma.iter().enumerate() {
            us.column_mut(j).iter_mut().for_each(|x| *x *= Complex::new(*s, 0.0));
        }
        let c = us * v.adjoint();
        if unitary_part(&c, DEFAULT_UNITARY_TOL)?.is_cnu {
            return Ok(convert(&c));
        }
    }
    Err(Error::InvalidArgument("could not draw a cnu contraction".into()))
}

/// Uniform random point in the disc of radius `max_radius`.
pub fn random_disc_point<T: Real, R: Rng + ?Sized>(max_radius: f64, rng: &mut R) -> Complex<T> {
    let r = max_radius * rng.random::<f64>().sqrt();
    let t = rng.random_range(0.0..std::f64::consts::TAU);
    Complex::new(T::lit(r * t.cos()), T::lit(r * t.sin()))
}

/// Random point off the unit circle with `|1 − |z|| >= gap`, inside or outside
/// with equal probability, and modulus below 3.
pub fn random_off_circle_point<T: Real, R: Rng + ?Sized>(gap: f64, rng: &mut R) -> Complex<T> {
    let t = rng.random_range(0.0..std::f64::consts::TAU);
    let r = if rng.random::<bool>() { rng.random_range(0.0..1.0 - gap) } else { rng.random_range(1.0 + gap..3.0) };
    Complex::new(T::lit(r * t.cos()), T::lit(r * t.sin()))
}

/// Random atomic probability measure with `k` atoms.
///
/// Atom angles are uniform with a minimum angular separation of `1e-3`;
/// weights are normalized exponential draws.
pub fn random_atomic_measure<T: Real, R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<CircleMeasure<T>> {
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one atom".into()));
    }
    let angles = loop {
        let mut a: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let wrap = a[0] + std::f64::consts::TAU - a[k - 1];
        let min_gap = a.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::min);
        if k == 1 || min_gap > 1e-3 {
            break a;
        }
    };
    let raw: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect::<Vec<f64>>();
    let total: f64 = raw.iter().sum();
    let atoms = angles.iter().zip(raw).map(|(&t, w)| Atom::at_angle(T::lit(t), T::lit(w / total))).collect();
    CircleMeasure::new(atoms, Density::Zero, crate::clark::DEFAULT_GRID)
}
