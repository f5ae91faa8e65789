//! Small dense helpers on top of nalgebra used across modules.
//!
//! Singular value decompositions go through faer: nalgebra's complex SVD
//! returns inaccurate factors on some inputs.

use faer::c64;
use nalgebra::{Complex, DMatrix, Schur, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{arg_0_2pi, cabs, ComplexMatrix, Real};

/// Full singular value decomposition `M = U diag(σ) V*` with `σ` descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdFactors<T: Real> {
    pub u: ComplexMatrix<T>,
    pub singular_values: Vec<T>,
    pub v: ComplexMatrix<T>,
}

fn to_faer<T: Real>(m: &ComplexMatrix<T>) -> faer::Mat<c64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| c64::new(m[(i, j)].re.as_f64(), m[(i, j)].im.as_f64()))
}

pub fn svd<T: Real>(m: &ComplexMatrix<T>) -> Result<SvdFactors<T>> {
    let (rows, cols) = m.shape();
    let f = to_faer(m).svd().map_err(|_| Error::NoConvergence)?;
    let back = |x: &c64| Complex::new(T::lit(x.re), T::lit(x.im));
    let (u, v, s) = (f.U(), f.V(), f.S().column_vector());
    let mut order: Vec<usize> = (0..rows.min(cols)).collect();
    order.sort_by(|&i, &j| s[j].re.partial_cmp(&s[i].re).unwrap());
    let mut u_out = ComplexMatrix::from_fn(rows, rows, |i, j| back(&u[(i, j)]));
    let mut v_out = ComplexMatrix::from_fn(cols, cols, |i, j| back(&v[(i, j)]));
    for (dst, &src) in order.iter().enumerate() {
        u_out.set_column(dst, &ComplexMatrix::from_fn(rows, 1, |i, _| back(&u[(i, src)])).column(0));
        v_out.set_column(dst, &ComplexMatrix::from_fn(cols, 1, |i, _| back(&v[(i, src)])).column(0));
    }
    Ok(SvdFactors { u: u_out, singular_values: order.iter().map(|&i| T::lit(s[i].re)).collect(), v: v_out })
}

/// Spectral (operator 2-) norm, from the largest eigenvalue of the smaller
/// Gram matrix. Zero for empty matrices.
pub fn op_norm<T: Real>(m: &ComplexMatrix<T>) -> T {
    if m.nrows() == 0 || m.ncols() == 0 {
        return T::zero();
    }
    let gram = if m.nrows() < m.ncols() { m * m.adjoint() } else { m.adjoint() * m };
    let gram = (&gram + gram.adjoint()) * Complex::new(T::lit(0.5), T::zero());
    let top = SymmetricEigen::new(gram).eigenvalues.iter().fold(T::zero(), |acc, &l| acc.max(l));
    top.sqrt()
}

/// `‖M* M − I‖` in operator norm.
pub fn unitarity_residual<T: Real>(m: &ComplexMatrix<T>) -> T {
    let k = m.ncols();
    op_norm(&(m.adjoint() * m - ComplexMatrix::<T>::identity(k, k)))
}

/// Largest entry modulus of `M − M*`.
pub fn hermitian_asymmetry<T: Real>(m: &ComplexMatrix<T>) -> T {
    (m - m.adjoint()).iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)))
}

/// Multiplies the column by a unimodular factor so that its first component
/// of modulus above `1e-8` is positive real.
pub fn fix_column_phase<T: Real>(m: &mut ComplexMatrix<T>, col: usize) {
    let thresh = T::lit(1e-8);
    let lead = m.column(col).iter().copied().find(|z| cabs(*z) > thresh);
    if let Some(z) = lead {
        let phase = z.conj() / Complex::new(cabs(z), T::zero());
        m.column_mut(col).iter_mut().for_each(|x| *x *= phase);
    }
}

/// Orthonormal basis (columns) of the numerical null space of `m`:
/// right singular vectors with singular value `<= tol`.
pub fn null_space<T: Real>(m: &ComplexMatrix<T>, tol: T) -> Result<ComplexMatrix<T>> {
    let cols = m.ncols();
    if cols == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    let f = svd(m)?;
    let keep: Vec<usize> = (0..cols).filter(|&i| f.singular_values.get(i).is_none_or(|&s| s <= tol)).collect();
    let v = f.v;
    let mut basis = ComplexMatrix::zeros(cols, keep.len());
    for (j, &i) in keep.iter().enumerate() {
        basis.set_column(j, &v.column(i));
        fix_column_phase(&mut basis, j);
    }
    Ok(basis)
}

/// Number of singular values above `tol`.
pub fn numerical_rank<T: Real>(m: &ComplexMatrix<T>, tol: T) -> Result<usize> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0);
    }
    Ok(svd(m)?.singular_values.iter().filter(|&&s| s > tol).count())
}

/// Complex Schur decomposition `M = Q T Q*`.
pub fn schur<T: Real>(m: &ComplexMatrix<T>) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    let eps = T::default_epsilon();
    Schur::try_new(m.clone(), eps, 10_000).map(|s| s.unpack()).ok_or(Error::NoConvergence)
}

/// Eigenvalues of a square complex matrix.
pub fn eigenvalues<T: Real>(m: &ComplexMatrix<T>) -> Result<Vec<Complex<T>>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    to_faer(m)
        .eigenvalues()
        .map(|v| v.iter().map(|x| Complex::new(T::lit(x.re), T::lit(x.im))).collect())
        .map_err(|_| Error::NoConvergence)
}

/// Greedy nearest-neighbour matching between two equally sized multisets of
/// points; returns the largest matched distance.
pub fn multiset_distance<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!("multisets of size {} and {}", a.len(), b.len())));
    }
    let mut a_sorted = a.to_vec();
    a_sorted.sort_by(|x, y| arg_0_2pi(*x).partial_cmp(&arg_0_2pi(*y)).unwrap());
    let mut used = vec![false; b.len()];
    let mut worst = T::zero();
    for x in a_sorted {
        let (best, dist) = b.iter().enumerate().filter(|(i, _)| !used[*i]).map(|(i, y)| (i, cabs(x - *y))).fold(
            (usize::MAX, T::max_value().unwrap()),
            |acc, cur| {
                if cur.1 < acc.1 {
                    cur
                } else {
                    acc
                }
            },
        );
        used[best] = true;
        worst = worst.max(dist);
    }
    Ok(worst)
}

pub(crate) fn identity<T: Real>(n: usize) -> ComplexMatrix<T> {
    DMatrix::identity(n, n)
}
