//! Contractions and their defect data.
//!
//! A contraction `C` on `H = C^d` carries two defect operators,
//! `D = (I − C*C)^{1/2}` and `D_* = (I − CC*)^{1/2}`, whose ranges are the
//! defect spaces. Everything here works in dense matrices; the defect spaces
//! are carried as orthonormal column bases so that operators between them
//! are small `n × n` matrices.

use nalgebra::{Complex, SymmetricEigen};

use crate::dense::{fix_column_phase, hermitian_asymmetry, identity, null_space, op_norm, svd};
use crate::error::{Error, Result};
use crate::scalar::{cabs, cr, is_finite_matrix, to_pair, ComplexMatrix, Real};

/// Slack allowed on the operator norm of a contraction.
pub const CONTRACTION_SLACK: f64 = 1e-10;

/// Default rank tolerance applied to the eigenvalues of `I − C*C`.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Default tolerance for the subspace iteration in [`unitary_part`].
pub const DEFAULT_UNITARY_TOL: f64 = 1e-9;

/// A square contraction with its defect operators and defect-space bases.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionRecord<T: Real> {
    pub op: ComplexMatrix<T>,
    pub defect: ComplexMatrix<T>,
    pub defect_star: ComplexMatrix<T>,
    /// Orthonormal columns spanning the closure of `D H`.
    pub basis_d: ComplexMatrix<T>,
    /// Orthonormal columns spanning the closure of `D_* H`.
    pub basis_dstar: ComplexMatrix<T>,
    pub n: usize,
    pub n_star: usize,
    pub rank_tol: T,
}

impl<T: Real> ContractionRecord<T> {
    pub fn dim(&self) -> usize {
        self.op.nrows()
    }

    /// Orthogonal projection onto the defect space.
    pub fn proj_d(&self) -> ComplexMatrix<T> {
        &self.basis_d * self.basis_d.adjoint()
    }

    pub fn proj_dstar(&self) -> ComplexMatrix<T> {
        &self.basis_dstar * self.basis_dstar.adjoint()
    }
}

/// Maximal reducing subspace on which an operator acts unitarily.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryPartReport<T: Real> {
    pub dim_unitary_part: usize,
    pub basis: ComplexMatrix<T>,
    pub is_cnu: bool,
}

fn check_square<T: Real>(m: &ComplexMatrix<T>, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!("{what} must be square, got {}x{}", m.nrows(), m.ncols())));
    }
    if !is_finite_matrix(m) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

pub(crate) fn check_contraction<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    let norm = op_norm(m);
    if norm > T::one() + T::lit(CONTRACTION_SLACK) {
        return Err(Error::NotAContraction { norm: norm.as_f64() });
    }
    Ok(norm)
}

/// Square root of a Hermitian positive semidefinite matrix.
///
/// Eigenvalues in `[−clamp_tol, 0)` are treated as zero.
pub fn hermitian_sqrt<T: Real>(m: &ComplexMatrix<T>, clamp_tol: T) -> Result<ComplexMatrix<T>> {
    check_square(m, "matrix")?;
    let asym = hermitian_asymmetry(m);
    if asym > T::tol(1e-12) * T::one().max(op_norm(m)) {
        return Err(Error::NotHermitian { asymmetry: asym.as_f64() });
    }
    if m.nrows() == 0 {
        return Ok(m.clone());
    }
    let sym = (m + m.adjoint()) * cr(T::lit(0.5));
    let eig = SymmetricEigen::new(sym);
    let mut roots = Vec::with_capacity(m.nrows());
    for &lambda in eig.eigenvalues.iter() {
        if lambda < -clamp_tol {
            return Err(Error::IndefiniteBeyondTolerance { eigenvalue: lambda.as_f64() });
        }
        roots.push(lambda.max(T::zero()).sqrt());
    }
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, r) in roots.iter().enumerate() {
        scaled.column_mut(j).iter_mut().for_each(|x| *x *= cr(*r));
    }
    Ok(scaled * v.adjoint())
}

/// Defect operators, defect-space bases and deficiency indices of `c`.
///
/// Computed from the singular value decomposition `C = U Σ V*`:
/// `D = V (I − Σ²)^{1/2} V*` and `D_* = U (I − Σ²)^{1/2} U*`. A direction
/// counts towards the defect space when `1 − σ² > rank_tol`; directions at or
/// below the tolerance get an exactly zero defect value, so the bases and the
/// ranks agree by construction. Basis columns are ordered by descending
/// defect value and carry the phase convention of
/// [`fix_column_phase`](crate::dense::fix_column_phase).
pub fn defect_data<T: Real>(c: &ComplexMatrix<T>, rank_tol: T) -> Result<ContractionRecord<T>> {
    check_square(c, "contraction")?;
    let dim = c.nrows();
    let f = svd(c)?;
    let sigma_max = f.singular_values.first().copied().unwrap_or(T::zero());
    if sigma_max > T::one() + T::lit(CONTRACTION_SLACK) {
        return Err(Error::NotAContraction { norm: sigma_max.as_f64() });
    }
    let (u, v) = (f.u, f.v);

    let mut order: Vec<(usize, T)> = f
        .singular_values
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let d2 = T::one() - s * s;
            (i, if d2 > rank_tol { d2.sqrt() } else { T::zero() })
        })
        .collect();
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));

    let mut u_sorted = ComplexMatrix::zeros(dim, dim);
    let mut v_sorted = ComplexMatrix::zeros(dim, dim);
    for (j, &(i, _)) in order.iter().enumerate() {
        u_sorted.set_column(j, &u.column(i));
        v_sorted.set_column(j, &v.column(i));
        fix_column_phase(&mut u_sorted, j);
        fix_column_phase(&mut v_sorted, j);
    }
    let n = order.iter().filter(|(_, d)| *d > T::zero()).count();

    let mut v_scaled = v_sorted.clone();
    let mut u_scaled = u_sorted.clone();
    for (j, &(_, d)) in order.iter().enumerate() {
        v_scaled.column_mut(j).iter_mut().for_each(|x| *x *= cr(d));
        u_scaled.column_mut(j).iter_mut().for_each(|x| *x *= cr(d));
    }
    let defect = &v_scaled * v_sorted.adjoint();
    let defect_star = &u_scaled * u_sorted.adjoint();

    Ok(ContractionRecord {
        op: c.clone(),
        defect,
        defect_star,
        basis_d: v_sorted.columns(0, n).into_owned(),
        basis_dstar: u_sorted.columns(0, n).into_owned(),
        n,
        n_star: n,
        rank_tol,
    })
}

/// Largest reducing subspace of `c` on which `c` is unitary.
///
/// Starts from `ker D ∩ ker D_*` and repeatedly keeps only those vectors whose
/// images under `C` and `C*` stay inside the current subspace.
pub fn unitary_part<T: Real>(c: &ComplexMatrix<T>, tol: T) -> Result<UnitaryPartReport<T>> {
    let rec = defect_data(c, T::tol(DEFAULT_RANK_TOL))?;
    let dim = rec.dim();
    let mut stacked = ComplexMatrix::zeros(2 * dim, dim);
    stacked.rows_mut(0, dim).copy_from(&rec.defect);
    stacked.rows_mut(dim, dim).copy_from(&rec.defect_star);
    let mut q = null_space(&stacked, tol)?;

    let c_adj = c.adjoint();
    for _ in 0..=dim {
        let k = q.ncols();
        if k == 0 {
            break;
        }
        let leak = identity::<T>(dim) - &q * q.adjoint();
        let mut cond = ComplexMatrix::zeros(2 * dim, k);
        cond.rows_mut(0, dim).copy_from(&(&leak * (c * &q)));
        cond.rows_mut(dim, dim).copy_from(&(&leak * (&c_adj * &q)));
        let coeffs = null_space(&cond, tol)?;
        if coeffs.ncols() == k {
            break;
        }
        q = &q * coeffs;
        for j in 0..q.ncols() {
            fix_column_phase(&mut q, j);
        }
    }
    let dim_unitary_part = q.ncols();
    Ok(UnitaryPartReport { dim_unitary_part, basis: q, is_cnu: dim_unitary_part == 0 })
}

/// The perturbation `U_A = P_*^⊥ U_O P^⊥ ⊕ A P`.
///
/// `a` is the matrix of an operator `D → D_*` in the record's bases.
pub fn perturb<T: Real>(rec: &ContractionRecord<T>, a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if rec.n != rec.n_star {
        return Err(Error::DimensionMismatch(format!("deficiency indices ({}, {}) differ", rec.n, rec.n_star)));
    }
    if a.nrows() != rec.n_star || a.ncols() != rec.n {
        return Err(Error::DimensionMismatch(format!(
            "parameter is {}x{}, defect spaces have dimension {}",
            a.nrows(),
            a.ncols(),
            rec.n
        )));
    }
    if !is_finite_matrix(a) {
        return Err(Error::NonFinite);
    }
    check_contraction(a)?;
    let dim = rec.dim();
    let p_perp = identity::<T>(dim) - rec.proj_d();
    let p_star_perp = identity::<T>(dim) - rec.proj_dstar();
    Ok(p_star_perp * &rec.op * p_perp + &rec.basis_dstar * a * rec.basis_d.adjoint())
}

/// Definitional characteristic function `Θ(z) = −C + z D_*(I − zC*)^{-1} D`,
/// returned as the `n_star × n` matrix of `Θ(z): D → D_*` in the stored bases.
pub fn char_fn_definition<T: Real>(rec: &ContractionRecord<T>, z: Complex<T>) -> Result<ComplexMatrix<T>> {
    if cabs(z) >= T::one() {
        return Err(Error::InvalidArgument(format!("|z| = {} is not inside the disc", cabs(z))));
    }
    if rec.n == 0 && rec.n_star == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    let dim = rec.dim();
    let resolvent_arg = identity::<T>(dim) - rec.op.adjoint() * z;
    let rhs = &rec.defect * &rec.basis_d;
    let x =
        resolvent_arg.lu().solve(&rhs).filter(is_finite_matrix).ok_or(Error::ResolventSingular { z: to_pair(z) })?;
    let full = &rec.defect_star * x * z - &rec.op * &rec.basis_d;
    Ok(rec.basis_dstar.adjoint() * full)
}
