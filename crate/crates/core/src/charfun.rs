//! Characteristic functions of finite-rank unitary perturbations.
//!
//! A [`CharFn`] packages an evaluation procedure `z ↦ Θ(z)` together with a
//! record of where the values come from, so that the different formulas for
//! the same function can be compared against each other.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Complex, DVector};

use crate::clark::{theta_beta_from_measure, theta_from_measure, CircleMeasure};
use crate::dense::{fix_column_phase, identity, op_norm, svd};
use crate::error::{Error, Result};
use crate::linop::{char_fn_definition, check_contraction, ContractionRecord};
use crate::scalar::{arg_0_2pi, cabs, cabs2, cr, is_finite_matrix, to_pair, unimodular, ComplexMatrix, Real};

/// Parameters with `|β| ≥ 1 − STRICT_MARGIN` are rejected by the rank-n formula.
pub const STRICT_MARGIN: f64 = 1e-12;

/// Relative size below which a quotient denominator counts as vanishing.
pub const DENOMINATOR_TOL: f64 = 1e-13;

/// Absolute threshold for `1 − β̄θ` in [`livsic_transform`].
pub const LIVSIC_TOL: f64 = 1e-14;

/// Where the values of a [`CharFn`] come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance<T: Real> {
    /// `−C + z D_*(I − zC*)^{-1} D` on the defect space.
    Definitional,
    /// The diagonal rank-n formula in the bases diagonalizing the perturbation.
    RankNFormula,
    /// The rank-n formula with the coupling between defect directions kept.
    RankNCoupled,
    /// `z·C_{ξ̄μ}` or its β-deformation, computed from a measure.
    MeasureBased,
    /// Möbius image `(θ − β)/(1 − β̄θ)` of another function.
    Livsic { beta: Complex<T> },
    /// A closed-form function supplied by the caller.
    Explicit,
}

type EvalFn<T> = dyn Fn(Complex<T>) -> Result<ComplexMatrix<T>> + Send + Sync;

/// Radial values `Θ(rξ)` on a fixed table of boundary points and radii.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCache<T: Real> {
    pub points: Vec<Complex<T>>,
    pub radii: Vec<T>,
    /// `values[j][k] = Θ(radii[k] · points[j])`
    pub values: Vec<Vec<ComplexMatrix<T>>>,
}

/// An `n × n` matrix-valued analytic function on the disc.
#[derive(Clone)]
pub struct CharFn<T: Real> {
    provenance: Provenance<T>,
    n: usize,
    eval: Arc<EvalFn<T>>,
    boundary_cache: Option<BoundaryCache<T>>,
}

impl<T: Real> fmt::Debug for CharFn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CharFn")
            .field("provenance", &self.provenance)
            .field("n", &self.n)
            .field("cached", &self.boundary_cache.is_some())
            .finish()
    }
}

impl<T: Real> CharFn<T> {
    fn wrap(provenance: Provenance<T>, n: usize, eval: Arc<EvalFn<T>>) -> Self {
        CharFn { provenance, n, eval, boundary_cache: None }
    }

    /// Any closed-form matrix function of the given size.
    pub fn explicit<F>(n: usize, f: F) -> Self
    where
        F: Fn(Complex<T>) -> Result<ComplexMatrix<T>> + Send + Sync + 'static,
    {
        Self::wrap(Provenance::Explicit, n, Arc::new(f))
    }

    /// A closed-form scalar function, viewed as `1 × 1` matrices.
    pub fn scalar<F>(f: F) -> Self
    where
        F: Fn(Complex<T>) -> Complex<T> + Send + Sync + 'static,
    {
        Self::explicit(1, move |z| Ok(ComplexMatrix::from_element(1, 1, f(z))))
    }

    pub fn definitional(rec: ContractionRecord<T>) -> Self {
        let n = rec.n;
        Self::wrap(Provenance::Definitional, n, Arc::new(move |z| char_fn_definition(&rec, z)))
    }

    pub fn rank_n(rec: ContractionRecord<T>, diag: DiagonalizedPerturbation<T>) -> Self {
        let n = diag.betas.len();
        Self::wrap(Provenance::RankNFormula, n, Arc::new(move |z| char_fn_rank_n(&rec, &diag, z)))
    }

    pub fn rank_n_coupled(rec: ContractionRecord<T>, diag: DiagonalizedPerturbation<T>) -> Self {
        let n = diag.betas.len();
        Self::wrap(Provenance::RankNCoupled, n, Arc::new(move |z| char_fn_rank_n_coupled(&rec, &diag, z)))
    }

    /// `θ = z·C_{ξ̄μ}` for a probability measure.
    pub fn from_measure(mu: CircleMeasure<T>) -> Self {
        Self::wrap(
            Provenance::MeasureBased,
            1,
            Arc::new(move |z| Ok(ComplexMatrix::from_element(1, 1, theta_from_measure(&mu, z)?))),
        )
    }

    /// `θ_β` computed directly from the Cauchy transforms of `mu`.
    pub fn from_measure_beta(mu: CircleMeasure<T>, beta: Complex<T>) -> Self {
        Self::wrap(
            Provenance::MeasureBased,
            1,
            Arc::new(move |z| Ok(ComplexMatrix::from_element(1, 1, theta_beta_from_measure(&mu, beta, z)?))),
        )
    }

    /// Möbius image of a scalar function.
    pub fn livsic(inner: CharFn<T>, beta: Complex<T>) -> Result<Self> {
        if inner.n != 1 {
            return Err(Error::DimensionMismatch(format!("Livsic transform needs n = 1, got {}", inner.n)));
        }
        Ok(Self::wrap(
            Provenance::Livsic { beta },
            1,
            Arc::new(move |z| {
                let w = livsic_transform(inner.eval_scalar(z)?, beta)?;
                Ok(ComplexMatrix::from_element(1, 1, w))
            }),
        ))
    }

    pub fn provenance(&self) -> Provenance<T> {
        self.provenance
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eval(&self, z: Complex<T>) -> Result<ComplexMatrix<T>> {
        if cabs(z) >= T::one() {
            return Err(Error::InvalidArgument(format!("|z| = {} is not inside the disc", cabs(z))));
        }
        (self.eval)(z)
    }

    /// Value of a scalar (`n = 1`) function.
    pub fn eval_scalar(&self, z: Complex<T>) -> Result<Complex<T>> {
        if self.n != 1 {
            return Err(Error::DimensionMismatch(format!("scalar evaluation of an n = {} function", self.n)));
        }
        Ok(self.eval(z)?[(0, 0)])
    }

    /// Evaluates once on every `r·ξ` and stores the table.
    pub fn with_boundary_cache(mut self, points: Vec<Complex<T>>, radii: Vec<T>) -> Result<Self> {
        let values = points
            .iter()
            .map(|&xi| radii.iter().map(|&r| self.eval(xi * cr(r))).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        self.boundary_cache = Some(BoundaryCache { points, radii, values });
        Ok(self)
    }

    pub fn boundary_cache(&self) -> Option<&BoundaryCache<T>> {
        self.boundary_cache.as_ref()
    }
}

/// A perturbation `A: D → D_*` written as `A k_i = β_i k̃_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalizedPerturbation<T: Real> {
    pub betas: Vec<Complex<T>>,
    /// Columns `k_i`, in the coordinates of the defect space `D`.
    pub k_basis: ComplexMatrix<T>,
    /// Columns `k̃_i`, in the coordinates of `D_*`.
    pub ktilde_basis: ComplexMatrix<T>,
}

impl<T: Real> DiagonalizedPerturbation<T> {
    /// `Σ β_i k̃_i k_i*`
    pub fn reassemble(&self) -> ComplexMatrix<T> {
        let d = ComplexMatrix::from_diagonal(&DVector::from_vec(self.betas.clone()));
        &self.ktilde_basis * d * self.k_basis.adjoint()
    }
}

/// Diagonalizing bases for a contraction `A` from its singular value
/// decomposition. Both bases get the leading-component phase convention and
/// the remaining phase is left in `β_i = ⟨A k_i, k̃_i⟩`.
pub fn diagonalize_perturbation<T: Real>(a: &ComplexMatrix<T>) -> Result<DiagonalizedPerturbation<T>> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(format!("perturbation is {}x{}", a.nrows(), a.ncols())));
    }
    if !is_finite_matrix(a) {
        return Err(Error::NonFinite);
    }
    check_contraction(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(DiagonalizedPerturbation {
            betas: Vec::new(),
            k_basis: ComplexMatrix::zeros(0, 0),
            ktilde_basis: ComplexMatrix::zeros(0, 0),
        });
    }
    let f = svd(a)?;
    let (mut u, mut v) = (f.u, f.v);
    for j in 0..n {
        fix_column_phase(&mut u, j);
        fix_column_phase(&mut v, j);
    }
    let raw: Vec<Complex<T>> = (0..n).map(|j| (u.column(j).adjoint() * a * v.column(j))[(0, 0)]).collect();

    let tie = T::lit(1e-12);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let (mi, mj) = (cabs(raw[i]), cabs(raw[j]));
        if (mi - mj).abs() > tie {
            mj.partial_cmp(&mi).unwrap()
        } else {
            arg_0_2pi(raw[i]).partial_cmp(&arg_0_2pi(raw[j])).unwrap()
        }
    });
    let mut k_basis = ComplexMatrix::zeros(n, n);
    let mut ktilde_basis = ComplexMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        k_basis.set_column(col, &v.column(i));
        ktilde_basis.set_column(col, &u.column(i));
    }
    Ok(DiagonalizedPerturbation { betas: order.iter().map(|&i| raw[i]).collect(), k_basis, ktilde_basis })
}

struct ResolventData<T: Real> {
    /// `F[i][l] = ⟨R k_l, k̃_i⟩`
    f: ComplexMatrix<T>,
    /// `B[i][l] = ⟨R k̃_l, k̃_i⟩`
    b: ComplexMatrix<T>,
}

/// Inner products of `R = (I − zC*)^{-1}` against the diagonalizing vectors.
fn resolvent_data<T: Real>(
    rec: &ContractionRecord<T>,
    diag: &DiagonalizedPerturbation<T>,
    z: Complex<T>,
) -> Result<ResolventData<T>> {
    if cabs(z) >= T::one() {
        return Err(Error::InvalidArgument(format!("|z| = {} is not inside the disc", cabs(z))));
    }
    let n = diag.betas.len();
    if rec.n != rec.n_star || rec.n != n {
        return Err(Error::DimensionMismatch(format!(
            "defect indices ({}, {}) against {} parameters",
            rec.n, rec.n_star, n
        )));
    }
    for beta in &diag.betas {
        if cabs(*beta) >= T::one() - T::lit(STRICT_MARGIN) {
            return Err(Error::NotAStrictContraction { modulus: cabs(*beta).as_f64() });
        }
    }
    let k = &rec.basis_d * &diag.k_basis;
    let kt = &rec.basis_dstar * &diag.ktilde_basis;
    let mut rhs = ComplexMatrix::zeros(rec.dim(), 2 * n);
    rhs.columns_mut(0, n).copy_from(&k);
    rhs.columns_mut(n, n).copy_from(&kt);
    let sol = (identity::<T>(rec.dim()) - rec.op.adjoint() * z)
        .lu()
        .solve(&rhs)
        .filter(is_finite_matrix)
        .ok_or(Error::ResolventSingular { z: to_pair(z) })?;
    let proj = kt.adjoint() * sol;
    Ok(ResolventData { f: proj.columns(0, n).into_owned(), b: proj.columns(n, n).into_owned() })
}

/// Quotients `q_i = (1 − |β_i|²)⟨R k_i, k̃_i⟩ / (⟨R k̃_i, k̃_i⟩ − z β̄_i ⟨R k_i, k̃_i⟩)`
/// with `R = (I − zU_O*)^{-1}`.
fn rank_n_quotients<T: Real>(
    rec: &ContractionRecord<T>,
    diag: &DiagonalizedPerturbation<T>,
    z: Complex<T>,
) -> Result<Vec<Complex<T>>> {
    let data = resolvent_data(rec, diag, z)?;
    diag.betas
        .iter()
        .enumerate()
        .map(|(i, &beta)| {
            let a = data.f[(i, i)];
            let b = data.b[(i, i)];
            let coupled = z * beta.conj() * a;
            let den = b - coupled;
            let scale = T::one().max(cabs(b)).max(cabs(coupled));
            if cabs(den) < T::lit(DENOMINATOR_TOL) * scale {
                return Err(Error::DenominatorVanishes { z: to_pair(z) });
            }
            Ok(a * (T::one() - cabs2(beta)) / den)
        })
        .collect()
}

/// The rank-n formula read literally: column `j` is `−β_j k̃_j + z Σ_i q_i k̃_i`
/// (see [`rank_n_quotients`] for `q_i`), so every column carries the same
/// `z`-term. Rows are indexed by `k̃`, columns by `k`.
pub fn char_fn_rank_n<T: Real>(
    rec: &ContractionRecord<T>,
    diag: &DiagonalizedPerturbation<T>,
    z: Complex<T>,
) -> Result<ComplexMatrix<T>> {
    let q = rank_n_quotients(rec, diag, z)?;
    let n = q.len();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        let own = if i == j { -diag.betas[j] } else { cr(T::zero()) };
        own + z * q[i]
    }))
}

/// The rank-n formula with `⊕_i` read as a diagonal operator: entry `(j, j)`
/// is `−β_j + z q_j` and off-diagonal entries vanish.
pub fn char_fn_rank_n_diagonal<T: Real>(
    rec: &ContractionRecord<T>,
    diag: &DiagonalizedPerturbation<T>,
    z: Complex<T>,
) -> Result<ComplexMatrix<T>> {
    let q = rank_n_quotients(rec, diag, z)?;
    let mut out = ComplexMatrix::zeros(q.len(), q.len());
    for (j, qj) in q.iter().enumerate() {
        out[(j, j)] = -diag.betas[j] + z * *qj;
    }
    Ok(out)
}

/// Rank-n characteristic function without dropping the cross terms between
/// defect directions: `Θ = −diag(β) + z S (B − zF diag(β̄))^{-1} F S` with
/// `S = diag(√(1 − |β|²))`. Agrees with [`char_fn_rank_n`] when `n = 1`.
pub fn char_fn_rank_n_coupled<T: Real>(
    rec: &ContractionRecord<T>,
    diag: &DiagonalizedPerturbation<T>,
    z: Complex<T>,
) -> Result<ComplexMatrix<T>> {
    let data = resolvent_data(rec, diag, z)?;
    let n = diag.betas.len();
    let beta_bar = ComplexMatrix::from_diagonal(&DVector::from_iterator(n, diag.betas.iter().map(|b| b.conj())));
    let s = ComplexMatrix::from_diagonal(&DVector::from_iterator(
        n,
        diag.betas.iter().map(|b| cr((T::one() - cabs2(*b)).sqrt())),
    ));
    let lhs = &data.b - &data.f * beta_bar * z;
    let scale = T::one().max(op_norm(&data.b));
    let x =
        lhs.clone().lu().solve(&data.f).filter(is_finite_matrix).ok_or(Error::DenominatorVanishes { z: to_pair(z) })?;
    let smallest = svd(&lhs)?.singular_values.last().copied().unwrap_or(T::zero());
    if smallest < T::lit(DENOMINATOR_TOL) * scale {
        return Err(Error::DenominatorVanishes { z: to_pair(z) });
    }
    let beta = ComplexMatrix::from_diagonal(&DVector::from_vec(diag.betas.clone()));
    Ok(&s * x * &s * z - beta)
}

/// Constant unitaries `(left, right)` carrying the definitional
/// characteristic function of `U_A` into the diagonalizing bases of the
/// perturbation: `left · Θ_def(z) · right` is comparable with [`char_fn_rank_n`].
pub fn rank_n_alignment<T: Real>(
    rec_o: &ContractionRecord<T>,
    diag: &DiagonalizedPerturbation<T>,
    rec_a: &ContractionRecord<T>,
) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    if rec_o.n != rec_a.n || rec_o.n_star != rec_a.n_star || rec_o.dim() != rec_a.dim() {
        return Err(Error::DimensionMismatch("records describe different defect geometry".into()));
    }
    let kt = &rec_o.basis_dstar * &diag.ktilde_basis;
    let k = &rec_o.basis_d * &diag.k_basis;
    Ok((kt.adjoint() * &rec_a.basis_dstar, rec_a.basis_d.adjoint() * k))
}

/// `θ_β = (θ − β) / (1 − β̄θ)`.
pub fn livsic_transform<T: Real>(theta_val: Complex<T>, beta: Complex<T>) -> Result<Complex<T>> {
    if cabs(beta) >= T::one() {
        return Err(Error::NotAStrictContraction { modulus: cabs(beta).as_f64() });
    }
    if cabs(theta_val) > T::one() + T::lit(1e-9) {
        return Err(Error::InvalidArgument(format!("|θ| = {} exceeds 1", cabs(theta_val))));
    }
    let den = cr(T::one()) - beta.conj() * theta_val;
    if cabs(den) < T::lit(LIVSIC_TOL) {
        return Err(Error::DegenerateDenominator { z: to_pair(theta_val) });
    }
    Ok((theta_val - beta) / den)
}

/// `max_j ‖I − Θ(rξ_j)*Θ(rξ_j)‖` over `grid_size` equally spaced `ξ_j`.
pub fn innerness_defect<T: Real>(f: &CharFn<T>, grid_size: usize, r: T) -> Result<T> {
    if grid_size < 16 {
        return Err(Error::InvalidArgument(format!("grid size {grid_size} is below 16")));
    }
    if !(r > T::zero() && r < T::one()) {
        return Err(Error::InvalidArgument(format!("radius {r} is not in (0, 1)")));
    }
    let step = T::two_pi() / T::lit(grid_size as f64);
    let id = identity::<T>(f.n());
    let mut worst = T::zero();
    for j in 0..grid_size {
        let v = f.eval(unimodular(step * T::lit(j as f64)) * cr(r))?;
        worst = worst.max(op_norm(&(&id - v.adjoint() * v)));
    }
    Ok(worst)
}
