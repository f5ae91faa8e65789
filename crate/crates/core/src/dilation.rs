//! Finite sections of the minimal unitary dilation of a cnu partial isometry
//! and of its rank-2n perturbation.
//!
//! Coordinates are laid out as the `X`-copies `−M..−1`, then `H`, then the
//! copies `0..M−1`, each copy of dimension `n`. The incoming edge copy `−M`
//! receives nothing in truncated mode; in cyclic mode the outgoing edge copy
//! `M−1` wraps onto it, which makes `W` exactly unitary.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::dense::{eigenvalues, identity, multiset_distance, numerical_rank, op_norm, unitarity_residual};
use crate::error::{Error, Result};
use crate::linop::{perturb, unitary_part, ContractionRecord, DEFAULT_UNITARY_TOL};
use crate::scalar::{cr, unimodular, ComplexMatrix, Real};

/// Tolerance on the unitarity of glue maps and of the perturbation parameter.
pub const UNITARY_PARAMETER_TOL: f64 = 1e-12;

/// Largest `‖C P‖` accepted as "vanishes on the defect space".
pub const PARTIAL_ISOMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DilationMode {
    Truncated,
    Cyclic,
}

/// Block sizes and offsets of the coordinate layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLayout {
    pub depth: usize,
    pub n: usize,
    pub dim_h: usize,
}

impl BlockLayout {
    pub fn total(&self) -> usize {
        2 * self.depth * self.n + self.dim_h
    }

    pub fn h_offset(&self) -> usize {
        self.depth * self.n
    }

    /// First coordinate of the `X`-copy with index `k ∈ [−M, M)`.
    pub fn copy_offset(&self, k: i64) -> usize {
        let m = self.depth as i64;
        assert!((-m..m).contains(&k), "copy index {k} outside [-{m}, {m})");
        if k < 0 {
            (k + m) as usize * self.n
        } else {
            self.h_offset() + self.dim_h + k as usize * self.n
        }
    }

    /// Coordinates of all shift copies, in copy order `−M..M−1`.
    pub fn shift_coordinates(&self) -> Vec<usize> {
        let m = self.depth as i64;
        (-m..m).flat_map(|k| (0..self.n).map(move |i| self.copy_offset(k) + i)).collect()
    }

    pub fn h_coordinates(&self) -> Vec<usize> {
        (self.h_offset()..self.h_offset() + self.dim_h).collect()
    }
}

/// A dilation section `W`, or its perturbation `W̃` when `perturbation` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationBlocks<T: Real> {
    pub layout: BlockLayout,
    pub mode: DilationMode,
    pub w: ComplexMatrix<T>,
    pub glue_in: ComplexMatrix<T>,
    pub glue_out: ComplexMatrix<T>,
    pub record: ContractionRecord<T>,
    /// Unitary `A: D → D_*` once the section has been perturbed.
    pub perturbation: Option<ComplexMatrix<T>>,
}

fn check_unitary_param<T: Real>(m: &ComplexMatrix<T>, n: usize, what: &str) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch(format!("{what} is {}x{}, expected {n}x{n}", m.nrows(), m.ncols())));
    }
    let residual = unitarity_residual(m);
    if residual > T::tol(UNITARY_PARAMETER_TOL) {
        return Err(Error::NotUnitaryParameter { residual: residual.as_f64() });
    }
    Ok(())
}

fn submatrix<T: Real>(m: &ComplexMatrix<T>, rows: &[usize], cols: &[usize]) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Builds `W` with `W|_{D^⊥} = U_O`, `W|_D = glue_out` into copy 0, copy −1
/// into `D_*` by `glue_in`, and the shift between consecutive copies.
pub fn build_dilation<T: Real>(
    rec: &ContractionRecord<T>,
    depth: usize,
    glue_in: &ComplexMatrix<T>,
    glue_out: &ComplexMatrix<T>,
    mode: DilationMode,
) -> Result<DilationBlocks<T>> {
    let n = rec.n;
    if n != rec.n_star || n == 0 {
        return Err(Error::DimensionMismatch(format!(
            "need equal positive deficiency indices, got ({}, {})",
            rec.n, rec.n_star
        )));
    }
    if depth < 2 {
        return Err(Error::InvalidArgument(format!("truncation depth {depth} is below 2")));
    }
    check_unitary_param(glue_in, n, "glue_in")?;
    check_unitary_param(glue_out, n, "glue_out")?;
    let unitary = unitary_part(&rec.op, T::tol(DEFAULT_UNITARY_TOL))?;
    if !unitary.is_cnu {
        return Err(Error::NotCnu { dim: unitary.dim_unitary_part });
    }
    let leak = op_norm(&(&rec.op * &rec.basis_d));
    if leak > T::tol(PARTIAL_ISOMETRY_TOL) {
        return Err(Error::NotPartialIsometry { residual: leak.as_f64() });
    }

    let layout = BlockLayout { depth, n, dim_h: rec.dim() };
    let m = depth as i64;
    let h = layout.h_offset();
    let mut w = ComplexMatrix::zeros(layout.total(), layout.total());
    let one = cr(T::one());
    for k in (-m..-1).chain(0..m - 1) {
        let (from, to) = (layout.copy_offset(k), layout.copy_offset(k + 1));
        for i in 0..n {
            w[(to + i, from + i)] = one;
        }
    }
    if mode == DilationMode::Cyclic {
        let (from, to) = (layout.copy_offset(m - 1), layout.copy_offset(-m));
        for i in 0..n {
            w[(to + i, from + i)] = one;
        }
    }
    let p_perp = identity::<T>(rec.dim()) - rec.proj_d();
    w.view_mut((h, layout.copy_offset(-1)), (rec.dim(), n)).copy_from(&(&rec.basis_dstar * glue_in));
    w.view_mut((h, h), (rec.dim(), rec.dim())).copy_from(&(&rec.op * p_perp));
    w.view_mut((layout.copy_offset(0), h), (n, rec.dim())).copy_from(&(glue_out * rec.basis_d.adjoint()));

    Ok(DilationBlocks {
        layout,
        mode,
        w,
        glue_in: glue_in.clone(),
        glue_out: glue_out.clone(),
        record: rec.clone(),
        perturbation: None,
    })
}

impl<T: Real> DilationBlocks<T> {
    /// The operator that the compression of powers to `H` should reproduce:
    /// `U_O`, or `U_A` for a perturbed section.
    pub fn h_operator(&self) -> Result<ComplexMatrix<T>> {
        match &self.perturbation {
            Some(a) => perturb(&self.record, a),
            None => Ok(self.record.op.clone()),
        }
    }

    pub fn compress_to_h(&self, m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let h = self.layout.h_offset();
        let d = self.layout.dim_h;
        m.view((h, h), (d, d)).into_owned()
    }

    pub fn to_document(&self) -> DilationDocument {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.w.nrows())
            .map(|i| (0..self.w.ncols()).map(|j| [self.w[(i, j)].re.as_f64(), self.w[(i, j)].im.as_f64()]).collect())
            .collect();
        DilationDocument {
            layout: self.layout,
            mode: self.mode,
            perturbed: self.perturbation.is_some(),
            size: self.layout.total(),
            w: rows,
        }
    }
}

/// `max_{1 ≤ m ≤ m_max} ‖P_H W^m|_H − T^m‖` with `T` from [`DilationBlocks::h_operator`].
pub fn verify_dilation<T: Real>(blocks: &DilationBlocks<T>, m_max: usize) -> Result<T> {
    if m_max > blocks.layout.depth {
        return Err(Error::PowerExceedsTruncation { power: m_max, depth: blocks.layout.depth });
    }
    let target = blocks.h_operator()?;
    let mut w_pow = blocks.w.clone();
    let mut t_pow = target.clone();
    let mut worst = T::zero();
    for m in 1..=m_max {
        if m > 1 {
            w_pow = &w_pow * &blocks.w;
            t_pow = &t_pow * &target;
        }
        worst = worst.max(op_norm(&(blocks.compress_to_h(&w_pow) - &t_pow)));
    }
    Ok(worst)
}

/// `W̃`: copy −1 shifts into copy 0, and `D` maps by `A` into `D_*`.
pub fn build_perturbed_dilation<T: Real>(
    blocks: &DilationBlocks<T>,
    a: &ComplexMatrix<T>,
) -> Result<DilationBlocks<T>> {
    if blocks.perturbation.is_some() {
        return Err(Error::InvalidArgument("section is already perturbed".into()));
    }
    let n = blocks.layout.n;
    check_unitary_param(a, n, "perturbation")?;
    let rec = &blocks.record;
    let layout = blocks.layout;
    let h = layout.h_offset();
    let dim = layout.dim_h;
    let mut w = blocks.w.clone();

    let (from, to) = (layout.copy_offset(-1), layout.copy_offset(0));
    w.columns_mut(from, n).fill(Complex::new(T::zero(), T::zero()));
    for i in 0..n {
        w[(to + i, from + i)] = cr(T::one());
    }
    let p_perp = identity::<T>(dim) - rec.proj_d();
    let h_cols = w.columns(h, dim) * p_perp + {
        let mut lift = ComplexMatrix::zeros(layout.total(), dim);
        lift.rows_mut(h, dim).copy_from(&(&rec.basis_dstar * a * rec.basis_d.adjoint()));
        lift
    };
    w.columns_mut(h, dim).copy_from(&h_cols);

    Ok(DilationBlocks { w, perturbation: Some(a.clone()), ..blocks.clone() })
}

/// Block errors of a perturbed section against the splitting
/// `W̃ = (shift on the copies) ⊕ U_A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplittingReport<T: Real> {
    /// `‖P_H W̃|_H − U_A‖`
    pub restriction_err: T,
    /// Distance of the copy block from the (cyclic or truncated) shift.
    pub shift_block_err: T,
    /// `max(‖P_L W̃|_H‖, ‖P_H W̃|_L‖)` with `L` the span of the copies.
    pub cross_err: T,
}

impl<T: Real> SplittingReport<T> {
    pub fn max(&self) -> T {
        self.restriction_err.max(self.shift_block_err).max(self.cross_err)
    }
}

pub fn verify_splitting<T: Real>(
    tilde: &DilationBlocks<T>,
    rec: &ContractionRecord<T>,
    a: &ComplexMatrix<T>,
) -> Result<SplittingReport<T>> {
    let layout = tilde.layout;
    let u_a = perturb(rec, a)?;
    let h_idx = layout.h_coordinates();
    let l_idx = layout.shift_coordinates();
    let restriction_err = op_norm(&(submatrix(&tilde.w, &h_idx, &h_idx) - u_a));

    // in shift-coordinate order the copies are consecutive blocks
    let size = l_idx.len();
    let n = layout.n;
    let mut shift = ComplexMatrix::zeros(size, size);
    for i in 0..size - n {
        shift[(i + n, i)] = cr(T::one());
    }
    if tilde.mode == DilationMode::Cyclic {
        for i in 0..n {
            shift[(i, size - n + i)] = cr(T::one());
        }
    }
    let shift_block_err = op_norm(&(submatrix(&tilde.w, &l_idx, &l_idx) - shift));
    let cross_err = op_norm(&submatrix(&tilde.w, &l_idx, &h_idx)).max(op_norm(&submatrix(&tilde.w, &h_idx, &l_idx)));
    Ok(SplittingReport { restriction_err, shift_block_err, cross_err })
}

/// Numerical rank of `W̃ − W`.
pub fn perturbation_rank<T: Real>(tilde: &DilationBlocks<T>, base: &DilationBlocks<T>, tol: T) -> Result<usize> {
    if tilde.layout != base.layout {
        return Err(Error::DimensionMismatch("sections have different layouts".into()));
    }
    numerical_rank(&(&tilde.w - &base.w), tol)
}

/// Distance between the eigenvalues of a cyclic `W̃` and the union of the
/// `2M`-th roots of unity (each `n` times) with the eigenvalues of `U_A`.
pub fn spectral_union_error<T: Real>(tilde: &DilationBlocks<T>) -> Result<T> {
    if tilde.mode != DilationMode::Cyclic {
        return Err(Error::InvalidArgument("spectral union needs a cyclic section".into()));
    }
    let layout = tilde.layout;
    let mut expected = eigenvalues(&tilde.h_operator()?)?;
    let period = 2 * layout.depth;
    for k in 0..period {
        let root = unimodular(T::two_pi() * T::lit(k as f64) / T::lit(period as f64));
        expected.extend(std::iter::repeat_n(root, layout.n));
    }
    multiset_distance(&eigenvalues(&tilde.w)?, &expected)
}

/// Serializable view of a section: layout, mode and dense `W` entries as
/// `[re, im]` pairs, row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationDocument {
    pub layout: BlockLayout,
    pub mode: DilationMode,
    pub perturbed: bool,
    pub size: usize,
    pub w: Vec<Vec<[f64; 2]>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linop::defect_data;
    use crate::sample::{random_cnu, random_unitary, CnuKind};
    use crate::scalar::c;
    use crate::testing::{jordan, rng};

    type M = ComplexMatrix<f64>;

    fn jordan_rec() -> ContractionRecord<f64> {
        defect_data(&jordan::<f64>(), 1e-10).unwrap()
    }

    fn eye(n: usize) -> M {
        M::identity(n, n)
    }

    fn cnu_rec(dim: usize, defects: usize, seed: u64) -> ContractionRecord<f64> {
        let mut r = rng(seed);
        defect_data(&random_cnu::<f64, _>(dim, defects, CnuKind::PartialIsometry, &mut r).unwrap(), 1e-10).unwrap()
    }

    #[test]
    fn jordan_section_layout() {
        let b = build_dilation(&jordan_rec(), 4, &eye(1), &eye(1), DilationMode::Truncated).unwrap();
        assert_eq!(b.w.shape(), (10, 10));
        assert_eq!(b.layout.h_offset(), 4);
        assert_eq!(b.layout.copy_offset(-4), 0);
        assert_eq!(b.layout.copy_offset(0), 6);
        assert!((b.compress_to_h(&b.w) - jordan::<f64>()).norm() == 0.0);
        assert!(op_norm(&b.w) <= 1.0 + 1e-12);
    }

    #[test]
    fn cyclic_section_is_unitary() {
        for (dim, defects, seed) in [(2, 1, 1), (6, 2, 2), (10, 2, 3)] {
            let rec = cnu_rec(dim, defects, seed);
            let mut r = rng(seed + 100);
            let (gi, go) = (random_unitary(defects, &mut r), random_unitary(defects, &mut r));
            let b = build_dilation(&rec, 5, &gi, &go, DilationMode::Cyclic).unwrap();
            assert!(unitarity_residual(&b.w) <= 1e-12);
        }
    }

    #[test]
    fn dilation_identity_up_to_depth() {
        let b = build_dilation(&jordan_rec(), 8, &eye(1), &eye(1), DilationMode::Truncated).unwrap();
        assert_eq!(verify_dilation(&b, 1).unwrap(), 0.0);
        assert!(verify_dilation(&b, 8).unwrap() <= 1e-13);
        assert!(matches!(verify_dilation(&b, 9), Err(Error::PowerExceedsTruncation { power: 9, depth: 8 })));
        let rec = cnu_rec(6, 2, 4);
        for mode in [DilationMode::Truncated, DilationMode::Cyclic] {
            let b = build_dilation(&rec, 32, &eye(2), &eye(2), mode).unwrap();
            assert!(verify_dilation(&b, 32).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn dilation_identity_is_gauge_invariant() {
        let rec = cnu_rec(5, 2, 5);
        let mut r = rng(6);
        for _ in 0..5 {
            let (gi, go) = (random_unitary(2, &mut r), random_unitary(2, &mut r));
            let b = build_dilation(&rec, 6, &gi, &go, DilationMode::Truncated).unwrap();
            assert!(verify_dilation(&b, 6).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn perturbed_section_splits() {
        let rec = jordan_rec();
        let a = M::from_element(1, 1, c(0.6, 0.8));
        let b = build_dilation(&rec, 8, &eye(1), &eye(1), DilationMode::Truncated).unwrap();
        let t = build_perturbed_dilation(&b, &a).unwrap();
        let rep = verify_splitting(&t, &rec, &a).unwrap();
        assert!(rep.restriction_err <= 1e-13 && rep.shift_block_err <= 1e-13 && rep.cross_err <= 1e-13);
        assert_eq!(perturbation_rank(&t, &b, 1e-10).unwrap(), 2);
        assert!(verify_dilation(&t, 8).unwrap() <= 1e-13);
        assert!(build_perturbed_dilation(&t, &a).is_err());
    }

    #[test]
    fn cyclic_perturbed_section_spectrum() {
        let rec = jordan_rec();
        let a = M::from_element(1, 1, c(0.0, 1.0));
        let b = build_dilation(&rec, 8, &eye(1), &eye(1), DilationMode::Cyclic).unwrap();
        let t = build_perturbed_dilation(&b, &a).unwrap();
        assert!(unitarity_residual(&t.w) <= 1e-12);
        assert!(spectral_union_error(&t).unwrap() <= 1e-9);
        assert!(spectral_union_error(
            &build_perturbed_dilation(&build_dilation(&rec, 8, &eye(1), &eye(1), DilationMode::Truncated).unwrap(), &a)
                .unwrap()
        )
        .is_err());
    }

    #[test]
    fn two_dimensional_defects_split() {
        let rec = cnu_rec(6, 2, 7);
        let mut r = rng(8);
        let a = random_unitary(2, &mut r);
        let b = build_dilation(&rec, 8, &random_unitary(2, &mut r), &random_unitary(2, &mut r), DilationMode::Cyclic)
            .unwrap();
        let t = build_perturbed_dilation(&b, &a).unwrap();
        assert!(verify_splitting(&t, &rec, &a).unwrap().max() <= 1e-11);
        assert_eq!(perturbation_rank(&t, &b, 1e-10).unwrap(), 4);
        assert!(unitarity_residual(&t.w) <= 1e-12);
        assert!(spectral_union_error(&t).unwrap() <= 1e-9);
    }

    #[test]
    fn rejects_invalid_input() {
        let rec = jordan_rec();
        assert!(build_dilation(&rec, 1, &eye(1), &eye(1), DilationMode::Cyclic).is_err());
        let half = M::from_element(1, 1, c(0.5, 0.0));
        assert!(matches!(
            build_dilation(&rec, 4, &half, &eye(1), DilationMode::Cyclic),
            Err(Error::NotUnitaryParameter { .. })
        ));
        assert!(matches!(
            build_dilation(&rec, 4, &eye(2), &eye(1), DilationMode::Cyclic),
            Err(Error::DimensionMismatch(_))
        ));

        // a unitary summand next to the Jordan block
        let mut c3 = M::zeros(3, 3);
        c3.view_mut((0, 0), (2, 2)).copy_from(&jordan::<f64>());
        c3[(2, 2)] = c(0.0, 1.0);
        let rec3 = defect_data(&c3, 1e-10).unwrap();
        assert!(matches!(
            build_dilation(&rec3, 4, &eye(1), &eye(1), DilationMode::Cyclic),
            Err(Error::NotCnu { dim: 1 })
        ));

        let general = defect_data(&M::from_element(1, 1, c(0.5, 0.0)), 1e-10).unwrap();
        assert!(matches!(
            build_dilation(&general, 4, &eye(1), &eye(1), DilationMode::Cyclic),
            Err(Error::NotPartialIsometry { .. })
        ));
        let b = build_dilation(&rec, 4, &eye(1), &eye(1), DilationMode::Cyclic).unwrap();
        assert!(matches!(build_perturbed_dilation(&b, &half), Err(Error::NotUnitaryParameter { .. })));
    }

    #[test]
    fn document_round_trip() {
        let b = build_dilation(&jordan_rec(), 2, &eye(1), &eye(1), DilationMode::Cyclic).unwrap();
        let doc = b.to_document();
        assert_eq!(doc.size, 6);
        assert_eq!(doc.w.len(), 6);
        let text = serde_json::to_string(&doc).unwrap();
        assert!(text.contains("\"mode\":\"cyclic\""));
        let back: DilationDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
    }
}
