//! Finite Clark theory: for a purely atomic `μ` the perturbation family
//! `Û_γ = M_ξ + (γ − 1)⟨·, ξ̄⟩1` lives on `L²(μ) ≅ C^k` and everything can be
//! diagonalized exactly.

use nalgebra::Complex;

use crate::clark::measure::{Atom, CircleMeasure};
use crate::clark::transform::{cauchy_transform, density_cauchy, normalized_cauchy, theta_off_circle, WeightFn};
use crate::dense::{schur, unitarity_residual};
use crate::error::{Error, Result};
use crate::scalar::{arg_0_2pi, cabs, cabs2, cr, to_pair, ComplexMatrix, Real};

/// Eigenvalues closer than this on the circle are merged into one atom.
pub const MERGE_TOL: f64 = 1e-10;

/// Threshold on `|⟨1, v_j⟩|` below which cyclicity is considered violated.
pub const CYCLIC_OVERLAP_TOL: f64 = 1e-12;

fn check_unimodular<T: Real>(gamma: Complex<T>) -> Result<()> {
    if (cabs(gamma) - T::one()).abs() > T::tol(1e-12) {
        return Err(Error::InvalidArgument(format!("|γ| = {} is not 1", cabs(gamma))));
    }
    Ok(())
}

/// Matrix of `Û_γ` in the orthonormal basis `e_j = 1_{ξ_j} / √w_j` of `L²(μ)`.
pub fn clark_unitary_matrix<T: Real>(mu: &CircleMeasure<T>, gamma: Complex<T>) -> Result<ComplexMatrix<T>> {
    if !mu.is_atomic() || mu.atoms().is_empty() {
        return Err(Error::InvalidMeasure("need a purely atomic measure with at least one atom".into()));
    }
    mu.require_probability()?;
    check_unimodular(gamma)?;
    let atoms = mu.atoms();
    let k = atoms.len();
    let one = Complex::new(T::one(), T::zero());
    // ⟨f, ξ̄⟩ = Σ_j √w_j ξ_j f_j and 1 = Σ_j √w_j e_j
    Ok(ComplexMatrix::from_fn(k, k, |i, j| {
        let rank_one = (gamma - one) * atoms[i].weight.sqrt() * atoms[j].weight.sqrt() * atoms[j].position;
        if i == j {
            atoms[i].position + rank_one
        } else {
            rank_one
        }
    }))
}

/// Spectral data of `Û_γ`: eigenvalues sorted by argument, eigenvectors with
/// `⟨1, v_j⟩ > 0`, and the overlaps `⟨1, v_j⟩`.
struct ClarkSpectrum<T: Real> {
    eigenvalues: Vec<Complex<T>>,
    vectors: ComplexMatrix<T>,
    overlaps: Vec<T>,
    sqrt_weights: Vec<T>,
}

fn clark_spectrum<T: Real>(mu: &CircleMeasure<T>, gamma: Complex<T>) -> Result<ClarkSpectrum<T>> {
    let m = clark_unitary_matrix(mu, gamma)?;
    let resid = unitarity_residual(&m);
    if resid > T::tol(1e-10) {
        return Err(Error::NotUnitaryParameter { residual: resid.as_f64() });
    }
    let (q, t) = schur(&m)?;
    let k = m.nrows();
    let sqrt_weights: Vec<T> = mu.atoms().iter().map(|a| a.weight.sqrt()).collect();

    let mut order: Vec<usize> = (0..k).collect();
    let lambdas: Vec<Complex<T>> = (0..k).map(|i| t[(i, i)] / cr(cabs(t[(i, i)]))).collect();
    order.sort_by(|&a, &b| arg_0_2pi(lambdas[a]).partial_cmp(&arg_0_2pi(lambdas[b])).unwrap());

    let mut vectors = ComplexMatrix::zeros(k, k);
    let mut overlaps = Vec::with_capacity(k);
    for (col, &i) in order.iter().enumerate() {
        let v = q.column(i);
        let overlap: Complex<T> = v.iter().zip(&sqrt_weights).map(|(x, s)| x.conj() * *s).sum();
        let modulus = cabs(overlap);
        let phase = if modulus > T::zero() { overlap / cr(modulus) } else { cr(T::one()) };
        vectors.set_column(col, &(v * phase));
        overlaps.push(modulus);
    }
    Ok(ClarkSpectrum { eigenvalues: order.iter().map(|&i| lambdas[i]).collect(), vectors, overlaps, sqrt_weights })
}

/// Groups of eigenvalue indices that coincide within [`MERGE_TOL`], including
/// across the cut at angle 0.
fn merge_groups<T: Real>(eigenvalues: &[Complex<T>]) -> Vec<Vec<usize>> {
    let tol = T::tol(MERGE_TOL);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, lambda) in eigenvalues.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if cabs(eigenvalues[g[0]] - *lambda) < tol => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    if groups.len() > 1 {
        let first = eigenvalues[groups[0][0]];
        let last = eigenvalues[*groups.last().unwrap().last().unwrap()];
        if cabs(first - last) < tol {
            let tail = groups.pop().unwrap();
            groups[0].extend(tail);
        }
    }
    groups
}

/// Clark measure `μ_γ = Σ_j |⟨1, v_j⟩|² δ_{λ_j}` of `Û_γ` for a purely atomic
/// probability measure `mu`.
pub fn finite_spectral_measure<T: Real>(mu: &CircleMeasure<T>, gamma: Complex<T>) -> Result<CircleMeasure<T>> {
    let spec = clark_spectrum(mu, gamma)?;
    let mut atoms = Vec::new();
    for group in merge_groups(&spec.eigenvalues) {
        let weight = group.iter().fold(T::zero(), |acc, &i| acc + spec.overlaps[i] * spec.overlaps[i]);
        let lead = *group.iter().max_by(|&&a, &&b| spec.overlaps[a].partial_cmp(&spec.overlaps[b]).unwrap()).unwrap();
        if weight > T::zero() {
            atoms.push(Atom::new(spec.eigenvalues[lead], weight));
        }
    }
    atoms.sort_by(|a, b| arg_0_2pi(a.position).partial_cmp(&arg_0_2pi(b.position)).unwrap());
    CircleMeasure::atomic(atoms)
}

/// A function transported to `L²(μ_γ)` together with `μ_γ` itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Transported<T: Real> {
    pub measure: CircleMeasure<T>,
    /// Values at the atoms of `measure`, in atom order.
    pub values: Vec<Complex<T>>,
}

/// Applies the unitary `V_γ: L²(μ) → L²(μ_γ)` with `V_γ Û_γ = M_ζ V_γ` and
/// `V_γ 1 = 1` to the atomwise function `f`.
///
/// With eigenvectors normalized by `⟨1, v_j⟩ > 0`, `(V_γ f)(λ_j) = ⟨f, v_j⟩ / ⟨1, v_j⟩`.
pub fn spectral_transport<T: Real>(
    mu: &CircleMeasure<T>,
    gamma: Complex<T>,
    f: &[Complex<T>],
) -> Result<Transported<T>> {
    if f.len() != mu.atoms().len() {
        return Err(Error::DimensionMismatch(format!("{} values for {} atoms", f.len(), mu.atoms().len())));
    }
    let spec = clark_spectrum(mu, gamma)?;
    for (i, o) in spec.overlaps.iter().enumerate() {
        if *o < T::lit(CYCLIC_OVERLAP_TOL) {
            return Err(Error::EigenvectorOrthogonalToCyclic { index: i });
        }
    }
    let groups = merge_groups(&spec.eigenvalues);
    if let Some(g) = groups.iter().find(|g| g.len() > 1) {
        return Err(Error::EigenvectorOrthogonalToCyclic { index: g[1] });
    }
    let coords: Vec<Complex<T>> = f.iter().zip(&spec.sqrt_weights).map(|(x, s)| *x * *s).collect();
    let k = f.len();
    let mut pairs: Vec<(Atom<T>, Complex<T>)> = (0..k)
        .map(|j| {
            let inner: Complex<T> = coords.iter().zip(spec.vectors.column(j).iter()).map(|(x, v)| *x * v.conj()).sum();
            let atom = Atom::new(spec.eigenvalues[j], spec.overlaps[j] * spec.overlaps[j]);
            (atom, inner / cr(spec.overlaps[j]))
        })
        .collect();
    pairs.sort_by(|a, b| arg_0_2pi(a.0.position).partial_cmp(&arg_0_2pi(b.0.position)).unwrap());
    let (atoms, values): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    Ok(Transported { measure: CircleMeasure::atomic(atoms)?, values })
}

/// Residual of the Herglotz identity
/// `(γ + θ)/(γ − θ) = ∫ (ξ + z)/(ξ − z) dμ_γ` and of `Kμ_γ (1 − γ̄ θ) = 1`,
/// with `θ` computed from `mu`. Returns the larger of the two.
pub fn herglotz_residual<T: Real>(
    mu: &CircleMeasure<T>,
    mu_gamma: &CircleMeasure<T>,
    gamma: Complex<T>,
    z: Complex<T>,
) -> Result<T> {
    mu.require_probability()?;
    check_unimodular(gamma)?;
    let theta = theta_off_circle(mu, z)?;
    let den = gamma - theta;
    if cabs(den) < T::lit(1e-13) {
        return Err(Error::DegenerateDenominator { z: to_pair(z) });
    }
    let lhs = (gamma + theta) / den;
    let mut integral: Complex<T> =
        mu_gamma.atoms().iter().map(|a| (a.position + z) / (a.position - z) * a.weight).sum();
    // (ξ + z)/(ξ − z) = 2/(1 − ξ̄z) − 1
    integral += density_cauchy(mu_gamma, 0, z) * cr(T::lit(2.0)) - mu_gamma.fourier(0);
    let k_gamma = cauchy_transform(mu_gamma, &WeightFn::One, z)?;
    let second = cabs(k_gamma * (cr(T::one()) - gamma.conj() * theta) - cr(T::one()));
    Ok(cabs(lhs - integral).max(second))
}

/// Aronszajn–Krein residual `|C_{fμ}(z) − C_{f_γ μ_γ}(z)|` with `f_γ = V_γ f`.
pub fn ak_residual<T: Real>(mu: &CircleMeasure<T>, gamma: Complex<T>, f: &[Complex<T>], z: Complex<T>) -> Result<T> {
    let moved = spectral_transport(mu, gamma, f)?;
    let lhs = normalized_cauchy(mu, &WeightFn::Atomwise(f.to_vec()), z)?;
    let rhs = normalized_cauchy(&moved.measure, &WeightFn::Atomwise(moved.values), z)?;
    Ok(cabs(lhs - rhs))
}

/// `‖f‖²` in `L²(μ)` for values given at the atoms of `mu`.
pub fn atomwise_norm2<T: Real>(values: &[Complex<T>], mu: &CircleMeasure<T>) -> T {
    values.iter().zip(mu.atoms()).fold(T::zero(), |acc, (v, a)| acc + cabs2(*v) * a.weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{random_atomic_measure, random_off_circle_point};
    use crate::scalar::{c, unimodular};
    use crate::testing::{dirac_one, mixed, rng, two_point};

    fn gammas() -> [Complex<f64>; 3] {
        [c(0.0, 1.0), unimodular(2.0), c(-1.0, 0.0)]
    }

    #[test]
    fn dirac_clark_measure_moves_to_gamma() {
        let mu_i = finite_spectral_measure(&dirac_one(), c(0.0, 1.0)).unwrap();
        assert_eq!(mu_i.atoms().len(), 1);
        assert!((mu_i.atoms()[0].position - c(0.0, 1.0)).norm() < 1e-15);
        assert!((mu_i.atoms()[0].weight - 1.0).abs() < 1e-15);
        let r = herglotz_residual(&dirac_one(), &mu_i, c(0.0, 1.0), c(0.3, 0.0)).unwrap();
        assert!(r <= 1e-12);
    }

    #[test]
    fn gamma_one_returns_the_measure() {
        let mut r = rng(31);
        let mu = random_atomic_measure::<f64, _>(6, &mut r).unwrap();
        let same = finite_spectral_measure(&mu, c(1.0, 0.0)).unwrap();
        for (a, b) in mu.atoms().iter().zip(same.atoms()) {
            assert!((a.position - b.position).norm() < 1e-12);
            assert!((a.weight - b.weight).abs() < 1e-12);
        }
        for _ in 0..5 {
            let z = random_off_circle_point::<f64, _>(1e-3, &mut r);
            assert!(herglotz_residual(&mu, &same, c(1.0, 0.0), z).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn two_point_clark_measure_at_i() {
        let mu_i = finite_spectral_measure(&two_point(), c(0.0, 1.0)).unwrap();
        let root = unimodular(std::f64::consts::FRAC_PI_4);
        assert_eq!(mu_i.atoms().len(), 2);
        assert!((mu_i.atoms()[0].position - root).norm() < 1e-14);
        assert!((mu_i.atoms()[1].position + root).norm() < 1e-14);
        for a in mu_i.atoms() {
            assert!((a.weight - 0.5).abs() < 1e-14);
        }
        let mut r = rng(32);
        for _ in 0..10 {
            let z = random_off_circle_point::<f64, _>(1e-3, &mut r);
            assert!(herglotz_residual(&two_point(), &mu_i, c(0.0, 1.0), z).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn clark_measures_are_probability_measures() {
        let mut r = rng(33);
        for k in 1..10 {
            let mu = random_atomic_measure::<f64, _>(k, &mut r).unwrap();
            for g in gammas() {
                let mg = finite_spectral_measure(&mu, g).unwrap();
                assert!(mg.is_probability());
                assert!(mg.atoms().iter().all(|a| (a.position.norm() - 1.0).abs() < 1e-12));
                let args: Vec<f64> = mg.atoms().iter().map(|a| arg_0_2pi(a.position)).collect();
                assert!(args.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn transport_of_constants_and_conjugate_variable() {
        let mut r = rng(34);
        for k in 2..7 {
            let mu = random_atomic_measure::<f64, _>(k, &mut r).unwrap();
            for g in gammas() {
                let ones = vec![c(1.0, 0.0); k];
                let moved = spectral_transport(&mu, g, &ones).unwrap();
                assert!(moved.values.iter().all(|v| (v - c(1.0, 0.0)).norm() < 1e-10));
                let conj: Vec<_> = mu.atoms().iter().map(|a| a.position.conj()).collect();
                let moved = spectral_transport(&mu, g, &conj).unwrap();
                for (a, v) in moved.measure.atoms().iter().zip(&moved.values) {
                    assert!((v - g * a.position.conj()).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn transport_is_isometric() {
        let mu = two_point();
        let f = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let moved = spectral_transport(&mu, c(0.0, 1.0), &f).unwrap();
        let before = atomwise_norm2(&f, &mu);
        let after = atomwise_norm2(&moved.values, &moved.measure);
        assert!((before - after).abs() < 1e-12);
        assert!(spectral_transport(&mu, c(0.0, 1.0), &f[..1]).is_err());
    }

    #[test]
    fn aronszajn_krein_examples() {
        let mu = two_point();
        let z = c(0.2, -0.3);
        let ones = vec![c(1.0, 0.0); 2];
        assert!(ak_residual(&mu, c(0.0, 1.0), &ones, z).unwrap() <= 1e-12);
        let conj: Vec<_> = mu.atoms().iter().map(|a| a.position.conj()).collect();
        assert!(ak_residual(&mu, c(0.0, 1.0), &conj, z).unwrap() <= 1e-10);

        let mut r = rng(35);
        let mu = random_atomic_measure::<f64, _>(5, &mut r).unwrap();
        let f: Vec<_> = (0..5).map(|_| crate::sample::random_disc_point::<f64, _>(2.0, &mut r)).collect();
        for _ in 0..10 {
            let z = random_off_circle_point::<f64, _>(1e-3, &mut r);
            assert!(ak_residual(&mu, unimodular(2.0), &f, z).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn rejects_non_atomic_and_bad_parameters() {
        assert!(finite_spectral_measure(&mixed(), c(0.0, 1.0)).is_err());
        assert!(finite_spectral_measure(&two_point(), c(0.0, 0.5)).is_err());
        let light = CircleMeasure::dirac(c(1.0, 0.0)).unwrap();
        assert!(finite_spectral_measure(&light, c(1.0, 0.0)).is_ok());
        let heavy = CircleMeasure::atomic(vec![Atom::new(c(1.0, 0.0), 2.0)]).unwrap();
        assert!(matches!(finite_spectral_measure(&heavy, c(1.0, 0.0)), Err(Error::NotProbability { .. })));
    }

    #[test]
    fn clark_unitary_is_unitary() {
        let mut r = rng(36);
        let mu = random_atomic_measure::<f64, _>(8, &mut r).unwrap();
        let m = clark_unitary_matrix(&mu, unimodular(0.7)).unwrap();
        assert!(unitarity_residual(&m) < 1e-12);
    }
}
