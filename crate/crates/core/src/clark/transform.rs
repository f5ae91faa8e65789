use nalgebra::Complex;

use crate::charfun::CharFn;
use crate::clark::measure::CircleMeasure;
use crate::error::{Error, Result};
use crate::scalar::{cabs, cabs2, cr, to_pair, Real};

/// Minimum distance `|1 − |z||` from the circle at which transforms are evaluated.
pub const CIRCLE_GAP: f64 = 1e-9;

/// Threshold below which `Kμ(z)` counts as vanishing in quotients.
pub const VANISHING_TRANSFORM: f64 = 1e-13;

/// Weight function `f` in `K(fμ)`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightFn<T: Real> {
    /// `f ≡ 1`
    One,
    /// `f(ξ) = ξ̄`
    ConjXi,
    /// Values at the atoms, in atom order; purely atomic measures only.
    Atomwise(Vec<Complex<T>>),
}

fn check_off_circle<T: Real>(z: Complex<T>) -> Result<()> {
    if (T::one() - cabs(z)).abs() < T::lit(CIRCLE_GAP) {
        return Err(Error::TooCloseToCircle { z: to_pair(z) });
    }
    Ok(())
}

pub(crate) fn check_in_disc<T: Real>(z: Complex<T>) -> Result<()> {
    if cabs(z) >= T::one() {
        return Err(Error::InvalidArgument(format!("|z| = {} is not inside the disc", cabs(z))));
    }
    Ok(())
}

/// `∫ ξ̄^p h(ξ) / (1 − ξ̄ z) dm(ξ)` for the density part, summed from its
/// Fourier coefficients: `Σ_{n≥0} ĥ_{n+p} z^n` inside the disc and
/// `−Σ_{k≥1} ĥ_{p−k} z^{−k}` outside.
pub(crate) fn density_cauchy<T: Real>(mu: &CircleMeasure<T>, p: i64, z: Complex<T>) -> Complex<T> {
    let zero = Complex::new(T::zero(), T::zero());
    if mu.is_atomic() {
        return zero;
    }
    let band = mu.band() as i64;
    if cabs(z) < T::one() {
        let top = band - p;
        let mut acc = zero;
        for n in (0..=top).rev() {
            acc = acc * z + mu.fourier(n + p);
        }
        acc
    } else {
        let w = Complex::new(T::one(), T::zero()) / z;
        let top = band + p;
        let mut acc = zero;
        for k in (1..=top).rev() {
            acc = acc * w + mu.fourier(p - k);
        }
        -(acc * w)
    }
}

/// Cauchy transform `K(fμ)(z) = ∫ f(ξ) dμ(ξ) / (1 − ξ̄ z)` for `|z| ≠ 1`.
///
/// Atoms are summed in closed form; the density part goes through
/// [`CircleMeasure::fourier`].
pub fn cauchy_transform<T: Real>(mu: &CircleMeasure<T>, f: &WeightFn<T>, z: Complex<T>) -> Result<Complex<T>> {
    check_off_circle(z)?;
    let one = Complex::new(T::one(), T::zero());
    let mut acc = Complex::new(T::zero(), T::zero());
    match f {
        WeightFn::One | WeightFn::ConjXi => {
            let conj = matches!(f, WeightFn::ConjXi);
            for a in mu.atoms() {
                let fv = if conj { a.position.conj() } else { one };
                acc += fv * a.weight / (one - a.position.conj() * z);
            }
            acc += density_cauchy(mu, if conj { 1 } else { 0 }, z);
        }
        WeightFn::Atomwise(values) => {
            if !mu.is_atomic() {
                return Err(Error::AtomwiseNeedsAtomic);
            }
            if values.len() != mu.atoms().len() {
                return Err(Error::DimensionMismatch(format!(
                    "{} atomwise values for {} atoms",
                    values.len(),
                    mu.atoms().len()
                )));
            }
            for (a, fv) in mu.atoms().iter().zip(values) {
                acc += *fv * a.weight / (one - a.position.conj() * z);
            }
        }
    }
    Ok(acc)
}

/// Normalized Cauchy transform `C_{fμ} = K(fμ) / Kμ`.
pub fn normalized_cauchy<T: Real>(mu: &CircleMeasure<T>, f: &WeightFn<T>, z: Complex<T>) -> Result<Complex<T>> {
    let den = cauchy_transform(mu, &WeightFn::One, z)?;
    if cabs(den) < T::lit(VANISHING_TRANSFORM) {
        return Err(Error::DenominatorVanishes { z: to_pair(z) });
    }
    Ok(cauchy_transform(mu, f, z)? / den)
}

/// `z·C_{ξ̄μ}(z)` at any point off the circle. Inside the disc this is the
/// characteristic function; outside it is the function with
/// `Kμ = 1 / (1 − θ)` used by the Herglotz identities.
pub(crate) fn theta_off_circle<T: Real>(mu: &CircleMeasure<T>, z: Complex<T>) -> Result<Complex<T>> {
    Ok(z * normalized_cauchy(mu, &WeightFn::ConjXi, z)?)
}

/// Characteristic function `θ(z) = z·C_{ξ̄μ}(z)` of the cnu contraction whose
/// unitary perturbation at parameter 1 has spectral measure `mu`.
pub fn theta_from_measure<T: Real>(mu: &CircleMeasure<T>, z: Complex<T>) -> Result<Complex<T>> {
    mu.require_probability()?;
    check_in_disc(z)?;
    theta_off_circle(mu, z)
}

/// `θ_β(z) = −β + z(1 − |β|²) K(ξ̄μ) / (Kμ − z β̄ K(ξ̄μ))`.
pub fn theta_beta_from_measure<T: Real>(mu: &CircleMeasure<T>, beta: Complex<T>, z: Complex<T>) -> Result<Complex<T>> {
    mu.require_probability()?;
    check_in_disc(z)?;
    if cabs(beta) >= T::one() {
        return Err(Error::NotAStrictContraction { modulus: cabs(beta).as_f64() });
    }
    let k0 = cauchy_transform(mu, &WeightFn::One, z)?;
    let k1 = cauchy_transform(mu, &WeightFn::ConjXi, z)?;
    let den = k0 - z * beta.conj() * k1;
    if cabs(den) < T::lit(VANISHING_TRANSFORM) * T::one().max(cabs(k0)) {
        return Err(Error::DenominatorVanishes { z: to_pair(z) });
    }
    Ok(-beta + z * (T::one() - cabs2(beta)) * k1 / den)
}

/// Radial approximation `(1 − |θ(rξ)|²) / |γ − θ(rξ)|²` of the density of the
/// absolutely continuous part of the Clark measure `μ_γ`.
pub fn clark_density<T: Real>(theta: &CharFn<T>, gamma: Complex<T>, xi: Complex<T>, r: T) -> Result<T> {
    if !(r > T::zero() && r < T::one()) {
        return Err(Error::InvalidArgument(format!("radius {r} is not in (0, 1)")));
    }
    let z = xi * cr(r);
    let w = theta.eval_scalar(z)?;
    let den = cabs(gamma - w);
    if den < T::lit(1e-13) {
        return Err(Error::DegenerateDenominator { z: to_pair(z) });
    }
    Ok((T::one() - cabs2(w)) / (den * den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clark::{Atom, Density};
    use crate::linop::{char_fn_definition, defect_data};
    use crate::sample::{random_atomic_measure, random_disc_point, random_off_circle_point};
    use crate::scalar::{c, unimodular};
    use crate::testing::{dirac_one, jordan, lebesgue, mixed, rng, two_point};

    #[test]
    fn lebesgue_transforms() {
        let m = lebesgue();
        assert!((cauchy_transform(&m, &WeightFn::One, c(0.3, 0.2)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!(cauchy_transform(&m, &WeightFn::One, c(1.5, -0.4)).unwrap().norm() < 1e-15);
        for z in [c(0.1, 0.2), c(-0.9, 0.3), c(0.0, 0.99)] {
            assert!(cauchy_transform(&m, &WeightFn::ConjXi, z).unwrap().norm() < 1e-15);
            assert!(normalized_cauchy(&m, &WeightFn::ConjXi, z).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn dirac_transforms() {
        let d = dirac_one();
        for z in [c(0.4, 0.1), c(-0.7, 0.7), c(2.0, 1.0)] {
            let k = cauchy_transform(&d, &WeightFn::One, z).unwrap();
            assert!((k - c(1.0, 0.0) / (c(1.0, 0.0) - z)).norm() < 1e-14);
            assert!((normalized_cauchy(&d, &WeightFn::ConjXi, z).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn two_point_normalized_transform_is_identity() {
        let mu = two_point();
        for z in [c(0.2, -0.3), c(0.8, 0.1), c(1.5, 2.0)] {
            assert!((normalized_cauchy(&mu, &WeightFn::ConjXi, z).unwrap() - z).norm() < 1e-14);
        }
    }

    #[test]
    fn closeness_and_atomwise_checks() {
        let m = lebesgue();
        assert!(matches!(
            cauchy_transform(&m, &WeightFn::One, c(1.0 - 1e-12, 0.0)),
            Err(Error::TooCloseToCircle { .. })
        ));
        assert!(matches!(
            cauchy_transform(&m, &WeightFn::Atomwise(vec![]), c(0.1, 0.0)),
            Err(Error::AtomwiseNeedsAtomic)
        ));
        let mu = two_point();
        assert!(matches!(
            cauchy_transform(&mu, &WeightFn::Atomwise(vec![c(1.0, 0.0)]), c(0.1, 0.0)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn theta_examples() {
        let z = c(0.3, -0.5);
        assert!(theta_from_measure(&lebesgue(), z).unwrap().norm() < 1e-15);
        assert!((theta_from_measure(&dirac_one(), z).unwrap() - z).norm() < 1e-15);
        assert!((theta_from_measure(&two_point(), z).unwrap() - z * z).norm() < 1e-15);
        let mixed = mixed();
        assert!((theta_from_measure(&mixed, z).unwrap() - z / (c(2.0, 0.0) - z)).norm() < 1e-14);
        let near = theta_from_measure(&mixed, c(-0.9999, 0.0)).unwrap();
        assert!((near - c(-1.0 / 3.0, 0.0)).norm() < 1e-4);
        assert!(theta_from_measure(&mixed, c(1.2, 0.0)).is_err());
    }

    #[test]
    fn two_point_theta_matches_jordan_block() {
        let rec = defect_data(&jordan::<f64>(), 1e-10).unwrap();
        let mut r = rng(21);
        for _ in 0..20 {
            let z = random_disc_point::<f64, _>(0.99, &mut r);
            let a = theta_from_measure(&two_point(), z).unwrap();
            let b = char_fn_definition(&rec, z).unwrap()[(0, 0)];
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn theta_beta_examples() {
        let z = c(0.4, 0.0);
        let v = theta_beta_from_measure(&dirac_one(), c(0.5, 0.0), z).unwrap();
        assert!((v - c(-0.125, 0.0)).norm() < 1e-15);
        let mu = mixed();
        for z in [c(0.1, 0.6), c(-0.3, -0.2)] {
            let a = theta_beta_from_measure(&mu, c(0.0, 0.0), z).unwrap();
            assert!((a - theta_from_measure(&mu, z).unwrap()).norm() < 1e-15);
        }
        let z = c(-0.999, 0.0);
        let direct = theta_beta_from_measure(&mu, c(0.5, 0.0), z).unwrap();
        let via = crate::charfun::livsic_transform(theta_from_measure(&mu, z).unwrap(), c(0.5, 0.0)).unwrap();
        assert!((direct - via).norm() < 1e-6);
        assert!(theta_beta_from_measure(&mu, c(1.0, 0.0), z).is_err());
    }

    #[test]
    fn theta_is_bounded_and_vanishes_at_origin() {
        let mut r = rng(22);
        for k in 1..8 {
            let mu = random_atomic_measure::<f64, _>(k, &mut r).unwrap();
            assert!(theta_from_measure(&mu, c(0.0, 0.0)).unwrap().norm() < 1e-15);
            for _ in 0..20 {
                let z = random_disc_point::<f64, _>(0.999, &mut r);
                assert!(theta_from_measure(&mu, z).unwrap().norm() <= 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn exterior_atom_sum_matches_closed_form() {
        let mut r = rng(23);
        let mu = random_atomic_measure::<f64, _>(5, &mut r).unwrap();
        for _ in 0..20 {
            let z = random_off_circle_point::<f64, _>(1e-3, &mut r);
            let closed: Complex<f64> =
                mu.atoms().iter().map(|a| a.weight / (c(1.0, 0.0) - a.position.conj() * z)).sum();
            assert!((cauchy_transform(&mu, &WeightFn::One, z).unwrap() - closed).norm() < 1e-12);
        }
    }

    #[test]
    fn smooth_density_transform_near_the_circle() {
        // h = 1 + cos t: Kμ(z) = 1 + z/2 inside, −1/(2z) outside
        let mu = CircleMeasure::new(Vec::new(), Density::CosinePoly { cos: vec![1.0, 1.0], sin: vec![] }, 256).unwrap();
        for t in [0.3, 2.0, 4.5] {
            let xi = unimodular(t);
            let inside = xi * 0.9999;
            let outside = xi / 0.9999;
            assert!(
                (cauchy_transform(&mu, &WeightFn::One, inside).unwrap() - (c(1.0, 0.0) + inside / 2.0)).norm() < 1e-13
            );
            assert!((cauchy_transform(&mu, &WeightFn::One, outside).unwrap() + c(0.5, 0.0) / outside).norm() < 1e-13);
        }
    }

    #[test]
    fn clark_density_examples() {
        let zero = CharFn::<f64>::scalar(|_| c(0.0, 0.0));
        for g in [c(1.0, 0.0), c(0.0, 1.0)] {
            assert!((clark_density(&zero, g, unimodular(1.0), 0.9).unwrap() - 1.0).abs() < 1e-15);
        }
        let theta = CharFn::from_measure(mixed());
        let h = clark_density(&theta, c(1.0, 0.0), c(-1.0, 0.0), 0.9999).unwrap();
        assert!((h - 0.5).abs() < 1e-3);
        let z2 = CharFn::<f64>::scalar(|z| z * z);
        // the 1 − r⁴ bound needs |γ − θ| ≳ 1, i.e. ξ away from the atoms ±e^{iπ/4} of μ_i
        for t in [0.0, 0.5, 0.75, 1.0, 1.5].map(|f| f * std::f64::consts::PI) {
            let xi = unimodular(t);
            assert!((c(0.0, 1.0) - xi * xi).norm() >= 1.0);
            assert!(clark_density(&z2, c(0.0, 1.0), xi, 0.999).unwrap() <= 5e-3);
        }
        // θ(r) → 1 at the atom of δ₁
        let id = CharFn::<f64>::scalar(|z| z);
        assert!(matches!(
            clark_density(&id, c(1.0, 0.0), c(1.0, 0.0), 1.0 - 1e-14),
            Err(Error::DegenerateDenominator { .. })
        ));
        assert!(clark_density(&id, c(1.0, 0.0), c(1.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn atom_on_density_support_still_exact() {
        let mu = CircleMeasure::new(vec![Atom::at_fraction(0.25, 0.25)], Density::Constant(0.75), 64).unwrap();
        let z = c(0.2, 0.5);
        let want = c(0.75, 0.0) + c(0.25, 0.0) / (c(1.0, 0.0) - c(0.0, -1.0) * z);
        assert!((cauchy_transform(&mu, &WeightFn::One, z).unwrap() - want).norm() < 1e-15);
    }
}
