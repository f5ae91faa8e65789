//! Radial boundary behaviour: Privalov's jump of `Kμ`, the jump of the
//! normalized Cauchy transform, and limits at atoms.

use nalgebra::Complex;

use crate::clark::measure::CircleMeasure;
use crate::clark::spectral::finite_spectral_measure;
use crate::clark::transform::{cauchy_transform, normalized_cauchy, theta_from_measure, WeightFn};
use crate::error::{Error, Result};
use crate::scalar::{cabs, cr, to_pair, Real};

/// Points closer than this to an atom are rejected by the jump operations.
pub const ATOM_EXCLUSION: f64 = 1e-6;

/// Threshold on `|K±μ|` below which the jump formula is not evaluated.
pub const DEGENERATE_CAUCHY: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivalovJump<T: Real> {
    /// `Kμ(rξ)`
    pub k_minus: Complex<T>,
    /// `Kμ(ξ/r)`
    pub k_plus: Complex<T>,
    /// `dμ/dm` at `ξ`
    pub density_value: T,
}

impl<T: Real> PrivalovJump<T> {
    /// `|K⁻ − K⁺ − dμ/dm|`
    pub fn defect(&self) -> T {
        cabs(self.k_minus - self.k_plus - cr(self.density_value))
    }
}

/// Both sides of the jump formula for `C_{ξ̄μ}` at a single point and radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpReport<T: Real> {
    pub xi: Complex<T>,
    /// `C_{ξ̄μ}(rξ) − C_{ξ̄μ}(ξ/r)`
    pub lhs: Complex<T>,
    /// `(dμ/dm)(ξ) / (ξ · Kμ(ξ/r) · Kμ(rξ))`
    pub rhs: Complex<T>,
    pub k_plus: Complex<T>,
    pub k_minus: Complex<T>,
    pub radius_used: T,
}

impl<T: Real> JumpReport<T> {
    pub fn abs_err(&self) -> T {
        cabs(self.lhs - self.rhs)
    }

    /// `|lhs − rhs| / |rhs|`, or the absolute error when `rhs` vanishes.
    pub fn rel_err(&self) -> T {
        let scale = cabs(self.rhs);
        if scale > T::zero() {
            self.abs_err() / scale
        } else {
            self.abs_err()
        }
    }
}

fn check_radial<T: Real>(mu: &CircleMeasure<T>, xi: Complex<T>, r: T) -> Result<()> {
    if (cabs(xi) - T::one()).abs() > T::tol(1e-12) {
        return Err(Error::InvalidArgument("ξ must lie on the unit circle".into()));
    }
    // compared on r itself: 1 − 0.99 rounds above 1e-2
    if !(r < T::one() && r >= T::lit(0.99)) {
        return Err(Error::InvalidArgument(format!("radius {r} must lie in [0.99, 1)")));
    }
    if let Some(d) = mu.distance_to_atoms(xi) {
        if d < T::lit(ATOM_EXCLUSION) {
            return Err(Error::AtXiAtom { xi: to_pair(xi) });
        }
    }
    Ok(())
}

/// Cauchy transform just inside (`rξ`) and just outside (`ξ/r`) the circle,
/// next to the density value at `ξ`.
pub fn privalov_jump<T: Real>(mu: &CircleMeasure<T>, xi: Complex<T>, r: T) -> Result<PrivalovJump<T>> {
    check_radial(mu, xi, r)?;
    Ok(PrivalovJump {
        k_minus: cauchy_transform(mu, &WeightFn::One, xi * cr(r))?,
        k_plus: cauchy_transform(mu, &WeightFn::One, xi / cr(r))?,
        density_value: mu.density_at(xi),
    })
}

/// Radial evaluation of `[[C_{ξ̄μ}]](ξ) = (dμ/dm)(ξ) / (ξ K⁺μ(ξ) K⁻μ(ξ))`.
pub fn jump_report<T: Real>(mu: &CircleMeasure<T>, xi: Complex<T>, r: T) -> Result<JumpReport<T>> {
    mu.require_probability()?;
    check_radial(mu, xi, r)?;
    let inside = xi * cr(r);
    let outside = xi / cr(r);
    let k_minus = cauchy_transform(mu, &WeightFn::One, inside)?;
    let k_plus = cauchy_transform(mu, &WeightFn::One, outside)?;
    for (k, z) in [(k_minus, inside), (k_plus, outside)] {
        if cabs(k) < T::lit(DEGENERATE_CAUCHY) {
            return Err(Error::DegenerateCauchyValue { z: to_pair(z) });
        }
    }
    let lhs = normalized_cauchy(mu, &WeightFn::ConjXi, inside)? - normalized_cauchy(mu, &WeightFn::ConjXi, outside)?;
    let rhs = cr(mu.density_at(xi)) / (xi * k_plus * k_minus);
    Ok(JumpReport { xi, lhs, rhs, k_plus, k_minus, radius_used: r })
}

fn check_schedule<T: Real>(radii: &[T]) -> Result<()> {
    let max = T::one() - T::lit(1e-6);
    let increasing = radii.windows(2).all(|w| w[0] < w[1]);
    if radii.is_empty() || !increasing || radii[0] <= T::zero() || radii[radii.len() - 1] > max {
        return Err(Error::InvalidArgument("radii must be strictly increasing in (0, 1 − 1e-6]".into()));
    }
    Ok(())
}

/// `C_{ξ̄μ_γ}(rζ)` along the radius schedule, at the atom `ζ` with the given index.
pub fn poltoratski_limit<T: Real>(
    mu_gamma: &CircleMeasure<T>,
    atom_index: usize,
    radii: &[T],
) -> Result<Vec<Complex<T>>> {
    check_schedule(radii)?;
    let atom = mu_gamma
        .atoms()
        .get(atom_index)
        .ok_or_else(|| Error::InvalidArgument(format!("no atom with index {atom_index}")))?;
    radii.iter().map(|&r| normalized_cauchy(mu_gamma, &WeightFn::ConjXi, atom.position * cr(r))).collect()
}

/// `θ(rζ)` along the schedule at one atom `ζ` of `μ_γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomBoundary<T: Real> {
    pub atom: Complex<T>,
    pub values: Vec<Complex<T>>,
}

/// Radial values of `θ` (built from `mu`) at every atom of the Clark measure `μ_γ`.
pub fn theta_boundary_at_singular<T: Real>(
    mu: &CircleMeasure<T>,
    gamma: Complex<T>,
    radii: &[T],
) -> Result<Vec<AtomBoundary<T>>> {
    check_schedule(radii)?;
    let mu_gamma = finite_spectral_measure(mu, gamma)?;
    mu_gamma
        .atoms()
        .iter()
        .map(|a| {
            let values =
                radii.iter().map(|&r| theta_from_measure(mu, a.position * cr(r))).collect::<Result<Vec<_>>>()?;
            Ok(AtomBoundary { atom: a.position, values })
        })
        .collect()
}
