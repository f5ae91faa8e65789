use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::scalar::{arg_0_2pi, cabs, unimodular, Real};

/// Default number of quadrature nodes for the absolutely continuous part.
pub const DEFAULT_GRID: usize = 2048;

/// Tolerance on the total mass of a probability measure.
pub const PROBABILITY_TOL: f64 = 1e-10;

/// A point mass on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom<T: Real> {
    pub position: Complex<T>,
    pub weight: T,
}

impl<T: Real> Atom<T> {
    pub fn new(position: Complex<T>, weight: T) -> Self {
        Atom { position, weight }
    }

    /// Atom at `e^{i t}`.
    pub fn at_angle(t: T, weight: T) -> Self {
        Atom { position: unimodular(t), weight }
    }

    /// Atom at `e^{2πi·fraction}`. Multiples of a quarter turn are placed
    /// exactly on `±1`, `±i`.
    pub fn at_fraction(fraction: f64, weight: T) -> Self {
        let f = fraction.rem_euclid(1.0);
        let quarter = 4.0 * f;
        let position = if quarter.fract() == 0.0 {
            let (one, zero) = (T::one(), T::zero());
            match quarter as u8 {
                0 => Complex::new(one, zero),
                1 => Complex::new(zero, one),
                2 => Complex::new(-one, zero),
                _ => Complex::new(zero, -one),
            }
        } else {
            unimodular(T::two_pi() * T::lit(f))
        };
        Atom { position, weight }
    }
}

/// Smooth density of the absolutely continuous part with respect to the
/// normalized Lebesgue measure `dm = dt / 2π`.
#[derive(Debug, Clone, PartialEq)]
pub enum Density<T: Real> {
    Zero,
    Constant(T),
    /// `h(t) = Σ_k cos[k]·cos(k t) + sin[k]·sin(k t)`; `sin[0]` is unused.
    CosinePoly {
        cos: Vec<T>,
        sin: Vec<T>,
    },
    /// Samples at `t_j = 2πj / len`, periodically linearly interpolated.
    Table(Vec<T>),
}

impl<T: Real> Density<T> {
    pub fn is_zero(&self) -> bool {
        matches!(self, Density::Zero)
    }

    /// Density value at angle `t`.
    pub fn eval(&self, t: T) -> T {
        match self {
            Density::Zero => T::zero(),
            Density::Constant(c) => *c,
            Density::CosinePoly { cos, sin } => {
                let mut acc = T::zero();
                for (k, a) in cos.iter().enumerate() {
                    acc += *a * (T::lit(k as f64) * t).cos();
                }
                for (k, b) in sin.iter().enumerate().skip(1) {
                    acc += *b * (T::lit(k as f64) * t).sin();
                }
                acc
            }
            Density::Table(values) => {
                let len = values.len();
                if len == 0 {
                    return T::zero();
                }
                let turns = t / T::two_pi();
                let pos = (turns - turns.floor()) * T::lit(len as f64);
                let i0 = pos.floor();
                let frac = pos - i0;
                let i = i0.as_f64() as usize % len;
                values[i] * (T::one() - frac) + values[(i + 1) % len] * frac
            }
        }
    }
}

/// Finite nonnegative measure on the unit circle: finitely many atoms plus a
/// smooth density.
///
/// The density enters the transforms only through its Fourier coefficients
/// `ĥ_n = ∫ ξ̄^n h dm`, computed once by the trapezoid rule on `grid` nodes
/// and truncated to `|n| < grid / 2`. For trigonometric polynomials of lower
/// degree the coefficients are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleMeasure<T: Real> {
    atoms: Vec<Atom<T>>,
    density: Density<T>,
    grid: usize,
    band: usize,
    /// `ĥ_0, ĥ_1, …, ĥ_band`; negative indices follow by conjugation.
    fourier: Vec<Complex<T>>,
    total_mass: T,
}

impl<T: Real> CircleMeasure<T> {
    pub fn new(atoms: Vec<Atom<T>>, density: Density<T>, grid: usize) -> Result<Self> {
        if grid < 4 {
            return Err(Error::InvalidMeasure(format!("grid size {grid} is below 4")));
        }
        for a in &atoms {
            if !(a.weight > T::zero() && a.weight.is_finite()) {
                return Err(Error::InvalidMeasure(format!("atom weight {} is not positive", a.weight)));
            }
            if (cabs(a.position) - T::one()).abs() > T::tol(1e-14) {
                return Err(Error::InvalidMeasure("atom position is not unimodular".into()));
            }
        }
        for (i, a) in atoms.iter().enumerate() {
            for b in &atoms[i + 1..] {
                if cabs(a.position - b.position) < T::tol(1e-12) {
                    return Err(Error::InvalidMeasure("atom positions coincide".into()));
                }
            }
        }

        let band = (grid - 1) / 2;
        let mut fourier = vec![Complex::new(T::zero(), T::zero()); band + 1];
        match &density {
            Density::Zero => {}
            Density::Constant(c) => {
                if *c < T::zero() || !c.is_finite() {
                    return Err(Error::InvalidMeasure("density must be nonnegative".into()));
                }
                fourier[0] = Complex::new(*c, T::zero());
            }
            _ => {
                let step = T::two_pi() / T::lit(grid as f64);
                let samples: Vec<T> = (0..grid).map(|k| density.eval(step * T::lit(k as f64))).collect();
                if samples.iter().any(|h| !h.is_finite() || *h < T::lit(-1e-12)) {
                    return Err(Error::InvalidMeasure("density must be finite and nonnegative".into()));
                }
                let twiddle: Vec<Complex<T>> = (0..grid).map(|j| unimodular(-(step * T::lit(j as f64)))).collect();
                let inv = T::one() / T::lit(grid as f64);
                for (n, coef) in fourier.iter_mut().enumerate() {
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for (k, h) in samples.iter().enumerate() {
                        acc += twiddle[(n * k) % grid] * *h;
                    }
                    *coef = acc * inv;
                }
                fourier[0].im = T::zero();
            }
        }
        let total_mass = atoms.iter().fold(fourier[0].re, |acc, a| acc + a.weight);
        Ok(CircleMeasure { atoms, density, grid, band, fourier, total_mass })
    }

    /// Normalized Lebesgue measure `m`.
    pub fn lebesgue(grid: usize) -> Result<Self> {
        Self::new(Vec::new(), Density::Constant(T::one()), grid)
    }

    /// Unit point mass at `position`.
    pub fn dirac(position: Complex<T>) -> Result<Self> {
        Self::atomic(vec![Atom::new(position, T::one())])
    }

    pub fn atomic(atoms: Vec<Atom<T>>) -> Result<Self> {
        Self::new(atoms, Density::Zero, DEFAULT_GRID)
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn density(&self) -> &Density<T> {
        &self.density
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    /// Largest retained Fourier index of the density.
    pub fn band(&self) -> usize {
        self.band
    }

    pub fn total_mass(&self) -> T {
        self.total_mass
    }

    pub fn is_atomic(&self) -> bool {
        self.density.is_zero()
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass - T::one()).abs() <= T::tol(PROBABILITY_TOL)
    }

    pub(crate) fn require_probability(&self) -> Result<()> {
        if self.is_probability() {
            Ok(())
        } else {
            Err(Error::NotProbability { mass: self.total_mass.as_f64() })
        }
    }

    /// Fourier coefficient `ĥ_n = ∫ ξ̄^n h dm` of the density (zero beyond the band).
    pub fn fourier(&self, n: i64) -> Complex<T> {
        let k = n.unsigned_abs() as usize;
        if k > self.band {
            return Complex::new(T::zero(), T::zero());
        }
        if n >= 0 {
            self.fourier[k]
        } else {
            self.fourier[k].conj()
        }
    }

    /// Value of the density `dμ_ac/dm` at the point `xi` of the circle.
    pub fn density_at(&self, xi: Complex<T>) -> T {
        self.density.eval(arg_0_2pi(xi))
    }

    /// Distance from `xi` to the nearest atom, if any.
    pub fn distance_to_atoms(&self, xi: Complex<T>) -> Option<T> {
        self.atoms.iter().map(|a| cabs(a.position - xi)).reduce(|a, b| a.min(b))
    }
}
