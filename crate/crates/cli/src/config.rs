//! TOML experiment configuration.
//!
//! ```toml
//! schema_version = 1
//! command = "clark"
//! seed = 7
//! grid = 64
//! radii = [0.99, 0.999]
//! gamma_list = [[0.0, 1.0]]
//!
//! [measure]
//! atoms = [{ angle_over_2pi = 0.0, weight = 0.5 }]
//! density = { kind = "constant", value = 0.5 }
//!
//! [output]
//! path = "report.csv"
//! format = "csv"
//! ```
//!
//! Complex parameters are `[re, im]` pairs. Atoms are placed by the fraction
//! of a full turn so that `0`, `0.25`, `0.5`, `0.75` land exactly on `1, i, −1, −i`.

use std::path::{Path, PathBuf};

use clarklab::clark::{Atom, CircleMeasure, Density, DEFAULT_GRID};
use clarklab::sample::{jordan_block, random_cnu, CnuKind};
use clarklab::{Matrix64, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Charfun,
    Clark,
    Jump,
    Dilate,
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Charfun => "charfun",
            Command::Clark => "clark",
            Command::Jump => "jump",
            Command::Dilate => "dilate",
            Command::VerifyAll => "verify-all",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub angle_over_2pi: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    Constant {
        value: f64,
    },
    CosinePoly {
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    Table {
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    #[serde(default)]
    pub atoms: Vec<AtomSpec>,
    #[serde(default)]
    pub density: Option<DensitySpec>,
    /// Quadrature nodes for the density.
    #[serde(default = "default_quadrature")]
    pub quadrature: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatrixSpec {
    Jordan,
    RandomCnu {
        size: usize,
        defects: usize,
        seed: u64,
        #[serde(default = "yes")]
        partial_isometry: bool,
    },
    /// Row-major entries as `[re, im]` pairs.
    Dense {
        entries: Vec<Vec<[f64; 2]>>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    /// Long-format plot data `(x, series, value)`.
    #[serde(default)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub command: Command,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub measure: Option<MeasureSpec>,
    #[serde(default)]
    pub matrix: Option<MatrixSpec>,
    /// Angular sample count of sweeps over the circle.
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default)]
    pub gamma_list: Vec<[f64; 2]>,
    #[serde(default)]
    pub beta_list: Vec<[f64; 2]>,
    /// Truncation depth `M` of dilation sections.
    #[serde(default = "default_depth")]
    pub depth: usize,
    /// Sweep points closer than this arclength to an atom are skipped.
    #[serde(default = "default_exclusion")]
    pub exclusion: f64,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_quadrature() -> usize {
    DEFAULT_GRID
}
fn default_grid() -> usize {
    64
}
fn default_radii() -> Vec<f64> {
    vec![0.99, 0.999]
}
fn default_depth() -> usize {
    32
}
fn default_exclusion() -> f64 {
    0.1
}
fn yes() -> bool {
    true
}

impl ExperimentConfig {
    /// Defaults for `command` with no measure or matrix.
    pub fn for_command(command: Command) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            command,
            seed: 0,
            measure: None,
            matrix: None,
            grid: default_grid(),
            radii: default_radii(),
            gamma_list: Vec::new(),
            beta_list: Vec::new(),
            depth: default_depth(),
            exclusion: default_exclusion(),
            output: OutputSpec::default(),
        }
    }

    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::ConfigParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> CliResult<()> {
        let invalid = |m: String| Err(CliError::ConfigInvalid(m));
        if self.schema_version != SCHEMA_VERSION {
            return invalid(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        match (self.command, self.measure.is_some(), self.matrix.is_some()) {
            (Command::VerifyAll, _, _) => {}
            (_, true, true) | (_, false, false) => {
                return invalid("exactly one of [measure] and [matrix] must be given".into());
            }
            (Command::Clark | Command::Jump, false, true) => {
                return invalid(format!("command {} needs a [measure]", self.command.name()));
            }
            (Command::Dilate, true, false) => return invalid("command dilate needs a [matrix]".into()),
            _ => {}
        }
        if self.radii.is_empty() {
            return invalid("radii must not be empty".into());
        }
        if !self.radii.iter().all(|r| *r > 0.0 && *r < 1.0) || !self.radii.windows(2).all(|w| w[0] < w[1]) {
            return invalid("radii must be strictly increasing in (0, 1)".into());
        }
        if self.grid == 0 {
            return invalid("grid must be positive".into());
        }
        if self.depth < 2 {
            return invalid("depth must be at least 2".into());
        }
        if !(self.exclusion >= 0.0 && self.exclusion.is_finite()) {
            return invalid("exclusion must be a nonnegative arclength".into());
        }
        if let Some(m) = &self.measure {
            if m.atoms.is_empty() && m.density.is_none() {
                return invalid("measure has neither atoms nor density".into());
            }
        }
        if let Some(MatrixSpec::Dense { entries }) = &self.matrix {
            let n = entries.len();
            if n == 0 || entries.iter().any(|row| row.len() != n) {
                return invalid("dense matrix must be square and nonempty".into());
            }
        }
        Ok(())
    }

    pub fn gammas(&self) -> Vec<C64> {
        self.gamma_list.iter().map(|p| C64::new(p[0], p[1])).collect()
    }

    pub fn betas(&self) -> Vec<C64> {
        self.beta_list.iter().map(|p| C64::new(p[0], p[1])).collect()
    }
}

impl MeasureSpec {
    pub fn build(&self) -> clarklab::Result<CircleMeasure<f64>> {
        let atoms = self.atoms.iter().map(|a| Atom::at_fraction(a.angle_over_2pi, a.weight)).collect();
        let density = match &self.density {
            None => Density::Zero,
            Some(DensitySpec::Constant { value }) => Density::Constant(*value),
            Some(DensitySpec::CosinePoly { cos, sin }) => Density::CosinePoly { cos: cos.clone(), sin: sin.clone() },
            Some(DensitySpec::Table { values }) => Density::Table(values.clone()),
        };
        CircleMeasure::new(atoms, density, self.quadrature)
    }
}

impl MatrixSpec {
    pub fn build(&self) -> clarklab::Result<Matrix64> {
        match self {
            MatrixSpec::Jordan => Ok(jordan_block()),
            MatrixSpec::RandomCnu { size, defects, seed, partial_isometry } => {
                let kind =
                    if *partial_isometry { CnuKind::PartialIsometry } else { CnuKind::General { max_singular: 0.9 } };
                random_cnu(*size, *defects, kind, &mut ChaCha8Rng::seed_from_u64(*seed))
            }
            MatrixSpec::Dense { entries } => {
                let n = entries.len();
                Ok(Matrix64::from_fn(n, n, |i, j| C64::new(entries[i][j][0], entries[i][j][1])))
            }
        }
    }
}
