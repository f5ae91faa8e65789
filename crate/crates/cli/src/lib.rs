//! Experiment runner for the clarklab toolkit: TOML configs in, check
//! tables and plot data out.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod suite;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

pub use commands::run;
pub use config::{Command, ExperimentConfig, Format};
pub use error::{exit, CliError, CliResult, ErrorRecord};
pub use report::{PlotPoint, Report, Row};

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub command: Option<Command>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub grid: Option<usize>,
    pub radii: Vec<f64>,
    pub plot: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(c) = self.command {
            cfg.command = c;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.output.path = Some(o.clone());
        }
        if let Some(f) = self.format {
            cfg.output.format = f;
        }
        if let Some(g) = self.grid {
            cfg.grid = g;
        }
        if !self.radii.is_empty() {
            cfg.radii = self.radii.clone();
        }
        if let Some(p) = &self.plot {
            cfg.output.plot = Some(p.clone());
        }
    }
}

/// Loads or defaults the config, applies overrides and validates.
pub fn resolve_config(path: Option<&std::path::Path>, overrides: &Overrides) -> CliResult<ExperimentConfig> {
    let mut cfg = match (path, overrides.command) {
        (Some(p), _) => ExperimentConfig::load(p)?,
        (None, Some(c)) => ExperimentConfig::for_command(c),
        (None, None) => return Err(CliError::ConfigInvalid("give a command or --config".into())),
    };
    overrides.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

/// Writes the report (to `output.path`, or stdout) and the plot data if requested.
pub fn write_outputs(report: &Report, cfg: &ExperimentConfig) -> CliResult<()> {
    let render = |w: &mut dyn Write| match cfg.output.format {
        Format::Csv => report.write_csv(w),
        Format::Json => report.write_json(w),
    };
    match &cfg.output.path {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::io(path, e))?;
            let mut w = BufWriter::new(file);
            render(&mut w)?;
            w.flush().map_err(|e| CliError::io(path, e))?;
        }
        None => render(&mut std::io::stdout().lock())?,
    }
    if let Some(path) = &cfg.output.plot {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut w = BufWriter::new(file);
        report.emit_plot_data(&mut w)?;
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}

/// Exit code for a finished run.
pub fn exit_code(report: &Report) -> i32 {
    if report.all_pass {
        exit::PASS
    } else {
        exit::CHECK_FAILURE
    }
}
