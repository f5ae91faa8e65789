use std::path::PathBuf;

use clap::Parser;
use clarklab_cli::{exit_code, resolve_config, run, write_outputs, CliError, Command, Format, Overrides};

/// Runs clarklab verification pipelines and writes their check tables.
#[derive(Debug, Parser)]
#[command(name = "clarklab", version)]
struct Args {
    /// Pipeline to run; overrides `command` in the config.
    #[arg(value_enum)]
    command: Option<Command>,
    /// TOML experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Angular sample count of sweeps.
    #[arg(long)]
    grid: Option<usize>,
    /// Sweep radius; repeat for several.
    #[arg(long = "radius")]
    radii: Vec<f64>,
    /// Also write long-format plot data here.
    #[arg(long)]
    plot: Option<PathBuf>,
}

fn configure_threads() {
    if let Some(n) = std::env::var("CLARKLAB_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            // only fails if a pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn execute(args: &Args) -> Result<i32, CliError> {
    let overrides = Overrides {
        command: args.command,
        seed: args.seed,
        out: args.out.clone(),
        format: args.format,
        grid: args.grid,
        radii: args.radii.clone(),
        plot: args.plot.clone(),
    };
    let cfg = resolve_config(args.config.as_deref(), &overrides)?;
    let report = run(&cfg)?;
    write_outputs(&report, &cfg)?;
    let failed = report.failures().count();
    if failed > 0 {
        eprintln!("{failed} of {} checks failed", report.rows.len());
    }
    Ok(exit_code(&report))
}

fn main() {
    let args = Args::parse();
    configure_threads();
    let code = execute(&args).unwrap_or_else(|e| {
        let record = serde_json::to_string(&e.record()).unwrap_or_else(|_| format!("{{\"error\":\"{}\"}}", e.kind()));
        eprintln!("{record}");
        e.exit_code()
    });
    std::process::exit(code);
}
