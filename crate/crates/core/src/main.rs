use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use memrelax::cli::commands::{run_compare, run_fixed_point, run_simulate, Sweep};
use memrelax::cli::csv::CsvTable;
use memrelax::cli::figures::{run_figure, FigureId, FigureOptions};
use memrelax::cli::scenario::Scenario;
use memrelax::cli::{CliError, EXIT_OK, EXIT_VALIDATION};

#[derive(Debug, Parser)]
#[command(name = "memrelax", version, about = "Memristor relaxation under periodic pulse trains")]
struct Args {
    /// Append a generation-time comment to CSV output.
    #[arg(long, global = true)]
    timestamp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact pulse-by-pulse simulation.
    Simulate {
        scenario: PathBuf,
        /// Output file; overrides `output.path`, `-` for stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fixed point, stability and relaxation time, optionally swept.
    FixedPoint {
        scenario: PathBuf,
        /// `param:min:max:n[:log]`
        #[arg(long)]
        sweep: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact trajectory against the closed-form averaged solution.
    Compare {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the data behind one figure.
    Figure {
        id: FigureId,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Comma-separated initial states.
        #[arg(long, value_delimiter = ',')]
        x0: Option<Vec<f64>>,
        /// Comma-separated family values (fig4a: |h-| tau-, fig4b: T/T0).
        #[arg(long, value_delimiter = ',')]
        family: Option<Vec<f64>>,
    },
}

fn read_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    Scenario::from_json(&text)
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) if p == Path::new("-") => {
            print!("{text}");
            Ok(())
        }
        Some(p) => {
            let io = |source| CliError::Io { path: p.display().to_string(), source };
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(io)?;
            }
            fs::write(p, text).map_err(io)?;
            eprintln!("wrote {}", p.display());
            Ok(())
        }
    }
}

fn stamp(table: &mut CsvTable, enabled: bool) {
    if enabled {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        table.comment(format!("generated_unix_time: {secs}"));
    }
}

fn output_path(cli: Option<PathBuf>, sc: &Scenario) -> Option<PathBuf> {
    cli.or_else(|| sc.output.path.as_ref().map(PathBuf::from))
}

fn run(args: Args) -> Result<(), CliError> {
    let ts = args.timestamp;
    match args.command {
        Command::Simulate { scenario, out } => {
            let sc = read_scenario(&scenario)?;
            let mut table = run_simulate(&sc)?;
            stamp(&mut table, ts);
            write_text(output_path(out, &sc).as_deref(), &table.render())
        }
        Command::FixedPoint { scenario, sweep, out } => {
            let sc = read_scenario(&scenario)?;
            let sweep = sweep.as_deref().map(str::parse::<Sweep>).transpose()?;
            let result = run_fixed_point(&sc, sweep.as_ref())?;
            match result.table {
                Some(mut table) => {
                    stamp(&mut table, ts);
                    write_text(output_path(out, &sc).as_deref(), &table.render())
                }
                None => {
                    let mut text = result.summary.join("\n");
                    text.push('\n');
                    write_text(out.as_deref(), &text)
                }
            }
        }
        Command::Compare { scenario, out } => {
            let sc = read_scenario(&scenario)?;
            let mut result = run_compare(&sc)?;
            for line in &result.summary {
                eprintln!("{line}");
            }
            stamp(&mut result.table, ts);
            write_text(output_path(out, &sc).as_deref(), &result.table.render())
        }
        Command::Figure { id, out, x0, family } => {
            for (name, mut table) in run_figure(id, &FigureOptions { x0, family })? {
                stamp(&mut table, ts);
                write_text(Some(&out.join(name)), &table.render())?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_VALIDATION as u8 } else { EXIT_OK as u8 });
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
