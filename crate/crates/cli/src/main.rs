use chronocalc_cli::acceptance::SuiteOptions;
use chronocalc_cli::app::{self, exit, SuiteOutputs};
use chronocalc_cli::config::PlotKind;
use clap::{Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "chronocalc", version, about = "Time-ordered operator calculus experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a JSON config.
    Run {
        config: PathBuf,
        /// Fill the runtime_ms column (makes the CSV nondeterministic).
        #[arg(long)]
        timings: bool,
    },
    /// Run an acceptance suite: gauge, dyson, trotter, pathsum, kernels or all.
    Suite {
        name: String,
        /// Replace every numeric tolerance with this value.
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the JSON summary here as well as to stdout.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        timings: bool,
    },
    /// Render a CSV as SVG.
    Plot {
        csv: PathBuf,
        #[arg(long, value_parser = ["loglog", "line", "heatmap"])]
        kind: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit::ERROR
        }
    };
    ExitCode::from(code as u8)
}

fn execute(cmd: Command) -> anyhow::Result<i32> {
    match cmd {
        Command::Run { config, timings } => {
            let out = app::run(&config, timings)?;
            if out.config.output.csv.is_none() {
                std::io::stdout().write_all(out.csv.as_bytes())?;
            }
            for f in &out.failures {
                eprintln!("check failed: {f}");
            }
            Ok(out.exit_code())
        }
        Command::Suite { name, tolerance, csv, json, timings } => {
            let opts = SuiteOptions { tolerance, timings };
            let report = app::suite(&name, &opts, &SuiteOutputs { csv: csv.as_deref(), json: json.as_deref() })?;
            for c in &report.criteria {
                eprintln!("{}", c.summary_line());
            }
            print!("{}", app::summary_json(&report)?);
            Ok(if report.passed { exit::OK } else { exit::TOLERANCE })
        }
        Command::Plot { csv, kind, output } => {
            let kind: PlotKind = kind.parse()?;
            let path = app::plot(&csv, kind, output.as_deref())?;
            eprintln!("wrote {}", path.display());
            Ok(exit::OK)
        }
    }
}
