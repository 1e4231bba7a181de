//! Batch front end.
//!
//! Exit codes: 0 ok, 2 usage or I/O, 3 invalid config, 4 degenerate polytope,
//! 5 not simple, 6 level not regular, 7 sampling failure. Codes 5 and 6 still
//! write a (partial) report.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process;

use clap::{Parser, ValueEnum};

use quasifold::config::parse_config;
use quasifold::pipeline::{run_pipeline, ExitCode, FaceListing, PipelineError};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Faces {
    Vertices,
    All,
}

#[derive(Debug, Parser)]
#[command(name = "quasifold", version, about = "Reduced space data for a simple polytope with normals in Q(sqrt m)")]
struct Args {
    /// Problem description (key = value lines).
    #[arg(long)]
    input: PathBuf,
    /// Number of moment-image samples; overrides the config.
    #[arg(long)]
    samples: Option<usize>,
    /// Sampling seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Float tolerance; overrides the config.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Write sampled moment values as CSV; overrides the config.
    #[arg(long = "emit-samples")]
    emit_samples: Option<PathBuf>,
    /// Report destination: a file path or `stdout`.
    #[arg(long, default_value = "stdout")]
    report: String,
    /// Which isotropy groups to list.
    #[arg(long, value_enum, default_value_t = Faces::Vertices)]
    faces: Faces,
}

fn fail(code: ExitCode, msg: impl std::fmt::Display) -> ! {
    eprintln!("quasifold: {}: {msg}", code.label());
    process::exit(code.code());
}

fn io_error(context: String) -> impl FnOnce(std::io::Error) -> PipelineError {
    move |source| PipelineError::Io { context, source }
}

fn run(args: Args) -> Result<ExitCode, PipelineError> {
    let text = fs::read_to_string(&args.input).map_err(io_error(format!("reading {}", args.input.display())))?;
    let mut cfg = parse_config(&text)?;
    if let Some(n) = args.samples {
        cfg.samples = n;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = args.tolerance {
        cfg.tolerance = t;
    }
    if args.emit_samples.is_some() {
        cfg.emit_samples = args.emit_samples;
    }
    let faces = match args.faces {
        Faces::Vertices => FaceListing::Vertices,
        Faces::All => FaceListing::All,
    };

    let report = run_pipeline(&cfg, faces)?;
    let text = report.render();
    if args.report == "stdout" {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())
            .and_then(|_| out.flush())
            .map_err(io_error("writing report to stdout".into()))?;
    } else {
        fs::write(&args.report, text).map_err(io_error(format!("writing {}", args.report)))?;
    }
    if let (Some(path), true) = (&cfg.emit_samples, report.samples.is_some()) {
        fs::write(path, report.samples_csv()).map_err(io_error(format!("writing {}", path.display())))?;
    }
    Ok(report.status)
}

fn main() {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            process::exit(0);
        }
        Err(e) => {
            let _ = e.print();
            process::exit(ExitCode::Usage.code());
        }
    };
    match run(args) {
        Ok(ExitCode::Success) => {}
        Ok(code) => {
            eprintln!("quasifold: {}", code.label());
            process::exit(code.code());
        }
        Err(e) => fail(e.exit_code(), e),
    }
}
