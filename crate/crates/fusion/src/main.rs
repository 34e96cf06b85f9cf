use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fusion::bench::{self, BenchOptions, DESK_SAMPLES, FULL_SAMPLES};
use fusion::wav::{self, Format};
use fusion::{build, default_record, Config, EngineKind, Program};
use fusion_core::params::ParamRecord;

/// Render and benchmark fused signal programs.
#[derive(Debug, Parser)]
#[command(name = "fusion", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render one program to a file.
    Render {
        #[arg(long, value_parser = parse_program)]
        program: Program,
        #[arg(long)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = EngineArg::Scalar)]
        engine: EngineArg,
        /// Output path; `-` writes to standard output.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::F32)]
        format: FormatArg,
        /// Override an open parameter, e.g. `--set freq=440`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Time every program on both engines.
    Bench {
        /// Samples per render [default: 8820000]
        #[arg(long, conflicts_with = "desk")]
        samples: Option<usize>,
        /// Desk scale: 441000 samples.
        #[arg(long)]
        desk: bool,
        /// Timed runs per cell; the median is reported.
        #[arg(long, default_value_t = bench::MIN_RUNS as u64, value_parser = clap::value_parser!(u64).range(3..))]
        runs: u64,
        /// Restrict to these programs (comma separated).
        #[arg(long, value_delimiter = ',', value_parser = parse_program)]
        programs: Vec<Program>,
        /// Also write one JSON record per cell to this file.
        #[arg(long)]
        jsonl: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EngineArg {
    Scalar,
    Vector,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    F32,
    Wav,
}

fn parse_program(s: &str) -> Result<Program, String> {
    s.parse().map_err(|e: fusion::programs::UnknownProgram| e.to_string())
}

#[derive(Debug, thiserror::Error)]
enum Error {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Param(#[from] fusion_core::params::ParamError),
    #[error(transparent)]
    Bench(#[from] bench::BenchError),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl Error {
    fn exit_code(&self) -> u8 {
        match self {
            Error::Usage(_) => 1,
            _ => 2,
        }
    }
}

fn io_err(path: &std::path::Path) -> impl FnOnce(io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.display().to_string(), source }
}

fn open_out(path: &std::path::Path) -> Result<Box<dyn Write>, Error> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(io::stdout().lock()));
    }
    let f = File::create(path).map_err(io_err(path))?;
    Ok(Box::new(BufWriter::new(f)))
}

fn render(
    program: Program,
    samples: usize,
    engine: EngineArg,
    out: PathBuf,
    format: FormatArg,
    set: Vec<String>,
) -> Result<(), Error> {
    let cfg = Config::default();
    let overrides = ParamRecord::parse(set.iter().map(String::as_str)).map_err(|e| Error::Usage(e.to_string()))?;
    let mut rec = default_record(program, &cfg);
    rec.0.extend(overrides.0);
    let engine = match engine {
        EngineArg::Scalar => EngineKind::Scalar,
        EngineArg::Vector => EngineKind::Vector,
    };
    let data = build(program, engine, &cfg, None)?.render(&rec, samples)?;
    let format = match format {
        FormatArg::F32 => Format::F32,
        FormatArg::Wav => Format::Wav,
    };
    let w = open_out(&out)?;
    wav::write(w, &data, format, cfg.sample_rate as u32).map_err(io_err(&out))
}

fn run_bench(
    samples: Option<usize>,
    desk: bool,
    runs: u64,
    programs: Vec<Program>,
    jsonl: Option<PathBuf>,
) -> Result<(), Error> {
    let cfg = Config::default();
    let samples = samples.unwrap_or(if desk { DESK_SAMPLES } else { FULL_SAMPLES });
    let programs = if programs.is_empty() { Program::ALL.to_vec() } else { programs };
    let opts = BenchOptions { programs, samples, runs: runs as usize };
    let mut records = match &jsonl {
        Some(path) => Some((path, BufWriter::new(File::create(path).map_err(io_err(path))?))),
        None => None,
    };
    let mut write_err = None;
    let results = bench::run(&cfg, &opts, |r| {
        eprintln!("{:<12} {:<7} {:>9.4} s", r.program, r.engine, r.seconds);
        if let Some((path, w)) = records.as_mut() {
            let line = serde_json::to_string(r).expect("bench records serialize");
            if let Err(e) = writeln!(w, "{line}") {
                write_err.get_or_insert(io_err(path)(e));
            }
        }
    })?;
    if let Some(e) = write_err {
        return Err(e);
    }
    if let Some((path, mut w)) = records {
        w.flush().map_err(io_err(path))?;
    }
    print!("{}", bench::table(&results));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Render { program, samples, engine, out, format, set } => {
            render(program, samples, engine, out, format, set)
        }
        Command::Bench { samples, desk, runs, programs, jsonl } => run_bench(samples, desk, runs, programs, jsonl),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
