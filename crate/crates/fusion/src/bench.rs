//! Scalar and vector timings of the benchmark programs.

use std::fmt::Write as _;
use std::hint::black_box;
use std::time::Instant;

use fusion_core::params::ParamError;
use serde::Serialize;

use crate::config::Config;
use crate::equivalence::Equivalence;
use crate::programs::{build, default_record, EngineKind, Program};

/// 200 seconds at 44100 Hz.
pub const FULL_SAMPLES: usize = 8_820_000;
/// 10 seconds at 44100 Hz.
pub const DESK_SAMPLES: usize = 441_000;

pub const MIN_RUNS: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchResult {
    pub program: &'static str,
    pub engine: &'static str,
    pub samples: usize,
    pub seconds: f64,
    pub samples_per_sec: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(
        "{}: vector output deviates from scalar output (relative error {:.3e}, tolerance {:.0e}, lengths {} and {})",
        .0.program, .0.error, .0.tolerance, .0.scalar_len, .0.vector_len
    )]
    NotEquivalent(Equivalence),
    #[error("{program} {engine}: rendered {got} of {want} samples")]
    Short { program: Program, engine: EngineKind, got: usize, want: usize },
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub programs: Vec<Program>,
    pub samples: usize,
    /// Timed runs per cell; the median is reported. At least [`MIN_RUNS`].
    pub runs: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions { programs: Program::ALL.to_vec(), samples: FULL_SAMPLES, runs: MIN_RUNS }
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

/// Benchmarks every selected program on both engines, one cell at a time.
///
/// Only the render loop is timed; it writes into a buffer that is allocated
/// and paged in beforehand.
///
/// The warm-up render of each engine doubles as the equivalence gate: a
/// program whose engines disagree aborts the run before it is timed.
/// `report` sees each result as soon as it is measured.
pub fn run(
    cfg: &Config,
    opts: &BenchOptions,
    mut report: impl FnMut(&BenchResult),
) -> Result<Vec<BenchResult>, BenchError> {
    let runs = opts.runs.max(MIN_RUNS);
    let n = opts.samples;
    let mut results = Vec::new();
    for &program in &opts.programs {
        let rec = default_record(program, cfg);
        let engines = [EngineKind::Scalar, EngineKind::Vector];
        let compiled = engines.map(|e| build(program, e, cfg, None));
        let [scalar, vector] = compiled;
        let (scalar, vector) = (scalar?, vector?);

        let warm_s = scalar.render(&rec, n)?;
        let warm_v = vector.render(&rec, n)?;
        let eq = Equivalence::compare(program, &warm_s, &warm_v);
        if !eq.passed() {
            return Err(BenchError::NotEquivalent(eq));
        }
        drop((warm_s, warm_v));

        // One buffer for every timed run, touched before the first timing.
        let mut out = vec![0.0f32; n];
        scalar.render_into(&rec, &mut out)?;
        for (engine, r) in engines.into_iter().zip([&scalar, &vector]) {
            let mut times = Vec::with_capacity(runs);
            for _ in 0..runs {
                let t = Instant::now();
                let got = r.render_into(&rec, black_box(&mut out))?;
                let seconds = t.elapsed().as_secs_f64();
                black_box(&out);
                if got != n {
                    return Err(BenchError::Short { program, engine, got, want: n });
                }
                times.push(seconds);
            }
            let seconds = median(times);
            let result = BenchResult {
                program: program.name(),
                engine: engine.name(),
                samples: n,
                seconds,
                samples_per_sec: n as f64 / seconds,
            };
            report(&result);
            results.push(result);
        }
    }
    Ok(results)
}

/// Seconds per program and engine, with the vector speedup.
pub fn table(results: &[BenchResult]) -> String {
    let mut programs: Vec<&str> = Vec::new();
    for r in results {
        if !programs.contains(&r.program) {
            programs.push(r.program);
        }
    }
    let seconds = |p: &str, e: &str| results.iter().find(|r| r.program == p && r.engine == e).map(|r| r.seconds);
    let samples = results.first().map_or(0, |r| r.samples);
    let mut s = String::new();
    let _ = writeln!(s, "{samples} samples, median seconds");
    let _ = writeln!(s, "{:<12} {:>10} {:>10} {:>8}", "program", "scalar", "vector", "speedup");
    for p in programs {
        let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
        let (sc, ve) = (seconds(p, "scalar"), seconds(p, "vector"));
        let speedup = match (sc, ve) {
            (Some(a), Some(b)) if b > 0.0 => format!("{:.2}", a / b),
            _ => "-".to_string(),
        };
        let _ = writeln!(s, "{:<12} {:>10} {:>10} {:>8}", p, cell(sc), cell(ve), speedup);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_runs() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn small_bench_has_one_row_per_program() {
        let cfg = Config::default();
        let opts = BenchOptions { programs: Program::ALL.to_vec(), samples: 4096, runs: 3 };
        let results = run(&cfg, &opts, |_| {}).unwrap();
        assert_eq!(results.len(), 14);
        for r in &results {
            assert_eq!(r.samples, 4096);
            assert!((r.samples_per_sec - r.samples as f64 / r.seconds).abs() <= 1e-9 * r.samples_per_sec);
        }
        let t = table(&results);
        assert_eq!(t.lines().count(), 2 + 7);
    }
}
