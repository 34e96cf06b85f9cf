//! Benchmark programs, audio output and timing for `fusion-core`.

pub mod bench;
pub mod config;
pub mod equivalence;
pub mod programs;
pub mod wav;

pub use config::Config;
pub use programs::{build, default_record, EngineKind, Program};
