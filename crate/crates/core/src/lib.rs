//! Fused signal generators and causal processes.
//!
//! A program is built by composing small state machines at compile time:
//! [`Generator`]s emit one sample per step, [`Causal`] processes consume one
//! input sample per output sample. Composition nests the step functions, so
//! rendering a whole program runs a single loop without intermediate buffers.
//!
//! Every primitive exists in two shapes. The scalar engine steps one sample at
//! a time; the vector engine steps a [`Lanes`] block of `N` consecutive samples,
//! and recursive filters are rewritten with shift-add rounds so that a block
//! costs `log2(N)` vector operations instead of `N` dependent scalar ones.
//!
//! The crate is `no_std` and only needs `alloc` for output buffers, delay lines
//! and parameter records.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::type_complexity, clippy::float_cmp)]

extern crate alloc;

pub mod causal;
pub mod error;
pub mod filter;
pub mod generator;
pub mod lanes;
pub mod params;
pub mod poly;
pub mod sample;
pub mod vector;

pub use causal::{Causal, CausalExt};
pub use error::{DefinitionError, RenderError};
pub use generator::{render, render_chunked, Generator, GeneratorExt, SampleBuffer};
pub use lanes::Lanes;
pub use sample::{fraction, Float, Ring};
pub use vector::render_blocks;
