//! Compile once, render many times.
//!
//! A program is built from a [`Schema`]: each [`ParamRef`] is either a
//! constant, known while the program is being wired, or an open slot that is
//! read from a [`ParamRecord`] when a render starts. The builder runs once in
//! [`compile`]; everything it computes outside the returned closure (constant
//! folding, filter design, decompositions) is shared by every render.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::sync::atomic::{AtomicU64, Ordering};

use crate::error::{DefinitionError, RenderError};
use crate::generator::{render, Generator};
use crate::lanes::Lanes;
use crate::vector::render_blocks;

/// Open parameters per program; the read-tracking mask is one word.
pub const MAX_OPEN_PARAMS: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub enum ParamError {
    Duplicate(String),
    TooMany(usize),
    Missing(String),
    Unknown(String),
    /// A `key=value` pair that did not parse.
    Syntax(String),
    Definition(DefinitionError),
    Render(RenderError),
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamError::Duplicate(n) => write!(f, "parameter `{n}` declared twice"),
            ParamError::TooMany(n) => write!(f, "{n} open parameters, at most {MAX_OPEN_PARAMS} are supported"),
            ParamError::Missing(n) => write!(f, "parameter `{n}` has no value"),
            ParamError::Unknown(n) => write!(f, "unknown parameter `{n}`"),
            ParamError::Syntax(s) => write!(f, "expected key=value with a decimal number, got `{s}`"),
            ParamError::Definition(e) => write!(f, "{e}"),
            ParamError::Render(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ParamError {}

impl From<DefinitionError> for ParamError {
    fn from(e: DefinitionError) -> Self {
        ParamError::Definition(e)
    }
}

impl From<RenderError> for ParamError {
    fn from(e: RenderError) -> Self {
        ParamError::Render(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamRef {
    Const(f64),
    Open(usize),
}

impl ParamRef {
    #[inline]
    pub fn get(self, values: &ParamValues) -> f64 {
        match self {
            ParamRef::Const(v) => v,
            ParamRef::Open(i) => {
                values.read.set(values.read.get() | 1 << i);
                values.values[i]
            }
        }
    }

    pub fn is_const(self) -> bool {
        matches!(self, ParamRef::Const(_))
    }
}

/// Names of the open parameters, in declaration order.
#[derive(Clone, Debug, Default)]
pub struct Schema {
    names: Vec<String>,
    error: Option<ParamError>,
}

impl Schema {
    pub fn param(&mut self, name: &str) -> ParamRef {
        if self.names.iter().any(|n| n == name) {
            self.error.get_or_insert(ParamError::Duplicate(name.to_string()));
        }
        self.names.push(name.to_string());
        ParamRef::Open(self.names.len() - 1)
    }

    pub fn const_param(&self, value: f64) -> ParamRef {
        ParamRef::Const(value)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Open parameter values resolved against a schema.
#[derive(Debug)]
pub struct ParamValues {
    values: Vec<f64>,
    read: core::cell::Cell<u64>,
}

/// Named values supplied at render time.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamRecord(pub BTreeMap<String, f64>);

impl ParamRecord {
    pub fn new() -> Self {
        ParamRecord::default()
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.0.insert(name.to_string(), value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.0.insert(name.to_string(), value);
    }

    /// Parses `key=value` pairs; later keys override earlier ones.
    pub fn parse<'a>(pairs: impl IntoIterator<Item = &'a str>) -> Result<Self, ParamError> {
        let mut rec = ParamRecord::new();
        for pair in pairs {
            let (k, v) = pair.split_once('=').ok_or_else(|| ParamError::Syntax(pair.to_string()))?;
            let k = k.trim();
            let v: f64 = v.trim().parse().map_err(|_| ParamError::Syntax(pair.to_string()))?;
            if k.is_empty() {
                return Err(ParamError::Syntax(pair.to_string()));
            }
            rec.set(k, v);
        }
        Ok(rec)
    }
}

/// A built program waiting for its open parameters.
pub struct CompiledProgram<F> {
    names: Vec<String>,
    build: F,
    read: AtomicU64,
}

/// Runs `builder` once. It declares parameters on the schema and returns the
/// per-render constructor.
pub fn compile<F, G>(builder: impl FnOnce(&mut Schema) -> F) -> Result<CompiledProgram<F>, ParamError>
where
    F: Fn(&ParamValues) -> Result<G, DefinitionError>,
    G: Generator,
{
    let mut schema = Schema::default();
    let build = builder(&mut schema);
    if let Some(e) = schema.error {
        return Err(e);
    }
    if schema.names.len() > MAX_OPEN_PARAMS {
        return Err(ParamError::TooMany(schema.names.len()));
    }
    Ok(CompiledProgram { names: schema.names, build, read: AtomicU64::new(0) })
}

impl<F, G> CompiledProgram<F>
where
    F: Fn(&ParamValues) -> Result<G, DefinitionError>,
    G: Generator,
{
    pub fn schema(&self) -> &[String] {
        &self.names
    }

    fn resolve(&self, rec: &ParamRecord) -> Result<ParamValues, ParamError> {
        if let Some(k) = rec.0.keys().find(|k| !self.names.contains(k)) {
            return Err(ParamError::Unknown(k.clone()));
        }
        let values = self
            .names
            .iter()
            .map(|n| rec.0.get(n).copied().ok_or_else(|| ParamError::Missing(n.clone())))
            .collect::<Result<_, _>>()?;
        Ok(ParamValues { values, read: core::cell::Cell::new(0) })
    }

    /// The generator for one record, ready to render.
    pub fn instantiate(&self, rec: &ParamRecord) -> Result<G, ParamError> {
        let values = self.resolve(rec)?;
        let g = (self.build)(&values)?;
        self.read.fetch_or(values.read.get(), Ordering::Relaxed);
        Ok(g)
    }

    pub fn render_with(&self, rec: &ParamRecord, n: usize) -> Result<Vec<G::Sample>, ParamError> {
        let g = self.instantiate(rec)?;
        Ok(render(&g, n)?)
    }

    /// Open parameters that no render so far has read.
    pub fn unused(&self) -> Vec<&str> {
        let mask = self.read.load(Ordering::Relaxed);
        self.names.iter().enumerate().filter(|(i, _)| mask & (1 << i) == 0).map(|(_, n)| n.as_str()).collect()
    }
}

impl<F, G, T, const N: usize> CompiledProgram<F>
where
    F: Fn(&ParamValues) -> Result<G, DefinitionError>,
    G: Generator<Sample = Lanes<T, N>>,
    T: Copy,
{
    /// Renders a block program into `n` flat samples.
    pub fn render_blocks_with(&self, rec: &ParamRecord, n: usize) -> Result<Vec<T>, ParamError> {
        let g = self.instantiate(rec)?;
        Ok(render_blocks(&g, n)?)
    }
}
