//! Scalar against vector engine output.

use fusion_core::params::{ParamError, ParamRecord};

use crate::config::Config;
use crate::programs::{build, EngineKind, Program};

/// Tolerance for programs without recursion.
pub const MEMORYLESS_TOLERANCE: f64 = 1e-5;
/// Tolerance for filters and feedback loops.
pub const RECURSIVE_TOLERANCE: f64 = 1e-3;

pub fn tolerance(program: Program) -> f64 {
    if program.is_recursive() {
        RECURSIVE_TOLERANCE
    } else {
        MEMORYLESS_TOLERANCE
    }
}

/// `max |reference - candidate| / max |reference|`, or infinity when the
/// lengths differ. Two silent signals agree exactly.
pub fn max_relative_error(reference: &[f32], candidate: &[f32]) -> f64 {
    if reference.len() != candidate.len() {
        return f64::INFINITY;
    }
    let mut peak = 0.0f64;
    let mut err = 0.0f64;
    for (&r, &c) in reference.iter().zip(candidate) {
        peak = peak.max((r as f64).abs());
        let d = (r as f64 - c as f64).abs();
        // NaN compares false, so route it through explicitly.
        err = if d.is_nan() { f64::INFINITY } else { err.max(d) };
    }
    if err == 0.0 {
        0.0
    } else {
        err / peak
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Equivalence {
    pub program: Program,
    pub samples: usize,
    pub scalar_len: usize,
    pub vector_len: usize,
    pub error: f64,
    pub tolerance: f64,
}

impl Equivalence {
    pub fn compare(program: Program, scalar: &[f32], vector: &[f32]) -> Self {
        Equivalence {
            program,
            samples: scalar.len().max(vector.len()),
            scalar_len: scalar.len(),
            vector_len: vector.len(),
            error: max_relative_error(scalar, vector),
            tolerance: tolerance(program),
        }
    }

    pub fn passed(&self) -> bool {
        self.scalar_len == self.vector_len && self.error <= self.tolerance
    }
}

/// Renders `program` with both engines and compares.
pub fn check(program: Program, cfg: &Config, rec: &ParamRecord, samples: usize) -> Result<Equivalence, ParamError> {
    let scalar = build(program, EngineKind::Scalar, cfg, None)?.render(rec, samples)?;
    let vector = build(program, EngineKind::Vector, cfg, None)?.render(rec, samples)?;
    Ok(Equivalence::compare(program, &scalar, &vector))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_error_examples() {
        assert_eq!(max_relative_error(&[1.0, -2.0], &[1.0, -2.0]), 0.0);
        assert_eq!(max_relative_error(&[0.0; 3], &[0.0; 3]), 0.0);
        assert_eq!(max_relative_error(&[1.0, -2.0], &[1.0, -1.0]), 0.5);
        assert_eq!(max_relative_error(&[1.0], &[1.0, 0.0]), f64::INFINITY);
        assert_eq!(max_relative_error(&[1.0], &[f32::NAN]), f64::INFINITY);
        assert_eq!(max_relative_error(&[0.0], &[1e-9]), f64::INFINITY);
    }

    #[test]
    fn tolerances_by_kind() {
        assert_eq!(tolerance(Program::Saw), 1e-5);
        assert_eq!(tolerance(Program::Karplus), 1e-3);
    }
}
