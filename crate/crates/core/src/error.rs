use core::fmt;

/// A signal definition was given parameters it cannot represent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DefinitionError {
    /// Half-life must be positive and finite.
    HalfLife(f64),
    /// Initial phase must lie in `[0, 1)`.
    Phase(f64),
    /// A frequency or other rate was not finite.
    NotFinite(&'static str),
    /// Feedback coefficient outside the stable region.
    Unstable(&'static str),
    /// Cutoff frequency must lie in `(0, 0.5)` cycles per sample.
    Cutoff(f64),
    /// Resonance specification outside its valid range.
    Resonance(f64),
    /// Filter order must be even and at least two.
    Order(usize),
    /// A count that must be at least one was zero.
    ZeroCount(&'static str),
    /// The lane count does not divide the requested length.
    NotMultiple { what: &'static str, value: usize, lanes: usize },
}

impl fmt::Display for DefinitionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::HalfLife(h) => write!(f, "half-life must be positive and finite, got {h}"),
            Self::Phase(p) => write!(f, "initial phase must lie in [0, 1), got {p}"),
            Self::NotFinite(what) => write!(f, "{what} must be finite"),
            Self::Unstable(what) => write!(f, "{what} is outside the stable region"),
            Self::Cutoff(fc) => write!(f, "cutoff must lie in (0, 0.5) cycles/sample, got {fc}"),
            Self::Resonance(r) => write!(f, "invalid resonance specification {r}"),
            Self::Order(n) => write!(f, "filter order must be even and >= 2, got {n}"),
            Self::ZeroCount(what) => write!(f, "{what} must be at least 1"),
            Self::NotMultiple { what, value, lanes } => {
                write!(f, "{what} = {value} must be a multiple of the lane count {lanes}")
            }
        }
    }
}

impl core::error::Error for DefinitionError {}

/// The render driver could not produce its output buffer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderError {
    Alloc { samples: usize },
}

impl fmt::Display for RenderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Alloc { samples } => write!(f, "cannot allocate an output buffer of {samples} samples"),
        }
    }
}

impl core::error::Error for RenderError {}
