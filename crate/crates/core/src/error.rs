use bitflags::bitflags;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Result<T> = std::result::Result<T, FieldError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("source has no analytic curl and no finite-difference fallback step is configured")]
    CurlUnavailable,

    #[error("surface integral changed by {change:.3e} (relative) under mesh refinement, tolerance {tolerance:.3e}")]
    MeshTooCoarse { change: f64, tolerance: f64 },

    #[error("beam covers only {cells} mesh cells, at least {required} needed")]
    BeamUnderResolved { cells: usize, required: usize },

    #[error("geometry violation: {0}")]
    GeometryViolation(String),

    #[error("sample {index} has non-positive value {value}")]
    NonPositiveSample { index: usize, value: f64 },

    #[error("need at least {required} samples, got {got}")]
    TooFewSamples { required: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

bitflags! {
    /// Non-fatal numerical markers carried alongside results.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
    pub struct Flags: u32 {
        /// Quadrature refinement cap reached before the tolerance was met.
        const QUADRATURE_NOT_CONVERGED = 1 << 0;
        /// Surface mesh refinement cap reached before the tolerance was met.
        const MESH_NOT_CONVERGED = 1 << 1;
        /// Evaluation requested before the source reached steady state.
        const TRANSIENT = 1 << 2;
        /// Richardson estimates of a derivative disagreed beyond tolerance.
        const DIFFERENCING_NOISY = 1 << 3;
    }
}

impl Flags {
    /// Compact label for CSV output: `-` when empty, otherwise `|`-joined names.
    pub fn label(self) -> String {
        if self.is_empty() {
            return "-".to_string();
        }
        let mut parts = Vec::new();
        if self.contains(Flags::QUADRATURE_NOT_CONVERGED) {
            parts.push("quad");
        }
        if self.contains(Flags::MESH_NOT_CONVERGED) {
            parts.push("mesh");
        }
        if self.contains(Flags::TRANSIENT) {
            parts.push("transient");
        }
        if self.contains(Flags::DIFFERENCING_NOISY) {
            parts.push("fd");
        }
        parts.join("|")
    }

    /// True when any marker means the value should not be trusted at its stated tolerance.
    pub fn is_unconverged(self) -> bool {
        self.intersects(Flags::QUADRATURE_NOT_CONVERGED | Flags::MESH_NOT_CONVERGED)
    }
}
