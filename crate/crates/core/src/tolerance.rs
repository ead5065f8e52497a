//! Numeric tolerances shared across the crate.

use serde::{Deserialize, Serialize};

/// Margin above the separable bound required for an ENTANGLED verdict.
pub const VERDICT: f64 = 1e-9;

/// Tolerance for numeric comparisons (PSD checks, trace-norm accuracy).
pub const NUMERIC: f64 = 1e-10;

/// Tolerance for algebraic validation (Hermiticity, unit trace).
pub const ALGEBRAIC: f64 = 1e-12;

/// Configurable tolerance set. `Default` uses the crate constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub verdict: f64,
    pub numeric: f64,
    pub algebraic: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            verdict: VERDICT,
            numeric: NUMERIC,
            algebraic: ALGEBRAIC,
        }
    }
}
