//! Global numeric policy and the fixed tolerances used across the engine.

use core::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Default absolute tolerance for operator validation (Hermiticity, trace,
/// positivity, orthonormality, unitarity).
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Slack allowed on a raw probability before it is clamped into `[0, 1]`.
pub const PROBABILITY_SLACK: f64 = 1e-12;

/// Resolution-of-unity tolerance for user supplied POVM families.
pub const POVM_TOLERANCE: f64 = 1e-8;

/// Probabilities at or below this are treated as zero when dividing.
pub const DIVISION_GUARD: f64 = 1e-12;

/// Minimum gap between eigenvalues of a nondegenerate observable.
pub const MIN_EIGENVALUE_GAP: f64 = 1e-12;

/// Wave-state norm tolerance.
pub const NORM_TOLERANCE: f64 = 1e-8;

static TOLERANCE_BITS: AtomicU64 = AtomicU64::new(0x3DDB_7CDF_D9D7_BDBB); // 1e-10

/// Current operator-validation tolerance.
pub fn tolerance() -> f64 {
    f64::from_bits(TOLERANCE_BITS.load(Ordering::Relaxed))
}

/// Override the operator-validation tolerance for the whole process.
pub fn set_tolerance(tol: f64) -> Result<()> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "tolerance must be positive and finite, got {tol}"
        )));
    }
    TOLERANCE_BITS.store(tol.to_bits(), Ordering::Relaxed);
    Ok(())
}

/// Checks that a raw probability lies within `[-slack, 1 + slack]` and
/// clamps it into `[0, 1]`. Larger excursions are contract violations.
pub fn clamp_probability(quantity: &'static str, raw: f64) -> Result<f64> {
    if !raw.is_finite() || !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&raw) {
        return Err(Error::NumericContract {
            quantity,
            value: raw,
            bound: "[0, 1]",
        });
    }
    Ok(raw.clamp(0.0, 1.0))
}
