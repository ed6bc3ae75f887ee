//! Scalar saturation primitives used throughout the control laws.

/// Symmetric saturation: `sign(v) * min(|v|, lambda)`.
///
/// Odd in `v`, idempotent, total. `lambda` must be non-negative.
#[inline]
pub fn sat(v: f64, lambda: f64) -> f64 {
    debug_assert!(lambda >= 0.0, "saturation level must be non-negative");
    v.clamp(-lambda, lambda)
}

/// Positive saturation: `sat(v, lambda)` for `v >= 0`, zero otherwise.
///
/// The result is always in `[0, lambda]`. Division artifacts are handled the
/// IEEE way: `pos_sat(f64::INFINITY, l) == l` and `pos_sat(f64::NEG_INFINITY, l) == 0`.
#[inline]
pub fn pos_sat(v: f64, lambda: f64) -> f64 {
    debug_assert!(lambda >= 0.0, "saturation level must be non-negative");
    if v >= 0.0 {
        v.min(lambda)
    } else {
        0.0
    }
}
