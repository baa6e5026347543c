//! Default tolerances.

/// Relative threshold for PSD verdicts: `min eig >= -PSD * max diagonal`.
pub const PSD: f64 = 1e-10;

/// Relative tolerance for algebraic identities between weights.
pub const IDENTITY: f64 = 1e-12;

/// Position tolerance used when matching atoms of two measures.
pub const ATOM_POSITION: f64 = 1e-12;

/// Residual point masses below this are dropped.
pub const RESIDUAL_MASS: f64 = 1e-14;

/// Relative difference `|a - b| / max(|a|, |b|, tiny)`.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    (a - b).abs() / scale
}
