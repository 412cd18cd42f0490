//! Refractive-index calibration for the narrow `a_52`, `l = 1` line.
//!
//! The reference spectrum places this line at `x = 40.62425` without stating
//! the sphere's index. Sweeping `m` over `[1.44, 1.46]` and solving for the
//! index that puts the line centre on that size parameter gives
//! [`CALIBRATED_INDEX`]; `calibrate_index` reproduces it and a unit test
//! pins the two together.

use crate::error::{Error, Result};
use crate::mie::ModeKind;

use super::{trapped_bracket, ResonanceSearch};

/// Size parameter of the reference `a_52`, `l = 1` line.
pub const TARGET_X: f64 = 40.62425;
pub const TARGET_KIND: ModeKind = ModeKind::Electric;
pub const TARGET_MODE_NUMBER: usize = 52;
pub const TARGET_MODE_ORDER: usize = 1;
/// Index range searched (fused silica near 773 nm sits inside it).
pub const INDEX_RANGE: (f64, f64) = (1.44, 1.46);

/// Index placing the `a_52`, `l = 1` centre at [`TARGET_X`], produced by
/// `calibrate_index(TARGET_KIND, 52, 1, TARGET_X, INDEX_RANGE)`.
pub const CALIBRATED_INDEX: f64 = 1.449_631_407_944_012_7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub refractive_index: f64,
    pub x0: f64,
    pub iterations: usize,
}

/// Line centre of the `l`-th trapped resonance of `n` at index `m`.
pub fn line_centre(kind: ModeKind, n: usize, l: usize, m: f64) -> Result<f64> {
    let (lo, hi) = trapped_bracket(n, m);
    let centres = ResonanceSearch::new(kind, n, l, m).bracket(lo, hi).centres()?;
    centres.get(l - 1).copied().ok_or(Error::ResonanceNotFound {
        kind: kind.to_string(),
        n,
        l,
        lo,
        hi,
        seen: centres,
    })
}

/// Solves `x0(m) = target_x` for `m` inside `range` by bisection; the line
/// centre falls monotonically as the index grows.
pub fn calibrate_index(kind: ModeKind, n: usize, l: usize, target_x: f64, range: (f64, f64)) -> Result<Calibration> {
    let (mut lo, mut hi) = range;
    let f_lo = line_centre(kind, n, l, lo)? - target_x;
    let f_hi = line_centre(kind, n, l, hi)? - target_x;
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Domain(format!(
            "target x = {target_x} not reached for m in [{lo}, {hi}] (offsets {f_lo:e}, {f_hi:e})"
        )));
    }
    let mut iterations = 0;
    while iterations < 100 {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = line_centre(kind, n, l, mid)? - target_x;
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let m = 0.5 * (lo + hi);
    Ok(Calibration {
        refractive_index: m,
        x0: line_centre(kind, n, l, m)?,
        iterations,
    })
}
