//! Truncation of Gaussian lattice series.
//!
//! Every series in this crate has terms bounded by
//! `e^{C} · exp(-α |k - c|²)` over `k ∈ Z^d`, where `α` comes from the
//! smallest eigenvalue of `Im Ω`. Summation runs over the box
//! `|k - round(c)|_∞ ≤ R`, so every omitted index is at distance at least
//! `R + 1/2` from `c` along some axis.

use crate::error::{Error, Result};

/// Default cap on the truncation radius.
pub const DEFAULT_RADIUS_CAP: usize = 200;

/// Bound on `Σ_{j ∈ Z, |j - c| ≥ m} exp(-α (j-c)²)` for the one-sided pair of
/// tails starting at distance `m > 0`.
fn tail_1d(alpha: f64, m: f64) -> f64 {
    // (m+s)² ≥ m² + 2ms  =>  geometric series in s
    2.0 * (-alpha * m * m).exp() / (1.0 - (-2.0 * alpha * m).exp())
}

/// Bound on `Σ_{j ∈ Z} exp(-α (j-c)²)` for any `c`.
fn full_1d(alpha: f64) -> f64 {
    // unimodal: max + integral, or 1 + two half-offset tails
    let a = 1.0 + (std::f64::consts::PI / alpha).sqrt();
    let b = 1.0 + tail_1d(alpha, 0.5);
    a.min(b)
}

/// Bound on `Σ_{k ∉ box(R)} exp(-α |k - c|²)` in `d` dimensions.
pub fn box_tail_bound(alpha: f64, d: usize, radius: usize) -> f64 {
    let m = radius as f64 + 0.5;
    d as f64 * tail_1d(alpha, m) * full_1d(alpha).powi(d as i32 - 1)
}

/// Precomputed truncation for a family of series sharing `α_min`, `α_max`.
#[derive(Debug, Clone, Copy)]
pub struct Truncation {
    pub radius: usize,
    /// Absolute tail bound in units of `e^{C}`.
    pub tail_abs: f64,
    /// Lower bound on the kept mass in units of `e^{C}`.
    pub mass_floor: f64,
}

/// Smallest radius with `tail ≤ tol · mass_floor`, where
/// `mass_floor = exp(-α_max·d/4)` bounds the term nearest the center.
pub fn truncation(alpha_min: f64, alpha_max: f64, d: usize, tol: f64, cap: usize) -> Result<Truncation> {
    if !(tol > 0.0) {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    let mass_floor = (-alpha_max * d as f64 / 4.0).exp();
    for radius in 0..=cap {
        let tail_abs = box_tail_bound(alpha_min, d, radius);
        if tail_abs <= tol * mass_floor {
            return Ok(Truncation { radius, tail_abs, mass_floor });
        }
    }
    Err(Error::ToleranceUnreachable { tol, cap })
}

/// Visit every `k` in the box `|k - center|_∞ ≤ radius`.
pub fn for_each_in_box(center: &[i64], radius: usize, mut f: impl FnMut(&[i64])) {
    let d = center.len();
    let r = radius as i64;
    let mut k: Vec<i64> = center.iter().map(|c| c - r).collect();
    if d == 0 {
        f(&k);
        return;
    }
    loop {
        f(&k);
        let mut axis = d;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if k[axis] < center[axis] + r {
                k[axis] += 1;
                break;
            }
            k[axis] = center[axis] - r;
        }
    }
}
