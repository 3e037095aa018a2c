//! Order-`N` Riemann theta functions
//! `ϑ_N(z, Ω) = Σ_{k ∈ Z^d} exp(πiN kᵀΩk + 2πiN kᵀz)`.
//!
//! The argument is reduced first: with `t = (Im Ω)^{-1} Im z` and
//! `k₀ = round(t)`, `z' = z - Ωk₀ - m` has `|(Im Ω)^{-1} Im z'|_∞ ≤ 1/2`, and
//!
//! ```text
//! ϑ_N(z' + m + Ωk₀) = exp(-πiN k₀ᵀΩk₀ - 2πiN z'ᵀk₀) · ϑ_N(z').
//! ```
//!
//! The terms of `ϑ_N(z')` are `e^{C} exp(-πN (k+t')ᵀ Im Ω (k+t'))` in modulus,
//! `C = πN t'ᵀ Im Ω t'`, which is what the truncation radius is sized for.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{mat_vec, quad, reduce_to_box, ComplexPoint, GaborParams, C64};
use crate::scaled::{ExpSum, ScaledComplex};
use crate::series::{for_each_in_box, truncation, DEFAULT_RADIUS_CAP};

pub const DEFAULT_THETA_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaEval {
    pub value: ScaledComplex,
    pub radius: usize,
    /// Bound on the omitted terms relative to the kept absolute mass.
    pub tail_bound: f64,
    /// `ln Σ|kept terms|`, including the reassembled factor.
    pub mass_logmag: f64,
}

struct Reduced {
    /// Reassembled factor exponent.
    factor: C64,
    zr: Vec<C64>,
    k0: Vec<i64>,
    tr: Vec<f64>,
}

fn reduce(z: &[C64], params: &GaborParams, order: f64) -> Reduced {
    let d = params.d();
    let im: Vec<f64> = z.iter().map(|v| v.im).collect();
    let t = mat_vec(params.im_inv(), &im);
    let k0: Vec<i64> = t.iter().map(|v| v.round() as i64).collect();
    let k0f: Vec<f64> = k0.iter().map(|&v| v as f64).collect();
    let ok = params.omega_times(&k0f);
    let z1: Vec<C64> = (0..d).map(|i| z[i] - ok[i]).collect();
    let zr: Vec<C64> = z1.iter().map(|v| v - v.re.round()).collect();
    let kok = params.quad_form(&k0f);
    let zk: C64 = (0..d).map(|i| zr[i] * k0f[i]).sum();
    let factor = -C64::i() * PI * order * kok - 2.0 * C64::i() * PI * order * zk;
    let tr = mat_vec(params.im_inv(), &zr.iter().map(|v| v.im).collect::<Vec<_>>());
    Reduced { factor, zr, k0, tr }
}

fn sum_reduced(
    red: &Reduced,
    params: &GaborParams,
    order: f64,
    radius: usize,
    want_grad: bool,
) -> (ExpSum, Vec<ExpSum>) {
    let d = params.d();
    let shift = PI * order * quad(params.im(), &red.tr);
    let center: Vec<i64> = red.tr.iter().map(|v| (-v).round() as i64).collect();
    let mut sum = ExpSum::with_shift(shift);
    let mut gsum: Vec<ExpSum> =
        if want_grad { (0..d).map(|_| ExpSum::with_shift(shift)).collect() } else { Vec::new() };
    let mut kf = vec![0.0; d];
    for_each_in_box(&center, radius, |k| {
        for i in 0..d {
            kf[i] = k[i] as f64;
        }
        let kzk: C64 = (0..d).map(|i| red.zr[i] * kf[i]).sum();
        let e = C64::i() * PI * order * params.quad_form(&kf) + 2.0 * C64::i() * PI * order * kzk;
        sum.add_exp(e);
        if want_grad {
            for i in 0..d {
                gsum[i].add_scaled_exp(C64::new(0.0, 2.0 * PI * order * kf[i]), e);
            }
        }
    });
    (sum, gsum)
}

fn eval_inner(
    z: &[C64],
    params: &GaborParams,
    order: usize,
    tol: f64,
    radius: Option<usize>,
    grad: bool,
) -> Result<(ThetaEval, Vec<C64>)> {
    if z.len() != params.d() {
        return Err(Error::InvalidDimension(format!("expected {} components, got {}", params.d(), z.len())));
    }
    if order == 0 {
        return Err(Error::InvalidDimension("theta order must be positive".into()));
    }
    let of = order as f64;
    let alpha_min = PI * of * params.lambda_min();
    let alpha_max = PI * of * params.lambda_max();
    let trunc = truncation(alpha_min, alpha_max, params.d(), tol, DEFAULT_RADIUS_CAP)?;
    let radius = radius.unwrap_or(trunc.radius);
    let tail_abs = crate::series::box_tail_bound(alpha_min, params.d(), radius);
    let red = reduce(z, params, of);
    let (sum, gsum) = sum_reduced(&red, params, of, radius, grad);
    let factor = ScaledComplex::exp(red.factor);
    let value = sum.value() * factor;
    let mass_logmag = sum.mass_logmag() + red.factor.re;
    // tail_abs is in units of e^{shift}; the kept mass is raw_mass in the same units
    let tail_bound = tail_abs / sum.raw_mass();
    let mut logderiv = Vec::new();
    if grad {
        let s = sum.raw();
        for (i, g) in gsum.iter().enumerate() {
            logderiv.push(g.raw() / s - C64::new(0.0, 2.0 * PI * of * red.k0[i] as f64));
        }
    }
    Ok((ThetaEval { value, radius, tail_bound, mass_logmag }, logderiv))
}

/// `ϑ_order(z, Ω)` with the omitted mass below `tol` relative to the kept mass.
pub fn theta_eval(z: &[C64], params: &GaborParams, order: usize, tol: f64) -> Result<ThetaEval> {
    eval_inner(z, params, order, tol, None, false).map(|(e, _)| e)
}

/// Same series at a caller-chosen radius; `tail_bound` is recomputed for it.
pub fn theta_eval_at_radius(z: &[C64], params: &GaborParams, order: usize, radius: usize) -> Result<ThetaEval> {
    eval_inner(z, params, order, 1.0, Some(radius), false).map(|(e, _)| e)
}

/// Value and logarithmic gradient `∂_{z_j} ln ϑ`.
pub fn theta_eval_with_logderiv(
    z: &[C64],
    params: &GaborParams,
    order: usize,
    tol: f64,
) -> Result<(ThetaEval, Vec<C64>)> {
    eval_inner(z, params, order, tol, None, true)
}

/// Exponent of the quasiperiodicity factor:
/// `ϑ_N(z + m + Ωk) = exp(-πiN kᵀΩk - 2πiN zᵀk) ϑ_N(z)`.
pub fn quasi_factor_exponent(z: &[C64], k: &[i64], params: &GaborParams, order: usize) -> C64 {
    let kf: Vec<f64> = k.iter().map(|&v| v as f64).collect();
    let of = order as f64;
    let zk: C64 = z.iter().zip(&kf).map(|(a, b)| a * b).sum();
    -C64::i() * PI * of * params.quad_form(&kf) - 2.0 * C64::i() * PI * of * zk
}

/// Order-one weight `φ₁(z) = 2π Re(z)ᵀ (Im Ω)^{-1} Re(z)`.
pub(crate) fn weight_one(z: &[C64], params: &GaborParams) -> f64 {
    let re: Vec<f64> = z.iter().map(|v| v.re).collect();
    2.0 * PI * quad(params.im_inv(), &re)
}

/// `|ϑ₁(iz, Ω)| e^{-φ₁(z)/2}`, which is invariant under `z ↦ z + Λ`.
pub fn weighted_theta_magnitude(z: &[C64], params: &GaborParams) -> Result<f64> {
    let w: Vec<C64> = z.iter().map(|v| C64::i() * v).collect();
    let e = theta_eval(&w, params, 1, DEFAULT_THETA_TOL)?;
    Ok(e.value.scale_log(-weight_one(z, params) / 2.0).abs())
}

/// Winding number of `f` around a closed polygon, normalized to
/// counterclockwise orientation. The argument is tracked adaptively so that
/// no accepted step turns by more than `π/4`.
pub fn winding_number<F>(f: F, corners: &[C64]) -> Result<f64>
where
    F: Fn(C64) -> Result<ScaledComplex>,
{
    const MAX_DEPTH: usize = 24;
    const INITIAL: usize = 32;
    let nc = corners.len();
    if nc < 3 {
        return Err(Error::Invalid("contour needs at least three corners".into()));
    }
    let area: f64 = (0..nc)
        .map(|i| {
            let a = corners[i];
            let b = corners[(i + 1) % nc];
            a.re * b.im - b.re * a.im
        })
        .sum();
    let orient = if area >= 0.0 { 1.0 } else { -1.0 };
    let eval = |w: C64| -> Result<C64> {
        let v = f(w)?;
        if v.is_zero() || !v.logmag.is_finite() {
            return Err(Error::WindingNotOne { found: f64::NAN, expected: 1, attempts: 0 });
        }
        Ok(v.phase)
    };
    fn seg<G: Fn(C64) -> Result<C64>>(g: &G, a: C64, b: C64, pa: C64, pb: C64, depth: usize) -> Result<f64> {
        let turn = (pb / pa).arg();
        if turn.abs() <= PI / 4.0 {
            return Ok(turn);
        }
        if depth == 0 {
            return Err(Error::WindingNotOne { found: f64::NAN, expected: 1, attempts: 0 });
        }
        let m = (a + b) * 0.5;
        let pm = g(m)?;
        Ok(seg(g, a, m, pa, pm, depth - 1)? + seg(g, m, b, pm, pb, depth - 1)?)
    }
    let mut total = 0.0;
    for i in 0..nc {
        let a = corners[i];
        let b = corners[(i + 1) % nc];
        let mut prev = a;
        let mut pprev = eval(a)?;
        for s in 1..=INITIAL {
            let w = a + (b - a) * (s as f64 / INITIAL as f64);
            let pw = eval(w)?;
            total += seg(&eval, prev, w, pprev, pw, MAX_DEPTH)?;
            prev = w;
            pprev = pw;
        }
    }
    Ok(orient * total / (2.0 * PI))
}

/// Result of the `d = 1` zero search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaZero {
    pub z0: ComplexPoint,
    /// `|ϑ₁(iz₀, Ω)| e^{-φ(z₀)/2}`.
    pub residual: f64,
    pub winding: f64,
    pub attempts: usize,
    pub newton_steps: usize,
}

const ZERO_RESIDUAL_TOL: f64 = 1e-10;

/// Locate the zero of `z ↦ ϑ₁(iz, Ω)` in the fundamental domain (`d = 1`).
///
/// Works in `w = iz`, where the fundamental domain is the parallelogram
/// `{Ωa + b}`. The zero count is certified by the argument principle, the
/// first moment of `ϑ'/ϑ` gives a starting point and Newton polishes it.
pub fn theta_zero_1d(params: &GaborParams) -> Result<ComplexPoint> {
    theta_zero_1d_report(params).map(|r| r.z0)
}

pub fn theta_zero_1d_report(params: &GaborParams) -> Result<ThetaZero> {
    if params.d() != 1 {
        return Err(Error::NotApplicable(format!("theta zero search needs d = 1, got d = {}", params.d())));
    }
    let omega = params.omega()[(0, 0)];
    let theta = |w: C64| theta_eval(&[w], params, 1, DEFAULT_THETA_TOL).map(|e| e.value);
    let logderiv = |w: C64| -> Result<C64> { Ok(theta_eval_with_logderiv(&[w], params, 1, DEFAULT_THETA_TOL)?.1[0]) };
    // deterministic jitter sequence for the contour origin
    let offsets = [(0.0, 0.0), (0.137, 0.291), (-0.213, 0.071), (0.311, -0.173), (-0.059, -0.347)];
    let mut last = f64::NAN;
    for (attempt, &(da, db)) in offsets.iter().enumerate() {
        let base = omega * da + db;
        let corners = [base, base + 1.0, base + 1.0 + omega, base + omega];
        let wind = match winding_number(theta, &corners) {
            Ok(v) => v,
            Err(_) => continue,
        };
        last = wind;
        if (wind - 1.0).abs() > 1e-3 {
            continue;
        }
        // first moment (1/2πi)∮ w ϑ'/ϑ dw, midpoint rule on each edge
        let m = 256;
        let mut moment = C64::new(0.0, 0.0);
        for i in 0..4 {
            let a = corners[i];
            let b = corners[(i + 1) % 4];
            let h = (b - a) / m as f64;
            for s in 0..m {
                let w = a + h * (s as f64 + 0.5);
                moment += w * logderiv(w)? * h;
            }
        }
        let mut w = moment / (2.0 * PI * C64::i());
        let mut steps = 0;
        for _ in 0..60 {
            let ld = logderiv(w)?;
            if !ld.re.is_finite() || !ld.im.is_finite() || ld.norm() == 0.0 {
                break;
            }
            let step = 1.0 / ld;
            w -= step;
            steps += 1;
            if step.norm() < 1e-15 * (1.0 + w.norm()) {
                break;
            }
        }
        let z = -C64::i() * w;
        let z = reduce_to_box(&[z], params)[0];
        let residual = weighted_theta_magnitude(&[z], params)?;
        if residual <= ZERO_RESIDUAL_TOL {
            return Ok(ThetaZero {
                z0: ComplexPoint { z: vec![z] },
                residual,
                winding: wind,
                attempts: attempt + 1,
                newton_steps: steps,
            });
        }
    }
    Err(Error::WindingNotOne { found: last, expected: 1, attempts: offsets.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{box_coords, DEFAULT_LATTICE_TOL};

    fn direct(z: &[C64], params: &GaborParams, order: usize, r: i64) -> C64 {
        let d = params.d();
        let of = order as f64;
        let mut acc = C64::new(0.0, 0.0);
        for_each_in_box(&vec![0; d], r as usize, |k| {
            let kf: Vec<f64> = k.iter().map(|&v| v as f64).collect();
            let kz: C64 = z.iter().zip(&kf).map(|(a, b)| a * b).sum();
            acc += (C64::i() * PI * of * params.quad_form(&kf) + 2.0 * C64::i() * PI * of * kz).exp();
        });
        acc
    }

    #[test]
    fn value_at_origin() {
        let p = GaborParams::one_dim(1, 0.0, 1.0).unwrap();
        let e = theta_eval(&[C64::new(0.0, 0.0)], &p, 1, 1e-15).unwrap();
        let oracle = direct(&[C64::new(0.0, 0.0)], &p, 1, 6);
        assert!((e.value.to_complex() - oracle).norm() < 1e-15);
        assert!(e.tail_bound <= 1e-15);
    }

    #[test]
    fn matches_direct_sum_away_from_origin() {
        let p = GaborParams::one_dim(3, 0.3, 0.8).unwrap();
        for &z in &[C64::new(0.4, 0.9), C64::new(-1.7, -1.3), C64::new(2.2, 2.6)] {
            let e = theta_eval(&[z], &p, 2, 1e-15).unwrap();
            let oracle = direct(&[z], &p, 2, 30);
            assert!((e.value.to_complex() - oracle).norm() <= 1e-12 * oracle.norm(), "{z}");
        }
    }

    #[test]
    fn cap_surfaces_as_error() {
        let p = GaborParams::one_dim(1, 0.0, 1e-7).unwrap();
        assert!(matches!(theta_eval(&[C64::new(0.0, 0.0)], &p, 1, 1e-15), Err(Error::ToleranceUnreachable { .. })));
    }

    #[test]
    fn zero_for_imaginary_unit() {
        let p = GaborParams::one_dim(1, 0.0, 1.0).unwrap();
        let r = theta_zero_1d_report(&p).unwrap();
        let z = r.z0.z[0];
        assert!((z - C64::new(0.5, -0.5)).norm() < 1e-10, "{z}");
        assert!((r.winding - 1.0).abs() < 1e-9);
        let (a, b) = box_coords(&[z], &p);
        assert!((a[0] - 0.5).abs() < 1e-10 && (b[0] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn zero_is_half_period_for_tilted_omega() {
        let p = GaborParams::one_dim(1, 0.3, 1.0).unwrap();
        let z = theta_zero_1d(&p).unwrap().z[0];
        let omega = p.omega()[(0, 0)];
        let expect = -C64::i() * (omega + 1.0) / 2.0;
        let m = crate::lattice::dual_lattice_member(&[z - expect], &p, 1.0, DEFAULT_LATTICE_TOL);
        assert!(m.member && m.residual < 1e-10);
    }

    #[test]
    fn wrong_dimension_not_applicable() {
        let p = GaborParams::imaginary_identity(2, 2).unwrap();
        assert!(matches!(theta_zero_1d(&p), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn winding_of_polynomial() {
        let f = |w: C64| Ok(ScaledComplex::from_complex((w - 0.2) * (w + C64::new(0.1, 0.3)) * (w - 3.0)));
        let sq = [C64::new(-1.0, -1.0), C64::new(1.0, -1.0), C64::new(1.0, 1.0), C64::new(-1.0, 1.0)];
        assert!((winding_number(f, &sq).unwrap() - 2.0).abs() < 1e-12);
        let rev: Vec<C64> = sq.iter().rev().cloned().collect();
        assert!((winding_number(f, &rev).unwrap() - 2.0).abs() < 1e-12);
    }
}
