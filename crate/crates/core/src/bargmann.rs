//! The Bargmann-type transform `B: S_N → H⁰(T_Ω, L^{⊗N})`, the invariant
//! weight `φ`, Gram matrices of the image basis and the Bergman density.
//!
//! The transform of a Dirac comb is the lattice series
//!
//! ```text
//! B ε_n(z) = Σ_{k ∈ Z^d} exp(πi jᵀΩj/N - 2π zᵀj),   j = n + Nk,
//! ```
//!
//! evaluated after reducing `z` modulo `Λ = -iΩZ^d + iZ^d` with
//! `B(z + im) = B(z)` and `B(z - iΩk) = exp(-πiN kᵀΩk + 2πN zᵀk) B(z)`.
//! The theta closed form `exp(πi nᵀΩn/N - 2π zᵀn) ϑ_N(Ωn/N + iz)` is kept as
//! a cross-check.
//!
//! With `z_B = i(Ωx/N + ξ)` the Gaussian STFT factors as
//! `V φ(x, ξ) = exp(πi xᵀΩx/N) Bφ(z_B)`, so `|Vφ| = |Bφ(z_B)| e^{-Nφ(z_B)/2}`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::IndexSpace;
use crate::lattice::{mat_vec, quad, GaborParams, C64};
use crate::quadrature::{chunked_map_reduce, TorusGrid};
use crate::scaled::{ExpSum, ScaledComplex};
use crate::series::{for_each_in_box, truncation, DEFAULT_RADIUS_CAP};
use crate::theta::{theta_eval, winding_number, DEFAULT_THETA_TOL};
use crate::transforms::{gaussian_window_norm_sq, GaussianStft, Signal};

/// Relative tolerance of the direct series.
pub const BARGMANN_TOL: f64 = 1e-15;
/// Threshold above which the closed form disagreement is flagged.
pub const CLOSED_FORM_FLAG: f64 = 1e-9;

/// `φ(z) = π (zᵀ(Im Ω)^{-1} z̄ + Re(zᵀ(Im Ω)^{-1} z))`.
pub fn weight_phi(z: &[C64], params: &GaborParams) -> f64 {
    let h = params.im_inv();
    let d = z.len();
    let mut herm = C64::new(0.0, 0.0);
    let mut bil = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            herm += z[i] * h[(i, j)] * z[j].conj();
            bil += z[i] * h[(i, j)] * z[j];
        }
    }
    PI * (herm.re + bil.re)
}

/// Matrix of the (constant) Chern form, `(Im Ω)^{-1}`.
pub fn chern_form(params: &GaborParams) -> DMatrix<f64> {
    params.im_inv().clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionValue {
    pub raw: ScaledComplex,
    /// `|Bφ(z)| e^{-Nφ(z)/2}`.
    pub weighted_mag: f64,
    /// Relative disagreement with the theta closed form, when computed.
    pub closed_form_discrepancy: Option<f64>,
    /// True when the discrepancy exceeds [`CLOSED_FORM_FLAG`].
    pub closed_form_flag: bool,
}

/// Lattice coordinates `z = -iΩa + ib`.
pub fn lattice_coords(z: &[C64], params: &GaborParams) -> (Vec<f64>, Vec<f64>) {
    let re: Vec<f64> = z.iter().map(|v| v.re).collect();
    let a = mat_vec(params.im_inv(), &re);
    let xa = mat_vec(params.re(), &a);
    let b = z.iter().zip(&xa).map(|(v, x)| v.im + x).collect();
    (a, b)
}

/// `-iΩa + ib`.
pub fn from_lattice_coords(a: &[f64], b: &[f64], params: &GaborParams) -> Vec<C64> {
    let oa = params.omega_times(a);
    oa.iter().zip(b).map(|(w, bi)| -C64::i() * w + C64::i() * bi).collect()
}

/// Shared truncation and reduction for all `B ε_n` at a given `N`.
#[derive(Debug, Clone)]
pub struct BargmannEvaluator {
    params: GaborParams,
    space: IndexSpace,
    radius: usize,
    tail: f64,
    cross_check: bool,
}

struct ReducedZ {
    zr: Vec<C64>,
    ar: Vec<f64>,
    factor: C64,
}

impl BargmannEvaluator {
    pub fn new(params: &GaborParams) -> Result<Self> {
        let nf = params.n() as f64;
        let t = truncation(
            PI * nf * params.lambda_min(),
            PI * nf * params.lambda_max(),
            params.d(),
            BARGMANN_TOL,
            DEFAULT_RADIUS_CAP,
        )?;
        Ok(BargmannEvaluator {
            params: params.clone(),
            space: IndexSpace::new(params.n(), params.d()),
            radius: t.radius,
            tail: t.tail_abs / t.mass_floor,
            cross_check: false,
        })
    }

    /// Also evaluate the theta closed form for every basis value.
    pub fn with_cross_check(mut self, on: bool) -> Self {
        self.cross_check = on;
        self
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail
    }

    pub fn params(&self) -> &GaborParams {
        &self.params
    }

    fn reduce(&self, z: &[C64]) -> ReducedZ {
        let p = &self.params;
        let (a, b) = lattice_coords(z, p);
        let q: Vec<f64> = a.iter().map(|v| v.round()).collect();
        let m: Vec<f64> = b.iter().map(|v| v.round()).collect();
        let oq = p.omega_times(&q);
        let zr: Vec<C64> = (0..z.len()).map(|i| z[i] + C64::i() * oq[i] - C64::i() * m[i]).collect();
        let ar: Vec<f64> = a.iter().zip(&q).map(|(x, y)| x - y).collect();
        let nf = p.n() as f64;
        let zq: C64 = zr.iter().zip(&q).map(|(x, y)| x * y).sum();
        let factor = -C64::i() * PI * nf * p.quad_form(&q) + 2.0 * PI * nf * zq;
        ReducedZ { zr, ar, factor }
    }

    fn series(&self, red: &ReducedZ, n_idx: &[usize]) -> ScaledComplex {
        let p = &self.params;
        let d = p.d();
        let nf = p.n() as f64;
        let shift = PI * nf * quad(p.im(), &red.ar);
        let center: Vec<i64> = (0..d).map(|i| (-red.ar[i] - n_idx[i] as f64 / nf).round() as i64).collect();
        let mut sum = ExpSum::with_shift(shift);
        let mut j = vec![0.0; d];
        for_each_in_box(&center, self.radius, |k| {
            for i in 0..d {
                j[i] = n_idx[i] as f64 + nf * k[i] as f64;
            }
            let zj: C64 = red.zr.iter().zip(&j).map(|(a, b)| a * b).sum();
            sum.add_exp(C64::i() * PI * p.quad_form(&j) / nf - 2.0 * PI * zj);
        });
        sum.value() * ScaledComplex::exp(red.factor)
    }

    /// `exp(πi nᵀΩn/N - 2π zᵀn) ϑ_N(Ωn/N + iz)`.
    pub fn closed_form(&self, n_idx: &[usize], z: &[C64]) -> Result<ScaledComplex> {
        let p = &self.params;
        let nf = p.n() as f64;
        let nv: Vec<f64> = n_idx.iter().map(|&v| v as f64).collect();
        let on = p.omega_times(&nv);
        let w: Vec<C64> = (0..p.d()).map(|i| on[i] / nf + C64::i() * z[i]).collect();
        let th = theta_eval(&w, p, p.n(), DEFAULT_THETA_TOL)?;
        let zn: C64 = z.iter().zip(&nv).map(|(a, b)| a * b).sum();
        Ok(th.value * ScaledComplex::exp(C64::i() * PI * p.quad_form(&nv) / nf - 2.0 * PI * zn))
    }

    fn finish(&self, raw: ScaledComplex, z: &[C64], closed: Option<ScaledComplex>) -> SectionValue {
        let half = self.params.n() as f64 * weight_phi(z, &self.params) / 2.0;
        let weighted_mag = raw.scale_log(-half).abs();
        let closed_form_discrepancy = closed.map(|c| raw.rel_diff(&c));
        // discrepancies only matter where the weighted value is resolvable
        let closed_form_flag = closed_form_discrepancy.is_some_and(|e| e > CLOSED_FORM_FLAG && weighted_mag > 1e-12);
        SectionValue { raw, weighted_mag, closed_form_discrepancy, closed_form_flag }
    }

    /// `B ε_n(z)` for a multi-index `n`.
    pub fn basis(&self, n_idx: &[usize], z: &[C64]) -> Result<SectionValue> {
        self.check(z)?;
        let red = self.reduce(z);
        let raw = self.series(&red, n_idx);
        let closed = if self.cross_check { Some(self.closed_form(n_idx, z)?) } else { None };
        Ok(self.finish(raw, z, closed))
    }

    /// `B ε_n(z)` for every `n`, sharing the reduction.
    pub fn all_basis(&self, z: &[C64]) -> Result<Vec<ScaledComplex>> {
        self.check(z)?;
        let red = self.reduce(z);
        Ok((0..self.space.len()).map(|f| self.series(&red, &self.space.unflatten(f))).collect())
    }

    /// `B ε_n(z) e^{-Nφ(z)/2}` for every `n`, as plain complex numbers.
    pub fn all_weighted(&self, z: &[C64]) -> Result<Vec<C64>> {
        let half = self.params.n() as f64 * weight_phi(z, &self.params) / 2.0;
        Ok(self.all_basis(z)?.into_iter().map(|v| v.scale_log(-half).to_complex()).collect())
    }

    /// `Bφ(z) = Σ a_n B ε_n(z)`.
    pub fn transform(&self, phi: &Signal, z: &[C64]) -> Result<SectionValue> {
        if phi.space() != self.space {
            return Err(Error::ShapeMismatch { expected: self.space.len(), got: phi.len() });
        }
        self.check(z)?;
        let red = self.reduce(z);
        let mut acc = ScaledComplex::ZERO;
        let mut closed = ScaledComplex::ZERO;
        for (f, a) in phi.coeffs().iter().enumerate() {
            if *a == C64::new(0.0, 0.0) {
                continue;
            }
            let idx = self.space.unflatten(f);
            acc = acc + self.series(&red, &idx) * *a;
            if self.cross_check {
                closed = closed + self.closed_form(&idx, z)? * *a;
            }
        }
        Ok(self.finish(acc, z, self.cross_check.then_some(closed)))
    }

    fn check(&self, z: &[C64]) -> Result<()> {
        if z.len() != self.params.d() {
            return Err(Error::InvalidDimension(format!("expected {} components, got {}", self.params.d(), z.len())));
        }
        Ok(())
    }
}

/// `B ε_n(z)` with the closed-form cross-check.
pub fn bargmann_basis(n_idx: &[usize], z: &[C64], params: &GaborParams) -> Result<SectionValue> {
    BargmannEvaluator::new(params)?.with_cross_check(true).basis(n_idx, z)
}

/// `Bφ(z)` with the closed-form cross-check.
pub fn bargmann(phi: &Signal, z: &[C64], params: &GaborParams) -> Result<SectionValue> {
    BargmannEvaluator::new(params)?.with_cross_check(true).transform(phi, z)
}

/// Number of zeros of `Bφ` in a fundamental domain (`d = 1`), counted by
/// the argument principle on the boundary of `{base - iΩa + ib : a, b ∈ [0,1]}`.
/// The base point is jittered when the contour passes too close to a zero.
pub fn zero_count_1d(phi: &Signal, params: &GaborParams) -> Result<f64> {
    if params.d() != 1 {
        return Err(Error::NotApplicable("zero counting needs d = 1".into()));
    }
    let ev = BargmannEvaluator::new(params)?;
    let omega = params.omega()[(0, 0)];
    let f = |z: C64| ev.transform(phi, &[z]).map(|s| s.raw);
    let offsets = [(0.0, 0.0), (0.173, 0.219), (-0.241, 0.097), (0.331, -0.157), (-0.083, -0.313)];
    let mut last = Error::WindingNotOne { found: f64::NAN, expected: params.n() as i64, attempts: 0 };
    for &(da, db) in &offsets {
        let base = -C64::i() * omega * (0.0123 + da) + C64::i() * (0.0371 + db);
        let ga = -C64::i() * omega;
        let gb = C64::i();
        let corners = [base, base + ga, base + ga + gb, base + gb];
        match winding_number(f, &corners) {
            Ok(w) => return Ok(w),
            Err(e) => last = e,
        }
    }
    Err(match last {
        Error::WindingNotOne { found, expected, .. } => {
            Error::WindingNotOne { found, expected, attempts: offsets.len() }
        }
        other => other,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub dim: usize,
    pub rank: usize,
    /// Fitted scalar `c` with `G ≈ c I` (mean of the diagonal).
    pub c: f64,
    /// `max |G_mn|, m ≠ n` relative to `c`.
    pub offdiag_resid: f64,
    /// `max |G_nn - c|` relative to `c`.
    pub diag_spread: f64,
    /// `‖h₀‖² det(Im Ω) / N^d`, the constant implied by the Moyal identity.
    pub c_moyal: f64,
    /// `2^{d/2} N^{d/2} det(Im Ω)^{-1/2}`.
    pub c_printed: f64,
    pub eigenvalues: Vec<f64>,
    /// Points per unit in time and per `1/N` in frequency.
    pub oversampling: usize,
    /// Relative Frobenius change against the previous grid.
    pub change: f64,
    #[serde(skip)]
    pub matrix: Option<DMatrix<C64>>,
}

/// Gram matrix `G_mn = ∫_{C^d/Λ} B ε_n conj(B ε_m) e^{-Nφ} dV`, by a tensor
/// midpoint rule in lattice coordinates `(a, b)`, where `dV = det(Im Ω) da db`.
pub fn gram_matrix(params: &GaborParams, oversampling: usize) -> Result<DMatrix<C64>> {
    let ev = BargmannEvaluator::new(params)?;
    let n = params.n();
    let d = params.d();
    let len = params.dim();
    let grid = TorusGrid::oversampled(n, d, oversampling);
    let w = grid.weight() / (n as f64).powi(d as i32) * params.det_im();
    let acc = chunked_map_reduce(
        grid.len(),
        1024,
        |range| -> Result<Vec<C64>> {
            let mut local = vec![C64::new(0.0, 0.0); len * len];
            let mut x = vec![0.0; d];
            let mut xi = vec![0.0; d];
            for p in range {
                grid.point(p, &mut x, &mut xi);
                let a: Vec<f64> = x.iter().map(|v| v / n as f64).collect();
                let z = from_lattice_coords(&a, &xi, params);
                let v = ev.all_weighted(&z)?;
                for m in 0..len {
                    let cm = v[m].conj();
                    for nn in 0..len {
                        local[m * len + nn] += v[nn] * cm;
                    }
                }
            }
            Ok(local)
        },
        Ok(vec![C64::new(0.0, 0.0); len * len]),
        |a, b| {
            let mut a = a?;
            for (x, y) in a.iter_mut().zip(b?) {
                *x += y;
            }
            Ok(a)
        },
    )?;
    Ok(DMatrix::from_fn(len, len, |m, nn| acc[m * len + nn] * w))
}

pub const GRAM_CHANGE_TOL: f64 = 1e-6;
pub const DEFAULT_GRAM_OVERSAMPLING: usize = 4;

/// Gram matrix with grid doubling until the relative change is below `1e-6`.
pub fn gram(params: &GaborParams, oversampling: usize) -> Result<GramReport> {
    gram_with_limit(params, oversampling, oversampling.max(1) * 8)
}

pub fn gram_with_limit(params: &GaborParams, oversampling: usize, max_oversampling: usize) -> Result<GramReport> {
    let mut s = oversampling.max(1);
    let mut prev = gram_matrix(params, s)?;
    loop {
        let next = gram_matrix(params, 2 * s)?;
        let change = (&next - &prev).norm() / next.norm();
        s *= 2;
        if change <= GRAM_CHANGE_TOL {
            return Ok(summarize_gram(params, next, s, change));
        }
        if 2 * s > max_oversampling {
            return Err(Error::QuadratureUnderResolved { change, tol: GRAM_CHANGE_TOL });
        }
        prev = next;
    }
}

fn summarize_gram(params: &GaborParams, g: DMatrix<C64>, oversampling: usize, change: f64) -> GramReport {
    let len = g.nrows();
    let c = (0..len).map(|i| g[(i, i)].re).sum::<f64>() / len as f64;
    let mut off = 0.0_f64;
    let mut spread = 0.0_f64;
    for i in 0..len {
        spread = spread.max((g[(i, i)].re - c).abs());
        for j in 0..len {
            if i != j {
                off = off.max(g[(i, j)].norm());
            }
        }
    }
    let herm = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    let mut eigenvalues: Vec<f64> = herm.symmetric_eigenvalues().iter().cloned().collect();
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lmax = eigenvalues.last().cloned().unwrap_or(0.0);
    let rank = eigenvalues.iter().filter(|&&l| l > 1e-8 * lmax).count();
    let d = params.d() as i32;
    let nf = params.n() as f64;
    let c_moyal = gaussian_window_norm_sq(params) * params.det_im() / nf.powi(d);
    let c_printed = 2f64.powf(d as f64 / 2.0) * nf.powf(d as f64 / 2.0) / params.det_im().sqrt();
    GramReport {
        dim: len,
        rank,
        c,
        offdiag_resid: off / c,
        diag_spread: spread / c,
        c_moyal,
        c_printed,
        eigenvalues,
        oversampling,
        change,
        matrix: Some(g),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub grid: TorusGrid,
    /// `ρ` at the grid points, in [`TorusGrid::point`] order.
    pub values: Vec<f64>,
    pub integral: f64,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// `(max - min) / mean`.
    pub flatness: f64,
}

/// `ρ(x, ξ) = Σ_n |V_{h₀} ε_n(x, ξ)|² / ‖h₀‖²`, normalized so that
/// `∫_{T_N} ρ = N^d`.
pub fn bergman_density(grid: &TorusGrid, params: &GaborParams) -> Result<DensityReport> {
    if grid.n != params.n() || grid.d != params.d() {
        return Err(Error::InvalidDimension("grid does not match params".into()));
    }
    let ev = GaussianStft::new(params)?;
    let gn = gaussian_window_norm_sq(params);
    let d = params.d();
    let len = params.dim();
    let values = chunked_map_reduce(
        grid.len(),
        1024,
        |range| {
            let mut out = Vec::with_capacity(range.len());
            let mut x = vec![0.0; d];
            let mut xi = vec![0.0; d];
            let mut v = vec![C64::new(0.0, 0.0); len];
            for p in range {
                grid.point(p, &mut x, &mut xi);
                ev.basis_values(&x, &xi, &mut v);
                out.push(v.iter().map(|c| c.norm_sqr()).sum::<f64>() / gn);
            }
            out
        },
        Vec::with_capacity(grid.len()),
        |mut a, b| {
            a.extend(b);
            a
        },
    );
    let integral = values.iter().sum::<f64>() * grid.weight();
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(DensityReport { grid: *grid, values, integral, min, max, mean, flatness: (max - min) / mean })
}

/// Closed form and quadrature of `‖h₀‖²_{L²}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowNormCheck {
    pub closed_form: f64,
    pub quadrature: f64,
    pub mismatch: f64,
}

/// Self-test of the window norm: trapezoid quadrature of `exp(-2π tᵀ Im Ω t / N)`
/// against `sqrt(N^d / (2^d det Im Ω))`; fails above `1e-10` relative.
pub fn window_norm_check(params: &GaborParams) -> Result<WindowNormCheck> {
    let d = params.d();
    let nf = params.n() as f64;
    let closed = gaussian_window_norm_sq(params);
    // |h₀|² ≤ exp(-2π λ_min |t|²/N); cut where that is below 1e-40
    let half_width = (40.0 * 10f64.ln() * nf / (2.0 * PI * params.lambda_min())).sqrt();
    let h = (nf / (2.0 * params.lambda_max())).sqrt() / 6.0;
    let m = (half_width / h).ceil() as i64;
    let per_axis = (2 * m + 1) as usize;
    let mut total = 0.0;
    let mut t = vec![0.0; d];
    for flat in 0..per_axis.pow(d as u32) {
        let mut r = flat;
        for ti in t.iter_mut() {
            *ti = ((r % per_axis) as i64 - m) as f64 * h;
            r /= per_axis;
        }
        total += (-2.0 * PI * params.im_quad_form(&t) / nf).exp();
    }
    let quadrature = total * h.powi(d as i32);
    let mismatch = (quadrature - closed).abs() / closed;
    if mismatch > 1e-10 {
        return Err(Error::Inconsistent(format!("window norm closed form {closed} vs quadrature {quadrature}")));
    }
    Ok(WindowNormCheck { closed_form: closed, quadrature, mismatch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{to_complex, TFPoint};
    use crate::transforms::{stft_basis, WindowSpec};

    #[test]
    fn weight_examples() {
        let lambda = 1.7;
        let p = GaborParams::one_dim(3, 0.0, lambda).unwrap();
        let z = C64::new(0.4, -1.3);
        assert!((weight_phi(&[z], &p) - 2.0 * PI / lambda * 0.16).abs() < 1e-14);
        assert!(weight_phi(&[C64::new(0.0, 2.5)], &p).abs() < 1e-14);
        let p = GaborParams::one_dim(3, 0.4, 0.9).unwrap();
        let a = weight_phi(&[z], &p);
        let b = weight_phi(&[z + C64::new(0.0, 3.0)], &p);
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn n1_basis_is_theta() {
        let p = GaborParams::one_dim(1, 0.2, 1.1).unwrap();
        let z = C64::new(0.31, -0.47);
        let b = bargmann_basis(&[0], &[z], &p).unwrap();
        let t = theta_eval(&[C64::i() * z], &p, 1, 1e-15).unwrap();
        assert!(b.raw.rel_diff(&t.value) < 1e-13);
        assert!(!b.closed_form_flag);
    }

    #[test]
    fn closed_form_agrees_far_from_origin() {
        let p = GaborParams::one_dim(4, 0.3, 0.8).unwrap();
        let ev = BargmannEvaluator::new(&p).unwrap().with_cross_check(true);
        for &z in &[C64::new(3.1, 2.7), C64::new(-5.2, 0.4), C64::new(0.2, -9.9)] {
            for n in 0..4 {
                let s = ev.basis(&[n], &[z]).unwrap();
                assert!(s.closed_form_discrepancy.unwrap() < 1e-10, "{z} {n}: {:?}", s.closed_form_discrepancy);
            }
        }
    }

    #[test]
    fn stft_factorizes_through_bargmann() {
        let p = GaborParams::one_dim(3, 0.25, 1.2).unwrap();
        let ev = BargmannEvaluator::new(&p).unwrap();
        let w = WindowSpec::Gaussian(p.clone());
        let (x, xi) = (1.3, 0.61);
        let pt = TFPoint::new(vec![x], vec![xi]);
        let zb = -to_complex(&pt, &p).z[0];
        let pre = (C64::i() * PI * p.quad_form(&[x]) / 3.0).exp();
        for n in 0..3 {
            let v = stft_basis(&[n], &pt, &w).unwrap();
            let b = ev.basis(&[n], &[zb]).unwrap().raw.to_complex();
            assert!((v - pre * b).norm() < 1e-12);
        }
    }

    #[test]
    fn window_norm_self_test() {
        for p in [GaborParams::one_dim(4, 0.3, 1.0).unwrap(), GaborParams::imaginary_identity(2, 3).unwrap()] {
            let c = window_norm_check(&p).unwrap();
            assert!(c.mismatch < 1e-12);
        }
    }

    #[test]
    fn gram_is_scalar_d1() {
        let p = GaborParams::one_dim(2, 0.0, 1.0).unwrap();
        let r = gram(&p, 4).unwrap();
        assert_eq!(r.rank, 2);
        assert!(r.offdiag_resid < 1e-8);
        assert!((r.c - r.c_moyal).abs() < 1e-8 * r.c);
    }
}
