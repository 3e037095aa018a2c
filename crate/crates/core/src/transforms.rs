//! Discrete Gabor transform, periodization, Zak transform and the STFT of
//! elements of `S_N`.
//!
//! A signal `φ = Σ a_n ε_n` is stored by its coefficients `a_n`, flattened
//! row-major over `I_N = (Z_N)^d`. DGT coefficients are indexed by
//! `k_flat · N^d + l_flat`.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::IndexSpace;
use crate::lattice::{GaborParams, TFPoint, C64};
use crate::series::{for_each_in_box, truncation, DEFAULT_RADIUS_CAP};

/// Relative tolerance for periodization sums.
pub const PERIODIZE_TOL: f64 = 1e-14;
/// Relative tolerance for Zak and STFT sums.
pub const ZAK_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    space: IndexSpace,
    coeffs: Vec<C64>,
}

impl Signal {
    pub fn new(n: usize, d: usize, coeffs: Vec<C64>) -> Result<Self> {
        let space = IndexSpace::new(n, d);
        if coeffs.len() != space.len() {
            return Err(Error::ShapeMismatch { expected: space.len(), got: coeffs.len() });
        }
        Ok(Signal { space, coeffs })
    }

    pub fn zeros(n: usize, d: usize) -> Self {
        let space = IndexSpace::new(n, d);
        Signal { space, coeffs: vec![C64::new(0.0, 0.0); space.len()] }
    }

    /// The Dirac comb `ε_n`.
    pub fn delta(n: usize, d: usize, flat: usize) -> Self {
        let mut s = Self::zeros(n, d);
        s.coeffs[flat] = C64::new(1.0, 0.0);
        s
    }

    pub fn space(&self) -> IndexSpace {
        self.space
    }

    pub fn n(&self) -> usize {
        self.space.n
    }

    pub fn d(&self) -> usize {
        self.space.d
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨self, other⟩ = Σ a_n conj(b_n)`.
    pub fn inner(&self, other: &Signal) -> C64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum()
    }

    /// `reference` fixes the expected shape.
    fn check_same_shape(&self, reference: &Signal) -> Result<()> {
        if self.space != reference.space {
            return Err(Error::ShapeMismatch { expected: reference.len(), got: self.len() });
        }
        Ok(())
    }
}

/// Pointwise envelope `|f(t)| ≤ c · exp(-α |t|²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayEnvelope {
    pub c: f64,
    pub alpha: f64,
}

pub type WindowFn = Arc<dyn Fn(&[f64]) -> C64 + Send + Sync>;

#[derive(Clone)]
pub enum WindowSpec {
    /// `h₀(t) = conj(exp(πi tᵀ(Ω/N)t))`.
    Gaussian(GaborParams),
    /// Samples `h_N` on `I_N`; usable for the DGT only.
    Sampled(Signal),
    /// A callable window on `R^d` with a declared decay envelope.
    Function { n: usize, d: usize, f: WindowFn, decay: Option<DecayEnvelope> },
}

impl std::fmt::Debug for WindowSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WindowSpec::Gaussian(p) => f.debug_tuple("Gaussian").field(p).finish(),
            WindowSpec::Sampled(s) => f.debug_tuple("Sampled").field(s).finish(),
            WindowSpec::Function { n, d, decay, .. } => {
                f.debug_struct("Function").field("n", n).field("d", d).field("decay", decay).finish()
            }
        }
    }
}

impl WindowSpec {
    pub fn space(&self) -> IndexSpace {
        match self {
            WindowSpec::Gaussian(p) => IndexSpace::new(p.n(), p.d()),
            WindowSpec::Sampled(s) => s.space(),
            WindowSpec::Function { n, d, .. } => IndexSpace::new(*n, *d),
        }
    }
}

/// Diagnostics of a truncated lattice sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumDiagnostics {
    pub radius: usize,
    /// Bound on the omitted terms, relative to the kept mass (Gaussian) or to
    /// the envelope constant (callable windows).
    pub tail_bound: f64,
}

/// `h₀(t) = conj(exp(πi tᵀΩt/N))`.
pub fn gaussian_window(params: &GaborParams, t: &[f64]) -> C64 {
    let q = params.quad_form(t) / params.n() as f64;
    (C64::i() * PI * q).exp().conj()
}

/// `‖h₀‖²_{L²(R^d)} = sqrt(N^d / (2^d det Im Ω))`.
pub fn gaussian_window_norm_sq(params: &GaborParams) -> f64 {
    let nd = params.dim() as f64;
    (nd / (2f64.powi(params.d() as i32) * params.det_im())).sqrt()
}

/// Lattice-sum plan over `k ∈ Z^d` for a window evaluated at `u - N k` or
/// `u + N k`: per-axis Gaussian rate `α` in `k` and the kind of tail control.
struct KSum {
    radius: usize,
    tail: f64,
}

fn gaussian_ksum(params: &GaborParams, tol: f64) -> Result<KSum> {
    let nf = params.n() as f64;
    let t =
        truncation(PI * nf * params.lambda_min(), PI * nf * params.lambda_max(), params.d(), tol, DEFAULT_RADIUS_CAP)?;
    Ok(KSum { radius: t.radius, tail: t.tail_abs / t.mass_floor })
}

fn envelope_ksum(n: usize, d: usize, env: &DecayEnvelope, tol: f64) -> Result<KSum> {
    if !(env.alpha > 0.0) || !(env.c >= 0.0) {
        return Err(Error::NoDecay);
    }
    let nf = n as f64;
    let t = truncation(env.alpha * nf * nf, 0.0, d, tol, DEFAULT_RADIUS_CAP)?;
    Ok(KSum { radius: t.radius, tail: t.tail_abs })
}

type BorrowedWindow<'a> = Box<dyn Fn(&[f64]) -> C64 + 'a>;

fn callable(window: &WindowSpec) -> Result<(usize, usize, BorrowedWindow<'_>, KSumSource<'_>)> {
    match window {
        WindowSpec::Gaussian(p) => {
            Ok((p.n(), p.d(), Box::new(move |t: &[f64]| gaussian_window(p, t)), KSumSource::Gaussian(p)))
        }
        WindowSpec::Function { n, d, f, decay } => {
            let env = decay.ok_or(Error::NoDecay)?;
            Ok((*n, *d, Box::new(move |t: &[f64]| f(t)), KSumSource::Envelope(env)))
        }
        WindowSpec::Sampled(_) => Err(Error::NotApplicable("sampled windows have no continuous extension".into())),
    }
}

enum KSumSource<'a> {
    Gaussian(&'a GaborParams),
    Envelope(DecayEnvelope),
}

impl KSumSource<'_> {
    fn plan(&self, n: usize, d: usize, tol: f64) -> Result<KSum> {
        match self {
            KSumSource::Gaussian(p) => gaussian_ksum(p, tol),
            KSumSource::Envelope(env) => envelope_ksum(n, d, env, tol),
        }
    }
}

/// `h_N[n] = Σ_k h₀(n - kN)`.
pub fn periodize_sample(window: &WindowSpec) -> Result<Signal> {
    periodize_sample_report(window).map(|(s, _)| s)
}

pub fn periodize_sample_report(window: &WindowSpec) -> Result<(Signal, SumDiagnostics)> {
    if let WindowSpec::Sampled(s) = window {
        if s.norm_sq() == 0.0 {
            return Err(Error::ZeroWindow);
        }
        return Ok((s.clone(), SumDiagnostics { radius: 0, tail_bound: 0.0 }));
    }
    let (n, d, f, src) = callable(window)?;
    let plan = src.plan(n, d, PERIODIZE_TOL)?;
    let space = IndexSpace::new(n, d);
    let nf = n as f64;
    let mut coeffs = Vec::with_capacity(space.len());
    let mut t = vec![0.0; d];
    for idx in space.iter() {
        let center: Vec<i64> = idx.iter().map(|&v| (v as f64 / nf).round() as i64).collect();
        let mut acc = C64::new(0.0, 0.0);
        for_each_in_box(&center, plan.radius, |k| {
            for i in 0..d {
                t[i] = idx[i] as f64 - k[i] as f64 * nf;
            }
            acc += f(&t);
        });
        coeffs.push(acc);
    }
    let s = Signal { space, coeffs };
    if s.norm_sq() == 0.0 {
        return Err(Error::ZeroWindow);
    }
    Ok((s, SumDiagnostics { radius: plan.radius, tail_bound: plan.tail }))
}

fn zak_impl(window: &WindowSpec, x: &[f64], xi: &[f64], conj: bool) -> Result<(C64, SumDiagnostics)> {
    let (n, d, f, src) = callable(window)?;
    if x.len() != d || xi.len() != d {
        return Err(Error::InvalidDimension(format!("expected {d}-vectors")));
    }
    let plan = src.plan(n, d, ZAK_TOL)?;
    let nf = n as f64;
    let center: Vec<i64> = x.iter().map(|v| (v / nf).round() as i64).collect();
    let mut t = vec![0.0; d];
    let mut acc = C64::new(0.0, 0.0);
    for_each_in_box(&center, plan.radius, |k| {
        let mut phase = 0.0;
        for i in 0..d {
            t[i] = x[i] - nf * k[i] as f64;
            phase += k[i] as f64 * xi[i];
        }
        let v = f(&t);
        let v = if conj { v.conj() } else { v };
        acc += v * C64::from_polar(1.0, 2.0 * PI * nf * phase);
    });
    Ok((acc, SumDiagnostics { radius: plan.radius, tail_bound: plan.tail }))
}

/// `Z_N g(x, ξ) = Σ_k g(x - Nk) e^{2πiN kᵀξ}`.
pub fn zak(window: &WindowSpec, x: &[f64], xi: &[f64]) -> Result<C64> {
    zak_impl(window, x, xi, false).map(|(v, _)| v)
}

pub fn zak_report(window: &WindowSpec, x: &[f64], xi: &[f64]) -> Result<(C64, SumDiagnostics)> {
    zak_impl(window, x, xi, false)
}

/// Zak transform of `ḡ`.
pub fn zak_conj(window: &WindowSpec, x: &[f64], xi: &[f64]) -> Result<C64> {
    zak_impl(window, x, xi, true).map(|(v, _)| v)
}

/// `V_g ε_n(x, ξ) = e^{-2πi ξᵀn} Z_N ḡ(n - x, ξ)`.
pub fn stft_basis(n_idx: &[usize], p: &TFPoint, window: &WindowSpec) -> Result<C64> {
    let u: Vec<f64> = n_idx.iter().zip(&p.x).map(|(&n, x)| n as f64 - x).collect();
    let z = zak_conj(window, &u, &p.xi)?;
    let dot: f64 = n_idx.iter().zip(&p.xi).map(|(&n, xi)| n as f64 * xi).sum();
    Ok(C64::from_polar(1.0, -2.0 * PI * dot) * z)
}

/// `V_g φ(x, ξ) = Σ_n a_n V_g ε_n(x, ξ)`.
pub fn stft(phi: &Signal, p: &TFPoint, window: &WindowSpec) -> Result<C64> {
    if phi.space() != window.space() {
        return Err(Error::ShapeMismatch { expected: window.space().len(), got: phi.len() });
    }
    if let WindowSpec::Gaussian(params) = window {
        let ev = GaussianStft::new(params)?;
        let mut vals = vec![C64::new(0.0, 0.0); phi.len()];
        ev.basis_values(&p.x, &p.xi, &mut vals);
        return Ok(phi.coeffs().iter().zip(&vals).map(|(a, v)| a * v).sum());
    }
    let space = phi.space();
    let mut acc = C64::new(0.0, 0.0);
    for (flat, a) in phi.coeffs().iter().enumerate() {
        if *a != C64::new(0.0, 0.0) {
            acc += a * stft_basis(&space.unflatten(flat), p, window)?;
        }
    }
    Ok(acc)
}

/// Evaluates all `V_{h₀} ε_n(x, ξ)`, `n ∈ I_N`, at one point for the Gaussian
/// window, directly from `Σ_k exp(πi tᵀΩt/N - 2πi ξᵀ(n+Nk))`, `t = n + Nk - x`.
#[derive(Debug, Clone)]
pub struct GaussianStft {
    params: GaborParams,
    space: IndexSpace,
    radius: usize,
    tail: f64,
    /// `πi Ω / N`, row-major.
    coef: Vec<C64>,
}

impl GaussianStft {
    pub fn new(params: &GaborParams) -> Result<Self> {
        Self::with_tol(params, ZAK_TOL)
    }

    pub fn with_tol(params: &GaborParams, tol: f64) -> Result<Self> {
        let plan = gaussian_ksum(params, tol)?;
        let d = params.d();
        let nf = params.n() as f64;
        let coef = (0..d * d).map(|ij| C64::i() * PI * params.omega()[(ij / d, ij % d)] / nf).collect();
        Ok(GaussianStft {
            params: params.clone(),
            space: IndexSpace::new(params.n(), d),
            radius: plan.radius,
            tail: plan.tail,
            coef,
        })
    }

    pub fn params(&self) -> &GaborParams {
        &self.params
    }

    pub fn diagnostics(&self) -> SumDiagnostics {
        SumDiagnostics { radius: self.radius, tail_bound: self.tail }
    }

    /// Fills `out[n_flat]` with `V ε_n(x, ξ)`.
    pub fn basis_values(&self, x: &[f64], xi: &[f64], out: &mut [C64]) {
        let d = self.space.d;
        let nf = self.space.n as f64;
        if d == 1 {
            self.basis_values_1d(x[0], xi[0], out);
            return;
        }
        let mut t = vec![0.0; d];
        for (flat, slot) in out.iter_mut().enumerate().take(self.space.len()) {
            let idx = self.space.unflatten(flat);
            let center: Vec<i64> = (0..d).map(|i| ((x[i] - idx[i] as f64) / nf).round() as i64).collect();
            let mut acc = C64::new(0.0, 0.0);
            for_each_in_box(&center, self.radius, |k| {
                let mut ph = 0.0;
                for i in 0..d {
                    let j = idx[i] as f64 + nf * k[i] as f64;
                    t[i] = j - x[i];
                    ph += xi[i] * j;
                }
                let mut e = C64::new(0.0, -2.0 * PI * ph.rem_euclid(1.0));
                for i in 0..d {
                    for jx in 0..d {
                        e += self.coef[i * d + jx] * (t[i] * t[jx]);
                    }
                }
                acc += e.exp();
            });
            *slot = acc;
        }
    }

    fn basis_values_1d(&self, x: f64, xi: f64, out: &mut [C64]) {
        let nf = self.space.n as f64;
        let c = self.coef[0];
        let r = self.radius as i64;
        for (n, slot) in out.iter_mut().enumerate().take(self.space.n) {
            let center = ((x - n as f64) / nf).round() as i64;
            let mut acc = C64::new(0.0, 0.0);
            for k in center - r..=center + r {
                let j = n as f64 + nf * k as f64;
                let t = j - x;
                // reduce the frequency phase modulo 1 before scaling by 2π
                let ph = (xi * j).rem_euclid(1.0);
                acc += (c * (t * t) + C64::new(0.0, -2.0 * PI * ph)).exp();
            }
            *slot = acc;
        }
    }
}

/// DGT coefficients `V[k, l]`, flattened as `k_flat · N^d + l_flat`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DGTCoefficients {
    space: IndexSpace,
    values: Vec<C64>,
}

impl DGTCoefficients {
    pub fn new(n: usize, d: usize, values: Vec<C64>) -> Result<Self> {
        let space = IndexSpace::new(n, d);
        let expected = space.len() * space.len();
        if values.len() != expected {
            return Err(Error::ShapeMismatch { expected, got: values.len() });
        }
        Ok(DGTCoefficients { space, values })
    }

    pub fn space(&self) -> IndexSpace {
        self.space
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn get(&self, k_flat: usize, l_flat: usize) -> C64 {
        self.values[k_flat * self.space.len() + l_flat]
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// In-place unnormalized d-dimensional FFT of a row-major `N^d` array.
fn fft_nd(buf: &mut [C64], space: IndexSpace, fft: &Arc<dyn Fft<f64>>, line: &mut Vec<C64>) {
    let n = space.n;
    let total = space.len();
    line.resize(n, C64::new(0.0, 0.0));
    let mut stride = 1;
    for _ in 0..space.d {
        let block = stride * n;
        for base in (0..total).step_by(block) {
            for off in 0..stride {
                for i in 0..n {
                    line[i] = buf[base + off + i * stride];
                }
                fft.process(line);
                for i in 0..n {
                    buf[base + off + i * stride] = line[i];
                }
            }
        }
        stride = block;
    }
}

fn for_each_row<F>(rows: &mut [C64], row_len: usize, f: F)
where
    F: Fn(usize, &mut [C64]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        rows.par_chunks_mut(row_len).enumerate().for_each(|(k, row)| f(k, row));
    }
    #[cfg(not(feature = "parallel"))]
    rows.chunks_mut(row_len).enumerate().for_each(|(k, row)| f(k, row));
}

/// `V_g f[k, l] = Σ_m f[m] conj(g[m-k]) e^{-2πi lᵀm/N}`, one FFT per shift `k`.
pub fn dgt(f: &Signal, g: &Signal) -> Result<DGTCoefficients> {
    f.check_same_shape(g)?;
    let space = f.space();
    let len = space.len();
    let fft = FftPlanner::new().plan_fft_forward(space.n);
    let mut values = vec![C64::new(0.0, 0.0); len * len];
    for_each_row(&mut values, len, |k, row| {
        for (m, slot) in row.iter_mut().enumerate() {
            *slot = f.coeffs[m] * g.coeffs[space.sub(m, k)].conj();
        }
        let mut line = Vec::new();
        fft_nd(row, space, &fft, &mut line);
    });
    Ok(DGTCoefficients { space, values })
}

/// Direct `O(N^{3d})` summation of the DGT definition.
pub fn dgt_direct(f: &Signal, g: &Signal) -> Result<DGTCoefficients> {
    f.check_same_shape(g)?;
    let space = f.space();
    let len = space.len();
    let nf = space.n as f64;
    let mut values = vec![C64::new(0.0, 0.0); len * len];
    for_each_row(&mut values, len, |k, row| {
        for (l, slot) in row.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..len {
                let ph = (space.dot(l, m) % space.n) as f64 / nf;
                acc += f.coeffs[m] * g.coeffs[space.sub(m, k)].conj() * C64::from_polar(1.0, -2.0 * PI * ph);
            }
            *slot = acc;
        }
    });
    Ok(DGTCoefficients { space, values })
}

/// `f = (N^d ‖g‖²)^{-1} Σ_{k,l} V[k,l] M_l T_k g`.
pub fn dgt_inverse(v: &DGTCoefficients, g: &Signal) -> Result<Signal> {
    let space = v.space;
    if g.space() != space {
        return Err(Error::ShapeMismatch { expected: space.len(), got: g.len() });
    }
    let gn = g.norm_sq();
    if gn == 0.0 {
        return Err(Error::ZeroWindow);
    }
    let len = space.len();
    let ifft = FftPlanner::new().plan_fft_inverse(space.n);
    let mut line = Vec::new();
    let mut row = vec![C64::new(0.0, 0.0); len];
    let mut out = vec![C64::new(0.0, 0.0); len];
    for k in 0..len {
        row.copy_from_slice(&v.values[k * len..(k + 1) * len]);
        fft_nd(&mut row, space, &ifft, &mut line);
        for m in 0..len {
            out[m] += row[m] * g.coeffs[space.sub(m, k)];
        }
    }
    let scale = 1.0 / (len as f64 * gn);
    for c in &mut out {
        *c *= scale;
    }
    Ok(Signal { space, coeffs: out })
}
