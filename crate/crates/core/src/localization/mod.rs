//! Restriction (localization) operators on `S_N` and their spectra.
//!
//! For a symbol `a` on `[0,1]^{2d}` and the Gaussian window `h₀`,
//!
//! ```text
//! ⟨R φ, ψ⟩ = ‖h₀‖^{-2} ∫_{T_N} a(x/N, ξ) V φ(x, ξ) conj(V ψ(x, ξ)) dx dξ,
//! ```
//!
//! so `R[1] = I` by the Moyal identity. Asymptotic quantities use the
//! normalizations `N^{-d} Tr R` and `N^{-d} #{λ < α}`.

pub mod symbol;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use symbol::{parse_symbol, Ast, Func, SymbolFn, TrigTerm};

use crate::bargmann::{from_lattice_coords, BargmannEvaluator};
use crate::error::{Error, Result};
use crate::lattice::{GaborParams, C64};
use crate::quadrature::{chunked_map_reduce, unit_cube_points, TorusGrid};
use crate::transforms::{gaussian_window_norm_sq, GaussianStft, Signal};

/// Trace tolerance for the grid-doubling test on smooth symbols.
pub const SMOOTH_TRACE_TOL: f64 = 1e-8;
/// Trace tolerance for discontinuous symbols, whose midpoint rule is only
/// second order even with faces on the grid.
pub const DISCONTINUOUS_TRACE_TOL: f64 = 2e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestrictionOptions {
    /// Initial points per unit time and per `1/N` frequency.
    pub oversampling: usize,
    /// Relative trace change accepted after a doubling; `None` picks
    /// [`SMOOTH_TRACE_TOL`] or [`DISCONTINUOUS_TRACE_TOL`].
    pub trace_tol: Option<f64>,
    pub max_doublings: usize,
    /// Skip the doubling test and use the initial grid as is.
    pub fixed_grid: bool,
}

impl Default for RestrictionOptions {
    fn default() -> Self {
        RestrictionOptions { oversampling: 4, trace_tol: None, max_doublings: 3, fixed_grid: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Restriction {
    #[serde(skip)]
    pub matrix: DMatrix<C64>,
    pub grid: TorusGrid,
    pub trace: f64,
    /// Trace change over the last doubling relative to `max(|Tr|, ‖M‖_F)`
    /// (0 on a fixed grid).
    pub trace_change: f64,
    pub trace_tol: f64,
    /// `max |M - M*|` relative to `max |M|`, before symmetrization.
    pub asymmetry: f64,
    pub hermitian: bool,
}

/// Assemble `M_mn = ‖h₀‖^{-2} Σ_p w a(x_p/N, ξ_p) V ε_n conj(V ε_m)` on one grid.
pub fn restriction_matrix_on_grid(symbol: &SymbolFn, params: &GaborParams, grid: &TorusGrid) -> Result<DMatrix<C64>> {
    let ev = GaussianStft::new(params)?;
    let d = params.d();
    let len = params.dim();
    let nf = params.n() as f64;
    let scale = grid.weight() / gaussian_window_norm_sq(params);
    let acc = chunked_map_reduce(
        grid.len(),
        512,
        |range| {
            let mut local = vec![C64::new(0.0, 0.0); len * len];
            let mut x = vec![0.0; d];
            let mut xi = vec![0.0; d];
            let mut u = vec![0.0; d];
            let mut v = vec![C64::new(0.0, 0.0); len];
            for p in range {
                grid.point(p, &mut x, &mut xi);
                for i in 0..d {
                    u[i] = x[i] / nf;
                }
                let a = symbol.eval(&u, &xi);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                ev.basis_values(&x, &xi, &mut v);
                for m in 0..len {
                    let cm = a * v[m].conj();
                    let row = &mut local[m * len..(m + 1) * len];
                    for (slot, vn) in row.iter_mut().zip(&v) {
                        *slot += cm * vn;
                    }
                }
            }
            local
        },
        vec![C64::new(0.0, 0.0); len * len],
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    );
    Ok(DMatrix::from_fn(len, len, |m, n| acc[m * len + n] * scale))
}

fn trace_of(m: &DMatrix<C64>) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)].re).sum()
}

/// Restriction operator with grid doubling until the trace is stable.
/// Real symbols are Hermitian-symmetrized after the asymmetry is measured.
pub fn restriction_matrix(symbol: &SymbolFn, params: &GaborParams, opts: &RestrictionOptions) -> Result<Restriction> {
    if let Some(sd) = symbol.dim() {
        if sd != params.d() {
            return Err(Error::InvalidDimension(format!("symbol is {sd}-dimensional, params have d = {}", params.d())));
        }
    }
    symbol.check_bounded(params.d())?;
    let trace_tol =
        opts.trace_tol.unwrap_or(if symbol.is_discontinuous() { DISCONTINUOUS_TRACE_TOL } else { SMOOTH_TRACE_TOL });
    let mut grid = TorusGrid::oversampled(params.n(), params.d(), opts.oversampling.max(1));
    let mut m = restriction_matrix_on_grid(symbol, params, &grid)?;
    let mut change = 0.0;
    if !opts.fixed_grid {
        let mut doublings = 0;
        loop {
            let next_grid = grid.doubled();
            let next = restriction_matrix_on_grid(symbol, params, &next_grid)?;
            let (t0, t1) = (m.trace(), next.trace());
            let scale = t1.norm().max(next.norm());
            change = if scale > 0.0 { (t1 - t0).norm() / scale } else { 0.0 };
            grid = next_grid;
            m = next;
            doublings += 1;
            if change < trace_tol {
                break;
            }
            if doublings >= opts.max_doublings {
                return Err(Error::QuadratureUnderResolved { change, tol: trace_tol });
            }
        }
    }
    let maxabs = m.iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
    let asym = (&m - m.adjoint()).iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
    let asymmetry = if maxabs > 0.0 { asym / maxabs } else { 0.0 };
    let hermitian = symbol.is_real();
    if hermitian {
        if asymmetry > trace_tol.max(1e-12) {
            return Err(Error::NonHermitianBeyondTolerance { asymmetry, tol: trace_tol });
        }
        m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    }
    Ok(Restriction { trace: trace_of(&m), matrix: m, grid, trace_change: change, trace_tol, asymmetry, hermitian })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingSample {
    pub alpha: f64,
    /// `#{λ < α}` (beyond the counting tolerance).
    pub below: usize,
    /// `#{λ > α}` (beyond the counting tolerance).
    pub above: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Ascending eigenvalues, or singular values when not Hermitian.
    pub eigenvalues: Vec<f64>,
    pub hermitian: bool,
    /// Set when the input was not Hermitian and singular values are reported.
    pub non_normal_warning: bool,
    pub trace: f64,
    pub eigen_sum: f64,
    pub counting: Vec<CountingSample>,
    pub count_tol: f64,
    pub plunge_delta: f64,
    pub plunge_fraction: f64,
    /// `max |M - Σ λ u u*|` relative to `max |M|`.
    pub backward_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    pub alpha_grid: Vec<f64>,
    pub count_tol: f64,
    pub plunge_delta: f64,
    /// Upper end of the symbol range for the plunge window `(δ, max - δ)`.
    pub max_symbol: f64,
    pub hermitian_tol: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            alpha_grid: Vec::new(),
            count_tol: 1e-8,
            plunge_delta: 0.1,
            max_symbol: 1.0,
            hermitian_tol: 1e-10,
        }
    }
}

/// Hermitian eigendecomposition with counting function and plunge fraction.
pub fn spectrum(m: &DMatrix<C64>, opts: &SpectrumOptions) -> Result<SpectrumReport> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::InvalidDimension(format!("matrix is {}x{}", m.nrows(), m.ncols())));
    }
    let maxabs = m.iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
    let asym = (m - m.adjoint()).iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
    let hermitian = maxabs == 0.0 || asym <= opts.hermitian_tol * maxabs;
    let trace: f64 = (0..n).map(|i| m[(i, i)].re).sum();
    let (mut values, backward_error) = if hermitian {
        let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
        let eig = h.clone().symmetric_eigen();
        let vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::EigSolverFailure("non-finite eigenvalue".into()));
        }
        let lam = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| C64::new(v, 0.0)));
        let rec = &eig.eigenvectors * lam * eig.eigenvectors.adjoint();
        let err = (&rec - &h).iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
        (vals, if maxabs > 0.0 { err / maxabs } else { 0.0 })
    } else {
        let sv: Vec<f64> = m.singular_values().iter().cloned().collect();
        if sv.iter().any(|v| !v.is_finite()) {
            return Err(Error::EigSolverFailure("non-finite singular value".into()));
        }
        (sv, 0.0)
    };
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let eigen_sum = values.iter().sum();
    let counting = opts
        .alpha_grid
        .iter()
        .map(|&alpha| CountingSample {
            alpha,
            below: values.iter().filter(|&&l| l < alpha - opts.count_tol).count(),
            above: values.iter().filter(|&&l| l > alpha + opts.count_tol).count(),
        })
        .collect();
    let dlt = opts.plunge_delta;
    let inside = values.iter().filter(|&&l| l > dlt && l < opts.max_symbol - dlt).count();
    let plunge_fraction = if n > 0 { inside as f64 / n as f64 } else { 0.0 };
    Ok(SpectrumReport {
        eigenvalues: values,
        hermitian,
        non_normal_warning: !hermitian,
        trace,
        eigen_sum,
        counting,
        count_tol: opts.count_tol,
        plunge_delta: dlt,
        plunge_fraction,
        backward_error,
    })
}

/// `∫_{[0,1]^{2d}} a` and `Vol(a < α)` by a midpoint rule with `m` points
/// per axis.
pub fn symbol_targets(symbol: &SymbolFn, d: usize, alphas: &[f64], m: usize) -> (f64, Vec<f64>) {
    let total = m.pow(2 * d as u32) as f64;
    let mut integral = 0.0;
    let mut below = vec![0usize; alphas.len()];
    for p in unit_cube_points(2 * d, m) {
        let v = symbol.eval(&p[..d], &p[d..]).re;
        integral += v;
        for (c, &a) in below.iter_mut().zip(alphas) {
            if v < a {
                *c += 1;
            }
        }
    }
    (integral / total, below.into_iter().map(|c| c as f64 / total).collect())
}

fn default_target_resolution(d: usize) -> usize {
    if d == 1 {
        512
    } else {
        32
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCount {
    pub alpha: f64,
    /// `N^{-d} #{λ < α}`.
    pub count_norm: f64,
    pub target_volume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    /// `N^{-d} Tr R`.
    pub trace_norm: f64,
    pub target_integral: f64,
    pub counts: Vec<SweepCount>,
    pub plunge_fraction: f64,
    pub eig_min: f64,
    pub eig_max: f64,
    pub oversampling_x: usize,
    pub oversampling_xi: usize,
    pub trace_change: f64,
    pub asymmetry: f64,
    /// `2^{-d/2} N^{-3d/2} det(Im Ω)^{-1/2}`, an alternative normalization
    /// constant reported for comparison only.
    pub alt_normalization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub target_integral: f64,
    pub target_volumes: Vec<f64>,
    pub alpha_grid: Vec<f64>,
    pub plunge_delta: f64,
}

/// For each `N`, build `R_N` for the window with `Ω` from `template` and
/// record the normalized trace, counting function and plunge fraction.
pub fn asymptotic_sweep(
    symbol: &SymbolFn,
    n_list: &[usize],
    template: &GaborParams,
    alpha_grid: &[f64],
    opts: &RestrictionOptions,
    plunge_delta: f64,
) -> Result<SweepReport> {
    let d = template.d();
    let (target_integral, target_volumes) = symbol_targets(symbol, d, alpha_grid, default_target_resolution(d));
    let (_, sup) = symbol.range(d);
    let run = |n: usize| -> Result<SweepRow> {
        let params = template.with_n(n)?;
        let r = restriction_matrix(symbol, &params, opts)?;
        let sopts = SpectrumOptions {
            alpha_grid: alpha_grid.to_vec(),
            plunge_delta,
            max_symbol: sup,
            ..SpectrumOptions::default()
        };
        let s = spectrum(&r.matrix, &sopts)?;
        let nd = params.dim() as f64;
        let counts = s
            .counting
            .iter()
            .zip(&target_volumes)
            .map(|(c, &v)| SweepCount { alpha: c.alpha, count_norm: c.below as f64 / nd, target_volume: v })
            .collect();
        let dd = d as f64;
        let alt_normalization = 2f64.powf(-dd / 2.0) * (n as f64).powf(-1.5 * dd) / params.det_im().sqrt();
        Ok(SweepRow {
            n,
            trace_norm: r.trace / nd,
            target_integral,
            counts,
            plunge_fraction: s.plunge_fraction,
            eig_min: s.eigenvalues.first().copied().unwrap_or(0.0),
            eig_max: s.eigenvalues.last().copied().unwrap_or(0.0),
            oversampling_x: r.grid.m_x / n,
            oversampling_xi: r.grid.m_xi,
            trace_change: r.trace_change,
            asymmetry: r.asymmetry,
            alt_normalization,
        })
    };
    let rows = n_list.iter().map(|&n| run(n)).collect::<Result<Vec<_>>>()?;
    Ok(SweepReport { rows, target_integral, target_volumes, alpha_grid: alpha_grid.to_vec(), plunge_delta })
}

/// `∫_{T_N} a(x/N, ξ) ρ(x, ξ) dx dξ` with the Bergman density `ρ`.
pub fn density_trace(symbol: &SymbolFn, params: &GaborParams, grid: &TorusGrid) -> Result<f64> {
    let rho = crate::bargmann::bergman_density(grid, params)?;
    let d = params.d();
    let nf = params.n() as f64;
    let mut x = vec![0.0; d];
    let mut xi = vec![0.0; d];
    let mut acc = 0.0;
    for (p, r) in rho.values.iter().enumerate() {
        grid.point(p, &mut x, &mut xi);
        let u: Vec<f64> = x.iter().map(|v| v / nf).collect();
        acc += symbol.eval(&u, &xi).re * r;
    }
    Ok(acc * grid.weight())
}

/// `Σ_{m,n} conj(ψ_m) M_mn φ_n = ⟨Mφ, ψ⟩`.
pub fn sesquilinear(m: &DMatrix<C64>, phi: &Signal, psi: &Signal) -> C64 {
    let n = m.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        let mut row = C64::new(0.0, 0.0);
        for j in 0..n {
            row += m[(i, j)] * phi.coeffs()[j];
        }
        acc += psi.coeffs()[i].conj() * row;
    }
    acc
}

/// `∫_{C^d/Λ} a(-a', b) Bφ conj(Bψ) e^{-Nφ} dV` in lattice coordinates
/// `z = -iΩa' + ib`; the symbol is pulled back along `z_B = i(Ωx/N + ξ)`.
pub fn toeplitz_form(
    symbol: &SymbolFn,
    phi: &Signal,
    psi: &Signal,
    params: &GaborParams,
    grid: &TorusGrid,
) -> Result<C64> {
    let ev = BargmannEvaluator::new(params)?;
    let d = params.d();
    let nf = params.n() as f64;
    let w = grid.weight() / nf.powi(d as i32) * params.det_im();
    let mut x = vec![0.0; d];
    let mut xi = vec![0.0; d];
    let mut acc = C64::new(0.0, 0.0);
    for p in 0..grid.len() {
        grid.point(p, &mut x, &mut xi);
        let u: Vec<f64> = x.iter().map(|v| v / nf).collect();
        let a = symbol.eval(&u, &xi);
        let neg: Vec<f64> = u.iter().map(|v| -v).collect();
        let z = from_lattice_coords(&neg, &xi, params);
        let vals = ev.all_weighted(&z)?;
        let bphi: C64 = vals.iter().zip(phi.coeffs()).map(|(v, c)| v * c).sum();
        let bpsi: C64 = vals.iter().zip(psi.coeffs()).map(|(v, c)| v * c).sum();
        acc += a * bphi * bpsi.conj();
    }
    Ok(acc * w)
}

/// `sin²(2πx₁) sin²(2πξ₁)` as a trigonometric polynomial.
pub fn sin_squared_product() -> SymbolFn {
    // sin²(2πt) = 1/2 - (e^{4πit} + e^{-4πit})/4
    let f = [(0, 0.5), (2, -0.25), (-2, -0.25)];
    let mut terms = Vec::new();
    for &(p, cp) in &f {
        for &(q, cq) in &f {
            terms.push(TrigTerm { p: vec![p], q: vec![q], coef: C64::new(cp * cq, 0.0) });
        }
    }
    SymbolFn::TrigPoly { d: 1, terms }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_symbol_is_identity() {
        let p = GaborParams::one_dim(2, 0.0, 1.0).unwrap();
        let r = restriction_matrix(&SymbolFn::Constant(1.0), &p, &RestrictionOptions::default()).unwrap();
        let s = spectrum(&r.matrix, &SpectrumOptions { alpha_grid: vec![1.0], ..Default::default() }).unwrap();
        for l in &s.eigenvalues {
            assert!((l - 1.0).abs() < 1e-8, "{l}");
        }
        assert_eq!((s.counting[0].below, s.counting[0].above), (0, 0));
    }

    #[test]
    fn trig_poly_matches_expression() {
        let expr = parse_symbol("sin(6.283185307179586*x1)^2", 1);
        assert!(expr.is_err());
        let expr = parse_symbol(
            "sin(6.283185307179586*x1)*sin(6.283185307179586*x1)*sin(6.283185307179586*xi1)*sin(6.283185307179586*xi1)",
            1,
        )
        .unwrap();
        let tp = sin_squared_product();
        for &(u, xi) in &[(0.1, 0.7), (0.33, 0.25), (0.9, 0.05)] {
            assert!((expr.eval(&[u], &[xi]) - tp.eval(&[u], &[xi])).norm() < 1e-14);
        }
        let (integral, _) = symbol_targets(&tp, 1, &[], 64);
        assert!((integral - 0.25).abs() < 1e-12);
    }

    #[test]
    fn random_hermitian_eigen_sum() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let a = DMatrix::from_fn(8, 8, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let h = &a + a.adjoint();
        let s = spectrum(&h, &SpectrumOptions::default()).unwrap();
        assert!(s.hermitian && !s.non_normal_warning);
        assert!((s.trace - s.eigen_sum).abs() < 1e-12);
        assert!(s.backward_error < 1e-12);
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn non_hermitian_falls_back_to_singular_values() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        );
        let s = spectrum(&m, &SpectrumOptions::default()).unwrap();
        assert!(s.non_normal_warning);
        assert_eq!(s.eigenvalues, vec![0.0, 1.0]);
    }
}
